"""Command-line entry points.

    gensmith run --config campaign.yaml
    gensmith pregenerate --config campaign.yaml --out archive_dir
    gensmith simulate --config campaign.yaml --seed 7
    gensmith report --state state_dir
"""

from __future__ import annotations

import argparse
import logging
import sys

from gensmith.campaign import Campaign, load_report
from gensmith.config import CampaignConfig
from gensmith.errors import GensmithError

logger = logging.getLogger(__name__)


def _load_config(path: str, mode: str | None = None) -> CampaignConfig:
    config = CampaignConfig.from_file(path)
    if mode is not None:
        config.mode = mode
        config.validate()
    return config


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gensmith",
                                     description="LLM-synthesized input generators for greybox fuzzing")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a live campaign against an external fuzzer")
    p_run.add_argument("--config", required=True)

    p_pre = sub.add_parser("pregenerate", help="build a portable seed archive offline")
    p_pre.add_argument("--config", required=True)
    p_pre.add_argument("--out", required=True, help="archive directory (becomes the state dir)")

    p_sim = sub.add_parser("simulate", help="run a campaign against the built-in simulated fuzzer")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--seed", type=int, default=None, help="override the campaign RNG seed")

    p_rep = sub.add_parser("report", help="render the report for a campaign state directory")
    p_rep.add_argument("--state", required=True)

    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            config = _load_config(args.config, mode="live")
            report = Campaign(config).run()
        elif args.command == "pregenerate":
            config = _load_config(args.config, mode="offline_pregenerate")
            config.state_dir = args.out
            config.validate()
            report = Campaign(config).run()
        elif args.command == "simulate":
            config = _load_config(args.config, mode="simulate")
            if args.seed is not None:
                config.seed = args.seed
            report = Campaign(config).run()
        else:
            report = load_report(args.state)
        sys.stdout.write(report.render_text())
        return 0
    except GensmithError as exc:
        logger.error("%s", exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
