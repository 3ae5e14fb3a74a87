import subprocess
import sys

from conftest import toy_config, write_config_file


def run_cli(*args):
    return subprocess.run([sys.executable, "-m", "gensmith", *args],
                          capture_output=True, text=True)


def test_simulate_and_report_commands(tmp_path):
    config = toy_config(tmp_path)
    config_path = write_config_file(config, tmp_path / "campaign.yaml")
    sim = run_cli("simulate", "--config", str(config_path))
    assert sim.returncode == 0, sim.stderr
    assert "campaign report" in sim.stdout
    assert "edges found: 30" in sim.stdout

    rep = run_cli("report", "--state", config.state_dir)
    assert rep.returncode == 0, rep.stderr
    assert rep.stdout == sim.stdout


def test_simulate_seed_override(tmp_path):
    config = toy_config(tmp_path / "a", seed=1)
    path = write_config_file(config, tmp_path / "campaign_a.yaml")
    out = run_cli("simulate", "--config", str(path), "--seed", "99")
    assert out.returncode == 0, out.stderr


def test_pregenerate_command(tmp_path):
    config = toy_config(tmp_path)
    config_path = write_config_file(config, tmp_path / "campaign.yaml")
    out_dir = tmp_path / "archive"
    pre = run_cli("pregenerate", "--config", str(config_path), "--out", str(out_dir))
    assert pre.returncode == 0, pre.stderr
    assert (out_dir / "state.json").exists()
    assert list((out_dir / "scripts").glob("*.py"))
    assert list((out_dir / "seeds").iterdir())


def test_bad_config_is_a_clean_error(tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("formats: []\nstate_dir: s\n")
    out = run_cli("simulate", "--config", str(bad))
    assert out.returncode == 2
