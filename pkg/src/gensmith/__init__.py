"""Greybox fuzzing augmented with LLM-synthesized input generators.

The package orchestrates a hybrid loop: an LLM synthesizes and mutates small
scripts that generate structured files of a target format, a sandbox runs
them to harvest seeds, and a mutation-based fuzzer (external, or the built-in
simulator) explores the input space around those seeds. When the fuzzer
stalls, the orchestrator mutates generators to escape the plateau.
"""

__version__ = "0.1.0"
