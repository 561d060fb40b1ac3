"""Benchmark model families and the experiment harness."""

from .generators import BenchmarkSpec, desk_suite, gen_fischer, gen_jobshop, generate
from .harness import Cell, run_experiment

__all__ = ["BenchmarkSpec", "Cell", "desk_suite", "gen_fischer", "gen_jobshop", "generate", "run_experiment"]
