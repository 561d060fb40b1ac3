"""Run (model, algorithm) cells and tabulate verdicts, node counts and times."""

from __future__ import annotations

import csv
import os
import time
from dataclasses import asdict, dataclass
from typing import Callable, Iterable

from ..diagfree import check_via_diagfree
from ..model import Automaton
from ..parser import parse_model
from ..reach import Limits, ReachResult, Verdict, reach_dynamic, reach_static
from .generators import BenchmarkSpec, generate

ALGORITHMS: dict[str, Callable[..., ReachResult]] = {
    "static-g": reach_static,
    "dynamic-g": reach_dynamic,
    "diagfree-lu": check_via_diagfree,
}

CSV_COLUMNS = ["model", "diagonals", "algorithm", "verdict", "nodes", "covered", "time_ms", "timeout_s"]
TIMEOUT_ENV = "TADIAG_TIMEOUT"
DEFAULT_TIMEOUT_S = 60.0


def default_timeout() -> float:
    raw = os.environ.get(TIMEOUT_ENV)
    return float(raw) if raw else DEFAULT_TIMEOUT_S


@dataclass
class Cell:
    model: str
    diagonals: int
    algorithm: str
    verdict: str
    nodes: int
    covered: int
    time_ms: float
    timeout_s: float


def run_cell(name: str, a: Automaton, algorithm: str, timeout_s: float, order: str = "bfs") -> Cell:
    engine = ALGORITHMS[algorithm]
    t0 = time.perf_counter()
    res = engine(a, order=order, limits=Limits(timeout_s=timeout_s))
    ms = (time.perf_counter() - t0) * 1000
    verdict = "timeout" if res.verdict is Verdict.INCONCLUSIVE else res.verdict.value
    return Cell(name, len(a.diagonals), algorithm, verdict, res.stats.nodes_stored,
                res.stats.nodes_covered, round(ms, 3), timeout_s)


def run_experiment(models: Iterable[BenchmarkSpec | tuple[str, str]],
                   algorithms: Iterable[str] = tuple(ALGORITHMS),
                   timeout_s: float | None = None, order: str = "bfs") -> list[Cell]:
    """One cell per (model, algorithm); a cell that runs out of time is recorded and the run goes on."""
    timeout_s = default_timeout() if timeout_s is None else timeout_s
    algorithms = list(algorithms)
    cells = []
    for m in models:
        if isinstance(m, BenchmarkSpec):
            name, text = m.name, generate(m)
        else:
            name, text = m
        a = parse_model(text)
        for alg in algorithms:
            cells.append(run_cell(name, a, alg, timeout_s, order))
    return cells


def format_table(cells: list[Cell]) -> str:
    rows = [CSV_COLUMNS] + [[str(v) for v in asdict(c).values()] for c in cells]
    widths = [max(len(r[i]) for r in rows) for i in range(len(CSV_COLUMNS))]
    out = []
    for k, r in enumerate(rows):
        out.append("  ".join(v.ljust(w) if i < 4 else v.rjust(w) for i, (v, w) in enumerate(zip(r, widths))))
        if k == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out) + "\n"


def write_csv(cells: list[Cell], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        w.writeheader()
        for c in cells:
            w.writerow(asdict(c))
