"""Deterministic generators for the Fischer and job-shop model families.

Fischer ``k``: process ``i`` owns clocks ``x_i`` (reset when it starts a
request) and ``y_i`` (reset when it writes ``id``). Instead of an invariant
bounding the request phase, entry to the critical section checks the diagonal
``x_i - y_i <= a``: the write happened at most ``a`` after the request began.
It then needs ``y_i > b``. The protocol is safe when ``a < b``.

Job shop ``k``: each job runs two tasks on two machines, measuring task
durations with clock pairs and finishing through one of two dependency
branches expressed by diagonals, all under a deadline on clock ``z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations


@dataclass(frozen=True)
class BenchmarkSpec:
    family: str  # "fischer" or "jobshop"
    size: int
    params: tuple[tuple[str, int], ...] = field(default=())

    def __post_init__(self):
        if self.family not in ("fischer", "jobshop"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.size < 1:
            raise ValueError("size must be at least 1")
        for name, v in self.params:
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"parameter {name} must be a natural number")

    @property
    def name(self) -> str:
        base = "Fischer" if self.family == "fischer" else "Job Shop"
        return f"{base} {self.size}"

    def param(self, name: str, default: int) -> int:
        return dict(self.params).get(name, default)


FISCHER_A = 2
FISCHER_B = 3


def gen_fischer(k: int, a: int = FISCHER_A, b: int = FISCHER_B) -> str:
    if k < 2:
        raise ValueError("mutual exclusion needs at least two processes")
    if a < 0 or b < 0:
        raise ValueError("delays must be natural numbers")
    lines = [f"system fischer_{k}"]
    for i in range(1, k + 1):
        lines.append(f"clock x{i}, y{i}")
    lines.append(f"int id 0..{k} = 0")
    for i in range(1, k + 1):
        lines += [
            f"process P{i}",
            "state idle {initial}",
            "state req",
            "state wait",
            "state cs",
            f"trans idle -> req when id == 0 do x{i} = 0",
            f"trans req -> wait do y{i} = 0; id = {i}",
            f"trans wait -> cs when id == {i} && y{i} > {b} && x{i} - y{i} <= {a}",
            f"trans wait -> idle when id != {i}",
            "trans cs -> idle do id = 0",
        ]
    for i, j in combinations(range(1, k + 1), 2):
        lines.append(f"target P{i}.cs P{j}.cs")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class JobParams:
    a1: int
    b1: int
    a2: int
    b2: int
    c1: int
    c2: int
    d1: int
    d2: int
    deadline: int

    def check(self) -> None:
        if self.a1 > self.b1 or self.a2 > self.b2:
            raise ValueError("task intervals must be non-empty")
        if min(vars(self).values()) < 0:
            raise ValueError("job constants must be natural numbers")


def default_job(i: int, k: int) -> JobParams:
    """Job ``i`` of ``k``: staggered task lengths, deadline leaving room to queue."""
    a1 = 1 + i % 2
    a2 = 1 + (i + 1) % 2
    return JobParams(a1=a1, b1=a1 + 2, a2=a2, b2=a2 + 2,
                     c1=a1 + 1, c2=a2 + 1, d1=a1, d2=a2 + 2,
                     deadline=4 * k + 4)


def gen_jobshop(k: int, jobs: list[JobParams] | None = None, machines: int = 2) -> str:
    if k < 1:
        raise ValueError("need at least one job")
    if machines < 1:
        raise ValueError("need at least one machine")
    jobs = jobs or [default_job(i, k) for i in range(1, k + 1)]
    if len(jobs) != k:
        raise ValueError("one parameter set per job")
    lines = [f"system jobshop_{k}"]
    for i in range(1, k + 1):
        lines.append(f"clock x1_{i}, y1_{i}, x2_{i}, y2_{i}, z{i}")
    for m in range(machines):
        lines.append(f"int m{m} 0..1 = 0")
    for i, p in enumerate(jobs, start=1):
        p.check()
        ma, mb = (i - 1) % machines, i % machines
        lines += [
            f"process J{i}",
            "state s1 {initial}",
            "state t1",
            "state s2",
            "state t2",
            "state c {committed}",
            "state f {accepting}",
            f"trans s1 -> t1 when m{ma} == 0 do x1_{i} = 0; z{i} = 0; m{ma} = 1",
            f"trans t1 -> s2 when {p.a1} <= x1_{i} && x1_{i} <= {p.b1} do y1_{i} = 0; m{ma} = 0",
            f"trans s2 -> t2 when m{mb} == 0 do x2_{i} = 0; m{mb} = 1",
            f"trans t2 -> c when {p.a2} <= x2_{i} && x2_{i} <= {p.b2} do y2_{i} = 0; m{mb} = 0",
            f"trans c -> f when x1_{i} - y1_{i} >= {p.c1} && x2_{i} - y2_{i} <= {p.c2} && z{i} <= {p.deadline}",
            f"trans c -> f when x1_{i} - y1_{i} <= {p.d1} && x2_{i} - y2_{i} >= {p.d2} && z{i} <= {p.deadline}",
        ]
    return "\n".join(lines) + "\n"


def generate(spec: BenchmarkSpec) -> str:
    if spec.family == "fischer":
        return gen_fischer(spec.size, spec.param("a", FISCHER_A), spec.param("b", FISCHER_B))
    args = {n: v for n, v in spec.params if n in ("machines",)}
    return gen_jobshop(spec.size, **args)


def desk_suite(big: bool = False) -> list[BenchmarkSpec]:
    fischer = range(2, 8 if big else 6)
    jobs = range(1, 6 if big else 4)
    return ([BenchmarkSpec("fischer", k) for k in fischer]
            + [BenchmarkSpec("jobshop", k) for k in jobs])
