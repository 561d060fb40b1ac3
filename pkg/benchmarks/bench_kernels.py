"""Compare the numba and pure-numpy DBM kernels on random canonical zones.

Usage: python3 benchmarks/bench_kernels.py [--dims 3,5,9] [--reps 2000]
Also times one end-to-end search per backend in a subprocess, since the
backend is chosen once at import time (TADIAG_NUMBA=0 selects numpy).
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time

import numpy as np

from tadiag import kernels
from tadiag._bounds import LU_NEG, encode
from tadiag.dbm import elapse, from_constraints, unconstrained
from tadiag.model import Constraint


def random_zone(rng: random.Random, n: int):
    while True:
        cons = []
        for _ in range(2 * n):
            x = rng.randint(1, n)
            c = rng.randint(0, 8)
            if n >= 2 and rng.random() < 0.4:
                y = rng.choice([k for k in range(1, n + 1) if k != x])
                cons.append(Constraint(x, y, rng.random() < 0.5, rng.randint(-8, 8)))
            elif rng.random() < 0.5:
                cons.append(Constraint(x, 0, rng.random() < 0.5, c))
            else:
                cons.append(Constraint(0, x, rng.random() < 0.5, -c))
        z = from_constraints(n, cons)
        if z is not None:
            return elapse(z) if rng.random() < 0.5 else z


def _time(fn, reps: int) -> float:
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps * 1e6


def bench_dim(impls, n: int, reps: int, rng: random.Random) -> dict[str, dict[str, float]]:
    zones = [random_zone(rng, n) for _ in range(64)]
    lo = np.array([LU_NEG] + [rng.randint(0, 8) for _ in range(n)], dtype=np.int64)
    hi = np.array([LU_NEG] + [rng.randint(0, 8) for _ in range(n)], dtype=np.int64)
    loose = unconstrained(n).copy_array()
    out = {}
    for name, k in impls.items():
        k.close(loose.copy())  # compile outside the timed region
        k.alu_le(zones[0].m, zones[1].m, lo, hi)
        it = iter(range(10 ** 9))

        def pair():
            i = next(it)
            return zones[i % 64], zones[(i * 7 + 1) % 64]

        out[name] = {
            "close": _time(lambda: k.close(pair()[0].copy_array()), reps),
            "tighten": _time(lambda: k.tighten(pair()[0].copy_array(), 1, 0, encode(False, 2)), reps),
            "is_le": _time(lambda: k.is_le(*(z.m for z in pair())), reps),
            "alu_le": _time(lambda: k.alu_le(*(z.m for z in pair()), lo, hi), reps),
        }
    return out


SEARCH = ("from tadiag.bench.generators import gen_fischer; from tadiag.parser import parse_model; "
          "from tadiag.reach import reach_static; import time; a = parse_model(gen_fischer({k})); "
          "reach_static(parse_model(gen_fischer(2))); t = time.perf_counter(); r = reach_static(a); "
          "print(f'{{(time.perf_counter() - t) * 1000:.1f}} {{r.stats.nodes_created}}')")


def bench_search(k: int) -> dict[str, str]:
    out = {}
    for name, flag in (("numba", "1"), ("numpy", "0")):
        env = dict(os.environ, TADIAG_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", SEARCH.format(k=k)], env=env, capture_output=True, text=True)
        out[name] = res.stdout.strip() or res.stderr.strip().splitlines()[-1]
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", default="3,5,9", help="comma-separated clock counts")
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--fischer", type=int, default=4, help="Fischer size for the end-to-end run (0 to skip)")
    args = ap.parse_args(argv)
    impls = kernels.implementations()
    if "numba" not in impls:
        print("numba is not installed; only the numpy kernels are timed")
    rng = random.Random(0)
    print(f"{'clocks':>6}  {'kernel':<8}" + "".join(f"{name + ' us':>12}" for name in impls)
          + ("   speedup" if len(impls) > 1 else ""))
    for n in (int(d) for d in args.dims.split(",")):
        res = bench_dim(impls, n, args.reps, rng)
        for kernel in ("close", "tighten", "is_le", "alu_le"):
            cols = "".join(f"{res[name][kernel]:>12.2f}" for name in impls)
            extra = f"{res['numpy'][kernel] / res['numba'][kernel]:>9.1f}x" if len(impls) > 1 else ""
            print(f"{n:>6}  {kernel:<8}{cols}{extra}")
    if args.fischer:
        print(f"\nstatic search on Fischer {args.fischer} (ms, nodes):")
        for name, line in bench_search(args.fischer).items():
            print(f"  {name:<6} {line}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
