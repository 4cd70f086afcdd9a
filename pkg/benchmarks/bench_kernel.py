"""Compiled vs pure-Python sweep kernel.

    python benchmarks/bench_kernel.py [--repeat N] [--qmax Q] [--gwindow G]

Each workload renders the fixed-point contributions of a catalog entry
under both kernels, checks that the results are identical and reports
the best wall time of ``--repeat`` runs.
"""

from __future__ import annotations

import argparse
import timeit

from eqindex import catalog, ring
from eqindex.localization import point_contribution
from eqindex.ring import FactorList, Factor, Region, render

WORKLOADS = [
    ("S2-w1", "dirac-theta-q"),
    ("S6-w111", "signature-theta-prime"),
    ("CP3-V2", "dirac-R2"),
    ("CP3", "dirac-theta-star"),
]


def contributions(name: str, op: str, q_max) -> list[FactorList]:
    return [point_contribution(c, op, q_max) for c in catalog.get(name).components]


def run(fls, q_max, G):
    return [render(fl, r, q_max, G) for fl in fls for r in Region]


def best_of(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench(label: str, fls, q_max, G, repeat: int) -> None:
    old = ring.set_kernel("python")
    try:
        slow = run(fls, q_max, G)
        t_py = best_of(lambda: run(fls, q_max, G), repeat)
    finally:
        ring.set_kernel(old)
    fast = run(fls, q_max, G)
    t_c = best_of(lambda: run(fls, q_max, G), repeat)
    same = all(a == b for a, b in zip(slow, fast))
    print(f"{label:<36} {t_py * 1e3:>10.1f} {t_c * 1e3:>10.1f} {t_py / t_c:>8.1f}x  {'ok' if same else 'MISMATCH'}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--qmax", type=int, default=3)
    ap.add_argument("--gwindow", type=int, default=40)
    args = ap.parse_args()
    if not ring.compiled_available():
        raise SystemExit("compiled kernel is not built; run `pip install -e . --no-build-isolation` first")
    print(f"q_max={args.qmax} g_window={args.gwindow} repeat={args.repeat}")
    print(f"{'workload':<36} {'python ms':>10} {'compiled ms':>10} {'speedup':>9}")
    for name, op in WORKLOADS:
        bench(f"{name} {op}", contributions(name, op, args.qmax), args.qmax, args.gwindow, args.repeat)
    # a dense two-variable geometric series: the sweep dominates
    dense = [FactorList.of(*(Factor(a, w, -2) for a in range(4) for w in (1, 2)))]
    bench("dense 1/prod (1 - q^a g^w)^2", dense, args.qmax, args.gwindow, args.repeat)


if __name__ == "__main__":
    main()
