"""Time the compiled and pure-Python kernels on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]
"""

import argparse
import time

from spreadcode import kernels
from spreadcode.layout import layout_for


def _workloads(quick):
    l21 = layout_for(6, 2)
    l85 = layout_for(8, 2)
    args21 = (list(l21.flat_vectors), l21.n, l21.alpha, l21.B)
    args85 = (list(l85.flat_vectors), l85.n, l85.alpha, l85.B)
    lost = list(l21.node_bases[0])
    pool = [(n, p) for n in range(2, 22) for p in (1, 2)]
    pvecs = [l21.node_bases[n - 1][p - 1] for n, p in pool]
    pnodes = [n for n, _ in pool]
    jobs = [
        ("rho table (6,2), all x", lambda be: be.count_deficient_all(*args21)),
        ("deficient 4-sets (8,2)", lambda be: be.count_deficient(*args85, 4)),
        ("min-download search d=3", lambda be: be.first_feasible_combo(
            pvecs, pnodes, lost, 6, 3, 3, 1 << 20)),
    ]
    if not quick:
        jobs.append(("deficient 5-sets (8,2)", lambda be: be.count_deficient(*args85, 5)))
    return jobs


def _best(fn, backend, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(backend)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the slowest workload")
    args = ap.parse_args(argv)
    backends = kernels.available_backends()
    names = [be.BACKEND for be in backends]
    print("workload," + ",".join(f"{n}_s" for n in names) + ",speedup")
    for label, fn in _workloads(args.quick):
        results = [fn(be) for be in backends]
        if any(r != results[0] for r in results):
            raise SystemExit(f"backends disagree on {label}: {results}")
        times = [_best(fn, be, args.repeat) for be in backends]
        speedup = f"{times[-1] / times[0]:.1f}x" if len(times) > 1 else "-"
        print(f"{label}," + ",".join(f"{t:.4f}" for t in times) + f",{speedup}")


if __name__ == "__main__":
    main()
