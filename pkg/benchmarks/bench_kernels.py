"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N] [--seed S]
"""

import argparse
import random
import timeit

from morsecx._kernels import _pure

try:
    from morsecx._kernels import _speedups
except ImportError:
    _speedups = None


def workloads(seed):
    rng = random.Random(seed)
    perms = []
    for n in (100, 1000, 10000):
        p = list(range(n))
        rng.shuffle(p)
        perms.append((f"perm_cycles n={n}", "perm_cycles", (p,)))
    mats = []
    for n in (10, 30, 60):
        A = [[rng.choice((-1, 0, 0, 0, 1)) for _ in range(n)] for _ in range(n)]
        mats.append((f"smith_form {n}x{n} with U, V", "smith_form", (A,)))
        mats.append((f"smith_form {n}x{n} diagonal only", "smith_form", (A, False)))
    # boundary matrix of the order complex used for the largest built complex
    from morsecx.cells import build_complex
    from morsecx.topology import order_complex
    sc = order_complex(build_complex(1, 3, 2))
    mats.append(("smith_form K_{1,3,2} d2 diagonal only", "smith_form",
                 (sc.boundary_matrix(2), False)))
    return perms + mats


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    if _speedups is None:
        print("compiled extension not available; only the pure backend would run")
        return
    print(f"{'workload':40s} {'pure ms':>10s} {'compiled ms':>12s} {'speedup':>8s}")
    for label, name, fargs in workloads(args.seed):
        times = []
        for mod in (_pure, _speedups):
            fn = getattr(mod, name)
            try:
                best = min(timeit.repeat(lambda: fn(*fargs), number=1, repeat=args.repeat))
            except OverflowError:
                # the dispatcher retries such inputs with the pure kernel
                times.append(None)
                continue
            times.append(best * 1000)
        if times[1] is None:
            print(f"{label:40s} {times[0]:10.2f} {'overflow':>12s} {'-':>8s}")
        else:
            print(f"{label:40s} {times[0]:10.2f} {times[1]:12.2f} {times[0] / times[1]:8.1f}x")


if __name__ == "__main__":
    main()
