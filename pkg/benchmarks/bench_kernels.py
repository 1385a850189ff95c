"""Compare the compiled and pure-Python exact kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times fraction-free Gaussian elimination (``solve_square``), a run of tableau
pivots, and a batch of full LP solves with each backend.  The LP batch is
solved in a subprocess per backend because the backend is chosen at import.
"""
import argparse
import os
import random
import subprocess
import sys
import time

from commitpay import _kernels_py

try:
    from commitpay import _kernels_cy
except ImportError:
    _kernels_cy = None


def square_systems(count, size, seed):
    rng = random.Random(seed)
    return [([[rng.randint(-9, 9) for _ in range(size)] for _ in range(size)],
             [rng.randint(-9, 9) for _ in range(size)]) for _ in range(count)]


def tableau(rows, cols, seed):
    rng = random.Random(seed)
    return [[rng.randint(1, 9) for _ in range(cols)] for _ in range(rows)]


def time_solve(mod, systems):
    t = time.perf_counter()
    for M, b in systems:
        mod.solve_square([row[:] for row in M], b[:])
    return time.perf_counter() - t


def time_pivots(mod, rows, cols, count, seed):
    T = tableau(rows, cols, seed)
    det = 1
    t = time.perf_counter()
    for k in range(count):
        r, q = k % rows, k % (cols - 1)
        if T[r][q] == 0:
            T[r][q] = 1
        det = mod.pivot(T, r, q, det)
        # keep entries from growing without bound between rounds
        if k % rows == rows - 1:
            T = tableau(rows, cols, seed + k)
            det = 1
    return time.perf_counter() - t


LP_SNIPPET = r"""
import random, time
from fractions import Fraction
from commitpay import BACKEND
from commitpay.lp import LpBuilder, LE, solve_lp
rng = random.Random(1)
lps = []
for _ in range(__COUNT__):
    b = LpBuilder()
    xs = [b.var(f"x{i}") for i in range(6)]
    b.maximize({x: rng.randint(-5, 9) for x in xs})
    for j in range(10):
        b.add({x: rng.randint(-3, 9) for x in xs}, LE, rng.randint(1, 20), f"c{j}")
    lps.append(b.build())
t = time.perf_counter()
for lp in lps:
    solve_lp(lp)
print(BACKEND, time.perf_counter() - t)
"""


def time_lps(pure, count):
    env = dict(os.environ)
    if pure:
        env["COMMITPAY_PURE_PYTHON"] = "1"
    else:
        env.pop("COMMITPAY_PURE_PYTHON", None)
    out = subprocess.run([sys.executable, "-c", LP_SNIPPET.replace("__COUNT__", str(count))],
                         env=env, capture_output=True, text=True, check=True).stdout.split()
    return out[0], float(out[1])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--lps", type=int, default=200)
    args = ap.parse_args()
    systems = square_systems(400, 7, 0)
    mods = [("python", _kernels_py)]
    if _kernels_cy is not None:
        mods.append(("compiled", _kernels_cy))
    else:
        print("compiled kernel not built; showing the python backend only")
    print(f"{'kernel':<22}{'backend':<10}{'best of ' + str(args.repeat):>12}")
    results = {}
    for name, mod in mods:
        s = min(time_solve(mod, systems) for _ in range(args.repeat))
        p = min(time_pivots(mod, 12, 20, 3000, 5) for _ in range(args.repeat))
        results[name] = (s, p)
        print(f"{'solve_square 7x7 x400':<22}{name:<10}{s:>11.4f}s")
        print(f"{'pivot 12x20 x3000':<22}{name:<10}{p:>11.4f}s")
    for pure in (True, False):
        backend, secs = time_lps(pure, args.lps)
        print(f"{'lp solve x' + str(args.lps):<22}{backend:<10}{secs:>11.4f}s")
    if len(results) == 2:
        (s0, p0), (s1, p1) = results["python"], results["compiled"]
        print(f"speedup: solve_square {s0 / s1:.2f}x, pivot {p0 / p1:.2f}x")


if __name__ == "__main__":
    main()
