"""Timing comparison of the compiled and pure-Python kernel backends.

Run as a script:

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1000000]

Each kernel is timed on identical inputs under both backends; results are
checked for equality before timings are reported, so a speedup is never
quoted for mismatched outputs.
"""

import argparse
import time

import numpy as np

from normtransport import _kernels


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def _row(name, t_py, t_nat):
    speedup = t_py / t_nat if t_nat > 0 else float("inf")
    print(
        "%-18s python %9.4f ms   native %9.4f ms   speedup %6.1fx"
        % (name, t_py * 1e3, t_nat * 1e3, speedup)
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=int, default=1_000_000)
    args = ap.parse_args()

    if "native" not in _kernels.available_backends():
        print("native backend not built; nothing to compare")
        return 1
    py = _kernels.get_backend("python")
    nat = _kernels.get_backend("native")
    rng = np.random.default_rng(2026)
    n = args.scale

    cum = np.cumsum(rng.dirichlet(np.ones(4)))
    u = rng.random(n)
    jobs = [("categorical_draws", (cum, u))]

    K = rng.dirichlet(np.ones(3), size=3)
    cum_rows = np.ascontiguousarray(np.cumsum(K, axis=1))
    jobs.append(("chain_walk", (cum_rows, 0, rng.random(n))))

    cw_flat = np.array([0, 1, 0, 0, 1, 1, 0], dtype=np.int64)
    cw_off = np.array([0, 2, 5], dtype=np.int64)
    cw_len = np.array([2, 3, 2], dtype=np.int64)
    path3 = rng.integers(0, 3, size=n).astype(np.int64)
    jobs.append(("encode_ids", (path3, cw_flat, cw_off, cw_len)))

    path2 = rng.integers(0, 2, size=n).astype(np.int64)
    word = np.array([0, 1, 0], dtype=np.int64)
    jobs.append(("find_word", (path2, word)))
    jobs.append(("count_word", (path2, word, 10, n - 20)))

    for name, job_args in jobs:
        t_py, out_py = _time(getattr(py, name), job_args, args.repeat)
        t_nat, out_nat = _time(getattr(nat, name), job_args, args.repeat)
        if isinstance(out_py, np.ndarray):
            same = np.array_equal(out_py, out_nat)
        else:
            same = out_py == out_nat
        if not same:
            print("%-18s OUTPUT MISMATCH between backends" % name)
            return 1
        _row(name, t_py, t_nat)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
