"""Benchmark the alignment DP kernels: numba JIT vs vectorized numpy.

The kernel is selected per call through the EDITKIT_KERNEL environment
variable, so both paths run in one process. The numba timing excludes the
one-off JIT compile (a warmup call pays it).

Usage: python3 benchmarks/bench_align.py [--lengths 10,40,160] [--pairs 200]
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from editkit import _kernels
from editkit.gec_align import align


def make_pairs(n_pairs: int, length: int, rng: random.Random):
    vocab = [f"tok{i}" for i in range(50)]
    pairs = []
    for _ in range(n_pairs):
        src = [rng.choice(vocab) for _ in range(length)]
        hyp = []
        for tok in src:
            r = rng.random()
            if r < 0.04:
                continue  # deletion
            if r < 0.08:
                hyp.append(rng.choice(vocab))  # substitution
            else:
                hyp.append(tok)
            if r > 0.96:
                hyp.append(rng.choice(vocab))  # insertion
        pairs.append((src, hyp))
    return pairs


def bench(kernel: str, pairs, repeat: int) -> float:
    os.environ["EDITKIT_KERNEL"] = kernel
    align(*pairs[0])  # warmup; pays the JIT compile for numba
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for src, hyp in pairs:
            align(src, hyp)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lengths", default="10,40,160",
                        help="comma-separated sequence lengths")
    parser.add_argument("--pairs", type=int, default=200,
                        help="alignment pairs per length")
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions (best is kept)")
    parser.add_argument("--seed", type=int, default=99)
    args = parser.parse_args()

    lengths = [int(x) for x in args.lengths.split(",")]
    rng = random.Random(args.seed)

    os.environ["EDITKIT_KERNEL"] = "numba"
    try:
        _kernels.active_kernel()
        have_numba = True
    except Exception:
        have_numba = False
        print("numba unavailable; benchmarking the numpy kernel only\n")

    header = f"{'length':>7} {'pairs':>6} {'numpy [s]':>10}"
    if have_numba:
        header += f" {'numba [s]':>10} {'speedup':>8}"
    print(header)
    for length in lengths:
        pairs = make_pairs(args.pairs, length, rng)
        t_np = bench("numpy", pairs, args.repeat)
        line = f"{length:>7} {len(pairs):>6} {t_np:>10.4f}"
        if have_numba:
            t_nb = bench("numba", pairs, args.repeat)
            line += f" {t_nb:>10.4f} {t_np / t_nb:>7.1f}x"
        print(line)
    os.environ.pop("EDITKIT_KERNEL", None)


if __name__ == "__main__":
    main()
