"""Time the numba kernels against the pure-numpy path on the same inputs.

    python benchmarks/bench_kernels.py [--trials 200000] [--tree 32] [--n 512] [--d 8]

Both paths consume identical pre-drawn choices, so the script also checks
that their outputs agree exactly.
"""

import argparse
import time

import numpy as np

from hyperuniverse import _kernels
from hyperuniverse.branchwalk import _layout, draw_choices
from hyperuniverse.expander import gen_regular
from hyperuniverse.generators import random_tree
from hyperuniverse.rng import stream


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--trials", type=int, default=200_000)
    p.add_argument("--tree", type=int, default=32)
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()

    T = random_tree(args.tree, seed=1)
    G = gen_regular(args.n, args.d, seed=1)
    _, _, parent_pos = _layout(T)
    adj = G.adjacency_array()
    choices = draw_choices(stream(1, 99), args.trials, T.n, G.n, args.d)
    mask = np.zeros(T.n, dtype=np.bool_)
    mask[: T.n // 2] = True

    print(f"numba available: {_kernels.NUMBA_AVAILABLE}; active backend: {_kernels.backend()}")
    print(f"trials={args.trials} |T|={T.n} n={G.n} d={args.d}")
    pairs = [
        ("walk_images", _kernels.walk_images_np, _kernels.walk_images_nb, (choices, parent_pos, adj)),
        ("hit_histogram", _kernels.hit_histogram_np, _kernels.hit_histogram_nb, (choices, parent_pos, adj, mask, 0)),
    ]
    for name, f_np, f_nb, call in pairs:
        f_nb(choices[:10], *call[1:])  # trigger compilation outside the timing
        t_np, out_np = best_of(lambda: f_np(*call), args.repeat)
        t_nb, out_nb = best_of(lambda: f_nb(*call), args.repeat)
        same = np.array_equal(out_np, out_nb)
        print(f"{name:14s} numpy {t_np * 1e3:9.2f} ms  numba {t_nb * 1e3:9.2f} ms  speedup {t_np / t_nb:6.2f}x  equal={same}")


if __name__ == "__main__":
    main()
