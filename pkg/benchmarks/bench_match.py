"""Compiled vs numpy grid matching kernel.

    python3 benchmarks/bench_match.py [--step 0.02] [--repeat 3]

Builds the overlap tables of one (left equator) x (right torus) chart against
the pair P0, runs both kernels on them and checks the hit lists are identical.
"""
import argparse
import statistics
import sys
import time

import numpy as np

from mupb import kernel
from mupb.catalog import PairSpec, mu_pair
from mupb.extension import _chart, _grid, _left_frames, _right_frames
from mupb.linalg import to_float


def tables(step):
    target = [b.to_float() for b in mu_pair(PairSpec("P0"))]
    states = [s for b in target for s in b]
    tl = np.array([to_float(s.left) for s in states])
    tr = np.array([to_float(s.right) for s in states])
    t = _grid(step)
    xi, eta = np.meshgrid(t, t, indexing="ij")
    lv = _chart(_left_frames(target[0])[0], t[:, None])
    rv = _chart(np.asarray(_right_frames(target[0])[0], dtype=complex), np.stack([xi.ravel(), eta.ravel()], axis=1))
    L = np.ascontiguousarray(np.abs(lv.conj() @ tl.T) ** 2)
    R = np.ascontiguousarray(np.abs(rv.conj() @ tr.T) ** 2)
    return L, R, 1 / 6, t[1] - t[0]


def clock(fn, repeat):
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return out, statistics.median(times)


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--step", type=float, default=0.02)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if kernel.compiled_match is None:
        print("compiled kernel not built; run `python3 setup.py build_ext --inplace`")
        return 1
    L, R, target, tau = tables(args.step)
    print(f"tables: {L.shape[0]} left x {R.shape[0]} right points, {L.shape[1]} target states")
    py, t_py = clock(lambda: kernel.python_match(L, R, target, tau, 200_000), args.repeat)
    cy, t_cy = clock(lambda: kernel.compiled_match(L, R, target, tau, 200_000), args.repeat)
    same = all(np.array_equal(a, b) for a, b in zip(py[:3], cy[:3])) and py[3] == cy[3]
    print(f"python : {t_py:8.3f} s  ({len(py[0])} hits)")
    print(f"cython : {t_cy:8.3f} s  ({len(cy[0])} hits)")
    print(f"speedup: {t_py / t_cy:8.1f}x")
    print(f"identical hits: {same}")
    return 0 if same else 1


if __name__ == "__main__":
    sys.exit(main())
