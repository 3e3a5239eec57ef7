"""Numba kernels vs their numpy twins on coboundary matrices of real complexes.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

Each pair is run on identical inputs and the outputs are compared before any
timing is reported.  ``--end-to-end`` also times a full rank computation in
two subprocesses, one with HOMCUP_NO_NUMBA=1.
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from homcup import linalg
from homcup._accel import HAVE_NUMBA
from homcup.complexes import CubicalComplex, Sheaf, coboundary_matrix
from homcup.gfield import field_make
from homcup.graphs import complete_graph


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    K3, K4 = complete_graph(3), complete_graph(4)
    F4 = field_make(2)
    yield "toric t=3 delta^1 (GF2)", coboundary_matrix(CubicalComplex(K3, 3), Sheaf.trivial(3, 2), 1)
    yield "K4 t=2 l=5 delta^0 (GF2)", coboundary_matrix(
        CubicalComplex(K4, 2, 5, seed=0), Sheaf.single([np.array([[1, 1, 0], [0, 1, 1]])] * 2), 0)
    yield "K4 t=2 delta^0 (GF4)", coboundary_matrix(
        CubicalComplex(K4, 2, 3, seed=0), Sheaf.single([np.array([[1, 1, 1], [0, 1, 2]])] * 2, F4), 0)


def bench_spmv(M, repeat):
    rng = np.random.default_rng(0)
    x = rng.integers(0, M.field.q, size=M.shape[1])
    out = np.zeros(M.shape[0], dtype=np.int64)
    if M.field.s == 1:
        def fast():
            out[:] = 0
            linalg._spmv_gf2_kernel(M.indptr, M.indices, x, out)
            return out.copy()
    else:
        def fast():
            out[:] = 0
            linalg._spmv_gfq_kernel(M.indptr, M.indices, M.data, x, M.field.exp_table,
                                    M.field.log_table, out)
            return out.copy()
    fast()  # compile
    tn, a = best_of(fast, repeat)
    tp, b = best_of(lambda: linalg.spmv_numpy(M, x), repeat)
    assert np.array_equal(a, b), "spmv backends disagree"
    return tn, tp


def bench_rref(M, repeat):
    A = M.to_dense()
    F = M.field
    r, c = A.shape
    if F.s == 1:
        P0 = linalg._pack_bits(A & 1)

        def fast():
            P, piv = P0.copy(), np.zeros(min(r, c) + 1, dtype=np.int64)
            return linalg._gf2_rref_kernel(P, c, piv), P

        def slow():
            P, piv = P0.copy(), np.zeros(min(r, c) + 1, dtype=np.int64)
            return linalg._gf2_rref_numpy(P, c, piv), P
    else:
        def fast():
            B, piv = A.copy(), np.zeros(min(r, c) + 1, dtype=np.int64)
            return linalg._gfq_rref_kernel(B, c, F.exp_table, F.log_table, F.q - 1, piv), B

        def slow():
            B, piv = A.copy(), np.zeros(min(r, c) + 1, dtype=np.int64)
            return linalg._gfq_rref_numpy(B, c, F, piv), B
    fast()
    tn, (rk1, R1) = best_of(fast, repeat)
    tp, (rk2, R2) = best_of(slow, repeat)
    assert rk1 == rk2 and np.array_equal(R1, R2), "rref backends disagree"
    return tn, tp, rk1


END_TO_END = (
    "import time; from homcup.complexes import *; from homcup.graphs import complete_graph; "
    "from homcup.linalg import rank; from homcup._accel import backend; "
    "M = coboundary_matrix(CubicalComplex(complete_graph(3), 3), Sheaf.trivial(3, 2), 1); rank(M); "
    "t0 = time.perf_counter(); r = rank(M); print(backend(), r, time.perf_counter() - t0)"
)


def end_to_end():
    rows = []
    for flag in ("0", "1"):
        env = dict(os.environ, HOMCUP_NO_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        rows.append((out[0], int(out[1]), float(out[2])))
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)
    if not HAVE_NUMBA:
        print("numba is not importable; only the numpy path exists")
        return 0
    print(f"{'case':32s} {'kernel':6s} {'numba s':>10s} {'numpy s':>10s} {'speedup':>8s}")
    for name, M in cases():
        tn, tp = bench_spmv(M, args.repeat)
        print(f"{name:32s} {'spmv':6s} {tn:10.5f} {tp:10.5f} {tp / tn:8.1f}")
        tn, tp, rk = bench_rref(M, args.repeat)
        print(f"{name:32s} {'rref':6s} {tn:10.5f} {tp:10.5f} {tp / tn:8.1f}   rank {rk}")
    if args.end_to_end:
        for be, rk, t in end_to_end():
            print(f"end-to-end rank (toric delta^1): backend={be} rank={rk} {t:.4f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
