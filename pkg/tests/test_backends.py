"""The numba kernels and their numpy twins must agree bit for bit."""
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homcup import linalg
from homcup._accel import backend
from homcup.gfield import field_make
from homcup.linalg import Matrix

pytestmark = pytest.mark.skipif(backend() != "numba", reason="numba backend not active")


@given(st.integers(0, 10_000), st.sampled_from([1, 2, 3]), st.integers(1, 12), st.integers(1, 80))
def test_spmv_twins(seed, s, r, c):
    F = field_make(s)
    rng = np.random.default_rng(seed)
    A = rng.integers(0, F.q, (r, c)) * (rng.random((r, c)) < 0.3)
    M = Matrix.from_dense(A, F)
    x = rng.integers(0, F.q, c)
    out = np.zeros(r, dtype=np.int64)
    if s == 1:
        linalg._spmv_gf2_kernel(M.indptr, M.indices, x, out)
    else:
        linalg._spmv_gfq_kernel(M.indptr, M.indices, M.data, x, F.exp_table, F.log_table, out)
    assert np.array_equal(out, linalg.spmv_numpy(M, x))


@given(st.integers(0, 10_000), st.integers(1, 20), st.integers(1, 140))
def test_gf2_rref_twins(seed, r, c):
    rng = np.random.default_rng(seed)
    A = rng.integers(0, 2, (r, c))
    P0 = linalg._pack_bits(A)
    P1, P2 = P0.copy(), P0.copy()
    p1, p2 = np.zeros(min(r, c) + 1, np.int64), np.zeros(min(r, c) + 1, np.int64)
    assert linalg._gf2_rref_kernel(P1, c, p1) == linalg._gf2_rref_numpy(P2, c, p2)
    assert np.array_equal(P1, P2) and np.array_equal(p1, p2)


@given(st.integers(0, 10_000), st.sampled_from([2, 3]), st.integers(1, 12), st.integers(1, 15))
def test_gfq_rref_twins(seed, s, r, c):
    F = field_make(s)
    rng = np.random.default_rng(seed)
    A = rng.integers(0, F.q, (r, c))
    B1, B2 = A.copy(), A.copy()
    p1, p2 = np.zeros(min(r, c) + 1, np.int64), np.zeros(min(r, c) + 1, np.int64)
    rk1 = linalg._gfq_rref_kernel(B1, c, F.exp_table, F.log_table, F.q - 1, p1)
    rk2 = linalg._gfq_rref_numpy(B2, c, F, p2)
    assert rk1 == rk2 and np.array_equal(B1, B2) and np.array_equal(p1, p2)


SCRIPT = (
    "from homcup._accel import backend; from homcup.complexes import *; "
    "from homcup.graphs import complete_graph; from homcup.homology import css_extract; "
    "c = css_extract(CubicalComplex(complete_graph(3), 3), Sheaf.trivial(3, 2), 1); "
    "print(backend(), c.N, c.k, c.rank_X, c.rank_Z)"
)


def test_numpy_fallback_end_to_end():
    outs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, HOMCUP_NO_NUMBA=flag)
        proc = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True,
                              text=True, check=True)
        be, *nums = proc.stdout.split()
        outs[be] = nums
    assert set(outs) == {"numba", "numpy"}
    assert outs["numba"] == outs["numpy"] == ["648", "3", "215", "430"]
