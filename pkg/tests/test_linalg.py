import numpy as np
import pytest
from hypothesis import given, strategies as st

from homcup.gfield import GF2, field_make
from homcup.graphs import complete_graph, double_cover, graph_coboundary
from homcup.linalg import (Matrix, free_variables, image_membership, kernel_basis, kron, rank,
                           rank_dense, rref)

from oracles import matmul_field, rank_field, rank_gf2_int

F4 = field_make(2)


def dense_matrices(q, max_r=8, max_c=10):
    return st.integers(1, max_r).flatmap(lambda r: st.integers(1, max_c).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, q - 1), min_size=c, max_size=c),
                           min_size=r, max_size=r))).map(lambda rows: np.array(rows, dtype=np.int64))


def test_identity_rref():
    I = Matrix.identity(5)
    r = rref(I)
    assert r.pivots == list(range(5))
    assert r.echelon == I


def test_rref_transform_reproduces_echelon():
    rng = np.random.default_rng(7)
    A = rng.integers(0, 2, size=(6, 9))
    M = Matrix.from_dense(A)
    r = rref(M)
    assert np.array_equal(matmul_field(r.transform.to_dense(), A, GF2), r.echelon.to_dense())
    rc = rref(M, mode="column")
    assert np.array_equal(matmul_field(A, rc.transform.to_dense(), GF2), rc.echelon.to_dense())


def test_column_echelon_template():
    # (I 0 / J 0) with the pivot rows on top after a column reduction
    A = np.array([[1, 0, 1], [0, 1, 1], [1, 1, 0], [1, 0, 1]])
    E = rref(Matrix.from_dense(A), mode="column").echelon.to_dense()
    r = len(rref(Matrix.from_dense(A), mode="column").pivots)
    assert r == 2
    assert np.array_equal(E[:2, :2], np.eye(2, dtype=int)) and not E[:, r:].any()


@given(dense_matrices(2))
def test_rank_gf2_matches_oracle(A):
    assert rank_dense(A) == rank_gf2_int(A)


@given(dense_matrices(4, 6, 7))
def test_rank_f4_matches_oracle(A):
    assert rank_dense(A, F4) == rank_field(A, F4)


def test_kernel_of_zero_matrix():
    K = kernel_basis(Matrix.zeros((3, 4)))
    assert K.shape == (4, 4) and rank_dense(K) == 4


def test_graph_coboundary_kernel_is_all_ones():
    D = graph_coboundary(complete_graph(4))
    K = kernel_basis(D)
    assert K.shape == (1, 4) and np.all(K[0] == 1)


def test_kernel_f4_random():
    rng = np.random.default_rng(3)
    A = rng.integers(0, 4, size=(5, 8))
    M = Matrix.from_dense(A, F4)
    K = kernel_basis(M)
    assert K.shape[0] == 8 - rank(M)
    for v in K:
        assert not M.matvec(v).any()
    Kl = kernel_basis(M, side="left")
    for w in Kl:
        assert not M.rmatvec(w).any()


def test_membership_first_column():
    rng = np.random.default_rng(0)
    A = rng.integers(0, 2, size=(5, 4))
    M = Matrix.from_dense(A)
    m = image_membership(M, A[:, 0])
    assert m.member and np.array_equal(M.matvec(m.coefficients), A[:, 0])


def test_membership_witness():
    A = np.array([[1, 1, 0], [1, 1, 0], [0, 0, 1], [0, 0, 1]])
    M = Matrix.from_dense(A)
    v = np.array([1, 0, 0, 0])
    m = image_membership(M, v)
    assert not m.member
    w = m.witness
    assert not M.rmatvec(w).any() and GF2.dot(w, v) == 1


@given(dense_matrices(4, 6, 6), st.data())
def test_membership_certificates(A, data):
    M = Matrix.from_dense(A, F4)
    v = np.array(data.draw(st.lists(st.integers(0, 3), min_size=A.shape[0], max_size=A.shape[0])))
    m = image_membership(M, v)
    if m.member:
        assert np.array_equal(M.matvec(m.coefficients), v)
    else:
        assert not M.rmatvec(m.witness).any() and F4.dot(m.witness, v) != 0


def test_free_variables_full_row_rank():
    fv = free_variables(Matrix.from_dense(np.eye(4, dtype=int)))
    assert fv.free == []


def test_free_variables_double_cover_of_triangle():
    # C_6 incidence: edges minus vertices plus one = 1 free row
    D = graph_coboundary(double_cover(complete_graph(3)))
    fv = free_variables(D)
    assert len(fv.free) == 6 - 6 + 1


@given(dense_matrices(2, 9, 6))
def test_free_rows_extend_to_left_kernel(A):
    M = Matrix.from_dense(A)
    fv = free_variables(M)
    assert len(fv.free) == A.shape[0] - rank(M)
    K = kernel_basis(M, side="left")
    etas = np.array([fv.eta(f) for f in fv.free]).reshape(-1, A.shape[0])
    for e in etas:
        assert not M.rmatvec(e).any()
    if len(etas):
        assert rank_dense(etas) == len(fv.free) == K.shape[0]


def test_kron_identity_block():
    B = Matrix.from_dense(np.array([[1, 1, 0], [0, 1, 1]]))
    K = kron(Matrix.identity(2), B).to_dense()
    Z = np.zeros((2, 3), dtype=int)
    assert np.array_equal(K, np.block([[B.to_dense(), Z], [Z, B.to_dense()]]))


def test_kron_mixed_product_and_rank():
    rng = np.random.default_rng(11)
    A, B = rng.integers(0, 4, (2, 3)), rng.integers(0, 4, (3, 2))
    C, D = rng.integers(0, 4, (3, 2)), rng.integers(0, 4, (2, 3))
    MA, MB, MC, MD = (Matrix.from_dense(x, F4) for x in (A, B, C, D))
    lhs = (kron(MA, MB) @ kron(MC, MD)).to_dense()
    rhs = kron(Matrix.from_dense(matmul_field(A, C, F4), F4),
               Matrix.from_dense(matmul_field(B, D, F4), F4)).to_dense()
    assert np.array_equal(lhs, rhs)
    assert rank(kron(MA, MB)) == rank(MA) * rank(MB)


def test_matrix_io_roundtrip():
    rng = np.random.default_rng(5)
    M = Matrix.from_dense(rng.integers(0, 4, (4, 6)), F4)
    assert Matrix.from_json(M.to_json()) == M
    assert Matrix.from_mtx(M.to_mtx()) == M


def test_shape_mismatch():
    with pytest.raises(ValueError):
        Matrix.from_dense(np.eye(2, dtype=int)) @ Matrix.from_dense(np.eye(3, dtype=int))


@given(st.integers(0, 10_000), st.sampled_from([1, 2]))
def test_sparse_matmul_matches_oracle(seed, s):
    from homcup.linalg import matmul
    F = field_make(s)
    rng = np.random.default_rng(seed)
    A = rng.integers(0, F.q, (5, 7)) * (rng.random((5, 7)) < 0.5)
    B = rng.integers(0, F.q, (7, 4)) * (rng.random((7, 4)) < 0.5)
    got = matmul(Matrix.from_dense(A, F), Matrix.from_dense(B, F)).to_dense()
    assert np.array_equal(got, matmul_field(A, B, F))


def test_numpy_spmv_with_trailing_empty_rows():
    A = np.array([[0, 0, 0, 0, 1, 0], [0, 0, 0, 1, 0, 0], [0, 0, 1, 0, 1, 0], [0, 0, 0, 0, 0, 0]])
    x = np.array([1, 1, 0, 0, 1, 1])
    from homcup.linalg import spmv_numpy
    assert spmv_numpy(Matrix.from_dense(A, GF2), x).tolist() == [1, 0, 1, 0]
