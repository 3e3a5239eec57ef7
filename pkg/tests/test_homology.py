import numpy as np
import pytest

from homcup.complexes import Cochain, CubicalComplex, Sheaf, coboundary_matrix, restricted_coboundary
from homcup.gfield import GF2, IdealObstruction, ga_element
from homcup.graphs import complete_graph, double_cover, graph_coboundary
from homcup.homology import (HomologyError, LogicalBasis, Probe, certify_logical, css_extract,
                             css_from_matrices, distance_search, find_probe, group_shift,
                             hgp_canonical_logicals, induced_vectors, polarized_kernel_bound,
                             polarized_logicals, standardize_logicals)
from homcup.induction import canonical_extension
from homcup.linalg import Matrix, image_membership, kron, rank
from oracles import hgp3, min_weight_codeword, rank_gf2_int

K3, K4 = complete_graph(3), complete_graph(4)


def _k(H):
    r = rank_gf2_int(H)
    return H.shape[1] - r, H.shape[0] - r


@pytest.mark.parametrize("seed", range(5))
def test_hgp_parameter_formula(seed):
    rng = np.random.default_rng(seed)
    Hs = [rng.integers(0, 2, (int(rng.integers(2, 5)), int(rng.integers(2, 6)))) for _ in range(3)]
    d0, d1 = hgp3(*Hs)
    assert not ((d1 @ d0) & 1).any()
    code = css_from_matrices(d0.T, d1)
    (k1, k1t), (k2, k2t), (k3, k3t) = (_k(H) for H in Hs)
    assert code.k == k1 * k2 * k3t + k1 * k2t * k3 + k1t * k2 * k3


def test_unlifted_coboundary_is_kronecker_product():
    X1 = CubicalComplex(K3, 1)
    X2 = CubicalComplex(K3, 2)
    F1, F2 = Sheaf.trivial(1, 2), Sheaf.trivial(2, 2)
    d = coboundary_matrix(X1, F1, 0)
    n0, n1 = d.shape[1], d.shape[0]

    def pair_index(X, p, idx):
        c = X.cube_at(p, idx)
        parts = []
        for j in range(2):
            one = X1.cube(0, (c.verts[j],), (c.slots[j],))
            parts.append((one.dim, X1.cube_index(one) % (n1 if one.dim else n0)))
        return parts

    D = coboundary_matrix(X2, F2, 0).to_dense()
    I = Matrix.identity(n0)
    blocks = {0: kron(d, I).to_dense(), 1: kron(I, d).to_dense()}
    for r in range(D.shape[0]):
        (da, ra), (db, rb) = pair_index(X2, 1, r)
        blk = 0 if da == 1 else 1
        row = blocks[blk][ra * (n0 if blk == 0 else n1) + rb]
        expect = np.zeros_like(D[r])
        for c in np.flatnonzero(row):
            ca, cb = divmod(c, n0)
            idx = X2.cube_index(X2.cube(0, (ca % 3, cb % 3), (ca // 3, cb // 3)))
            expect[idx] = 1
        assert np.array_equal(D[r], expect)


def test_toric_3d_parameters():
    code = css_extract(CubicalComplex(K3, 3), Sheaf.trivial(3, 2), 1)
    assert (code.N, code.k) == (648, 3)


def test_css_level_out_of_range():
    with pytest.raises(HomologyError):
        css_extract(CubicalComplex(K3, 2), Sheaf.trivial(2, 2), 2)


def test_non_css_rejected():
    with pytest.raises(HomologyError):
        css_from_matrices([[1, 0]], [[1, 1]])


def test_four_qubit_code_distance():
    code = css_from_matrices([[1, 0, 1, 0], [0, 1, 0, 1], [1, 1, 1, 1]], [[1, 1, 1, 1]])
    assert code.k == 1
    distance_search(code, "exhaustive_small")
    assert code.d_X.status == code.d_Z.status == "exact"
    assert code.d_X.value == 2 and code.d_Z.value == 2


def test_toric_2d_distance_exact():
    code = css_extract(CubicalComplex(K3, 2), Sheaf.trivial(2, 2), 1)
    assert (code.N, code.k) == (72, 2)
    distance_search(code, "exact_upto", w=5, which="Z")
    assert code.d_Z.status == "exact" and code.d_Z.value == 6
    assert np.count_nonzero(code.d_Z.witness) == 6


def test_hexagon_cycle_distance():
    D = graph_coboundary(double_cover(K3)).to_dense()
    assert min_weight_codeword(D, GF2) == 6


def test_exact_upto_reports_lower_bound_when_cut_short():
    code = css_extract(CubicalComplex(K3, 2), Sheaf.trivial(2, 2), 1)
    distance_search(code, "exact_upto", w=3, which="Z")
    assert code.d_Z.status in ("lower_bounded", "exact")
    assert code.d_Z.lower >= 4


def test_toric_canonical_logicals():
    X = CubicalComplex(K3, 3)
    for j in range(3):
        b = hgp_canonical_logicals(X, j)
        assert len(b) == 1 and all(c.ok for c in b.certificates)


def test_k4_canonical_logicals_count():
    X = CubicalComplex(K4, 2)
    b = hgp_canonical_logicals(X, 0)
    assert len(b) == 5 and all(c.ok for c in b.certificates)


def test_canonical_logicals_need_unlifted():
    with pytest.raises(HomologyError):
        hgp_canonical_logicals(CubicalComplex(K4, 2, 3), 0)


def test_canonical_normalisation_infeasible():
    X = CubicalComplex(K4, 2)
    F = Sheaf.single([np.array([[1, 1, 0]]), np.array([[1, 1, 0]])])
    with pytest.raises(HomologyError, match="admissible labels"):
        hgp_canonical_logicals(X, 0, sheaf=F, labels={1: 2})


def test_coboundary_not_certified():
    X = CubicalComplex(K3, 2)
    F = Sheaf.trivial(2, 2)
    y = Cochain.random(X, F, 0, np.random.default_rng(0)).coboundary()
    c = certify_logical(y)
    assert c.cocycle and c.noncoboundary is False and not c.ok


def test_polarized_rejects_unlifted():
    with pytest.raises(HomologyError):
        polarized_logicals(CubicalComplex(K4, 2), Sheaf.trivial(2, 3), (0, 0))


def test_polarized_kernel_meets_bound():
    X = CubicalComplex(K4, 3, 5, seed=0)
    F = Sheaf.single([np.array([[1, 1, 1]]), np.eye(3, dtype=np.int64), np.eye(3, dtype=np.int64)])
    total = 0
    for v in range(4):
        for a in range(3):
            M, _, _ = restricted_coboundary(X, F, 0, anchor=(v, a))
            total += M.shape[1] - rank(M)
    V = double_cover(K4).n_vertices
    assert total >= polarized_kernel_bound(3, 0.0, 1 / 3, 3, 5, V)


@pytest.fixture(scope="module")
def lifted_pair():
    Xp, X = CubicalComplex(K4, 2), CubicalComplex(K4, 2, 3, seed=1)
    F = Sheaf.trivial(2, 3)
    canon = hgp_canonical_logicals(Xp, 0, certify=False)
    f = canon.provenance["free_variables"][0]
    anchor = (f % 4, f // 4)
    return Xp, X, F, canon, anchor


def test_all_ones_lift_in_polarized_span(lifted_pair):
    Xp, X, F, canon, anchor = lifted_pair
    basis = polarized_logicals(X, F, anchor, 0)
    assert all(c.cocycle for c in basis.certificates)
    ext = canonical_extension(canon[0], X)
    K = np.array([x.vec for x in basis])
    assert image_membership(Matrix.from_dense(K.T), ext.vec).member


def test_all_ones_lift_induces_cyclotomic(lifted_pair):
    Xp, X, F, canon, anchor = lifted_pair
    ext = canonical_extension(canon[0], X)
    probe = Probe((anchor[0], 0), (anchor[1], 0), 0)
    (iv,) = induced_vectors([ext], probe)
    assert iv == ga_element([1, 1, 1], GF2)


def test_shift_rotates_induced_vector(lifted_pair):
    Xp, X, F, canon, anchor = lifted_pair
    basis = polarized_logicals(X, F, anchor, 0, certify=False)
    probe = Probe((anchor[0], 1), (anchor[1], 2), 0)
    for x in basis:
        (a,) = induced_vectors([x], probe)
        (b,) = induced_vectors([group_shift(x, 1)], probe)
        assert b == a.shift(1)
        assert not coboundary_matrix(X, F, 1).matvec(group_shift(x, 1).vec).any()


def test_zero_representative_induces_zero(lifted_pair):
    Xp, X, F, canon, anchor = lifted_pair
    (iv,) = induced_vectors([Cochain.zeros(X, F, 1)], Probe((0, 0), (0, 0), 0))
    assert iv.is_zero()


def test_standardize_round_trip():
    X = CubicalComplex(K4, 2, 5, seed=0)
    F = Sheaf.single([np.array([[1, 1, 1]]), np.array([[1, 1, 0], [0, 1, 1]])])
    basis = polarized_logicals(X, F, (0, 0), 0, certify=False)
    probe, rep, tried = find_probe(basis, X, 0, (0, 0))
    assert probe is not None and rep.is_whole_algebra
    std = standardize_logicals(basis, probe)
    assert len(std) == 5
    for j, v in enumerate(induced_vectors(std, probe)):
        assert np.array_equal(v.coeffs, np.eye(5, dtype=np.int64)[j])
    assert all(c.ok for c in std.certificates)
    assert all(p["inequivalent"] for p in std.provenance["pairwise"])


def test_standardize_proper_ideal_fails(lifted_pair):
    Xp, X, F, canon, anchor = lifted_pair
    ext = canonical_extension(canon[0], X)
    probe = Probe((anchor[0], 0), (anchor[1], 0), 0)
    with pytest.raises(IdealObstruction, match="proper ideal"):
        standardize_logicals(LogicalBasis([ext], "all_ones_lift"), probe)
