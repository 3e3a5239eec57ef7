import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from homcup.complexes import Chain, Cochain, CubicalComplex, Sheaf, rs_vandermonde, tensored_local_code
from homcup.cupcap import (CupError, InvariantForm, addressable_xi, collapse_path, cup, cup_multi,
                           diagonal_certificate, evaluation_tensor, pairing, solve_cycles,
                           stretched_order, subdivision_cup_oracle)
from homcup.gfield import field_make
from homcup.graphs import complete_graph
from homcup.homology import hgp_canonical_logicals
from homcup.pipelines import inverse_product_vector

K3, K4 = complete_graph(3), complete_graph(4)
F8 = field_make(3)


def _moved(X, h, verts, moves):
    h, verts = np.array([h]), np.array([verts], dtype=np.int64)
    for j, mu in moves:
        h, verts = X.act(h, verts, j, mu)
    return int(h[0]), tuple(int(v) for v in verts[0])


def _ind(X, F, h, verts, slots):
    return Cochain.indicator(X, F, X.cube(h, verts, slots))


@pytest.fixture(scope="module")
def square():
    X = CubicalComplex(K4, 2, 3, seed=2)
    return X, Sheaf.trivial(2, 3)


def test_cup_of_path_is_square(square):
    X, F = square
    g, a1, a2 = (1, (0, 2)), 1, 2
    x = _ind(X, F, *g, (f"a{a1}", 0))
    y = _ind(X, F, *_moved(X, *g, [(0, a1)]), (1, f"a{a2}"))
    z = cup(x, y)
    assert [c for c, _ in z.items()] == [X.cube(*g, (f"a{a1}", f"a{a2}"))]


def test_cup_of_parallel_edges_vanishes(square):
    X, F = square
    x = _ind(X, F, 1, (0, 2), ("a1", 0))
    y = _ind(X, F, 1, (0, 2), ("a1", 1))
    assert cup(x, y).is_zero()


def test_cup_without_common_cube_vanishes(square):
    X, F = square
    x = _ind(X, F, 0, (0, 0), ("a0", 0))
    y = _ind(X, F, 2, (3, 3), (0, "a1"))
    assert cup(x, y).is_zero()


def test_cup_level_overflow(square):
    X, F = square
    x = Cochain.zeros(X, F, 2)
    with pytest.raises(CupError):
        cup(x, Cochain.zeros(X, F, 1))


@pytest.fixture(scope="module")
def cube3():
    return CubicalComplex(K4, 3, 3, seed=4), Sheaf.trivial(3, 3)


@pytest.mark.parametrize("route", ["012", "021"])
def test_cup_along_cube_paths(cube3, route):
    X, F = cube3
    g, a = (2, (0, 1, 3)), (1, 0, 2)
    order = [int(c) for c in route]
    xs, moves = [], []
    for step, j in enumerate(order):
        slots = []
        for i in range(3):
            if i == j:
                slots.append(f"a{a[i]}")
            else:
                slots.append(1 if i in order[:step] else 0)
        xs.append(_ind(X, F, *_moved(X, *g, moves), slots))
        moves.append((j, a[j]))
    z = cup_multi(xs)
    assert [c for c, _ in z.items()] == [X.cube(*g, tuple(f"a{v}" for v in a))]
    assert z == subdivision_cup_oracle(xs)


def test_non_path_triple_vanishes(cube3):
    X, F = cube3
    g = (0, (1, 2, 3))
    xs = [_ind(X, F, *g, ("a0", 0, 0)), _ind(X, F, *g, (0, "a1", 0)), _ind(X, F, *g, (0, 0, "a2"))]
    assert cup_multi(xs).is_zero() and subdivision_cup_oracle(xs).is_zero()


def test_collapse_path_and_conventions(cube3):
    X, _ = cube3
    omega = X.cube(0, (0, 0, 0), ("a0", "a1", "a2"))
    assert stretched_order((2, 0, 1), "increasing") == (0, 1, 2)
    assert stretched_order((2, 0, 1), "decreasing") == (2, 1, 0)
    path = collapse_path(X, omega)
    assert len(path) == 3 and all(c.dim == 1 for c in path)
    assert path[0].S == (2,) and path[-1].S == (0,)


@given(st.integers(0, 10_000), st.sampled_from(["increasing", "decreasing"]))
@settings(max_examples=15)
def test_oracle_conventions_agree(seed, convention):
    X = CubicalComplex(K3, 2)
    F = Sheaf.single([np.array([[1, 1]])] * 2)
    rng = np.random.default_rng(seed)
    x, y = Cochain.random(X, F, 1, rng), Cochain.random(X, F, 1, rng)
    assert cup(x, y) == subdivision_cup_oracle([x, y], convention)


def test_oracle_rejects_high_dimension():
    X = CubicalComplex(K3, 4)
    F = Sheaf.trivial(4, 2)
    with pytest.raises(CupError):
        subdivision_cup_oracle([Cochain.zeros(X, F, 1), Cochain.zeros(X, F, 1)])


@given(st.integers(0, 10_000))
@settings(max_examples=25)
def test_leibniz_lifted_sheaf(seed):
    rng = np.random.default_rng(seed)
    X = CubicalComplex(K4, 3, 3, seed=1)
    A = Sheaf.single([np.array([[1, 1, 0], [0, 1, 1]])] * 3)
    B = Sheaf.trivial(3, 3)
    p1 = int(rng.integers(0, 3))
    p2 = int(rng.integers(0, 3 - p1))
    x, y = Cochain.random(X, A, p1, rng), Cochain.random(X, B, p2, rng)
    assert cup(x, y).coboundary() == cup(x.coboundary(), y) + cup(x, y.coboundary())


def test_pairing_adjoint():
    X = CubicalComplex(K3, 2)
    F = Sheaf.trivial(2, 2)
    rng = np.random.default_rng(0)
    y = Cochain.random(X, F, 1, rng)
    w = Chain(X, F, 2, rng.integers(0, 2, X.layout(F, 2).size))
    assert pairing(y.coboundary(), w) == pairing(y, w.boundary())


def test_pairing_single_cube():
    X = CubicalComplex(K4, 2)
    F4 = field_make(2)
    F = Sheaf.single([np.array([[1, 1, 0], [0, 1, 2]])] * 2, F4)
    c = X.cube(0, (0, 0), (0, 1))
    x = Cochain.indicator(X, F, c, [1, 2, 3, 1])
    xi = Chain(X, F, 0)
    xi[c] = [2, 2, 0, 1]
    assert pairing(x, xi) == F4.dot(np.array([1, 2, 3, 1]), np.array([2, 2, 0, 1]))
    xi2 = Chain(X, F, 0)
    xi2[X.cube(0, (1, 1), (0, 1))] = 1
    assert pairing(x, xi2) == 0


def test_pairing_mismatch():
    X = CubicalComplex(K3, 2)
    with pytest.raises(CupError):
        pairing(Cochain.zeros(X, Sheaf.trivial(2, 2), 1), Chain(X, Sheaf.trivial(2, 2), 2))


@pytest.mark.parametrize("G,expect", [(K3, 1), (K4, 125)])
def test_cycles_are_tensor_of_cycle_spaces(G, expect):
    X = CubicalComplex(G, 3)
    F = Sheaf.trivial(3, G.degree)
    fac = solve_cycles(X, F)
    assert fac.report["dimension"] == expect
    if G is K3:
        assert solve_cycles(X, F, method="direct").report["dimension"] == expect
        assert all(c.is_cycle() for c in fac.chains)


def test_rs_cycles_one_dimensional_with_formula():
    betas = np.arange(1, 6)
    X = CubicalComplex(complete_graph(6), 1)
    sheaf = Sheaf([[rs_vandermonde(F8, m, betas)] for m in (2, 2, 2)], F8, check_rank=False)
    cyc = solve_cycles(X, sheaf, limit=1)
    assert cyc.report["per_direction_kernel_dims"][0] >= 1
    z = inverse_product_vector(F8, betas)
    assert not np.bitwise_xor.reduce(F8.mul(tensored_local_code(sheaf, 0), z[None, :]), axis=1).any()


def test_rs_cycles_empty_when_degrees_exceed():
    betas = np.arange(1, 6)
    X = CubicalComplex(complete_graph(6), 1)
    sheaf = Sheaf([[rs_vandermonde(F8, m, betas)] for m in (2, 2, 3)], F8, check_rank=False)
    cyc = solve_cycles(X, sheaf)
    assert len(cyc) == 0 and cyc.report["killed_by"] == [0]


@pytest.fixture(scope="module")
def toric():
    X = CubicalComplex(K3, 3)
    bases = [hgp_canonical_logicals(X, j) for j in range(3)]
    fr = bases[0].provenance["free_variables"]
    return X, bases, InvariantForm(addressable_xi(X, (fr[0],) * 3))


def test_toric_form_value(toric):
    X, bases, T = toric
    assert T(bases[0][0], bases[1][0], bases[2][0]) == 1
    assert diagonal_certificate(evaluation_tensor(T, bases)).count == 1


def test_form_vanishes_on_coboundary_slot(toric):
    X, bases, T = toric
    y = Cochain.random(X, bases[0][0].sheaf, 0, np.random.default_rng(1)).coboundary()
    assert T(y, bases[1][0], bases[2][0]) == 0


def test_form_invariance(toric):
    X, bases, T = toric
    r = T.invariance_check([b[0] for b in bases], 30, np.random.default_rng(7))
    assert r["passed"] and r["value"] == 1


def test_form_rejects_non_cycle(toric):
    X, _, _ = toric
    F = Sheaf.trivial(3, 2).tensor(Sheaf.trivial(3, 2)).tensor(Sheaf.trivial(3, 2))
    xi = Chain(X, F, 3)
    xi[X.cube(0, (0, 0, 0), ("a0", "a0", "a0"))] = 1
    with pytest.raises(CupError):
        InvariantForm(xi)


def test_form_level_mismatch(toric):
    X, bases, T = toric
    with pytest.raises(CupError):
        T(bases[0][0], bases[1][0])


def test_addressable_table_k4():
    X = CubicalComplex(K4, 2)
    bases = [hgp_canonical_logicals(X, j, certify=False) for j in range(2)]
    fr = [b.provenance["free_variables"] for b in bases]
    assert len(fr[0]) == len(fr[1]) == 5
    for i0 in range(5):
        for i1 in range(5):
            T = InvariantForm(addressable_xi(X, (fr[0][i0], fr[1][i1])))
            vals = evaluation_tensor(T, bases)
            expect = np.zeros((5, 5), dtype=np.int64)
            expect[i0, i1] = 1
            assert np.array_equal(vals, expect)


def test_diagonal_sum_xi_gives_delta():
    X = CubicalComplex(K4, 2)
    bases = [hgp_canonical_logicals(X, j, certify=False) for j in range(2)]
    fr = [b.provenance["free_variables"] for b in bases]
    xis = [addressable_xi(X, (fr[0][i], fr[1][i])) for i in range(5)]
    xi = xis[0]
    for other in xis[1:]:
        xi = Chain(X, xi.sheaf, 2, xi.vec ^ other.vec)
    cert = diagonal_certificate(evaluation_tensor(InvariantForm(xi), bases))
    assert cert.is_delta_diagonal and cert.count == 5


def test_addressable_rejects_pivot_index():
    X = CubicalComplex(K4, 2)
    fr = hgp_canonical_logicals(X, 0, certify=False).provenance["free_variables"]
    pivot = next(i for i in range(12) if i not in fr)
    with pytest.raises(CupError, match="free variable"):
        addressable_xi(X, (pivot, fr[0]))


def test_diagonal_identity_tensor():
    I = np.zeros((5, 5, 5), dtype=np.int64)
    for i in range(5):
        I[i, i, i] = 1
    c = diagonal_certificate(I)
    assert c.is_delta_diagonal and c.count == 5 and c.constant == 1


def test_diagonal_rejects_symmetric_w_tensor():
    W = np.zeros((2, 2, 2), dtype=np.int64)
    for idx in [(0, 0, 1), (0, 1, 0), (1, 0, 0)]:
        W[idx] = 1
    c = diagonal_certificate(W)
    assert not c.is_delta_diagonal and c.count == 0
    assert set(c.offending) == {(0, 0, 1), (0, 1, 0), (1, 0, 0)}


def test_diagonal_rejects_non_cubical():
    with pytest.raises(CupError):
        diagonal_certificate(np.zeros((2, 3)))
