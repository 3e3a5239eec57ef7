"""Built-in verification bundles run by ``homcup verify``.

Each check returns ``{"name", "ok", "detail"}``; expected constants are the
worked examples reproduced by the library (toric code, even-lift
counterexample, cyclotomic factors, RS kernel, lift towers).
"""

import time

import numpy as np

from .complexes import Cochain, CubicalComplex, Sheaf, coboundary_matrix
from .cupcap import InvariantForm, addressable_xi, cup, cup_multi, subdivision_cup_oracle
from .gfield import GF2, factor_cyclic, field_make
from .graphs import complete_graph, double_cover, s3_cayley
from .homology import css_extract, hgp_canonical_logicals
from .induction import build_sequence, canonical_extension, lifted_logical_check, lift_matrix, \
    projection, rows_combination, verify_preservation
from .linalg import free_variables
from .pipelines import inverse_product_vector, polarized_diagonal, rs_tanner_cycle, rs_tensor_kernel


class UnknownSuite(KeyError):
    pass


def _check(name, fn):
    t0 = time.time()
    try:
        ok, detail = fn()
    except Exception as exc:  # report, do not crash the suite
        ok, detail = False, {"error": f"{type(exc).__name__}: {exc}"}
    return {"name": name, "ok": bool(ok), "detail": detail, "seconds": round(time.time() - t0, 3)}


# ---------------------------------------------------------------------------
# worked examples

def toric_3d():
    X = CubicalComplex(complete_graph(3), 3)
    F = Sheaf.trivial(3, 2)
    code = css_extract(X, F, 1)
    bases = [hgp_canonical_logicals(X, j) for j in range(3)]
    fr = bases[0].provenance["free_variables"]
    T = InvariantForm(addressable_xi(X, (fr[0],) * 3))
    vals = np.array([[[T(bases[0][i], bases[1][j], bases[2][k]) for k in range(len(bases[2]))]
                      for j in range(len(bases[1]))] for i in range(len(bases[0]))])
    support = [repr(c) for c, _ in cup_multi([b[0] for b in bases]).items()]
    ok = code.N == 648 and code.k == 3 and vals.shape == (1, 1, 1) and int(vals.sum()) == 1 \
        and len(support) == 1
    return ok, {"N": code.N, "k": code.k, "T": vals.ravel().tolist(), "cup_support": support}


def double_cover_free_variables():
    # the one-dimensional complex over K_4 is the incidence structure of its double cover
    K4 = complete_graph(4)
    X = CubicalComplex(K4, 1)
    fv = free_variables(coboundary_matrix(X, Sheaf.trivial(1, K4.degree), 0))
    k = len(fv.free)
    G = double_cover(K4)
    expect = G.n_edges - G.n_vertices + 1
    return k == expect == 5, {"k_T": k, "E-V+1": expect}


def even_lift_counterexample():
    HX = [[1, 0, 1, 0], [0, 1, 0, 1], [1, 1, 1, 1]]
    HZ = [[1, 1, 1, 1]]
    V = np.zeros((3, 4), dtype=np.int64)
    V[2] = [0, 1, 1, 0]
    x = [1, 0, 0, 1]
    two = lifted_logical_check(HX, HZ, x, 2, V)
    rows = rows_combination(lift_matrix(HX, V, 2), [1, 3, 6])
    three = lifted_logical_check(HX, HZ, x, 3, V)
    ok = two.cocycle and two.coboundary and np.array_equal(rows, np.repeat(x, 2)) \
        and three.cocycle and not three.coboundary
    return ok, {"l2": two.to_json(), "rows_1_3_6": rows.tolist(), "l3": three.to_json()}


def cyclotomic_factors():
    got7 = [list(p.coeffs) for p in factor_cyclic(7, GF2)]
    got5 = [list(p.coeffs) for p in factor_cyclic(5, GF2)]
    # coefficients from the constant term up
    ok = sorted(got7) == sorted([[1, 1], [1, 1, 0, 1], [1, 0, 1, 1]]) \
        and sorted(got5) == sorted([[1, 1], [1, 1, 1, 1, 1]])
    return ok, {"7": got7, "5": got5}


def rs_cycle():
    F8 = field_make(3)
    betas = np.arange(1, 6)
    _, K, _ = rs_tensor_kernel(F8, betas, (2, 2, 2))
    x = inverse_product_vector(F8, betas)
    match = K.shape[0] == 1 and np.array_equal(F8.mul(F8.inv(int(K[0, 0])), K[0]),
                                               F8.mul(F8.inv(int(x[0])), x))
    tanner = rs_tanner_cycle(s3_cayley(), field_make(2), np.arange(1, 4), (1, 1, 2))
    return match and tanner["ok"], {"kernel_dim": int(K.shape[0]), "formula": x.tolist(),
                                    "tanner_nowhere_vanishing": tanner.get("nowhere_vanishing")}


def lift_tower(seed=0):
    seq = build_sequence(complete_graph(4), 3, [(3, 5), (None, 5)], seed=seed)
    X1 = seq.stages[0].X_prime
    bases = [hgp_canonical_logicals(X1, j) for j in range(3)]
    fr = bases[0].provenance["free_variables"]
    rep = verify_preservation(seq, [b[0] for b in bases], addressable_xi(X1, (fr[0],) * 3))
    return rep.nonzero, rep.to_json()


def polarized(seed=0):
    h = np.array([[1, 1, 0], [0, 1, 1]])
    hp = np.array([[1, 1, 1]])
    r = polarized_diagonal(complete_graph(4), 3, 5, h, hp, seed=seed)
    detail = {"seed": r["seed"], "attempts": r["attempts"]}
    if r["seed"] is not None:
        detail.update({"count": r["certificate"].count,
                       "supports": {str(k): v for k, v in r["supports"].items()}})
    return r["ok"] and r["certificate"].count == 5, detail


# ---------------------------------------------------------------------------
# properties (small default counts; the test suite runs the full counts)

def _prop_complexes():
    F4 = field_make(2)
    out = []
    for G, t, l in ((complete_graph(3), 2, 1), (complete_graph(4), 2, 3), (complete_graph(3), 3, 1),
                    (complete_graph(4), 2, 5)):
        X = CubicalComplex(G, t, l)
        n = G.degree
        A = Sheaf.trivial(t, n)
        B = Sheaf.single([np.array([[1, 1, 0], [0, 1, 1]]) if n == 3 else np.ones((1, n), int)] * t)
        out.append((X, A, B))
    X = CubicalComplex(complete_graph(4), 2)
    out.append((X, Sheaf.single([np.array([[1, 1, 1], [0, 1, 2]])] * 2, F4),
                Sheaf.single([np.array([[1, 2, 3]])] * 2, F4)))
    return out


def leibniz(pairs=50, seed=0):
    rng = np.random.default_rng(seed)
    cx = _prop_complexes()
    bad = 0
    for i in range(pairs):
        X, A, B = cx[i % len(cx)]
        p1 = int(rng.integers(0, X.t))
        p2 = int(rng.integers(0, X.t - p1))
        x, y = Cochain.random(X, A, p1, rng), Cochain.random(X, B, p2, rng)
        lhs = cup(x, y).coboundary()
        rhs = cup(x.coboundary(), y) + cup(x, y.coboundary())
        bad += lhs != rhs
    return bad == 0, {"pairs": pairs, "failures": int(bad)}


def oracle(pairs=20, seed=1):
    rng = np.random.default_rng(seed)
    cx = _prop_complexes()
    bad = 0
    for i in range(pairs):
        X, A, B = cx[i % len(cx)]
        p1 = int(rng.integers(0, X.t + 1))
        p2 = int(rng.integers(0, X.t - p1 + 1))
        x, y = Cochain.random(X, A, p1, rng), Cochain.random(X, B, p2, rng)
        bad += cup(x, y) != subdivision_cup_oracle([x, y])
    return bad == 0, {"pairs": pairs, "failures": int(bad)}


def associativity(triples=20, seed=2):
    rng = np.random.default_rng(seed)
    X = CubicalComplex(complete_graph(3), 3)
    A = Sheaf.trivial(3, 2)
    B = Sheaf.single([np.array([[1, 1]])] * 3)
    bad = 0
    for _ in range(triples):
        ps = rng.multinomial(int(rng.integers(0, 4)), [1 / 3] * 3)
        x, y, z = (Cochain.random(X, S, int(p), rng) for S, p in zip((A, B, A), ps))
        bad += not np.array_equal(cup(cup(x, y), z).vec, cup(x, cup(y, z)).vec)
    return bad == 0, {"triples": triples, "failures": int(bad)}


def invariance(trials=50, seed=3):
    X = CubicalComplex(complete_graph(3), 3)
    bases = [hgp_canonical_logicals(X, j, certify=False) for j in range(3)]
    fr = bases[0].provenance["free_variables"]
    T = InvariantForm(addressable_xi(X, (fr[0],) * 3))
    r = T.invariance_check([b[0] for b in bases], trials, np.random.default_rng(seed))
    return r["passed"], {"trials": trials, "value": r["value"], "failures": len(r["failures"])}


def extension_projection(trials=10, seed=4):
    rng = np.random.default_rng(seed)
    G = complete_graph(4)
    Xp, X = CubicalComplex(G, 2), CubicalComplex(G, 2, 3, seed=seed)
    F = Sheaf.single([np.array([[1, 1, 0], [0, 1, 1]])] * 2)
    bad = 0
    for _ in range(trials):
        p = int(rng.integers(0, 3))
        x = Cochain.random(Xp, F, p, rng)
        bad += projection(canonical_extension(x, X), Xp) != x
    return bad == 0, {"trials": trials, "failures": int(bad)}


SUITES = {
    "paper-worked-examples": [
        ("toric_3d", toric_3d),
        ("double_cover_free_variables", double_cover_free_variables),
        ("even_lift_counterexample", even_lift_counterexample),
        ("cyclotomic_factors", cyclotomic_factors),
        ("rs_tensor_cycle", rs_cycle),
        ("lift_tower_preservation", lift_tower),
        ("polarized_diagonal", polarized),
    ],
    "properties": [
        ("leibniz", leibniz),
        ("cup_oracle", oracle),
        ("associativity", associativity),
        ("invariance", invariance),
        ("extension_projection", extension_projection),
    ],
}


def run_suite(name):
    if name not in SUITES:
        raise UnknownSuite(name)
    checks = [_check(n, fn) for n, fn in SUITES[name]]
    return {"suite": name, "ok": all(c["ok"] for c in checks), "checks": checks}
