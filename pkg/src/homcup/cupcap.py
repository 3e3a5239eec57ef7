"""Cup products, pairings, cycles and invariant forms on cubical complexes."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .complexes import (Chain, Cochain, ComplexError, Cube, CubicalComplex, Sheaf,
                        boundary_matrix, coboundary_matrix, sheaf_morphism, tensored_local_code)
from .linalg import free_variables, kernel_basis

__all__ = [
    "CupError", "cup", "cup_multi", "subdivision_cup_oracle", "collapse_path",
    "stretched_order", "pairing", "CycleBasis", "solve_cycles", "product_vector",
    "InvariantForm", "invariant_form", "addressable_xi", "diagonal_certificate",
    "DiagonalCertificate", "evaluation_tensor",
]


class CupError(ComplexError):
    pass


# ---------------------------------------------------------------------------
# local helpers

def _gather(cochain, p, k, local_idx):
    """Local vectors of cells ``local_idx`` of block k, shape (N, d)."""
    L = cochain.layout
    d = L.dims[k]
    start = L.offsets[k] + np.asarray(local_idx, dtype=np.int64) * d
    return cochain.vec[start[:, None] + np.arange(d)[None, :]]


def _contract(F, vals, S_from, S_to, labs):
    """Apply the sheaf morphism F_{sigma,omega} cell-wise.

    ``vals`` has shape (N, d_sigma); axes of directions in S_to \\ S_from are
    contracted against h_j[:, label_j] of each cell.
    """
    axes = F.local_dims(S_from)
    N = vals.shape[0]
    arr = vals.reshape((N,) + tuple(m for _, _, m in axes))
    field = F.field
    for pos in range(len(axes) - 1, -1, -1):
        r, j, m = axes[pos]
        if j not in S_to:
            continue
        w = F.factors[r][j][:, labs[:, j]].T  # (N, m)
        arr = np.moveaxis(arr, pos + 1, -1)
        shape = (N,) + (1,) * (arr.ndim - 2) + (m,)
        # addition in characteristic 2 is XOR for every s
        arr = np.bitwise_xor.reduce(field.mul(arr, w.reshape(shape)), axis=-1)
    return arr.reshape(N, -1)


def _outer(field, a, b):
    N = a.shape[0]
    return field.mul(a[:, :, None], b[:, None, :]).reshape(N, -1)


def _check_same_complex(xs):
    X = xs[0].X
    F = xs[0].sheaf.field
    for x in xs:
        if x.X is not X:
            raise CupError("cochains live on different complexes")
        if x.sheaf.field != F:
            raise CupError("cochains use different fields")
    return X


# ---------------------------------------------------------------------------
# cup product (ordered-partition rule)

def cup(x, y):
    """x (level p1, sheaf F) cup y (level p2, sheaf G) -> level p1+p2 with sheaf F (x) G."""
    X = _check_same_complex([x, y])
    p1, p2 = x.p, y.p
    p = p1 + p2
    if p > X.t:
        raise CupError(f"cup level {p} exceeds the complex dimension {X.t}")
    F, G = x.sheaf, y.sheaf
    FG = F.tensor(G)
    out = Cochain(X, FG, p)
    field = F.field
    Lo = out.layout
    for k, S in enumerate(X.blocks[p]):
        c = X.block_cells(p, k)
        N = X.block_size[p]
        acc = np.zeros((N, Lo.dims[k]), dtype=np.int64)
        for S1 in itertools.combinations(S, p1):
            S2 = tuple(j for j in S if j not in S1)
            # front face: actions on S1, bit 0 on S2, same corner
            lab_f = c["lab"].copy()
            bit_f = c["bit"].copy()
            lab_f[:, list(S2)] = -1
            bit_f[:, list(S2)] = 0
            kf = X.block_index(p1, S1)
            i_f = X.encode(p1, kf, lab_f, bit_f, c["h"], c["verts"]) - kf * X.block_size[p1]
            # back face: actions on S2, bit 1 on S1, corner moved along S1
            lab_b = c["lab"].copy()
            bit_b = c["bit"].copy()
            lab_b[:, list(S1)] = -1
            bit_b[:, list(S1)] = 1
            h, verts = c["h"], c["verts"]
            for j in S1:
                h, verts = X.act(h, verts, j, c["lab"][:, j])
            kb = X.block_index(p2, S2)
            i_b = X.encode(p2, kb, lab_b, bit_b, h, verts) - kb * X.block_size[p2]
            xv = _contract(F, _gather(x, p1, kf, i_f), S1, S, c["lab"])
            yv = _contract(G, _gather(y, p2, kb, i_b), S2, S, c["lab"])
            acc ^= _outer(field, xv, yv)
        out.vec[Lo.offsets[k]:Lo.offsets[k + 1]] = acc.ravel()
    return out


def cup_multi(xs):
    if not xs:
        raise CupError("cup_multi needs at least one cochain")
    if sum(x.p for x in xs) > xs[0].X.t:
        raise CupError("total level exceeds the complex dimension")
    out = xs[0]
    for x in xs[1:]:
        out = cup(out, x)
    return out


# ---------------------------------------------------------------------------
# subdivision oracle (t <= 3)

def stretched_order(dirs, convention):
    """The direction ordering of the simplex that is stretched over a cube."""
    dirs = sorted(dirs)
    if convention == "increasing":
        return tuple(dirs)
    if convention == "decreasing":
        return tuple(reversed(dirs))
    raise ValueError(f"unknown convention {convention!r}")


def _sub_cube(X, omega, order, start, stop):
    """Cube spanned by directions order[start:stop], entered at vertex w_start of the path."""
    slots = list(omega.slots)
    h, verts = np.array([omega.h]), np.array([omega.verts], dtype=np.int64)
    for j in order[:start]:
        h, verts = X.act(h, verts, j, omega.label(j))
        slots[j] = ("b", 1)
    for j in order[stop:]:
        slots[j] = ("b", 0)
    return Cube(int(h[0]), tuple(int(v) for v in verts[0]), tuple(slots))


def collapse_path(X, omega, convention="increasing"):
    """Edges of the path onto which the long diagonal of omega collapses.

    The collapse runs against the stretched ordering, so the diagonal's value
    under the approximation pull-back is the sum of x over these edges.
    """
    order = tuple(reversed(stretched_order(omega.S, convention)))
    return [_sub_cube(X, omega, order, i, i + 1) for i in range(len(order))]


def _approx_value(X, x, omega, order, start, stop, convention):
    """Pull-back of x along the approximation map on a path simplex of omega."""
    span = order[start:stop]
    if len(span) >= 2 and tuple(span) != stretched_order(span, convention):
        return None
    sigma = _sub_cube(X, omega, order, start, stop)
    return sigma, x[sigma]


def subdivision_cup_oracle(xs, convention="increasing"):
    """Cup product through subdivision, simplicial cup and approximation (t <= 3).

    Every ordering of the action directions of a target cube gives one top
    simplex of its subdivision; the simplicial cup reads factor r on the
    consecutive sub-path of that simplex and the subdivision map sums all
    simplices back onto the cube.
    """
    X = _check_same_complex(xs)
    if X.t > 3:
        raise CupError("the subdivision oracle is only defined for t <= 3")
    levels = [x.p for x in xs]
    p = sum(levels)
    if p > X.t:
        raise CupError("total level exceeds the complex dimension")
    sheaf = xs[0].sheaf
    for x in xs[1:]:
        sheaf = sheaf.tensor(x.sheaf)
    out = Cochain(X, sheaf, p)
    field = sheaf.field
    for idx in range(X.n_cells(p)):
        omega = X.cube_at(p, idx)
        total = None
        for order in itertools.permutations(omega.S):
            parts = []
            pos = 0
            ok = True
            for x, pr in zip(xs, levels):
                got = _approx_value(X, x, omega, order, pos, pos + pr, convention)
                if got is None:
                    ok = False
                    break
                sigma, val = got
                parts.append(_mat_vec(field, sheaf_morphism(x.sheaf, sigma, omega), val))
                pos += pr
            if not ok:
                continue
            v = parts[0]
            for w in parts[1:]:
                v = field.mul(v[:, None], w[None, :]).ravel()
            total = v if total is None else total ^ v
        if total is not None and total.any():
            out[omega] = total
    return out


def _mat_vec(field, M, v):
    return np.bitwise_xor.reduce(field.mul(M, v[None, :]), axis=1) if M.shape[1] else \
        np.zeros(M.shape[0], dtype=np.int64)


# ---------------------------------------------------------------------------
# pairing and cycles

def pairing(x, xi):
    if x.X is not xi.X or x.p != xi.p or x.sheaf.key != xi.sheaf.key:
        raise CupError("pairing needs a cochain and chain on the same complex, level and sheaf")
    return int(x.field.dot(x.vec, xi.vec))


def product_vector(X, sheaf, parts):
    """Tensor product of per-direction vectors on a product complex (l = 1, one factor).

    ``parts[j]`` is either ('edge', a) with a of shape (n, n') or ('vertex', z)
    with z of shape (2, n', m_j); the returned dof vector sits at the level
    given by the number of edge parts.
    """
    if X.l != 1:
        raise ComplexError("product vectors need an unlifted complex")
    if sheaf.n_factors != 1 and any(kind == "vertex" for kind, _ in parts):
        raise ComplexError("vertex parts need a single-factor sheaf")
    t = X.t
    if len(parts) != t:
        raise ComplexError("one part per direction is required")
    S = tuple(j for j, (kind, _) in enumerate(parts) if kind == "edge")
    p = len(S)
    k = X.block_index(p, S)
    field = sheaf.field
    arrays = []
    for j, (kind, a) in enumerate(parts):
        a = np.asarray(a, dtype=np.int64)
        if kind == "edge":
            if a.shape != (X.n, X.nv):
                raise ComplexError(f"edge part {j} must have shape (n, n')")
            arrays.append(a[:, :, None])
        else:
            if a.ndim == 2:
                a = a[:, :, None]
            if a.shape[:2] != (2, X.nv):
                raise ComplexError(f"vertex part {j} must have shape (2, n', m)")
            arrays.append(a)
    # outer product with axes (first_0, v_0, c_0, first_1, v_1, c_1, ...)
    out = None
    for a in arrays:
        out = a if out is None else field.mul(out[..., None, None, None], a)
    nonS = [j for j in range(t) if j not in S]
    perm = [3 * j for j in S] + [3 * j for j in nonS] + [3 * j + 1 for j in range(t)] \
        + [3 * j + 2 for j in range(t)]
    out = np.transpose(out, perm).reshape(-1)
    L = X.layout(sheaf, p)
    vec = np.zeros(L.size, dtype=np.int64)
    vec[L.offsets[k]:L.offsets[k + 1]] = out
    return p, vec


@dataclass
class CycleBasis:
    chains: list
    method: str
    factors: list = dc_field(default_factory=list)
    report: dict = dc_field(default_factory=dict)

    def __len__(self):
        return len(self.chains)


def solve_cycles(X, sheaf, p=None, method="auto", limit=None):
    """Basis of ker(boundary_p) with (tensor) sheaf coefficients.

    ``method='factored'`` (unlifted complexes, p = t) builds the kernel as the
    tensor product of per-direction kernels of the tensored local codes;
    ``'direct'`` solves the sparse boundary directly.
    """
    p = X.t if p is None else p
    if not 1 <= p <= X.t:
        raise ComplexError(f"cycle level must be in [1, {X.t}]")
    if method == "auto":
        method = "factored" if (X.l == 1 and p == X.t) else "direct"
    field = sheaf.field
    if method == "factored":
        if X.l != 1 or p != X.t:
            raise ComplexError("factored cycles need an unlifted complex at the top level")
        X1 = CubicalComplex(X.base, 1, 1)
        factors, dims = [], []
        for j in range(X.t):
            ht = tensored_local_code(sheaf, j)
            F1 = Sheaf([[ht]], field, check_rank=False)
            K = kernel_basis(boundary_matrix(X1, F1, 1))
            factors.append(K.reshape(K.shape[0], X.n, X.nv))
            dims.append(int(K.shape[0]))
        report = {"per_direction_kernel_dims": dims}
        if 0 in dims:
            report["killed_by"] = [j for j, d in enumerate(dims) if d == 0]
            return CycleBasis([], method, factors, report)
        chains = []
        for combo in itertools.product(*[range(d) for d in dims]):
            if limit is not None and len(chains) >= limit:
                break
            chains.append(tensor_cycle(X, sheaf, [factors[j][i] for j, i in enumerate(combo)]))
        report["dimension"] = int(np.prod(dims))
        return CycleBasis(chains, method, factors, report)
    if method == "direct":
        K = kernel_basis(boundary_matrix(X, sheaf, p))
        chains = [Chain(X, sheaf, p, row) for row in K[:limit]]
        return CycleBasis(chains, method, [], {"dimension": int(K.shape[0])})
    raise ValueError(f"unknown method {method!r}")


def tensor_cycle(X, sheaf, zetas):
    """Top chain xi(mu_1..mu_t; v_1..v_t) = prod_j zeta_j[mu_j, v_j] on an unlifted complex."""
    if X.l != 1:
        raise ComplexError("tensor cycles need an unlifted complex")
    field = sheaf.field
    out = None
    for z in zetas:
        z = np.asarray(z, dtype=np.int64).reshape(X.n, X.nv)
        out = z if out is None else field.mul(out[..., None, None], z)
    t = X.t
    # axes are (mu_0, v_0, mu_1, v_1, ...) -> (mu_0..mu_{t-1}, v_0..v_{t-1})
    perm = [2 * j for j in range(t)] + [2 * j + 1 for j in range(t)]
    vec = np.transpose(out, perm).reshape(-1)
    L = X.layout(sheaf, t)
    if L.dims[0] != 1:
        raise ComplexError("top cells must carry one-dimensional local spaces")
    return Chain(X, sheaf, t, vec)


def is_cycle(xi):
    return xi.p == 0 or not boundary_matrix(xi.X, xi.sheaf, xi.p).matvec(xi.vec).any()


# ---------------------------------------------------------------------------
# invariant forms

class InvariantForm:
    """T_xi(x_1, ..., x_rho) = <x_1 cup ... cup x_rho, xi> for a certified cycle xi."""

    def __init__(self, xi, levels=None, certify=True):
        if certify and not is_cycle(xi):
            raise CupError("xi is not a cycle; refusing to build an invariant form")
        self.xi = xi
        self.levels = tuple(levels) if levels is not None else None
        self.cache = {}

    def __call__(self, *xs):
        return self.evaluate(xs)

    def evaluate(self, xs):
        xs = list(xs)
        if sum(x.p for x in xs) != self.xi.p:
            raise CupError("cochain levels do not add up to the level of xi")
        if self.levels is not None and tuple(x.p for x in xs) != self.levels:
            raise CupError(f"expected factor levels {self.levels}")
        return pairing(cup_multi(xs), self.xi)

    def invariance_check(self, xs, trials, rng, density=1.0):
        """Perturb each slot by random coboundaries; report any value change."""
        base = self.evaluate(xs)
        failures = []
        for trial in range(trials):
            ys = []
            for x in xs:
                if x.p == 0:
                    ys.append(x)
                    continue
                y = Cochain.random(x.X, x.sheaf, x.p - 1, rng, density)
                ys.append(x + y.coboundary())
            v = self.evaluate(ys)
            if v != base:
                failures.append({"trial": trial, "value": v})
        return {"value": base, "trials": trials, "failures": failures, "passed": not failures}


def invariant_form(xi, xs=None, certify=True):
    T = InvariantForm(xi, certify=certify)
    if xs is None:
        return T
    return T.evaluate(xs)


def canonical_hat(X, sheaf=None, direction=0):
    """delta^0 of the one-dimensional complex over the base graph for one direction."""
    X1 = CubicalComplex(X.base, 1, 1)
    if sheaf is None:
        F1 = Sheaf.trivial(1, X.n)
    else:
        F1 = Sheaf([[f[direction]] for f in sheaf.factors], sheaf.field, check_rank=False)
    return X1, F1, coboundary_matrix(X1, F1, 0)


def addressable_xi(X, indices, sheaves=None):
    """xi = eta_{i_1} (x) ... (x) eta_{i_t} from the free variables per direction.

    ``sheaves`` is the tuple of factor sheaves (default: t trivial sheaves);
    the chain lives on their tensor product at level t.
    """
    if X.l != 1:
        raise ComplexError("addressable forms need an unlifted complex")
    t = X.t
    if len(indices) != t:
        raise ComplexError("one free-variable index per direction is required")
    if sheaves is None:
        sheaves = [Sheaf.trivial(t, X.n) for _ in range(t)]
    tensor = sheaves[0]
    for s in sheaves[1:]:
        tensor = tensor.tensor(s)
    etas = []
    for j, i in enumerate(indices):
        ht = tensored_local_code(tensor, j)
        X1 = CubicalComplex(X.base, 1, 1)
        F1 = Sheaf([[ht]], tensor.field, check_rank=False)
        fv = free_variables(coboundary_matrix(X1, F1, 0))
        if i not in fv.free:
            raise CupError(f"index {i} is not a free variable in direction {j}; "
                           f"free variables are {fv.free}")
        etas.append(fv.eta(i))
    return tensor_cycle(X, tensor, etas)


def free_edges(X, sheaf=None, direction=0):
    """Free variables of the designated one-dimensional check matrix in a direction."""
    _, _, D = canonical_hat(X, sheaf, direction)
    return free_variables(D)


# ---------------------------------------------------------------------------
# evaluation tensors and diagonal certificates

def evaluation_tensor(T, bases):
    """Evaluate the form on every tuple drawn from ``bases`` (one list per slot)."""
    shape = tuple(len(b) for b in bases)
    vals = np.zeros(shape, dtype=np.int64)
    for idx in itertools.product(*[range(s) for s in shape]):
        vals[idx] = T.evaluate([b[i] for b, i in zip(bases, idx)])
    return vals


@dataclass
class DiagonalCertificate:
    is_delta_diagonal: bool
    count: int
    constant: int | None
    offending: list

    def to_json(self):
        return {"is_delta_diagonal": self.is_delta_diagonal, "count": self.count,
                "constant": self.constant, "offending": [list(map(int, o)) for o in self.offending]}


def diagonal_certificate(values, max_offending=20):
    """Certify values[i_1..i_rho] = c * delta_{i_1..i_rho} with a nonzero constant c."""
    values = np.asarray(values, dtype=np.int64)
    if values.ndim == 0 or len(set(values.shape)) != 1:
        raise CupError("a diagonal certificate needs a cubical tensor")
    n = values.shape[0]
    diag = np.array([values[(i,) * values.ndim] for i in range(n)])
    mask = np.zeros(values.shape, dtype=bool)
    for i in range(n):
        mask[(i,) * values.ndim] = True
    off = np.argwhere((values != 0) & ~mask)
    offending = [tuple(o) for o in off[:max_offending]]
    c = int(diag[0]) if n else None
    ok = (len(off) == 0 and n > 0 and bool(np.all(diag == c)) and c != 0)
    if not ok and len(off) == 0:
        offending += [(i,) * values.ndim for i in range(n) if diag[i] != c or diag[i] == 0][:max_offending]
    return DiagonalCertificate(ok, n if ok else 0, c if ok else None, offending)
