"""CSS codes from cochain complexes, distances, and logical representatives."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .complexes import (Cochain, ComplexError, CubicalComplex, Sheaf, coboundary_matrix,
                        restricted_coboundary)
from .cupcap import product_vector
from .gfield import GF2, GAElement, IdealObstruction, ideal_analyze, standard_basis_solve
from .linalg import (Matrix, free_variables, image_membership, kernel_basis, kernel_dense, rank,
                     solve_dense)

__all__ = [
    "HomologyError", "Distance", "CssCode", "css_extract", "css_from_matrices", "distance_search",
    "Certificate", "LogicalBasis", "certify_logical", "noncoboundary_witness",
    "hgp_canonical_logicals", "polarized_logicals", "polarized_kernel_bound", "group_shift",
    "ga_act", "induced_vectors", "standardize_logicals", "Probe", "find_probe",
]


class HomologyError(ComplexError):
    pass


# ---------------------------------------------------------------------------
# CSS codes and distances

@dataclass
class Distance:
    status: str = "unknown"  # exact | lower_bounded | heuristic_upper | unknown
    lower: int = 1
    upper: int | None = None
    witness: np.ndarray | None = None

    @property
    def value(self):
        return self.upper if self.status == "exact" else None

    def to_json(self):
        d = {"status": self.status, "lower": self.lower, "upper": self.upper}
        if self.witness is not None:
            d["witness_support"] = np.flatnonzero(self.witness).tolist()
        return d


@dataclass
class CssCode:
    H_X: Matrix
    H_Z: Matrix
    N: int
    k: int
    d_X: Distance = dc_field(default_factory=Distance)
    d_Z: Distance = dc_field(default_factory=Distance)
    rank_X: int = 0
    rank_Z: int = 0

    def to_json(self):
        return {"N": self.N, "k": self.k, "rank_H_X": self.rank_X, "rank_H_Z": self.rank_Z,
                "d_X": self.d_X.to_json(), "d_Z": self.d_Z.to_json()}


def css_from_matrices(H_X, H_Z, field=GF2):
    if not isinstance(H_X, Matrix):
        H_X = Matrix.from_dense(np.asarray(H_X, dtype=np.int64), field)
    if not isinstance(H_Z, Matrix):
        H_Z = Matrix.from_dense(np.asarray(H_Z, dtype=np.int64), field)
    if H_X.shape[1] != H_Z.shape[1]:
        raise HomologyError("H_X and H_Z need the same number of columns")
    if not (H_X @ H_Z.T).is_zero():
        raise HomologyError("H_X H_Z^T != 0: not a CSS code")
    rx, rz = rank(H_X), rank(H_Z)
    N = H_X.shape[1]
    return CssCode(H_X, H_Z, N, N - rx - rz, rank_X=rx, rank_Z=rz)


def css_extract(X, F, p=1):
    """H_Z = delta^p and H_X = (delta^{p-1})^T with qudits on the p-cells."""
    if not 1 <= p <= X.t - 1:
        raise HomologyError(f"qudit level must satisfy 1 <= p <= t-1 = {X.t - 1}")
    H_Z = coboundary_matrix(X, F, p)
    H_X = coboundary_matrix(X, F, p - 1).T
    return css_from_matrices(H_X, H_Z, F.field)


def _logical_tester(code, which):
    """(check matrix A, kernel basis K): x is a logical iff A x = 0 and K x != 0."""
    A, B = (code.H_Z, code.H_X) if which == "X" else (code.H_X, code.H_Z)
    K = kernel_basis(B)
    return A, K


def _exact_upto(A, K, w, field, budget):
    """Exhaustive search for a logical of weight <= w (syndrome-driven branching).

    Any logical of weight <= w contains a logical whose support is reached by
    repeatedly adding a qudit of the first unsatisfied check, starting from its
    smallest qudit.  Returns (witness or None, complete flag, nodes visited).
    """
    N = A.shape[1]
    nonzero = list(range(1, field.q))
    nodes = 0
    best = None

    def is_logical(vec):
        return K.shape[0] > 0 and bool(np.any(_kmul(field, K, vec)))

    stack = []
    for q0 in range(N):
        # first coefficient normalised to 1
        stack.append(([q0], [1]))
        while stack:
            supp, vals = stack.pop()
            nodes += 1
            if nodes > budget:
                return best, False, nodes
            vec = np.zeros(N, dtype=np.int64)
            vec[supp] = vals
            syn = A.matvec(vec)
            bad = np.flatnonzero(syn)
            if bad.size == 0:
                if is_logical(vec):
                    if best is None or len(supp) < np.count_nonzero(best):
                        best = vec
                        w = len(supp) - 1  # only strictly lighter ones matter now
                continue
            if len(supp) >= w:
                continue
            c = int(bad[0])
            row = A.indices[A.indptr[c]:A.indptr[c + 1]]
            for qq in row:
                qq = int(qq)
                if qq <= q0 or qq in supp:
                    continue
                for v in nonzero:
                    stack.append((supp + [qq], vals + [v]))
    return best, True, nodes


def _kmul(field, K, vec):
    if field.s == 1:
        return (K @ vec) & 1
    return np.bitwise_xor.reduce(field.mul(K, vec[None, :]), axis=1)


def _heuristic(A, K, field, seed, iters):
    """Random information sets on the cocycle space; returns the lightest logical seen."""
    rng = np.random.default_rng(seed)
    G = kernel_basis(A)
    if G.shape[0] == 0 or K.shape[0] == 0:
        return None
    best = None
    from .linalg import rref_dense
    for _ in range(iters):
        perm = rng.permutation(G.shape[1])
        R, _, piv = rref_dense(G[:, perm], field)
        R = R[:len(piv)]
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        cands = R[:, inv]
        for vec in cands:
            if vec.any() and np.any(_kmul(field, K, vec)):
                if best is None or np.count_nonzero(vec) < np.count_nonzero(best):
                    best = vec.copy()
    return best


def _exhaustive_small(A, K, field, limit_bits=24):
    """Enumerate the whole cocycle space by meet-in-the-middle over GF(2)."""
    G = kernel_basis(A)
    dim = G.shape[0]
    if field.s != 1:
        if dim * field.s > limit_bits:
            raise HomologyError(f"cocycle space too large for exhaustive search ({dim} over {field})")
        best = None
        for coeffs in itertools.product(range(field.q), repeat=dim):
            c = np.asarray(coeffs, dtype=np.int64)
            if not c.any():
                continue
            vec = np.bitwise_xor.reduce(field.mul(G, c[:, None]), axis=0)
            if np.any(_kmul(field, K, vec)) and (best is None or
                                                  np.count_nonzero(vec) < np.count_nonzero(best)):
                best = vec
        return best
    if dim > limit_bits:
        raise HomologyError(f"cocycle space of dimension {dim} exceeds the exhaustive limit")
    if dim == 0:
        return None
    sig = (K @ G.T) & 1 if K.shape[0] else np.zeros((0, dim), dtype=np.int64)
    lo = dim // 2
    hi = dim - lo

    def span(rows, sigs, count):
        vecs = np.zeros((1 << count, G.shape[1]), dtype=np.uint8)
        ss = np.zeros((1 << count, sig.shape[0]), dtype=np.uint8)
        for b in range(count):
            size = 1 << b
            vecs[size:2 * size] = vecs[:size] ^ rows[b]
            ss[size:2 * size] = ss[:size] ^ sigs[b]
        return vecs, ss

    Gl, Sl = span(G[:lo].astype(np.uint8), sig[:, :lo].T.astype(np.uint8), lo)
    Gh, Sh = span(G[lo:].astype(np.uint8), sig[:, lo:].T.astype(np.uint8), hi)
    Pl = np.packbits(Gl, axis=1)
    Ph = np.packbits(Gh, axis=1)
    Ql = np.packbits(Sl, axis=1) if sig.shape[0] else np.zeros((len(Gl), 1), dtype=np.uint8)
    Qh = np.packbits(Sh, axis=1) if sig.shape[0] else np.zeros((len(Gh), 1), dtype=np.uint8)
    popcnt = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)
    best_w, best = None, None
    for i in range(len(Ph)):
        logical = (Ql ^ Qh[i]).any(axis=1)
        if not logical.any():
            continue
        wts = popcnt[Pl ^ Ph[i]].sum(axis=1)
        wts[~logical] = 1 << 60
        j = int(np.argmin(wts))
        if best_w is None or wts[j] < best_w:
            best_w = int(wts[j])
            best = (Gl[j] ^ Gh[i]).astype(np.int64)
    return best


def distance_search(code, mode="exact_upto", w=None, seed=0, iters=200, which="both",
                    budget=2_000_000):
    """Tri-state distance search; updates ``code.d_X`` / ``code.d_Z`` in place and returns it.

    ``exact_upto``: exhaustive certification that no logical has weight <= w,
    paired with a heuristic witness; ``exhaustive_small``: full enumeration of
    the cocycle space; ``heuristic``: random information sets only.
    """
    field = code.H_X.field
    kinds = ["X", "Z"] if which == "both" else [which]
    for kind in kinds:
        A, K = _logical_tester(code, kind)
        if K.shape[0] == 0 or code.k == 0:
            setattr(code, f"d_{kind}", Distance("exact", lower=code.N + 1, upper=None))
            continue
        if mode == "exhaustive_small":
            wit = _exhaustive_small(A, K, field)
            d = Distance("exact", lower=int(np.count_nonzero(wit)), upper=int(np.count_nonzero(wit)),
                         witness=wit)
        elif mode == "heuristic":
            wit = _heuristic(A, K, field, seed, iters)
            d = Distance("heuristic_upper", lower=1, upper=int(np.count_nonzero(wit)), witness=wit)
        elif mode == "exact_upto":
            if w is None:
                raise HomologyError("exact_upto needs a weight cutoff w")
            heur = _heuristic(A, K, field, seed, iters)
            u = None if heur is None else int(np.count_nonzero(heur))
            cutoff = w if u is None else min(w, u - 1)
            found, complete, _ = _exact_upto(A, K, cutoff, field, budget)
            if not complete:
                up = found if found is not None else heur
                d = Distance("heuristic_upper", lower=1,
                             upper=None if up is None else int(np.count_nonzero(up)), witness=up)
            elif found is not None:
                wt = int(np.count_nonzero(found))
                d = Distance("exact", lower=wt, upper=wt, witness=found)
            elif u is not None and u == cutoff + 1:
                d = Distance("exact", lower=u, upper=u, witness=heur)
            else:
                d = Distance("lower_bounded", lower=cutoff + 1, upper=u, witness=heur)
        else:
            raise HomologyError(f"unknown distance mode {mode!r}")
        setattr(code, f"d_{kind}", d)
    return code


# ---------------------------------------------------------------------------
# certificates

@dataclass
class Certificate:
    cocycle: bool
    noncoboundary: bool | None
    method: str
    witness: np.ndarray | None = None

    def to_json(self):
        d = {"cocycle": self.cocycle, "noncoboundary": self.noncoboundary, "method": self.method}
        if self.witness is not None:
            d["witness_support_size"] = int(np.count_nonzero(self.witness))
        return d

    @property
    def ok(self):
        return bool(self.cocycle and self.noncoboundary)


def _components(rows, cols, n_rows, n_cols):
    """Connected components of the bipartite incidence graph (label propagation)."""
    lab_c = np.arange(n_cols, dtype=np.int64)
    while True:
        lab_r = np.full(n_rows, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(lab_r, rows, lab_c[cols])
        new = lab_c.copy()
        np.minimum.at(new, cols, lab_r[rows])
        # jump to the label's label to speed up convergence
        new = new[new]
        if np.array_equal(new, lab_c):
            break
        lab_c = new
    lab_r = np.full(n_rows, -1, dtype=np.int64)
    np.maximum.at(lab_r, rows, lab_c[cols])
    return lab_r, lab_c


def noncoboundary_witness(x, rows=None, dense_limit=6000):
    """Cycle w with <x, w> != 0, certifying x is not a coboundary (or None).

    With ``rows`` (dof indices of C^p) the search is restricted to chains
    supported there: the restricted coboundary splits into independent
    components and each is tested separately.  Without it, a dense membership
    test on the full coboundary is used when small enough.
    """
    X, F, p = x.X, x.sheaf, x.p
    if p == 0:
        return None if not x.vec.any() else _zero_level_witness(x)
    D = coboundary_matrix(X, F, p - 1)
    field = F.field
    if rows is None:
        if D.shape[1] > dense_limit and D.shape[0] > dense_limit:
            raise HomologyError("coboundary too large for a dense witness search; pass rows=")
        res = image_membership(D, x.vec)
        return None if res.member else res.witness
    rows = np.asarray(rows, dtype=np.int64)
    if np.any(x.vec[np.setdiff1d(np.arange(len(x.vec)), rows)]):
        raise HomologyError("x is not supported inside the chosen rows")
    Dr = D.select_rows(rows)
    r, c, _ = Dr.coo()
    lab_r, lab_c = _components(r, c, Dr.shape[0], Dr.shape[1])
    xr = x.vec[rows]
    for comp in np.unique(lab_r[np.flatnonzero(xr)]):
        rsel = np.flatnonzero(lab_r == comp)
        csel = np.flatnonzero(lab_c == comp)
        sub = Dr.select_rows(rsel).select_cols(csel) if len(csel) else Matrix.zeros((len(rsel), 0), field)
        if sub.shape[1] == 0:
            w = np.zeros(len(xr), dtype=np.int64)
            j = rsel[np.flatnonzero(xr[rsel])[0]]
            w[j] = 1
        else:
            res = image_membership(sub, xr[rsel])
            if res.member:
                continue
            w = np.zeros(len(xr), dtype=np.int64)
            w[rsel] = res.witness
        full = np.zeros(len(x.vec), dtype=np.int64)
        full[rows] = w
        return full
    return None


def _zero_level_witness(x):
    w = np.zeros_like(x.vec)
    j = int(np.flatnonzero(x.vec)[0])
    w[j] = x.field.inv(int(x.vec[j]))
    return w


def certify_logical(x, witness=None, rows=None, dense_limit=6000):
    """Cocycle check plus a verified non-coboundary witness (a cycle pairing nonzero with x)."""
    X, F, p = x.X, x.sheaf, x.p
    coc = True if p == X.t else not coboundary_matrix(X, F, p).matvec(x.vec).any()
    method = "given"
    if witness is None:
        try:
            witness = noncoboundary_witness(x, rows=rows, dense_limit=dense_limit)
            method = "restricted_membership" if rows is not None else "membership"
        except HomologyError:
            return Certificate(coc, None, "too_large")
    if witness is None:
        return Certificate(coc, False if rows is None else None,
                           "membership" if rows is None else "restricted_inconclusive")
    ok = _verify_witness(x, witness)
    return Certificate(coc, ok, method, witness if ok else None)


def _verify_witness(x, w):
    X, F, p = x.X, x.sheaf, x.p
    if p > 0 and coboundary_matrix(X, F, p - 1).rmatvec(w).any():
        return False
    return int(x.field.dot(x.vec, w)) != 0


# ---------------------------------------------------------------------------
# logical bases

@dataclass
class LogicalBasis:
    representatives: list
    kind: str
    provenance: dict = dc_field(default_factory=dict)
    certificates: list = dc_field(default_factory=list)

    def __len__(self):
        return len(self.representatives)

    def __getitem__(self, i):
        return self.representatives[i]

    def __iter__(self):
        return iter(self.representatives)

    def to_json(self):
        return {"kind": self.kind, "provenance": _jsonable(self.provenance),
                "representatives": [r.to_json() for r in self.representatives],
                "certificates": [c.to_json() for c in self.certificates]}


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.integer):
        return int(o)
    return o


def _one_dim(X, sheaf, j):
    X1 = CubicalComplex(X.base, 1, 1)
    F1 = Sheaf([[f[j]] for f in sheaf.factors], sheaf.field, check_rank=False)
    return X1, F1


def hgp_canonical_logicals(X, direction=0, sheaf=None, z=None, labels=None, certify=True):
    """e_f (x) zeta_j representatives, one per free variable of the designated check matrix.

    ``z[j]`` are the constant local vectors of zeta_j (default all-ones for the
    trivial sheaf); ``labels[j]`` asks for the normalisation h_j^T(a_j, -) z_j = 1.
    """
    if X.l != 1:
        raise HomologyError("canonical HGP logicals need an unlifted complex (use polarized_logicals)")
    t = X.t
    if sheaf is None:
        sheaf = Sheaf.trivial(t, X.n)
    if sheaf.n_factors != 1:
        raise HomologyError("canonical logicals need a single-factor sheaf")
    field = sheaf.field
    X1, F1 = _one_dim(X, sheaf, direction)
    D = coboundary_matrix(X1, F1, 0)
    fv = free_variables(D)
    zs = {}
    for j in range(t):
        if j == direction:
            continue
        h = sheaf.factors[0][j]
        m = h.shape[0]
        if z is not None and j in z:
            zj = np.asarray(z[j], dtype=np.int64)
        elif labels is not None and j in labels:
            a = labels[j]
            sol = solve_dense(h[:, [a]].T, np.array([1]), field)
            if sol is None:
                ok = [mu for mu in range(X.n) if h[:, mu].any()]
                raise HomologyError(f"no local vector z with h^T(a={a}, -) z = 1 in direction {j}; "
                                    f"admissible labels are {ok}")
            zj = sol
        else:
            if m != 1:
                zj = np.zeros(m, dtype=np.int64)
                zj[0] = 1
            else:
                zj = np.ones(1, dtype=np.int64)
        if labels is not None and j in labels and int(field.dot(h[:, labels[j]], zj)) != 1:
            raise HomologyError(f"z in direction {j} violates the normalisation at label {labels[j]}")
        zs[j] = zj
    reps, certs = [], []
    for f in fv.free:
        e = np.zeros(X.n * X.nv, dtype=np.int64)
        e[f] = 1
        parts = []
        for j in range(t):
            if j == direction:
                parts.append(("edge", e.reshape(X.n, X.nv)))
            else:
                parts.append(("vertex", np.broadcast_to(zs[j], (2, X.nv, len(zs[j]))).copy()))
        p, vec = product_vector(X, sheaf, parts)
        x = Cochain(X, sheaf, p, vec)
        reps.append(x)
        if certify:
            wit = _canonical_witness(X, sheaf, direction, fv.eta(f), zs)
            certs.append(certify_logical(x, witness=wit))
    return LogicalBasis(reps, "canonical_hgp",
                        {"direction": direction, "free_variables": list(fv.free),
                         "z": {j: v.tolist() for j, v in zs.items()}}, certs)


def _canonical_witness(X, sheaf, direction, eta, zs):
    """eta (x) point chains with <z_j, w_j> = 1."""
    field = sheaf.field
    parts = []
    for j in range(X.t):
        if j == direction:
            parts.append(("edge", eta.reshape(X.n, X.nv)))
        else:
            zj = zs[j]
            w = np.zeros((2, X.nv, len(zj)), dtype=np.int64)
            c = int(np.flatnonzero(zj)[0])
            w[0, 0, c] = field.inv(int(zj[c]))
            parts.append(("vertex", w))
    _, vec = product_vector(X, sheaf, parts)
    return vec


def _is_prime(n):
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


def polarized_kernel_bound(t, nu, nu_prime, n, l, V):
    """Lower bound on dim ker of the restricted coboundary (small nu, nu')."""
    a = (1.0 / (t - 1)) * ((1 - nu) ** (t - 1) + (t - 2) / 2 ** (t - 1)
                           + (t - 2) * (t - 1) / 2 ** (t - 3) * nu_prime * nu)
    b = ((t - 2) / (t - 1)) * ((t - 1) * nu_prime * (1 - nu) ** (t - 2)
                               + (nu_prime + (t - 1) * nu) / 2 ** (t - 2)
                               + (t - 1) * (t - 2) / 2 ** (t - 3) * nu_prime * nu ** 2)
    return (a - b) * 0.5 * n ** t * l * V ** t


def block_rows(X, F, p, S, anchor=None, j=None):
    """Dof indices of level-p cells with action set S (optionally at an anchor of direction j)."""
    L = X.layout(F, p)
    k = X.block_index(p, tuple(S))
    cells = np.arange(X.block_size[p])
    if anchor is not None:
        c = X.decode_local(p, k, cells)
        keep = (c["verts"][:, j] == anchor[0]) & (c["lab"][:, j] == anchor[1])
        cells = cells[keep]
    d = L.dims[k]
    return (L.offsets[k] + cells[:, None] * d + np.arange(d)[None, :]).ravel()


def polarized_logicals(X, F, anchor, direction=0, certify=True, max_reps=None):
    """Kernel of the restricted coboundary at an anchor edge [v; a], embedded into C^1."""
    if X.l == 1:
        raise HomologyError("polarized logicals need a lifted complex; use hgp_canonical_logicals")
    if not _is_prime(X.l):
        raise HomologyError(f"lift order {X.l} is not prime")
    M, rows, cols = restricted_coboundary(X, F, direction, anchor)
    K = kernel_dense(M.to_dense(), F.field)
    if K.shape[0] == 0:
        raise HomologyError("restricted coboundary has a trivial kernel at this anchor; the local "
                            "code ranks probably violate the polarized regime")
    if max_reps is not None:
        K = K[:max_reps]
    reps, certs = [], []
    L1 = X.layout(F, 1)
    rows_dir = block_rows(X, F, 1, (direction,))
    for kv in K:
        vec = np.zeros(L1.size, dtype=np.int64)
        vec[cols] = kv
        x = Cochain(X, F, 1, vec)
        reps.append(x)
        if certify:
            certs.append(certify_logical(x, rows=rows_dir))
    return LogicalBasis(reps, "polarized",
                        {"anchor": list(anchor), "direction": direction,
                         "kernel_dimension": int(K.shape[0]), "restricted_shape": list(M.shape)},
                        certs)


# ---------------------------------------------------------------------------
# cyclic action and induced vectors

def group_shift(x, s):
    """(s . x)(h, ...) = x(h - s, ...), the action of the lift group on cochains."""
    X = x.X
    L = x.layout
    out = np.empty_like(x.vec)
    for k, d in enumerate(L.dims):
        blk = x.vec[L.offsets[k]:L.offsets[k + 1]]
        pre = X.block_size[x.p] // X.group_size
        arr = blk.reshape(pre, X.l, X.group_size // X.l, d)
        out[L.offsets[k]:L.offsets[k + 1]] = np.roll(arr, s, axis=1).ravel()
    return type(x)(X, x.sheaf, x.p, out)


def ga_act(f, x):
    """f(x) . cochain = sum_i f_i (i . cochain)."""
    field = x.field
    acc = np.zeros_like(x.vec)
    for i, c in enumerate(f.coeffs):
        if c:
            acc ^= field.mul(int(c), group_shift(x, i).vec)
    return type(x)(x.X, x.sheaf, x.p, acc)


@dataclass(frozen=True)
class Probe:
    """Base corner (v_1..v_t) and labels (a_1..a_t) of a base cube, plus the polarized direction."""
    verts: tuple
    labels: tuple
    direction: int = 0

    def to_json(self):
        return {"verts": list(self.verts), "labels": list(self.labels), "direction": self.direction}


def induced_vectors(basis, probe):
    """Length-l evaluations over the fiber of the probe edge (bit-0 convention)."""
    reps = basis.representatives if isinstance(basis, LogicalBasis) else list(basis)
    out = []
    for x in reps:
        out.append(_induced(x, probe))
    return out


def _induced(x, probe):
    X, F = x.X, x.sheaf
    j0 = probe.direction
    k = X.block_index(1, (j0,))
    l = X.l
    lab = -np.ones((l, X.t), dtype=np.int64)
    bit = np.zeros((l, X.t), dtype=np.int64)
    lab[:, j0] = probe.labels[j0]
    bit[:, j0] = -1
    verts = np.tile(np.asarray(probe.verts, dtype=np.int64), (l, 1))
    idx = X.encode(1, k, lab, bit, np.arange(l), verts) - k * X.block_size[1]
    L = x.layout
    d = L.dims[k]
    vals = x.vec[(L.offsets[k] + idx * d)[:, None] + np.arange(d)[None, :]]
    axes = F.local_dims((j0,))
    arr = vals.reshape((l,) + tuple(m for _, _, m in axes))
    field = F.field
    for pos in range(len(axes) - 1, -1, -1):
        r, j, m = axes[pos]
        w = F.factors[r][j][:, probe.labels[j]]
        arr = np.bitwise_xor.reduce(field.mul(np.moveaxis(arr, pos + 1, -1), w), axis=-1)
    return GAElement(l, arr.reshape(l).copy(), field)


def find_probe(basis, X, direction, anchor, max_tries=None):
    """Scan probes at the anchor in canonical order; return the first whole-algebra probe.

    Returns (probe, ideal report, list of tried probe records).
    """
    tried = []
    others = [j for j in range(X.t) if j != direction]
    count = 0
    for vs in itertools.product(range(X.nv), repeat=len(others)):
        for labs in itertools.product(range(X.n), repeat=len(others)):
            verts = [0] * X.t
            labels = [0] * X.t
            verts[direction], labels[direction] = anchor
            for j, v, a in zip(others, vs, labs):
                verts[j], labels[j] = v, a
            probe = Probe(tuple(verts), tuple(labels), direction)
            vecs = [v for v in induced_vectors(basis, probe) if not v.is_zero()]
            rep = ideal_analyze(vecs, l=X.l, field=basis.representatives[0].field)
            tried.append({"probe": probe.to_json(), "dimension": rep.dimension,
                          "containing": [repr(f) for f in rep.containing]})
            if rep.is_whole_algebra:
                return probe, rep, tried
            count += 1
            if max_tries is not None and count >= max_tries:
                return None, rep, tried
    return None, None, tried


def standardize_logicals(basis, probe, certify=True):
    """Exactly l representatives L^j whose induced vectors at the probe are x^j."""
    reps = list(basis.representatives)
    if not reps:
        raise HomologyError("empty logical basis")
    vecs = induced_vectors(reps, probe)
    keep = [i for i, v in enumerate(vecs) if not v.is_zero()]
    if not keep:
        raise IdealObstruction("all induced vectors vanish at this probe", ())
    gens = [vecs[i] for i in keep]
    rep = ideal_analyze(gens)
    if not rep.is_whole_algebra:
        raise IdealObstruction(
            f"induced vectors span a proper ideal (dimension {rep.dimension}) contained in "
            f"{', '.join('<%r>' % f for f in rep.containing)}; try another probe", rep.containing)
    X = reps[0].X
    l = X.l
    out, certs = [], []
    rows_dir = block_rows(X, reps[0].sheaf, 1, (probe.direction,))
    for j in range(l):
        fs = standard_basis_solve(gens, j)
        acc = Cochain(X, reps[0].sheaf, reps[0].p)
        for f, i in zip(fs, keep):
            acc = acc + ga_act(f, reps[i])
        got = _induced(acc, probe)
        expect = np.zeros(l, dtype=np.int64)
        expect[j] = 1
        if not np.array_equal(got.coeffs, expect):  # pragma: no cover
            raise AssertionError("standardised representative does not evaluate to x^j")
        out.append(acc)
        if certify:
            certs.append(certify_logical(acc, rows=rows_dir))
    pairwise = []
    if certify:
        for a, b in itertools.combinations(range(l), 2):
            c = certify_logical(out[a] + out[b], rows=rows_dir)
            pairwise.append({"pair": [a, b], "inequivalent": bool(c.noncoboundary)})
    return LogicalBasis(out, "standardized",
                        {"probe": probe.to_json(), "source_kind": basis.kind
                         if isinstance(basis, LogicalBasis) else "list",
                         "ideal_dimension": rep.dimension, "pairwise": pairwise}, certs)
