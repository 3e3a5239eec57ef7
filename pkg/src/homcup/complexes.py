"""Cubical complexes built from (lifted) Cartesian powers of a labelled graph.

A p-cell is ``[g; (a_i)_{i in S}, (b_j)_{j not in S}]`` with ``g = (h, v_1..v_t)``
the corner at which every action direction has bit 0.  Cells of level p are
indexed canonically: action sets S in ``itertools.combinations`` order, and
inside a block the mixed radix (labels, bits, h, v_1..v_t), most significant
first.  Direction j acts by ``v_j -> nbr[v_j, mu]`` and ``h -> h + volt[v_j, mu]``.
"""
from __future__ import annotations

import hashlib
import itertools
import os
from dataclasses import dataclass
from math import comb

import numpy as np

from .gfield import GF2
from .graphs import BaseGraph, LiftedGraph, double_cover, lift_rng
from .linalg import Matrix, rank_dense

__all__ = [
    "ComplexError", "Cube", "CubicalComplex", "build_complex", "Sheaf", "TensorSheaf",
    "tensor_sheaf", "Cochain", "Chain", "cube_incidence", "sheaf_morphism",
    "coboundary_matrix", "boundary_matrix", "restricted_coboundary", "tanner_check_matrix",
    "local_code_library", "repetition_dual", "rs_vandermonde", "random_local_code",
    "code_distances", "tensored_local_code",
]


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Cube:
    """A cell.  ``slots[j]`` is ``('a', mu)`` for an action direction or ``('b', bit)``."""
    h: int
    verts: tuple
    slots: tuple

    @property
    def S(self):
        return tuple(j for j, s in enumerate(self.slots) if s[0] == "a")

    @property
    def dim(self):
        return len(self.S)

    def label(self, j):
        kind, val = self.slots[j]
        if kind != "a":
            raise ComplexError(f"direction {j} is not an action slot")
        return val

    def bit(self, j):
        kind, val = self.slots[j]
        if kind != "b":
            raise ComplexError(f"direction {j} is not a bit slot")
        return val

    def __repr__(self):
        sl = ",".join(f"a{v}" if k == "a" else str(v) for k, v in self.slots)
        return f"[({self.h};{','.join(map(str, self.verts))}); {sl}]"


# ---------------------------------------------------------------------------
# sheaves

class Sheaf:
    """Tensor product of one or more local-code sheaves on a t-dimensional complex.

    ``factors[r][j]`` is the parity-check matrix h_j (m_j x n) of factor r in
    direction j.  The local space of a cell with action set S is the tensor
    over factors (outer) and non-action directions in increasing order (inner)
    of GF(q)^{m_j}.
    """

    def __init__(self, factors, field=GF2, check_rank=True):
        factors = [[np.asarray(h, dtype=np.int64) for h in f] for f in factors]
        if not factors:
            raise ComplexError("a sheaf needs at least one factor")
        t = len(factors[0])
        n = factors[0][0].shape[1]
        for f in factors:
            if len(f) != t:
                raise ComplexError("all factors need one local matrix per direction")
            for h in f:
                if h.ndim != 2 or h.shape[1] != n:
                    raise ComplexError("local matrices must be m x n with a common n")
                if np.any((h < 0) | (h >= field.q)):
                    raise ComplexError("local matrix entry outside the field")
                if check_rank and rank_dense(h, field) != h.shape[0]:
                    raise ComplexError("local parity-check matrices must have full row rank")
        self.factors = factors
        self.field = field
        self.t = t
        self.n = n
        self.m = [[h.shape[0] for h in f] for f in factors]
        self._block_cache = {}
        h = hashlib.sha256(f"{field.s}:{field.modulus}".encode())
        for f in factors:
            for M in f:
                h.update(np.asarray(M.shape, dtype=np.int64).tobytes())
                h.update(np.ascontiguousarray(M).tobytes())
        self.key = h.hexdigest()[:16]

    @classmethod
    def single(cls, locals_, field=GF2):
        return cls([list(locals_)], field)

    @classmethod
    def trivial(cls, t, n, field=GF2):
        return cls([[np.ones((1, n), dtype=np.int64)] * t], field)

    def tensor(self, other):
        if other.field != self.field or other.t != self.t or other.n != self.n:
            raise ComplexError("cannot tensor sheaves on different complexes/fields")
        return Sheaf(self.factors + other.factors, self.field, check_rank=False)

    @property
    def n_factors(self):
        return len(self.factors)

    def local_dims(self, S):
        """[(factor, direction, m)] for the axes of the local space at action set S."""
        S = set(S)
        return [(r, j, self.m[r][j]) for r in range(len(self.factors))
                for j in range(self.t) if j not in S]

    def local_dim(self, S):
        d = 1
        for _, _, m in self.local_dims(S):
            d *= m
        return d

    def morphism_block(self, S_tau, j0, mu):
        """Matrix of F_{sigma,tau} where sigma drops direction j0 (label mu) from tau."""
        key = (tuple(S_tau), j0, int(mu))
        B = self._block_cache.get(key)
        if B is None:
            B = np.ones((1, 1), dtype=np.int64)
            for r, j, m in self.local_dims(set(S_tau) - {j0}):
                part = (self.factors[r][j][:, mu][None, :] if j == j0
                        else np.eye(m, dtype=np.int64))
                B = _fkron(B, part, self.field)
            self._block_cache[key] = B
        return B

    def to_json(self):
        return {"field": self.field.to_json(),
                "factors": [[h.tolist() for h in f] for f in self.factors]}

    @classmethod
    def from_json(cls, d):
        from .gfield import Field
        F = Field.from_json(d["field"]) if "field" in d else GF2
        return cls(d["factors"], F)

    def __repr__(self):
        return f"Sheaf(factors={len(self.factors)}, m={self.m}, {self.field!r})"


TensorSheaf = Sheaf


def tensor_sheaf(*sheaves):
    out = sheaves[0]
    for s in sheaves[1:]:
        out = out.tensor(s)
    return out


def _fkron(A, B, F):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    out = F.mul(A[:, None, :, None], B[None, :, None, :])
    return out.reshape(A.shape[0] * B.shape[0], A.shape[1] * B.shape[1])


# ---------------------------------------------------------------------------
# the complex

class CubicalComplex:
    def __init__(self, base, t, l=1, voltage=None, seed=None, allow_even=False):
        if not isinstance(base, BaseGraph):
            raise ComplexError("base must be a BaseGraph")
        if t < 1:
            raise ComplexError("dimension t must be >= 1")
        l = int(l)
        if l < 1:
            raise ComplexError("lift order must be >= 1")
        if l % 2 == 0 and not allow_even:
            raise ComplexError(f"even lift order {l} rejected: the lift group must be abelian of "
                               "odd order for extensions of logicals to remain logicals")
        self.base = base
        self.t = int(t)
        self.l = l
        self.n = base.degree
        self.nv = base.n_vertices
        if voltage is None:
            if l == 1:
                voltage = np.zeros(base.n_edges, dtype=np.int64)
            else:
                voltage = lift_rng(0 if seed is None else seed).integers(0, l, size=base.n_edges)
        voltage = np.asarray(voltage, dtype=np.int64) % l
        if voltage.shape != (base.n_edges,):
            raise ComplexError("one voltage per base edge is required")
        self.voltage = voltage
        self.seed = seed
        self.nbr = base.nbr
        self.inv_nbr = base.inv_nbr
        self.volt = LiftedGraph.voltage_table_for(base, voltage, l)
        self.group_size = l * self.nv ** self.t
        self.blocks = [list(itertools.combinations(range(self.t), p)) for p in range(self.t + 1)]
        self.block_size = [self.n ** p * 2 ** (self.t - p) * self.group_size
                           for p in range(self.t + 1)]
        self._layouts = {}
        self._cob = {}
        self._verify_counts()

    # -- sizes --------------------------------------------------------------
    def n_cells(self, p):
        return len(self.blocks[p]) * self.block_size[p]

    def cell_count_formula(self, p):
        return comb(self.t, p) * 2 ** (self.t - p) * self.n ** p * self.group_size

    def _verify_counts(self):
        for p in range(self.t + 1):
            if self.n_cells(p) != self.cell_count_formula(p):  # pragma: no cover
                raise AssertionError("cell count mismatch")
        if self.t <= 4 and sum(self.n_cells(p) for p in range(self.t + 1)) <= 200_000:
            for p in range(self.t + 1):
                for k in range(len(self.blocks[p])):
                    c = self.block_cells(p, k)
                    idx = self.encode(p, k, c["lab"], c["bit"], c["h"], c["verts"])
                    if not np.array_equal(idx, k * self.block_size[p] + np.arange(self.block_size[p])):
                        raise AssertionError("cell enumeration is not a bijection")  # pragma: no cover

    def digest(self):
        h = hashlib.sha256()
        h.update(self.base.digest().encode())
        h.update(f"{self.t}:{self.l}".encode())
        h.update(self.voltage.tobytes())
        return h.hexdigest()[:16]

    def __repr__(self):
        return (f"CubicalComplex(t={self.t}, l={self.l}, n={self.n}, n'={self.nv}, "
                f"|G|={self.group_size}, cells={[self.n_cells(p) for p in range(self.t + 1)]})")

    def to_json(self):
        return {"t": self.t, "base": self.base.to_json(), "l": self.l,
                "voltage": self.voltage.tolist(), "seed": self.seed}

    # -- indexing -----------------------------------------------------------
    def block_index(self, p, S):
        return self.blocks[p].index(tuple(S))

    def decode_local(self, p, k, i):
        """Decode block-local indices into label/bit tables over all t directions."""
        S = self.blocks[p][k]
        nonS = [j for j in range(self.t) if j not in S]
        i = np.asarray(i, dtype=np.int64)
        N = i.shape[0]
        verts = np.zeros((N, self.t), dtype=np.int64)
        rest = i.copy()
        for j in range(self.t - 1, -1, -1):
            verts[:, j] = rest % self.nv
            rest //= self.nv
        h = rest % self.l
        rest //= self.l
        lab = -np.ones((N, self.t), dtype=np.int64)
        bit = -np.ones((N, self.t), dtype=np.int64)
        for j in reversed(nonS):
            bit[:, j] = rest & 1
            rest >>= 1
        for j in reversed(S):
            lab[:, j] = rest % self.n
            rest //= self.n
        return {"lab": lab, "bit": bit, "h": h, "verts": verts}

    def block_cells(self, p, k):
        return self.decode_local(p, k, np.arange(self.block_size[p]))

    def encode(self, p, k, lab, bit, h, verts):
        S = self.blocks[p][k]
        nonS = [j for j in range(self.t) if j not in S]
        idx = np.zeros(np.asarray(h).shape[0], dtype=np.int64)
        for j in S:
            idx = idx * self.n + lab[:, j]
        for j in nonS:
            idx = idx * 2 + bit[:, j]
        idx = idx * self.l + h
        for j in range(self.t):
            idx = idx * self.nv + verts[:, j]
        return k * self.block_size[p] + idx

    def decode(self, p, idx):
        idx = np.asarray(idx, dtype=np.int64)
        k = idx // self.block_size[p]
        return k, idx - k * self.block_size[p]

    def act(self, h, verts, j, mu):
        """Apply generator a_j^mu to corners (vectorised)."""
        v = verts[:, j]
        h2 = (h + self.volt[v, mu]) % self.l
        verts2 = verts.copy()
        verts2[:, j] = self.nbr[v, mu]
        return h2, verts2

    def act_inverse(self, h, verts, j, mu):
        v = self.inv_nbr[verts[:, j], mu]
        h2 = (h - self.volt[v, mu]) % self.l
        verts2 = verts.copy()
        verts2[:, j] = v
        return h2, verts2

    def cube_index(self, cube):
        S = cube.S
        p = len(S)
        k = self.block_index(p, S)
        lab = -np.ones((1, self.t), dtype=np.int64)
        bit = -np.ones((1, self.t), dtype=np.int64)
        for j, (kind, val) in enumerate(cube.slots):
            if kind == "a":
                if not 0 <= val < self.n:
                    raise ComplexError(f"label {val} out of range")
                lab[0, j] = val
            else:
                if val not in (0, 1):
                    raise ComplexError(f"bit {val} out of range")
                bit[0, j] = val
        if not 0 <= cube.h < self.l or any(not 0 <= v < self.nv for v in cube.verts) \
                or len(cube.verts) != self.t:
            raise ComplexError(f"{cube!r} is not a cell of this complex")
        return int(self.encode(p, k, lab, bit, np.array([cube.h]),
                               np.array([cube.verts], dtype=np.int64))[0])

    def cube_at(self, p, idx):
        k, i = self.decode(p, np.array([idx]))
        c = self.decode_local(p, int(k[0]), i)
        slots = tuple(("a", int(c["lab"][0, j])) if c["lab"][0, j] >= 0 else ("b", int(c["bit"][0, j]))
                      for j in range(self.t))
        return Cube(int(c["h"][0]), tuple(int(v) for v in c["verts"][0]), slots)

    def cube(self, h, verts, slots):
        """Convenience constructor: slots like ('a0', 1, 'a2') meaning labels/bits."""
        sl = []
        for s in slots:
            if isinstance(s, str) and s.startswith("a"):
                sl.append(("a", int(s[1:])))
            elif isinstance(s, tuple):
                sl.append(s)
            else:
                sl.append(("b", int(s)))
        c = Cube(int(h), tuple(int(v) for v in verts), tuple(sl))
        self.cube_index(c)
        return c

    # -- dof layouts ---------------------------------------------------------
    def layout(self, sheaf, p):
        key = (sheaf.key, p)
        L = self._layouts.get(key)
        if L is None:
            if sheaf.t != self.t or sheaf.n != self.n:
                raise ComplexError("sheaf does not match the complex (t, degree)")
            dims = [sheaf.local_dim(S) for S in self.blocks[p]]
            offs = np.zeros(len(dims) + 1, dtype=np.int64)
            np.cumsum([d * self.block_size[p] for d in dims], out=offs[1:])
            L = Layout(p, list(self.blocks[p]), dims, offs, self.block_size[p])
            self._layouts[key] = L
        return L

    def dof_index(self, sheaf, p, cell_idx):
        """First dof of each cell and its local dimension."""
        L = self.layout(sheaf, p)
        k, i = self.decode(p, cell_idx)
        d = np.asarray(L.dims)[k]
        return L.offsets[k] + i * d, d

    # -- faces (vectorised) ----------------------------------------------------
    def face_indices(self, p, k, j0, bit, cells=None):
        """Global (p-1)-indices of the bit-``bit`` faces in direction j0 of block k."""
        c = self.block_cells(p, k) if cells is None else cells
        S = self.blocks[p][k]
        Sf = tuple(j for j in S if j != j0)
        kf = self.block_index(p - 1, Sf)
        lab = c["lab"].copy()
        bits = c["bit"].copy()
        mu = lab[:, j0].copy()
        lab[:, j0] = -1
        bits[:, j0] = bit
        h, verts = c["h"], c["verts"]
        if bit:
            h, verts = self.act(h, verts, j0, mu)
        return self.encode(p - 1, kf, lab, bits, h, verts)


@dataclass
class Layout:
    p: int
    blocks: list
    dims: list
    offsets: np.ndarray
    block_size: int

    @property
    def size(self):
        return int(self.offsets[-1])


def build_complex(base, t, lift=None, allow_even=False):
    """Complex over ``base``; ``lift`` is None, an int l (seed 0), or (l, voltage|seed)."""
    if lift is None:
        return CubicalComplex(base, t)
    if isinstance(lift, int):
        return CubicalComplex(base, t, lift, allow_even=allow_even)
    if isinstance(lift, dict):
        l = lift["l"]
        v = lift.get("voltage")
        s = lift.get("seed")
    else:
        l, vs = lift
        v, s = (None, vs) if isinstance(vs, (int, np.integer)) or vs is None else (vs, None)
    if isinstance(l, str) or l is None:
        raise ComplexError("invalid lift spec: the lift group has to be abelian (cyclic C_l)")
    return CubicalComplex(base, t, l, voltage=v, seed=s, allow_even=allow_even)


# ---------------------------------------------------------------------------
# per-cube incidence

def cube_incidence(X, sigma, direction="faces"):
    X.cube_index(sigma)
    S = sigma.S
    out = []
    if direction == "faces":
        for j0 in S:
            mu = sigma.label(j0)
            for b in (0, 1):
                slots = list(sigma.slots)
                slots[j0] = ("b", b)
                h, verts = sigma.h, sigma.verts
                if b:
                    hh, vv = X.act(np.array([h]), np.array([verts]), j0, mu)
                    h, verts = int(hh[0]), tuple(int(x) for x in vv[0])
                out.append(Cube(h, tuple(verts), tuple(slots)))
    elif direction == "cofaces":
        for j in range(X.t):
            if j in S:
                continue
            b = sigma.bit(j)
            for mu in range(X.n):
                slots = list(sigma.slots)
                slots[j] = ("a", mu)
                h, verts = sigma.h, sigma.verts
                if b:
                    hh, vv = X.act_inverse(np.array([h]), np.array([verts]), j, mu)
                    h, verts = int(hh[0]), tuple(int(x) for x in vv[0])
                out.append(Cube(h, tuple(verts), tuple(slots)))
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return out


def _corner_of_face(X, tau, sigma_bits):
    """Corner of the face of tau that sets the given {direction: bit} slots."""
    h, verts = np.array([tau.h]), np.array([tau.verts], dtype=np.int64)
    for j, b in sorted(sigma_bits.items()):
        if b:
            h, verts = X.act(h, verts, j, tau.label(j))
    return int(h[0]), tuple(int(v) for v in verts[0])


def is_face(X, sigma, tau):
    """sigma is an iterated face of tau (possibly equal)."""
    Ss, St = set(sigma.S), set(tau.S)
    if not Ss <= St:
        return False
    for j in range(X.t):
        if j in Ss and sigma.slots[j] != tau.slots[j]:
            return False
        if j not in St and sigma.slots[j] != tau.slots[j]:
            return False
    drop = {j: sigma.bit(j) for j in St - Ss}
    return _corner_of_face(X, tau, drop) == (sigma.h, sigma.verts)


def sheaf_morphism(F, sigma, tau, X=None):
    """Matrix of F_{sigma,tau}: tensor of identities and rows h_j^T(a_j, -)."""
    if X is not None and not is_face(X, sigma, tau):
        raise ComplexError(f"{sigma!r} is not a face of {tau!r}")
    Ss, St = set(sigma.S), set(tau.S)
    if not Ss <= St:
        raise ComplexError(f"{sigma!r} is not a face of {tau!r}")
    B = np.ones((1, 1), dtype=np.int64)
    for r, j, m in F.local_dims(Ss):
        if j in St:
            part = F.factors[r][j][:, tau.label(j)][None, :]
        else:
            part = np.eye(m, dtype=np.int64)
        B = _fkron(B, part, F.field)
    return B


# ---------------------------------------------------------------------------
# (co)boundary assembly

def _cache_path(X, F, p):
    d = os.environ.get("HOMCUP_CACHE_DIR")
    if not d:
        return None
    return os.path.join(d, f"cob_{X.digest()}_{F.key}_{p}.npz")


def coboundary_matrix(X, F, p):
    """delta^p : C^p -> C^{p+1} as a sparse matrix in canonical dof order."""
    if not 0 <= p < X.t:
        raise ComplexError(f"coboundary level must be in [0, {X.t})")
    key = (F.key, p)
    if key in X._cob:
        return X._cob[key]
    path = _cache_path(X, F, p)
    if path and os.path.exists(path):
        z = np.load(path)
        M = Matrix(tuple(z["shape"]), z["indptr"], z["indices"], z["data"], F.field)
        X._cob[key] = M
        return M
    Lr, Lc = X.layout(F, p + 1), X.layout(F, p)
    rows, cols, vals = [], [], []
    for k, S_tau in enumerate(X.blocks[p + 1]):
        cells = X.block_cells(p + 1, k)
        N = X.block_size[p + 1]
        d_tau = Lr.dims[k]
        tau_base = Lr.offsets[k] + np.arange(N) * d_tau
        for j0 in S_tau:
            S_sig = tuple(j for j in S_tau if j != j0)
            ks = X.block_index(p, S_sig)
            d_sig = Lc.dims[ks]
            blocks = np.stack([F.morphism_block(S_tau, j0, mu) for mu in range(X.n)])
            mu = cells["lab"][:, j0]
            for b in (0, 1):
                sig = X.face_indices(p + 1, k, j0, b, cells)
                sig_base = Lc.offsets[ks] + (sig - ks * X.block_size[p]) * d_sig
                B = blocks[mu]
                nz = np.nonzero(B)
                rows.append(tau_base[nz[0]] + nz[1])
                cols.append(sig_base[nz[0]] + nz[2])
                vals.append(B[nz])
    M = Matrix.from_coo(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals),
                        (Lr.size, Lc.size), F.field)
    X._cob[key] = M
    if path:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        np.savez_compressed(path, shape=np.array(M.shape), indptr=M.indptr,
                            indices=M.indices, data=M.data)
    return M


def boundary_matrix(X, F, p):
    """partial_p : C_p -> C_{p-1}, the transpose of delta^{p-1}."""
    return coboundary_matrix(X, F, p - 1).T


def restricted_coboundary(X, F, j, anchor=None):
    """Sub-block of delta^1: columns are direction-j 1-cells, rows the 2-cells containing j.

    With ``anchor=(v_j, mu_j)`` only the diagonal block of that base edge is returned,
    together with the column dof indices it uses (for embedding kernel vectors).
    """
    if X.t < 2:
        raise ComplexError("restricted coboundary needs t >= 2")
    D = coboundary_matrix(X, F, 1)
    L1, L2 = X.layout(F, 1), X.layout(F, 2)
    k1 = X.block_index(1, (j,))
    cols = _block_dofs(X, L1, 1, k1, j, anchor)
    rows = np.concatenate([_block_dofs(X, L2, 2, k, j, anchor)
                           for k, S in enumerate(X.blocks[2]) if j in S])
    M = D.select_rows(rows).select_cols(cols)
    return M, rows, cols


def _block_dofs(X, L, p, k, j, anchor):
    N = X.block_size[p]
    d = L.dims[k]
    cells = np.arange(N)
    if anchor is not None:
        c = X.decode_local(p, k, cells)
        keep = (c["verts"][:, j] == anchor[0]) & (c["lab"][:, j] == anchor[1])
        cells = cells[keep]
    return (L.offsets[k] + cells[:, None] * d + np.arange(d)[None, :]).ravel()


# ---------------------------------------------------------------------------
# cochains and chains

class Cochain:
    """Dense dof vector of a (co)chain with (tensor) sheaf coefficients."""

    def __init__(self, X, sheaf, p, vec=None):
        self.X = X
        self.sheaf = sheaf
        self.p = int(p)
        self.layout = X.layout(sheaf, p)
        if vec is None:
            vec = np.zeros(self.layout.size, dtype=np.int64)
        vec = np.asarray(vec, dtype=np.int64)
        if vec.shape != (self.layout.size,):
            raise ComplexError(f"vector length {vec.shape} does not match {self.layout.size} dofs")
        self.vec = vec

    @property
    def field(self):
        return self.sheaf.field

    def _like(self, vec):
        return type(self)(self.X, self.sheaf, self.p, vec)

    def _compatible(self, other):
        if other.X is not self.X or other.sheaf.key != self.sheaf.key or other.p != self.p:
            raise ComplexError("cochains live on different complexes, sheaves or levels")

    def __add__(self, other):
        self._compatible(other)
        return self._like(self.vec ^ other.vec)

    __sub__ = __add__

    def scale(self, c):
        return self._like(self.field.mul(int(c), self.vec))

    def __eq__(self, other):
        return (isinstance(other, Cochain) and other.X is self.X and other.p == self.p
                and other.sheaf.key == self.sheaf.key and np.array_equal(self.vec, other.vec))

    def __hash__(self):
        return hash((self.p, self.vec.tobytes()))

    def is_zero(self):
        return not self.vec.any()

    def copy(self):
        return self._like(self.vec.copy())

    def dof_range(self, cube):
        idx = self.X.cube_index(cube)
        start, d = self.X.dof_index(self.sheaf, self.p, np.array([idx]))
        if cube.dim != self.p:
            raise ComplexError(f"{cube!r} is not a {self.p}-cell")
        return int(start[0]), int(d[0])

    def __getitem__(self, cube):
        s, d = self.dof_range(cube)
        return self.vec[s:s + d].copy()

    def __setitem__(self, cube, value):
        s, d = self.dof_range(cube)
        self.vec[s:s + d] = np.broadcast_to(np.asarray(value, dtype=np.int64), (d,))

    def support(self):
        """Indices of cells carrying a nonzero local vector."""
        L = self.layout
        out = []
        for k, d in enumerate(L.dims):
            seg = self.vec[L.offsets[k]:L.offsets[k + 1]].reshape(-1, d)
            nz = np.flatnonzero(seg.any(axis=1))
            out.append(k * L.block_size + nz)
        return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)

    def items(self):
        for idx in self.support():
            cube = self.X.cube_at(self.p, int(idx))
            yield cube, self[cube]

    @classmethod
    def zeros(cls, X, sheaf, p):
        return cls(X, sheaf, p)

    @classmethod
    def random(cls, X, sheaf, p, rng, density=1.0):
        L = X.layout(sheaf, p)
        v = rng.integers(0, sheaf.field.q, size=L.size)
        if density < 1.0:
            v *= rng.random(L.size) < density
        return cls(X, sheaf, p, v)

    @classmethod
    def indicator(cls, X, sheaf, cube, value=1):
        c = cls(X, sheaf, cube.dim)
        c[cube] = value
        return c

    def coboundary(self):
        if self.p >= self.X.t:
            raise ComplexError("top-level cochains have no coboundary")
        return Cochain(self.X, self.sheaf, self.p + 1,
                       coboundary_matrix(self.X, self.sheaf, self.p).matvec(self.vec))

    def to_json(self):
        return {"level": self.p, "entries": [[repr(c), [int(x) for x in v]] for c, v in self.items()]}

    def __repr__(self):
        return f"{type(self).__name__}(p={self.p}, support={len(self.support())})"


class Chain(Cochain):
    def boundary(self):
        if self.p == 0:
            raise ComplexError("0-chains have no boundary")
        return Chain(self.X, self.sheaf, self.p - 1,
                     boundary_matrix(self.X, self.sheaf, self.p).matvec(self.vec))

    def coboundary(self):  # pragma: no cover - chains use boundary()
        raise ComplexError("chains have a boundary, not a coboundary")

    def is_cycle(self):
        return self.p == 0 or not self.boundary().vec.any()


# ---------------------------------------------------------------------------
# Tanner codes and local codes

def tanner_check_matrix(G, h, field=GF2):
    """Tanner check matrix on the double cover of G.

    Rows ((2v + b) * m + c), columns 2e + copy; both endpoint rows of a copy use
    the column of h given by the label at its bit-0 endpoint.
    """
    h = np.asarray(h, dtype=np.int64)
    m, n = h.shape
    if n != G.degree:
        raise ComplexError(f"local code has {n} columns but the graph has degree {G.degree}")
    rows, cols, vals = [], [], []
    for e, (u, w, lu, lw) in enumerate(G.edges):
        for copy, (a, b, lab) in enumerate(((u, w, lu), (w, u, lw))):
            col = 2 * e + copy
            for c in range(m):
                if h[c, lab]:
                    rows += [(2 * a) * m + c, (2 * b + 1) * m + c]
                    cols += [col, col]
                    vals += [h[c, lab]] * 2
    return Matrix.from_coo(rows, cols, vals, (2 * G.n_vertices * m, 2 * G.n_edges), field)


def tanner_copy(G, z):
    """Copy a local codeword z onto the double-cover edges by bit-0 labels."""
    z = np.asarray(z, dtype=np.int64)
    x = np.zeros(2 * G.n_edges, dtype=np.int64)
    x[0::2] = z[G.edges[:, 2]]
    x[1::2] = z[G.edges[:, 3]]
    return x


def repetition_dual(n, field=GF2):
    return np.ones((1, n), dtype=np.int64)


def rs_vandermonde(field, m, betas=None, n=None):
    """m x n Vandermonde matrix V[k, i] = beta_i^k."""
    if betas is None:
        betas = np.arange(n, dtype=np.int64)
    betas = np.asarray(betas, dtype=np.int64)
    if len(set(betas.tolist())) != len(betas):
        raise ComplexError("Vandermonde points must be distinct")
    if len(betas) > field.q:
        raise ComplexError("not enough field elements for the requested length")
    if not 1 <= m <= len(betas):
        raise ComplexError("need 1 <= m <= n")
    return np.stack([field.pow(betas, k) if k else np.ones_like(betas) for k in range(m)])


def code_distances(h, field=GF2):
    """(distance of ker h, distance of the row space) by exhaustive column-subset search.

    A distance of ``None`` means the code is zero.
    """
    h = np.asarray(h, dtype=np.int64)
    m, n = h.shape
    if n > 16:
        raise ComplexError("exhaustive distance search supports n <= 16")
    rk = rank_dense(h, field)
    d = None
    if rk < n:
        for w in range(1, n + 1):
            if any(rank_dense(h[:, list(T)], field) < w for T in itertools.combinations(range(n), w)):
                d = w
                break
    dd = None
    if rk > 0:
        best = 0
        for w in range(n, -1, -1):
            if any(rank_dense(h[:, list(T)], field) < rk for T in itertools.combinations(range(n), w)) \
                    or w == 0:
                best = w
                break
        dd = n - best
    return d, dd


def random_local_code(field, m, n, seed=0, min_dist=1, min_dual_dist=1, max_tries=256):
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max_tries):
        h = rng.integers(0, field.q, size=(m, n))
        if rank_dense(h, field) != m:
            continue
        d, dd = code_distances(h, field)
        score = ((d or n + 1), (dd or 0))
        if best is None or score > best[0]:
            best = (score, h)
        if (d is None or d >= min_dist) and (dd is not None and dd >= min_dual_dist):
            return h
    raise ComplexError(f"random local code search failed after {max_tries} tries; "
                       f"best (distance, dual distance) = {best[0] if best else None}")


def local_code_library(kind, field=GF2, **kw):
    if kind == "repetition_dual":
        return repetition_dual(kw["n"], field)
    if kind == "rs_vandermonde":
        return rs_vandermonde(field, kw["m"], kw.get("betas"), kw.get("n"))
    if kind == "random":
        return random_local_code(field, kw["m"], kw["n"], kw.get("seed", 0),
                                 kw.get("min_dist", 1), kw.get("min_dual_dist", 1),
                                 kw.get("max_tries", 256))
    raise ComplexError(f"unknown local code kind {kind!r}")


def tensored_local_code(sheaf, j):
    """Rows are entrywise products of one row from every factor in direction j."""
    F = sheaf.field
    rows = np.ones((1, sheaf.n), dtype=np.int64)
    for f in sheaf.factors:
        h = f[j]
        rows = F.mul(rows[:, None, :], h[None, :, :]).reshape(-1, sheaf.n)
    return rows


def double_cover_graph(G):
    return double_cover(G)
