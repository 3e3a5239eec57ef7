"""Exact sparse and dense linear algebra over GF(2^s).

Sparse matrices are stored in canonical CSR form (sorted, no duplicates, no
explicit zeros).  Dense elimination runs on bit-packed ``uint64`` rows for
GF(2) and on integer arrays with exp/log tables for larger fields.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._accel import USE_NUMBA, njit
from .gfield import GF2, Field, field_make

__all__ = [
    "Matrix", "RrefResult", "Membership", "FreeVariables",
    "rref", "rref_dense", "rank", "rank_dense", "kernel_basis", "kernel_dense",
    "solve_dense", "image_membership", "free_variables", "kron", "dense_matmul",
]


# ---------------------------------------------------------------------------
# sparse matrix

def _xor_reduce_segments(vals, starts, n_seg, seg_ids=None):
    """XOR-reduce ``vals`` over contiguous segments starting at ``starts``."""
    out = np.zeros(n_seg, dtype=np.int64)
    if vals.size == 0:
        return out
    ends = np.append(starts[1:], vals.size)
    nonempty = ends > starts
    # empty segments are skipped: clamping their starts would truncate the previous segment
    out[nonempty] = np.bitwise_xor.reduceat(vals, starts[nonempty])
    return out


class Matrix:
    """Sparse matrix over a characteristic-2 field in canonical CSR form."""

    __slots__ = ("shape", "indptr", "indices", "data", "field")

    def __init__(self, shape, indptr, indices, data, field=GF2):
        self.shape = (int(shape[0]), int(shape[1]))
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data, dtype=np.int64)
        self.field = field

    # -- constructors ----------------------------------------------------------
    @classmethod
    def from_coo(cls, rows, cols, vals, shape, field=GF2):
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        vals = np.broadcast_to(np.asarray(vals, dtype=np.int64), rows.shape).ravel()
        r, c = int(shape[0]), int(shape[1])
        if rows.size and (rows.min() < 0 or rows.max() >= r or cols.min() < 0 or cols.max() >= c):
            raise IndexError("matrix entry out of range")
        key = rows * c + cols
        order = np.argsort(key, kind="stable")
        key, vals = key[order], vals[order]
        if key.size:
            starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
            ukey = key[starts]
            uval = np.bitwise_xor.reduceat(vals, starts)
            keep = uval != 0
            ukey, uval = ukey[keep], uval[keep]
        else:
            ukey, uval = key, vals
        urow = ukey // c if c else ukey
        ucol = ukey - urow * c
        indptr = np.zeros(r + 1, dtype=np.int64)
        np.cumsum(np.bincount(urow, minlength=r), out=indptr[1:])
        return cls((r, c), indptr, ucol, uval, field)

    @classmethod
    def from_dense(cls, A, field=GF2):
        A = np.asarray(A, dtype=np.int64)
        if A.ndim == 1:
            A = A[None, :]
        r, c = np.nonzero(A)
        return cls.from_coo(r, c, A[r, c], A.shape, field)

    @classmethod
    def identity(cls, n, field=GF2):
        i = np.arange(n)
        return cls.from_coo(i, i, 1, (n, n), field)

    @classmethod
    def zeros(cls, shape, field=GF2):
        return cls(shape, np.zeros(shape[0] + 1, dtype=np.int64), [], [], field)

    # -- views -----------------------------------------------------------------
    @property
    def nnz(self):
        return int(self.data.size)

    @property
    def rows(self):
        return self.shape[0]

    @property
    def cols(self):
        return self.shape[1]

    def row_ids(self):
        return np.repeat(np.arange(self.shape[0]), np.diff(self.indptr))

    def coo(self):
        return self.row_ids(), self.indices.copy(), self.data.copy()

    def to_dense(self):
        A = np.zeros(self.shape, dtype=np.int64)
        A[self.row_ids(), self.indices] = self.data
        return A

    @property
    def T(self):
        r, c, v = self.coo()
        return Matrix.from_coo(c, r, v, (self.shape[1], self.shape[0]), self.field)

    def entries(self):
        r, c, v = self.coo()
        return [(int(a), int(b), int(x)) for a, b, x in zip(r, c, v)]

    def is_zero(self):
        return self.nnz == 0

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.shape == other.shape and self.field == other.field
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices)
                and np.array_equal(self.data, other.data))

    def __repr__(self):
        return f"Matrix({self.shape[0]}x{self.shape[1]}, nnz={self.nnz}, {self.field!r})"

    # -- algebra ---------------------------------------------------------------
    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        r1, c1, v1 = self.coo()
        r2, c2, v2 = other.coo()
        return Matrix.from_coo(np.r_[r1, r2], np.r_[c1, c2], np.r_[v1, v2], self.shape, self.field)

    def matvec(self, x):
        x = np.asarray(x, dtype=np.int64)
        if x.shape[0] != self.shape[1]:
            raise ValueError(f"dimension mismatch: {self.shape} @ {x.shape}")
        if x.ndim == 2:
            return np.stack([self.matvec(x[:, j]) for j in range(x.shape[1])], axis=1)
        return spmv(self, x)

    def rmatvec(self, x):
        """x @ self."""
        return self.T.matvec(x)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            return _spgemm(self, other)
        return self.matvec(other)

    def select_rows(self, rows):
        rows = np.asarray(rows, dtype=np.int64)
        counts = np.diff(self.indptr)[rows]
        starts = self.indptr[rows]
        idx = _ranges(starts, counts)
        new_r = np.repeat(np.arange(rows.size), counts)
        return Matrix.from_coo(new_r, self.indices[idx], self.data[idx],
                               (rows.size, self.shape[1]), self.field)

    def select_cols(self, cols):
        return self.T.select_rows(cols).T

    # -- serialisation ---------------------------------------------------------
    def to_json(self):
        return {"rows": self.shape[0], "cols": self.shape[1], "field": self.field.to_json(),
                "entries": [list(e) for e in self.entries()]}

    @classmethod
    def from_json(cls, d):
        F = Field.from_json(d["field"]) if "field" in d else GF2
        ent = np.asarray(d["entries"], dtype=np.int64).reshape(-1, 3)
        return cls.from_coo(ent[:, 0], ent[:, 1], ent[:, 2], (d["rows"], d["cols"]), F)

    def to_mtx(self):
        lines = ["%%MatrixMarket matrix coordinate integer general",
                 f"% field GF(2^{self.field.s}) modulus_bits {''.join(map(str, self.field.modulus_bits))}",
                 f"{self.shape[0]} {self.shape[1]} {self.nnz}"]
        lines += [f"{i + 1} {j + 1} {v}" for i, j, v in self.entries()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_mtx(cls, text):
        s, bits = 1, None
        body = []
        for line in text.splitlines():
            if line.startswith("% field"):
                parts = line.split()
                bits = [int(b) for b in parts[-1]]
                s = len(bits) - 1
            elif line.startswith("%") or not line.strip():
                continue
            else:
                body.append(line)
        r, c, _ = map(int, body[0].split())
        ent = np.array([list(map(int, ln.split())) for ln in body[1:]], dtype=np.int64).reshape(-1, 3)
        F = field_make(s, bits) if bits else GF2
        return cls.from_coo(ent[:, 0] - 1, ent[:, 1] - 1, ent[:, 2], (r, c), F)


def _ranges(starts, counts):
    """Concatenation of arange(s, s + c) for each pair."""
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offs = np.repeat(np.cumsum(counts) - counts, counts)
    return np.repeat(starts, counts) + (np.arange(total) - offs)


def _spgemm(A, B):
    if A.shape[1] != B.shape[0]:
        raise ValueError("dimension mismatch")
    F = A.field
    ar, ac, av = A.coo()
    counts = np.diff(B.indptr)[ac]
    idx = _ranges(B.indptr[ac], counts)
    rows = np.repeat(ar, counts)
    vals = F.mul(np.repeat(av, counts), B.data[idx])
    return Matrix.from_coo(rows, B.indices[idx], vals, (A.shape[0], B.shape[1]), F)


@njit
def _spmv_gf2_kernel(indptr, indices, x, out):
    for r in range(out.shape[0]):
        acc = 0
        for k in range(indptr[r], indptr[r + 1]):
            acc ^= x[indices[k]]
        out[r] = acc & 1


@njit
def _spmv_gfq_kernel(indptr, indices, data, x, exp, log, out):
    for r in range(out.shape[0]):
        acc = 0
        for k in range(indptr[r], indptr[r + 1]):
            a = data[k]
            b = x[indices[k]]
            if a != 0 and b != 0:
                acc ^= exp[log[a] + log[b]]
        out[r] = acc


def spmv_numpy(M, x):
    F = M.field
    if F.s == 1:
        prod = x[M.indices] & M.data
    else:
        prod = F.mul(M.data, x[M.indices])
    return _xor_reduce_segments(prod, M.indptr[:-1], M.shape[0])


def spmv(M, x):
    if not USE_NUMBA:
        return spmv_numpy(M, x)
    out = np.zeros(M.shape[0], dtype=np.int64)
    x = np.ascontiguousarray(x, dtype=np.int64)
    if M.field.s == 1:
        _spmv_gf2_kernel(M.indptr, M.indices, x, out)
    else:
        _spmv_gfq_kernel(M.indptr, M.indices, M.data, x, M.field.exp_table, M.field.log_table, out)
    return out


def kron(A, B):
    """Kronecker product of sparse matrices."""
    if A.field != B.field:
        raise ValueError("field mismatch")
    F = A.field
    ar, ac, av = A.coo()
    br, bc, bv = B.coo()
    rows = (ar[:, None] * B.shape[0] + br[None, :]).ravel()
    cols = (ac[:, None] * B.shape[1] + bc[None, :]).ravel()
    vals = F.mul(av[:, None], bv[None, :]).ravel()
    return Matrix.from_coo(rows, cols, vals, (A.shape[0] * B.shape[0], A.shape[1] * B.shape[1]), F)


def matmul(A, B):
    """Sparse product A @ B; every (A[i,k], B[k,j]) pair is expanded, then summed by from_coo."""
    if A.field != B.field:
        raise ValueError("field mismatch")
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape} @ {B.shape}")
    F = A.field
    ar, ak, av = A.coo()
    lens = np.diff(B.indptr)[ak]
    starts = np.repeat(B.indptr[ak] - np.r_[0, np.cumsum(lens)[:-1]], lens)
    pos = starts + np.arange(int(lens.sum()))
    rows = np.repeat(ar, lens)
    vals = F.mul(np.repeat(av, lens), B.data[pos])
    return Matrix.from_coo(rows, B.indices[pos], vals, (A.shape[0], B.shape[1]), F)


def dense_matmul(A, B, field=GF2):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if field.s == 1:
        return (A @ B) & 1
    out = np.zeros((A.shape[0],) + B.shape[1:], dtype=np.int64)
    for k in range(A.shape[1]):
        out ^= field.mul(A[:, k].reshape((-1,) + (1,) * (B.ndim - 1)), B[k][None, ...])
    return out


# ---------------------------------------------------------------------------
# dense elimination kernels

def _pack_bits(A):
    A = np.asarray(A, dtype=np.uint8)
    r, c = A.shape
    nwords = max(1, (c + 63) // 64)
    padded = np.zeros((r, nwords * 64), dtype=np.uint8)
    padded[:, :c] = A
    return np.packbits(padded, axis=1, bitorder="little").view("<u8").reshape(r, nwords).copy()


def _unpack_bits(P, c):
    P = np.ascontiguousarray(P, dtype="<u8")
    bits = np.unpackbits(P.view(np.uint8).reshape(P.shape[0], -1), axis=1, bitorder="little")
    return bits[:, :c].astype(np.int64)


@njit
def _gf2_rref_kernel(P, ncols, pivots):
    nrows, nwords = P.shape
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        piv = -1
        for r in range(row, nrows):
            if P[r, w] & bit:
                piv = r
                break
        if piv < 0:
            continue
        if piv != row:
            for k in range(nwords):
                tmp = P[piv, k]
                P[piv, k] = P[row, k]
                P[row, k] = tmp
        for r in range(nrows):
            if r != row and (P[r, w] & bit):
                for k in range(w, nwords):
                    P[r, k] ^= P[row, k]
        pivots[row] = col
        row += 1
    return row


def _gf2_rref_numpy(P, ncols, pivots):
    nrows = P.shape[0]
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        w = col >> 6
        bit = np.uint64(1) << np.uint64(col & 63)
        cand = np.flatnonzero(P[row:, w] & bit)
        if cand.size == 0:
            continue
        piv = row + cand[0]
        if piv != row:
            P[[row, piv]] = P[[piv, row]]
        hit = np.flatnonzero(P[:, w] & bit)
        hit = hit[hit != row]
        if hit.size:
            P[hit, w:] ^= P[row, w:]
        pivots[row] = col
        row += 1
    return row


@njit
def _gfq_rref_kernel(A, ncols, exp, log, order, pivots):
    nrows, ntot = A.shape
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        piv = -1
        for r in range(row, nrows):
            if A[r, col] != 0:
                piv = r
                break
        if piv < 0:
            continue
        if piv != row:
            for k in range(ntot):
                tmp = A[piv, k]
                A[piv, k] = A[row, k]
                A[row, k] = tmp
        linv = (order - log[A[row, col]]) % order
        for k in range(col, ntot):
            if A[row, k] != 0:
                A[row, k] = exp[log[A[row, k]] + linv]
        for r in range(nrows):
            f = A[r, col]
            if r != row and f != 0:
                lf = log[f]
                for k in range(col, ntot):
                    b = A[row, k]
                    if b != 0:
                        A[r, k] ^= exp[lf + log[b]]
        pivots[row] = col
        row += 1
    return row


def _gfq_rref_numpy(A, ncols, F, pivots):
    nrows = A.shape[0]
    row = 0
    for col in range(ncols):
        if row == nrows:
            break
        cand = np.flatnonzero(A[row:, col])
        if cand.size == 0:
            continue
        piv = row + cand[0]
        if piv != row:
            A[[row, piv]] = A[[piv, row]]
        A[row, col:] = F.mul(F.inv(int(A[row, col])), A[row, col:])
        hit = np.flatnonzero(A[:, col])
        hit = hit[hit != row]
        if hit.size:
            A[np.ix_(hit, np.arange(col, A.shape[1]))] ^= F.mul(
                A[hit, col][:, None], A[row, col:][None, :])
        pivots[row] = col
        row += 1
    return row


def rref_dense(A, field=GF2, transform=False):
    """Row-reduce a dense matrix.  Returns (R, T or None, pivot columns) with R = T A."""
    A = np.asarray(A, dtype=np.int64)
    r, c = A.shape
    aug = np.hstack([A, np.eye(r, dtype=np.int64)]) if transform else A
    pivots = np.zeros(min(r, c) + 1, dtype=np.int64)
    if field.s == 1:
        P = _pack_bits(aug & 1)
        if USE_NUMBA:
            rk = _gf2_rref_kernel(P, c, pivots)
        else:
            rk = _gf2_rref_numpy(P, c, pivots)
        full = _unpack_bits(P, aug.shape[1])
    else:
        full = np.ascontiguousarray(aug.copy())
        if USE_NUMBA:
            rk = _gfq_rref_kernel(full, c, field.exp_table, field.log_table, field.q - 1, pivots)
        else:
            rk = _gfq_rref_numpy(full, c, field, pivots)
    R = full[:, :c]
    T = full[:, c:] if transform else None
    return R, T, [int(p) for p in pivots[:rk]]


def rank_dense(A, field=GF2):
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(rref_dense(A, field)[2])


def rank(M):
    return rank_dense(M.to_dense(), M.field)


def kernel_dense(A, field=GF2):
    """Right kernel of a dense matrix as rows of a (k x cols) array."""
    A = np.asarray(A, dtype=np.int64)
    c = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(c, dtype=np.int64)
    R, _, piv = rref_dense(A, field)
    free = np.setdiff1d(np.arange(c), piv)
    K = np.zeros((free.size, c), dtype=np.int64)
    K[np.arange(free.size), free] = 1
    if piv:
        # char 2: minus is plus
        K[:, piv] = R[: len(piv)][:, free].T
    return K


def solve_dense(A, b, field=GF2):
    """Leftmost-pivot solution x of A x = b, or None when inconsistent."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1, 1)
    R, _, piv = rref_dense(np.hstack([A, b]), field)
    if piv and piv[-1] == A.shape[1]:
        return None
    x = np.zeros(A.shape[1], dtype=np.int64)
    if piv:
        x[piv] = R[: len(piv), -1]
    return x


# ---------------------------------------------------------------------------
# public operations on sparse matrices

@dataclass
class RrefResult:
    echelon: Matrix
    transform: Matrix
    pivots: list


def rref(M, mode="row"):
    """Reduced echelon form.  Row mode: E = T M.  Column mode: E = M T, pivots are rows."""
    F = M.field
    if mode == "row":
        R, T, piv = rref_dense(M.to_dense(), F, transform=True)
        return RrefResult(Matrix.from_dense(R, F), Matrix.from_dense(T, F), piv)
    if mode == "column":
        R, T, piv = rref_dense(M.to_dense().T, F, transform=True)
        return RrefResult(Matrix.from_dense(R.T, F), Matrix.from_dense(T.T, F), piv)
    raise ValueError(f"unknown mode {mode!r}")


def kernel_basis(M, side="right"):
    """Basis of {v : M v = 0} (right) or {v : v M = 0} (left), as rows of an array."""
    A = M.to_dense()
    if side == "left":
        A = A.T
    elif side != "right":
        raise ValueError(f"unknown side {side!r}")
    return kernel_dense(A, M.field)


@dataclass
class Membership:
    member: bool
    coefficients: np.ndarray | None = None
    witness: np.ndarray | None = None

    def __bool__(self):
        return self.member


def image_membership(M, v, side="column"):
    """Solve M c = v (column side) or c M = v (row side) with a certificate.

    On failure the result carries ``witness`` w with w M = 0 and w . v != 0
    (column side) or M w = 0 and v . w != 0 (row side).
    """
    if side == "row":
        return image_membership(M.T, v, "column")
    if side != "column":
        raise ValueError(f"unknown side {side!r}")
    F = M.field
    v = np.asarray(v, dtype=np.int64)
    R, T, piv = rref_dense(M.to_dense().T, F, transform=True)
    rk = len(piv)
    c = v[piv] if rk else np.zeros(0, dtype=np.int64)
    resid = v.copy()
    if rk:
        resid ^= dense_matmul(c[None, :], R[:rk], F)[0]
    nz = np.flatnonzero(resid)
    if nz.size == 0:
        coeffs = dense_matmul(T[:rk].T, c[:, None], F)[:, 0] if rk else np.zeros(M.shape[1], dtype=np.int64)
        if not np.array_equal(M.matvec(coeffs), v):  # pragma: no cover
            raise AssertionError("membership coefficients failed verification")
        return Membership(True, coefficients=coeffs)
    j = int(nz[0])
    w = np.zeros(M.shape[0], dtype=np.int64)
    w[j] = 1
    if rk:
        w[piv] = R[:rk, j]
    if M.rmatvec(w).any() or F.dot(w, v) == 0:  # pragma: no cover
        raise AssertionError("non-membership witness failed verification")
    return Membership(False, witness=w)


@dataclass
class FreeVariables:
    free: list
    pivot: list
    echelon: np.ndarray
    rank: int

    def eta(self, f):
        """Left-kernel vector supported on row f and the pivot rows (char 2)."""
        n = self.echelon.shape[0]
        v = np.zeros(n, dtype=np.int64)
        v[f] = 1
        if self.rank:
            v[self.pivot] = self.echelon[f, : self.rank]
        return v


def free_variables(M):
    """Free and pivot row indices from the reduced column echelon form of M."""
    F = M.field
    R, _, piv = rref_dense(M.to_dense().T, F)
    E = R.T
    free = sorted(set(range(M.shape[0])) - set(piv))
    return FreeVariables(free=free, pivot=list(piv), echelon=E, rank=len(piv))
