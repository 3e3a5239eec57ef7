"""Small independent reference implementations used by the tests."""
import itertools

import numpy as np


def rank_gf2_int(A):
    """Rank over F_2 with rows packed into Python ints."""
    rows = [int("".join(str(int(b) & 1) for b in r), 2) if len(r) else 0 for r in np.asarray(A)]
    rank = 0
    while rows:
        piv = rows.pop()
        if piv == 0:
            continue
        rank += 1
        top = piv.bit_length() - 1
        rows = [r ^ piv if (r >> top) & 1 else r for r in rows]
    return rank


def rank_field(A, F):
    """Plain Gauss-Jordan over GF(q) with scalar field calls."""
    A = [list(map(int, r)) for r in np.asarray(A)]
    m = len(A)
    n = len(A[0]) if m else 0
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = F.inv(A[r][c])
        A[r] = [int(F.mul(inv, x)) for x in A[r]]
        for i in range(m):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a ^ int(F.mul(f, b)) for a, b in zip(A[i], A[r])]
        r += 1
    return r


def matmul_field(A, B, F):
    A, B = np.asarray(A), np.asarray(B)
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for i in range(A.shape[0]):
        for j in range(B.shape[1]):
            acc = 0
            for k in range(A.shape[1]):
                acc ^= int(F.mul(int(A[i, k]), int(B[k, j])))
            out[i, j] = acc
    return out


def min_weight_codeword(H, F, exclude_zero=True):
    """Minimum weight of a nonzero vector in ker H by exhaustive enumeration (tiny n)."""
    H = np.asarray(H)
    n = H.shape[1]
    best = None
    for v in itertools.product(range(F.q), repeat=n):
        v = np.array(v)
        if exclude_zero and not v.any():
            continue
        if not matmul_field(H, v[:, None], F).any():
            w = int(np.count_nonzero(v))
            best = w if best is None else min(best, w)
    return best


def hgp3(H1, H2, H3):
    """delta^0 and delta^1 of the three-fold hypergraph product, assembled block by block."""
    from homcup.linalg import Matrix, kron

    Hs = [Matrix.from_dense(H) for H in (H1, H2, H3)]
    N = [H.shape[0] for H in Hs]
    M = [H.shape[1] for H in Hs]

    def term(dims, j):
        # H_j in slot j, identities of the given sizes elsewhere
        out = None
        for i in range(3):
            f = Hs[i] if i == j else Matrix.identity(dims[i])
            out = f if out is None else kron(out, f)
        return out.to_dense()

    d0 = np.vstack([term(M, j) for j in range(3)])
    # level 1: N in slot c, M elsewhere; level 2: M in slot r, N elsewhere
    lvl1 = [[N[i] if i == c else M[i] for i in range(3)] for c in range(3)]
    rows = []
    for r in range(3):
        blocks = []
        for c in range(3):
            if c == r:
                size2 = int(np.prod([M[i] if i == r else N[i] for i in range(3)]))
                blocks.append(np.zeros((size2, int(np.prod(lvl1[c]))), dtype=np.int64))
            else:
                blocks.append(term(lvl1[c], ({0, 1, 2} - {r, c}).pop()))
        rows.append(np.hstack(blocks))
    return d0, np.vstack(rows)
