"""Extending cochains and chains along coverings of cubical complexes.

A covering T -> S is a cell map that is a bijection on every star.  Two
kinds are supported: forgetting the lift coordinate h of a lifted complex,
and projecting a complex built over a lifted base graph onto the complex over
the underlying graph (and compositions of both).  Given the dof-level map m,
the canonical extension is the gather ``x'[m]`` and the projection is the
fiber sum; on chains the gather is the copy-to-fiber map.
"""

from dataclasses import dataclass, field as dc_field
import time

import numpy as np

from .complexes import Chain, ComplexError, CubicalComplex, coboundary_matrix
from .graphs import LiftedGraph, shift_lift, spectral_report
from .linalg import Matrix, image_membership
from .cupcap import cup_multi, pairing


class InductionError(ComplexError):
    pass


# ---------------------------------------------------------------------------
# covering maps

def _vertex_projection(Tbase, Sbase):
    """Vertex map of a tower of shift lifts Tbase -> ... -> Sbase."""
    m = np.arange(Tbase.n_vertices, dtype=np.int64)
    G = Tbase
    while G.digest() != Sbase.digest():
        if not isinstance(G, LiftedGraph):
            raise InductionError("target base graph is not a lift of the source base graph")
        m = G.project(m)
        G = G.base
    return m


def fiber_size(T, S):
    return (T.group_size // S.group_size)


def _check_cover(T, S, allow_even):
    if T.t != S.t or T.n != S.n:
        raise InductionError("covering needs equal dimension and degree")
    if S.l != 1 and not (T.base.digest() == S.base.digest() and T.l == S.l
                         and np.array_equal(T.voltage, S.voltage)):
        raise InductionError("the source complex must be unlifted (l = 1)")
    pv = _vertex_projection(T.base, S.base) if S.l == 1 else np.arange(T.nv)
    if not np.array_equal(pv[T.nbr], S.nbr[pv]):
        raise InductionError("vertex map does not commute with the generators")
    f = fiber_size(T, S)
    if f % 2 == 0 and not allow_even:
        raise InductionError(f"fiber size {f} is even: extensions of logicals need not stay "
                             "logicals (see the even-order [[4,1,2]] lift)")
    return pv


def cell_map(T, S, p, allow_even=False):
    """Index in S of the image of every p-cell of T."""
    key = ("cells", S.digest(), p)
    cache = T.__dict__.setdefault("_cover", {})
    if key in cache:
        return cache[key]
    pv = _check_cover(T, S, allow_even)
    out = np.empty(T.n_cells(p), dtype=np.int64)
    for k in range(len(T.blocks[p])):
        c = T.block_cells(p, k)
        h = np.zeros_like(c["h"]) if S.l == 1 else c["h"]
        base = k * T.block_size[p]
        out[base:base + T.block_size[p]] = S.encode(p, k, c["lab"], c["bit"], h, pv[c["verts"]])
    cache[key] = out
    return out


def dof_map(T, S, sheaf, p, allow_even=False):
    """Index in the S dof vector feeding every dof of T (same sheaf on both)."""
    key = ("dofs", S.digest(), sheaf.key, p)
    cache = T.__dict__.setdefault("_cover", {})
    if key in cache:
        return cache[key]
    cm = cell_map(T, S, p, allow_even)
    LT, LS = T.layout(sheaf, p), S.layout(sheaf, p)
    parts = []
    for k, d in enumerate(LT.dims):
        cells = cm[k * T.block_size[p]:(k + 1) * T.block_size[p]] - k * S.block_size[p]
        parts.append((LS.offsets[k] + cells[:, None] * d + np.arange(d)[None, :]).ravel())
    out = np.concatenate(parts)
    cache[key] = out
    return out


def canonical_extension(x, target, allow_even=False):
    """E#: every cell of the target inherits the value of its image."""
    m = dof_map(target, x.X, x.sheaf, x.p, allow_even)
    return type(x)(target, x.sheaf, x.p, x.vec[m])


def projection(x, source=None, allow_even=False):
    """P#: sum of the values over each fiber (default source: the unlifted complex)."""
    if source is None:
        if x.X.l == 1:
            raise InductionError("projection needs a source complex for an unlifted cochain")
        source = CubicalComplex(x.X.base, x.X.t, 1)
    m = dof_map(x.X, source, x.sheaf, x.p, allow_even)
    out = np.zeros(source.layout(x.sheaf, x.p).size, dtype=np.int64)
    np.bitwise_xor.at(out, m, x.vec)
    return type(x)(source, x.sheaf, x.p, out)


def chain_extension(xi, target, allow_even=False):
    """Copy every local vector of a chain to the whole fiber above its cell."""
    if not isinstance(xi, Chain):
        xi = Chain(xi.X, xi.sheaf, xi.p, xi.vec)
    return canonical_extension(xi, target, allow_even)


# ---------------------------------------------------------------------------
# lifted CSS codes (the small even-order counterexample)

def lift_matrix(H, voltages, l):
    """Replace each nonzero H[r, c] by the shift P^g (g = voltages[r, c]); index q l + h."""
    H = np.asarray(H, dtype=np.int64)
    V = np.zeros_like(H) if voltages is None else np.asarray(voltages, dtype=np.int64)
    r, c = np.nonzero(H)
    hh = np.arange(l)
    rows = (r[:, None] * l + (hh[None, :] + V[r, c][:, None]) % l).ravel()
    cols = (c[:, None] * l + hh[None, :]).ravel()
    vals = np.repeat(H[r, c], l)
    return Matrix.from_coo(rows, cols, vals, (H.shape[0] * l, H.shape[1] * l))


def extend_vector(x, l):
    return np.repeat(np.asarray(x, dtype=np.int64), l)


@dataclass
class LiftCheck:
    l: int
    cocycle: bool
    coboundary: bool
    coefficients: np.ndarray | None
    witness: np.ndarray | None

    def to_json(self):
        d = {"l": self.l, "cocycle": self.cocycle, "coboundary": self.coboundary}
        if self.coefficients is not None:
            d["rows"] = (np.flatnonzero(self.coefficients) + 1).tolist()
        if self.witness is not None:
            d["witness"] = np.flatnonzero(self.witness).tolist()
        return d


def lifted_logical_check(H_X, H_Z, x, l, voltages_X=None, voltages_Z=None):
    """Lift both check matrices by C_l and test whether the extension of x stays logical.

    ``x`` must satisfy H_Z x = 0; the extension is a coboundary iff it lies
    in the row space of the lifted H_X.  A certificate accompanies either
    answer: coefficient rows or a vector w with H_X^lift w = 0, <x, w> != 0.
    """
    AX = lift_matrix(H_X, voltages_X, l)
    AZ = lift_matrix(H_Z, voltages_Z, l)
    xl = extend_vector(x, l)
    coc = not AZ.matvec(xl).any()
    mem = image_membership(AX, xl, side="row")
    return LiftCheck(l, coc, bool(mem.member),
                     mem.coefficients if mem.member else None,
                     None if mem.member else mem.witness)


def rows_combination(H_lift, rows):
    """Sum of the given (1-indexed) rows of a lifted matrix."""
    D = H_lift.to_dense()
    return np.bitwise_xor.reduce(D[np.asarray(rows) - 1], axis=0)


# ---------------------------------------------------------------------------
# lift sequences

@dataclass
class Stage:
    index: int
    base: object
    X_prime: CubicalComplex
    X: CubicalComplex
    spectral: dict
    lift_seconds: float


@dataclass
class LiftSequence:
    stages: list
    t: int
    provenance: dict = dc_field(default_factory=dict)
    first: CubicalComplex | None = None
    sheaf: object = None

    def complexes(self):
        """X'_1, X_1, X'_2, X_2, ... with their names."""
        if not self.stages:
            return [("X'_1", self.first)]
        out = []
        for s in self.stages:
            out.append((f"X'_{s.index}", s.X_prime))
            out.append((f"X_{s.index}", s.X))
        return out

    def to_json(self):
        return {"t": self.t, "provenance": self.provenance,
                "stages": [{"index": s.index,
                            "base_vertices": s.base.n_vertices,
                            "X_prime": {"group_size": s.X_prime.group_size,
                                        "cells": [s.X_prime.n_cells(p) for p in range(self.t + 1)]},
                            "X": {"l": s.X.l, "group_size": s.X.group_size,
                                  "voltage": s.X.voltage.tolist(), "seed": s.X.seed,
                                  "cells": [s.X.n_cells(p) for p in range(self.t + 1)]},
                            "spectral": s.spectral}
                           for s in self.stages]}


def build_sequence(base, t, stages, seed=0, max_lambda=None, allow_even=False, sheaf=None):
    """Interlaced tower X'_1, X_1, X'_2, X_2, ...

    ``stages`` is a list of (l_prime, l) or (l_prime, l, stage_seed): X_i lifts
    the complex over G_{i-1} by C_l and G_i is a C_{l_prime} shift lift of
    G_{i-1} (l_prime of the last stage is unused and may be None).  X_i is
    always a lift of the current base product, never of X_{i-1}.
    """
    stages = [tuple(s) for s in stages]
    for i, st in enumerate(stages, start=1):
        lp, l = st[0], st[1]
        if not allow_even and (l % 2 == 0 or (lp is not None and lp % 2 == 0)):
            raise InductionError(f"stage {i}: lift orders must be odd (got {lp}, {l})")
    out = []
    G = base
    for i, st in enumerate(stages, start=1):
        lp, l = st[0], st[1]
        s_seed = st[2] if len(st) > 2 else seed + 2 * i
        t0 = time.time()
        Xp = CubicalComplex(G, t, 1)
        X = CubicalComplex(G, t, l, seed=s_seed, allow_even=allow_even)
        sp = spectral_report(G)
        out.append(Stage(i, G, Xp, X, {"second_largest_abs": float(sp.second_largest_abs),
                                       "components": int(G.components)}, time.time() - t0))
        if i < len(stages):
            if lp is None:
                raise InductionError(f"stage {i}: the next base needs a lift order")
            G = shift_lift(G, lp, seed=s_seed + 1, max_lambda=max_lambda)
    first = out[0].X_prime if out else CubicalComplex(base, t, 1)
    return LiftSequence(out, t, {"seed": seed, "stages": [list(s) for s in stages]}, first, sheaf)


@dataclass
class PreservationReport:
    values: dict
    cycles: dict
    seconds: dict

    @property
    def preserved(self):
        v = list(self.values.values())
        return all(c for c in self.cycles.values()) and len(set(v)) == 1

    @property
    def nonzero(self):
        return self.preserved and next(iter(self.values.values())) != 0

    def to_json(self):
        return {"values": self.values, "cycles": self.cycles, "seconds": self.seconds,
                "preserved": self.preserved, "nonzero": self.nonzero}


class PreservationError(InductionError):
    pass


def verify_preservation(seq, cochains, xi, check_cycles=True, strict=True):
    """Evaluate <x_1 cup ... cup x_m, xi> on every complex of the sequence.

    ``cochains`` and ``xi`` live on X'_1; each is carried along the tower by
    the canonical extension (cochains) and the fiber copy (xi).  With
    ``strict`` a value change raises naming the first offending complex.
    """
    first = seq.first
    if any(c.X is not first for c in cochains) or xi.X is not first:
        raise InductionError("inputs must live on X'_1")
    values, cycles, seconds = {}, {}, {}
    cur_x, cur_xi = list(cochains), xi
    if not seq.stages:
        values["X'_1"] = pairing(cup_multi(cur_x), cur_xi)
        cycles["X'_1"] = bool(Chain(xi.X, xi.sheaf, xi.p, xi.vec).is_cycle()) if check_cycles else True
        seconds["X'_1"] = 0.0
    for s in seq.stages:
        for name, target in ((f"X'_{s.index}", s.X_prime), (f"X_{s.index}", s.X)):
            t0 = time.time()
            if target is s.X_prime:
                if target is not first:
                    cur_x = [canonical_extension(c, target) for c in cur_x]
                    cur_xi = chain_extension(cur_xi, target)
                xs, z = cur_x, cur_xi
            else:
                xs = [canonical_extension(c, target) for c in cur_x]
                z = chain_extension(cur_xi, target)
            if check_cycles:
                cycles[name] = bool(Chain(z.X, z.sheaf, z.p, z.vec).is_cycle())
                for c in xs:
                    if c.p < target.t and coboundary_matrix(target, c.sheaf, c.p).matvec(c.vec).any():
                        cycles[name] = False
            else:
                cycles[name] = True
            values[name] = pairing(cup_multi(xs), z)
            seconds[name] = round(time.time() - t0, 3)
            ref = next(iter(values.values()))
            if strict and (values[name] != ref or not cycles[name]):
                raise PreservationError(f"value on {name} is {values[name]}, expected {ref} "
                                        f"(cycle check: {cycles[name]})")
    return PreservationReport(values, cycles, seconds)


def extend_logical(x, target, rows=None):
    """Canonical extension plus a fresh logical certificate on the target (never assumed)."""
    from .homology import certify_logical
    y = canonical_extension(x, target)
    return y, certify_logical(y, rows=rows)
