"""Labelled regular graphs, Cayley graphs, double covers and cyclic voltage lifts."""
from __future__ import annotations

import hashlib
import json
from collections import deque

import numpy as np

from .gfield import GF2
from .linalg import Matrix

__all__ = [
    "GraphError", "BaseGraph", "LiftedGraph", "SpectralReport",
    "cayley_graph", "cayley_from_permutations", "named_group", "s3_cayley",
    "complete_graph", "double_cover", "shift_lift", "spectral_report",
    "graph_coboundary", "lift_rng",
]


class GraphError(ValueError):
    pass


class BaseGraph:
    """n-regular simple graph with a local label in [n] for every edge end.

    ``nbr[v, mu]`` is the neighbour reached from ``v`` along its mu-labelled
    edge and ``back[v, mu]`` is the label that edge carries at the other end.
    """

    def __init__(self, n_vertices, edges, orientation=None, require_connected=True):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 4)
        nv = int(n_vertices)
        if edges.size == 0:
            raise GraphError("graph has no edges")
        deg = np.bincount(np.r_[edges[:, 0], edges[:, 1]], minlength=nv)
        n = int(deg[0])
        if np.any(deg != n):
            raise GraphError("graph is not regular")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise GraphError("self-loops are not allowed")
        pairs = np.sort(edges[:, :2], axis=1)
        if len({tuple(p) for p in pairs}) != len(pairs):
            raise GraphError("multigraphs are not allowed")
        nbr = -np.ones((nv, n), dtype=np.int64)
        back = -np.ones((nv, n), dtype=np.int64)
        eid = -np.ones((nv, n), dtype=np.int64)
        for k, (u, v, lu, lv) in enumerate(edges):
            for a, b, la, lb in ((u, v, lu, lv), (v, u, lv, lu)):
                if not 0 <= la < n:
                    raise GraphError(f"label {la} out of range at vertex {a}")
                if nbr[a, la] >= 0:
                    raise GraphError(f"vertex {a} carries label {la} twice")
                nbr[a, la], back[a, la], eid[a, la] = b, lb, k
        for mu in range(n):
            if len(np.unique(nbr[:, mu])) != nv:
                raise GraphError(
                    f"Schreier condition violated: two edges with label {mu} reach a common vertex")
        self.n_vertices = nv
        self.degree = n
        self.edges = edges
        self.orientation = (np.zeros(len(edges), dtype=np.int64) if orientation is None
                            else np.asarray(orientation, dtype=np.int64))
        self.nbr = nbr
        self.back = back
        self.edge_id = eid
        inv = np.empty_like(nbr)
        for mu in range(n):
            inv[nbr[:, mu], mu] = np.arange(nv)
        self.inv_nbr = inv
        self.components = self._components()
        if require_connected and self.components != 1:
            raise GraphError(f"graph is disconnected ({self.components} components)")

    def _components(self):
        seen = np.zeros(self.n_vertices, dtype=bool)
        comps = 0
        for s in range(self.n_vertices):
            if seen[s]:
                continue
            comps += 1
            dq = deque([s])
            seen[s] = True
            while dq:
                v = dq.popleft()
                for w in self.nbr[v]:
                    if not seen[w]:
                        seen[w] = True
                        dq.append(w)
        return comps

    @property
    def n_edges(self):
        return len(self.edges)

    def adjacency(self):
        A = np.zeros((self.n_vertices, self.n_vertices))
        A[self.edges[:, 0], self.edges[:, 1]] = 1
        A[self.edges[:, 1], self.edges[:, 0]] = 1
        return A

    def to_json(self):
        return {"vertices": self.n_vertices, "degree": self.degree,
                "edges": self.edges.tolist(), "orientation": self.orientation.tolist()}

    @classmethod
    def from_json(cls, d):
        if "l" in d:
            return LiftedGraph.from_json(d)
        return cls(d["vertices"], d["edges"], d.get("orientation"))

    def digest(self):
        return hashlib.sha256(json.dumps(self.to_json(), sort_keys=True).encode()).hexdigest()[:16]

    def __repr__(self):
        return f"{type(self).__name__}(V={self.n_vertices}, n={self.degree}, E={self.n_edges})"


# ---------------------------------------------------------------------------
# Cayley graphs

def cayley_graph(elements, generators, mul, require_connected=True):
    """Right-multiplication Cayley graph with labels = generator index.

    ``elements`` fixes the vertex order; ``mul(g, h)`` is the group product.
    """
    elements = list(elements)
    index = {g: i for i, g in enumerate(elements)}
    gens = list(generators)
    ident = [g for g in elements if all(mul(g, h) == h for h in elements)]
    for a in gens:
        if a in ident:
            raise GraphError("identity is not allowed as a generator")
    inv_of = {}
    for i, a in enumerate(gens):
        partner = [j for j, b in enumerate(gens) if mul(a, b) in ident]
        if not partner:
            raise GraphError(f"generating set is not closed under inverses ({a!r})")
        inv_of[i] = partner[0]
    edges = []
    seen = set()
    for g in elements:
        u = index[g]
        for i, a in enumerate(gens):
            v = index[mul(g, a)]
            key = (min(u, v), max(u, v))
            if key in seen:
                continue
            seen.add(key)
            if u < v:
                edges.append((u, v, i, inv_of[i]))
            else:
                edges.append((v, u, inv_of[i], i))
    edges.sort()
    try:
        return BaseGraph(len(elements), edges, require_connected=require_connected)
    except GraphError as e:
        if "disconnected" in str(e):
            raise GraphError("generators do not generate the group: " + str(e)) from None
        raise


def _compose(p, q):
    """(p q)(i) = p(q(i))."""
    return tuple(p[i] for i in q)


def cayley_from_permutations(generators, elements=None):
    gens = [tuple(g) for g in generators]
    if elements is None:
        e = tuple(range(len(gens[0])))
        elements, dq, seen = [e], deque([e]), {e}
        while dq:
            g = dq.popleft()
            for a in gens:
                h = _compose(g, a)
                if h not in seen:
                    seen.add(h)
                    elements.append(h)
                    dq.append(h)
    return cayley_graph(elements, gens, _compose)


def named_group(name, n=None):
    """(elements, mul, default generators) for a few small groups."""
    name = name.lower()
    if name in ("cyclic", "c"):
        els = list(range(n))
        return els, (lambda a, b: (a + b) % n), [1, n - 1] if n > 2 else [1]
    if name in ("z2xz2", "klein"):
        return [0, 1, 2, 3], (lambda a, b: a ^ b), [1, 2, 3]
    if name == "s3":
        e, r, s = (0, 1, 2), (1, 2, 0), (1, 0, 2)
        r2 = _compose(r, r)
        els = [e, r, r2, s, _compose(s, r), _compose(s, r2)]
        return els, _compose, [s, r, r2]
    raise GraphError(f"unknown group {name!r}")


def s3_cayley():
    """Cayley graph of S3 on {s, r, r^-1} with vertices e, r, r^2, s, sr, sr^2."""
    els, mul, gens = named_group("s3")
    return cayley_graph(els, gens, mul)


def complete_graph(n):
    """K_n as a Cayley graph (C_3 for n=3, Z2xZ2 for n=4, Z_n with all shifts otherwise)."""
    if n == 3:
        els, mul, gens = named_group("cyclic", 3)
    elif n == 4:
        els, mul, gens = named_group("z2xz2")
    else:
        els, mul = list(range(n)), (lambda a, b: (a + b) % n)
        gens = list(range(1, n))
    return cayley_graph(els, gens, mul)


# ---------------------------------------------------------------------------
# covers

def double_cover(G):
    """G x K_2: vertex (v, b) -> 2v + b, base edge e -> copies 2e, 2e + 1.

    Copy 0 of edge (u, w) joins (u, 0)-(w, 1) and copy 1 joins (w, 0)-(u, 1);
    labels are inherited from the base.
    """
    edges = []
    for (u, w, lu, lw) in G.edges:
        edges.append((2 * u, 2 * w + 1, lu, lw))
        edges.append((2 * w, 2 * u + 1, lw, lu))
    return BaseGraph(2 * G.n_vertices, edges, require_connected=False)


def lift_rng(seed, attempt=0):
    """Counter-based generator for voltage draws."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(attempt)])))


class LiftedGraph(BaseGraph):
    """Shift lift of a base graph by C_l voltages; vertex (h, v) -> h n' + v."""

    def __init__(self, base, l, voltage, seed=None, attempts=1):
        l = int(l)
        if l < 1:
            raise GraphError("lift order must be >= 1")
        voltage = np.asarray(voltage, dtype=np.int64) % l
        if voltage.shape != (base.n_edges,):
            raise GraphError("one voltage per base edge is required")
        nv = base.n_vertices
        vt = self.voltage_table_for(base, voltage, l)
        edges = []
        for k, (u, v, lu, lv) in enumerate(base.edges):
            for h in range(l):
                a, b = h * nv + u, ((h + vt[u, lu]) % l) * nv + v
                edges.append((a, b, lu, lv) if a < b else (b, a, lv, lu))
        edges.sort()
        super().__init__(l * nv, edges, require_connected=False)
        self.base = base
        self.l = l
        self.voltage = voltage
        self.volt = vt
        self.seed = seed
        self.attempts = attempts
        self.even_order_warning = l > 1 and l % 2 == 0

    @staticmethod
    def voltage_table_for(base, voltage, l):
        vt = np.zeros((base.n_vertices, base.degree), dtype=np.int64)
        for k, (u, v, lu, lv) in enumerate(base.edges):
            g = voltage[k] if base.orientation[k] == 0 else -voltage[k]
            vt[u, lu] = g % l
            vt[v, lv] = (-g) % l
        return vt

    def project(self, vertex):
        return np.asarray(vertex) % self.base.n_vertices

    def fiber(self, v):
        return np.arange(self.l) * self.base.n_vertices + v

    def to_json(self):
        d = super().to_json()
        d.update({"base": self.base.to_json(), "l": self.l,
                  "voltage": self.voltage.tolist(), "seed": self.seed})
        return d

    @classmethod
    def from_json(cls, d):
        return cls(BaseGraph.from_json(d["base"]), d["l"], d["voltage"], d.get("seed"))


def shift_lift(G, l, voltage=None, seed=0, max_lambda=None, max_attempts=64):
    """C_l voltage lift.  Random voltages are seeded; optional spectral retry."""
    l = int(l)
    if voltage is not None:
        return LiftedGraph(G, l, voltage, seed=None)
    best = None
    for attempt in range(max_attempts):
        volt = lift_rng(seed, attempt).integers(0, l, size=G.n_edges)
        L = LiftedGraph(G, l, volt, seed=seed, attempts=attempt + 1)
        if max_lambda is None:
            return L
        lam = spectral_report(L).second_largest_abs
        if lam <= max_lambda + 1e-9 and L.components == 1:
            return L
        if best is None or lam < best[0]:
            best = (lam, L)
    raise GraphError(f"no lift with lambda <= {max_lambda} after {max_attempts} attempts; "
                     f"best lambda = {best[0]:.6f}")


# ---------------------------------------------------------------------------
# spectra and incidence

class SpectralReport(dict):
    __getattr__ = dict.__getitem__


def spectral_report(G, tol=1e-9):
    if G.n_vertices > 5000:
        raise GraphError("spectral_report supports at most 5000 vertices")
    ev = np.sort(np.linalg.eigvalsh(G.adjacency()))[::-1]
    n = G.degree
    nontriv = ev[np.abs(ev) < n - tol]
    lam = float(np.max(np.abs(nontriv))) if nontriv.size else 0.0
    comps = int(np.sum(np.abs(ev - n) <= 1e-6))
    return SpectralReport(eigenvalues=ev, second_largest_abs=lam,
                          ramanujan=bool(lam <= 2 * np.sqrt(n - 1) + tol),
                          connected_components=comps)


def graph_coboundary(G, field=GF2):
    """E x V incidence matrix."""
    E = G.n_edges
    r = np.repeat(np.arange(E), 2)
    c = G.edges[:, :2].ravel()
    return Matrix.from_coo(r, c, 1, (E, G.n_vertices), field)
