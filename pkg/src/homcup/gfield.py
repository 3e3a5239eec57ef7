"""Arithmetic in GF(2^s) and in the cyclic group algebra GF(q)[C_l].

Field elements are plain integers in ``[0, 2^s)`` whose bits are polynomial
coefficients (bit i = coefficient of x^i).  All array operations are
vectorised over numpy integer arrays; :class:`FieldElement` is a thin scalar
wrapper for user-facing code.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FieldError", "ConfigMismatch", "IdealObstruction",
    "Field", "FieldElement", "field_make", "GF2",
    "Poly", "GAElement", "ga_element", "ga_monomial", "ga_mul", "circulant",
    "factor_cyclic", "ideal_analyze", "IdealReport", "standard_basis_solve",
    "trace",
]


class FieldError(ValueError):
    pass


class ConfigMismatch(FieldError):
    pass


class IdealObstruction(FieldError):
    """Raised when generators span a proper ideal; carries the maximal ideals."""

    def __init__(self, msg, maximal_ideals=()):
        super().__init__(msg)
        self.maximal_ideals = list(maximal_ideals)


# ---------------------------------------------------------------------------
# GF(2)[x] on python ints

def _ideg(a):
    return a.bit_length() - 1


def _imod(a, b):
    db = _ideg(b)
    while a and _ideg(a) >= db:
        a ^= b << (_ideg(a) - db)
    return a


def _istr(a):
    if a == 0:
        return "0"
    terms = []
    for i in range(a.bit_length()):
        if (a >> i) & 1:
            terms.append("1" if i == 0 else ("x" if i == 1 else f"x^{i}"))
    return "+".join(terms)


def find_factor(poly):
    """Return a nontrivial factor of ``poly`` over GF(2), or None if irreducible."""
    d = _ideg(poly)
    for cand in range(2, 1 << (d // 2 + 1)):
        if _imod(poly, cand) == 0:
            return cand
    return None


def smallest_irreducible(s):
    for cand in range(1 << s, 1 << (s + 1)):
        if find_factor(cand) is None:
            return cand
    raise FieldError(f"no irreducible polynomial of degree {s}")  # pragma: no cover


# ---------------------------------------------------------------------------

class Field:
    """GF(2^s) with a fixed irreducible modulus (the field configuration)."""

    def __init__(self, s, modulus=None):
        if not 1 <= s <= 16:
            raise FieldError(f"extension degree must be in 1..16, got {s}")
        if modulus is None:
            modulus = smallest_irreducible(s)
        elif not isinstance(modulus, int):
            bits = [int(b) for b in modulus]
            modulus = sum(b << i for i, b in enumerate(bits))
        if _ideg(modulus) != s:
            raise FieldError(f"modulus {_istr(modulus)} does not have degree {s}")
        fac = find_factor(modulus)
        if fac is not None:
            raise FieldError(
                f"modulus {_istr(modulus)} is reducible: divisible by {_istr(fac)}")
        self.s = s
        self.q = 1 << s
        self.modulus = modulus
        self._build_tables()

    # -- construction helpers -------------------------------------------------
    def _clmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        r = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for i in range(self.s):
            r ^= np.where((b >> i) & 1, a << i, 0)
        for d in range(2 * self.s - 2, self.s - 1, -1):
            r ^= np.where((r >> d) & 1, self.modulus << (d - self.s), 0)
        return r

    def _build_tables(self):
        q = self.q
        if self.s <= 8:
            grid = np.arange(q, dtype=np.int64)
            self._table = self._clmul(grid[:, None], grid[None, :])
        else:
            self._table = None
        # exp/log tables (used by compiled kernels and for inverses)
        gen = None
        order = q - 1
        primes = [p for p in range(2, order + 1) if order % p == 0
                  and all(p % r for r in range(2, int(p ** 0.5) + 1))]
        for g in range(1, q):
            if all(self._scalar_pow_slow(g, order // p) != 1 for p in primes):
                gen = g
                break
        exp = np.zeros(2 * order, dtype=np.int64)
        x = 1
        for i in range(order):
            exp[i] = x
            x = self._imul(x, gen)
        exp[order:] = exp[:order]
        log = np.zeros(q, dtype=np.int64)
        log[exp[:order]] = np.arange(order)
        self.generator = gen
        self.exp_table = exp
        self.log_table = log
        inv = np.zeros(q, dtype=np.int64)
        nz = np.arange(1, q)
        inv[1:] = exp[(order - log[nz]) % order]
        self._inv = inv
        if self._table is None:
            self.mul_table = None
        else:
            self.mul_table = self._table

    def _imul(self, a, b):
        r = 0
        while b:
            if b & 1:
                r ^= a
            a <<= 1
            b >>= 1
        return _imod(r, self.modulus)

    def _scalar_pow_slow(self, a, e):
        r, base = 1, a
        while e:
            if e & 1:
                r = self._imul(r, base)
            base = self._imul(base, base)
            e >>= 1
        return r

    # -- identity ------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Field) and (self.s, self.modulus) == (other.s, other.modulus)

    def __hash__(self):
        return hash((self.s, self.modulus))

    def __repr__(self):
        return f"GF(2^{self.s}; {_istr(self.modulus)})"

    @property
    def modulus_bits(self):
        return [(self.modulus >> i) & 1 for i in range(self.s + 1)]

    def to_json(self):
        return {"s": self.s, "modulus_bits": self.modulus_bits}

    @staticmethod
    def from_json(d):
        return field_make(int(d["s"]), tuple(int(b) for b in d["modulus_bits"]))

    # -- vectorised arithmetic -----------------------------------------------
    def add(self, a, b):
        return np.bitwise_xor(a, b)

    def mul(self, a, b):
        if self.s == 1:
            return np.bitwise_and(a, b)
        if self._table is not None:
            return self._table[a, b]
        return self._clmul(a, b)

    def inv(self, a):
        a_arr = np.asarray(a)
        if np.any(a_arr == 0):
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        r = self._inv[a_arr]
        return int(r) if r.ndim == 0 else r

    def pow(self, a, e):
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            a, e = self.inv(a), -e
        r = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                r = self.mul(r, base)
            base = self.mul(base, base)
            e >>= 1
        return int(r) if r.ndim == 0 else r

    def trace(self, a):
        a = np.asarray(a, dtype=np.int64)
        t = a.copy()
        x = a
        for _ in range(self.s - 1):
            x = self.mul(x, x)
            t = t ^ x
        return int(t) if t.ndim == 0 else t

    def dot(self, a, b):
        """Sum of products of two equal-length vectors."""
        p = self.mul(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))
        return int(np.bitwise_xor.reduce(p)) if p.size else 0

    def scale(self, c, v):
        return self.mul(np.int64(c), np.asarray(v, dtype=np.int64))

    def element(self, value):
        return FieldElement(int(value), self)

    def elements(self):
        return np.arange(self.q, dtype=np.int64)


@functools.lru_cache(maxsize=None)
def _field_cached(s, modulus):
    return Field(s, modulus)


def field_make(s, modulus=None):
    """Validated field configuration (cached, so equal configs are shared)."""
    if modulus is not None and not isinstance(modulus, int):
        bits = [int(b) for b in modulus]
        if len(bits) != s + 1:
            raise FieldError(f"modulus bit vector must have {s + 1} entries")
        modulus = sum(b << i for i, b in enumerate(bits))
    if modulus is None:
        if not 1 <= s <= 16:
            raise FieldError(f"extension degree must be in 1..16, got {s}")
        modulus = smallest_irreducible(s)
    return _field_cached(s, modulus)


GF2 = field_make(1)


def trace(a):
    return a.field.element(a.field.trace(a.value))


@dataclass(frozen=True)
class FieldElement:
    value: int
    field: Field

    def _check(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ConfigMismatch(f"{self.field} vs {other.field}")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value ^ self._check(other), self.field)

    __radd__ = __add__
    __sub__ = __add__
    __rsub__ = __add__

    def __mul__(self, other):
        return FieldElement(int(self.field.mul(self.value, self._check(other))), self.field)

    __rmul__ = __mul__

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero")
        return FieldElement(int(self.field.inv(self.value)), self.field)

    def __truediv__(self, other):
        o = other if isinstance(other, FieldElement) else FieldElement(int(other), self.field)
        self._check(o)
        return self * o.inverse()

    def __pow__(self, e):
        return FieldElement(int(self.field.pow(self.value, int(e))), self.field)

    def __neg__(self):
        return self

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{_istr(self.value)} in {self.field!r}"


# ---------------------------------------------------------------------------
# polynomials over GF(q): little-endian int64 arrays, trimmed

def _ptrim(p):
    p = np.asarray(p, dtype=np.int64)
    nz = np.flatnonzero(p)
    return p[: nz[-1] + 1].copy() if nz.size else np.zeros(0, dtype=np.int64)


def _pdeg(p):
    return len(p) - 1


def _padd(a, b):
    n = max(len(a), len(b))
    r = np.zeros(n, dtype=np.int64)
    r[: len(a)] ^= a
    r[: len(b)] ^= b
    return _ptrim(r)


def _pmul(F, a, b):
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    r = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i in np.flatnonzero(a):
        r[i: i + len(b)] ^= F.mul(a[i], b)
    return _ptrim(r)


def _pdivmod(F, a, b):
    if len(b) == 0:
        raise ZeroDivisionError("polynomial division by zero")
    r = np.array(a, dtype=np.int64)
    db = _pdeg(b)
    if len(r) <= db:
        return np.zeros(0, dtype=np.int64), _ptrim(r)
    q = np.zeros(len(r) - db, dtype=np.int64)
    il = F.inv(int(b[-1]))
    for k in range(len(r) - 1, db - 1, -1):
        if r[k]:
            c = int(F.mul(r[k], il))
            q[k - db] = c
            r[k - db: k + 1] ^= F.mul(c, b)
    return _ptrim(q), _ptrim(r[:db])


def _pmod(F, a, b):
    return _pdivmod(F, a, b)[1]


def _pmonic(F, p):
    if len(p) == 0:
        return p
    return F.mul(F.inv(int(p[-1])), p)


def _pgcd(F, a, b):
    a, b = _ptrim(a), _ptrim(b)
    while len(b):
        a, b = b, _pmod(F, a, b)
    return _pmonic(F, a)


def _psquare_mod(F, p, m):
    if len(p) == 0:
        return p
    r = np.zeros(2 * len(p) - 1, dtype=np.int64)
    r[::2] = F.mul(p, p)
    return _pmod(F, r, m)


def _pfrobenius_mod(F, p, m, times):
    """p^(2^times) mod m."""
    for _ in range(times):
        p = _psquare_mod(F, p, m)
    return p


def _pxl1(l):
    p = np.zeros(l + 1, dtype=np.int64)
    p[0] = p[l] = 1
    return p


@dataclass(frozen=True, eq=False)
class Poly:
    """Polynomial over a field, coefficients little-endian."""
    coeffs: tuple
    field: Field

    @staticmethod
    def make(coeffs, field):
        return Poly(tuple(int(c) for c in _ptrim(coeffs)), field)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def array(self):
        return np.array(self.coeffs, dtype=np.int64)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs and self.field == other.field

    def __hash__(self):
        return hash(self.coeffs)

    def __mul__(self, other):
        return Poly.make(_pmul(self.field, self.array, other.array), self.field)

    def divides(self, other):
        return len(_pmod(self.field, other.array, self.array)) == 0

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = "" if (c == 1 and i) else str(c)
            terms.append(f"{coef}{'*' if coef and mono else ''}{mono}" if mono else str(c))
        return "+".join(terms)


def _ddf(F, f):
    out = []
    rest = f
    x = np.array([0, 1], dtype=np.int64)
    h = _pmod(F, x, rest) if _pdeg(rest) > 1 else x
    i = 0
    while _pdeg(rest) >= 2 * (i + 1):
        i += 1
        h = _pfrobenius_mod(F, h, rest, F.s)
        g = _pgcd(F, _padd(h, x), rest)
        if _pdeg(g) > 0:
            out.append((g, i))
            rest = _pdivmod(F, rest, g)[0]
            rest = _pmonic(F, rest)
            h = _pmod(F, h, rest) if _pdeg(rest) > 0 else h
    if _pdeg(rest) > 0:
        out.append((rest, _pdeg(rest)))
    return out


def _edf(F, g, d, rng):
    if _pdeg(g) == d:
        return [g]
    while True:
        a = _ptrim(rng.integers(0, F.q, size=_pdeg(g)))
        if _pdeg(a) < 1:
            continue
        t = a.copy()
        x = a
        for _ in range(F.s * d - 1):
            x = _psquare_mod(F, x, g)
            t = _padd(t, x)
        c = _pgcd(F, t, g)
        if 0 < _pdeg(c) < _pdeg(g):
            other = _pmonic(F, _pdivmod(F, g, c)[0])
            return _edf(F, c, d, rng) + _edf(F, other, d, rng)


def _mult_order(q, l):
    if l == 1:
        return 1
    k, x = 1, q % l
    while x != 1:
        x = (x * q) % l
        k += 1
    return k


def factor_cyclic(l, field, seed=0):
    """Monic irreducible factors of x^l - 1 over ``field`` (l odd), sorted."""
    if l < 1 or l % 2 == 0:
        raise FieldError(f"x^l - 1 is only factored for odd l (got l={l}); "
                         "lift orders must be odd for the canonical extension to exist")
    F = field
    f = _pxl1(l)
    rng = np.random.default_rng(seed)
    facs = []
    for g, d in _ddf(F, f):
        facs.extend(_edf(F, g, d, rng))
    polys = sorted((Poly.make(p, F) for p in facs), key=lambda p: (p.degree, p.coeffs))
    # postconditions
    prod = Poly.make([1], F)
    for p in polys:
        prod = prod * p
    assert prod.coeffs == tuple(int(c) for c in f), "factor product mismatch"
    order = _mult_order(F.q, l)
    for p in polys:
        assert p.degree == 1 or order % p.degree == 0
    return polys


# ---------------------------------------------------------------------------
# group algebra GF(q)[C_l]

@dataclass(frozen=True, eq=False)
class GAElement:
    """Element sum_i c_i x^i of GF(q)[x]/(x^l - 1)."""
    l: int
    coeffs: np.ndarray
    field: Field

    def _check(self, other):
        if other.l != self.l:
            raise FieldError(f"group orders differ: {self.l} vs {other.l}")
        if other.field != self.field:
            raise ConfigMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other):
        self._check(other)
        return GAElement(self.l, self.coeffs ^ other.coeffs, self.field)

    def __mul__(self, other):
        return ga_mul(self, other)

    def __eq__(self, other):
        return (isinstance(other, GAElement) and self.l == other.l
                and self.field == other.field and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.l, self.coeffs.tobytes()))

    def scale(self, c):
        return GAElement(self.l, self.field.mul(int(c), self.coeffs), self.field)

    def shift(self, k):
        """x^k times this element."""
        return GAElement(self.l, np.roll(self.coeffs, k), self.field)

    def is_zero(self):
        return not self.coeffs.any()

    @property
    def poly(self):
        return Poly.make(self.coeffs, self.field)

    def to_json(self):
        return {"l": self.l, "coeffs": [int(c) for c in self.coeffs]}

    def __repr__(self):
        return f"GA[{self.poly!r} mod x^{self.l}-1]"


def ga_element(coeffs, field, l=None):
    c = np.asarray(coeffs, dtype=np.int64)
    if l is None:
        l = len(c)
    if len(c) > l:
        raise FieldError("too many coefficients")
    full = np.zeros(l, dtype=np.int64)
    full[: len(c)] = c
    if np.any((full < 0) | (full >= field.q)):
        raise FieldError("coefficient out of range")
    return GAElement(int(l), full, field)


def ga_monomial(j, l, field):
    c = np.zeros(l, dtype=np.int64)
    c[j % l] = 1
    return GAElement(l, c, field)


def circulant(u):
    """Circ(u)[i, k] = u[(i - k) mod l], so Circ(u) @ v = u * v."""
    l = u.l
    idx = (np.arange(l)[:, None] - np.arange(l)[None, :]) % l
    return u.coeffs[idx]


def ga_mul(u, v):
    u._check(v)
    F = u.field
    out = np.zeros(u.l, dtype=np.int64)
    for i in np.flatnonzero(u.coeffs):
        out ^= F.mul(u.coeffs[i], np.roll(v.coeffs, i))
    return GAElement(u.l, out, F)


@dataclass
class IdealReport:
    dimension: int
    is_whole_algebra: bool
    containing: list
    gcd: Poly

    def to_json(self):
        return {"dimension": self.dimension, "is_whole_algebra": self.is_whole_algebra,
                "containing": [repr(p) for p in self.containing], "gcd": repr(self.gcd)}


def ideal_analyze(generators, l=None, field=None, factors=None):
    """Dimension of the ideal spanned by ``generators`` and the maximal ideals containing it."""
    from . import linalg

    gens = list(generators)
    if not gens:
        if l is None or field is None:
            return IdealReport(0, False, [], Poly.make(_pxl1(1), GF2))
        facs = factors if factors is not None else factor_cyclic(l, field)
        return IdealReport(0, False, facs, Poly.make(_pxl1(l), field))
    l, F = gens[0].l, gens[0].field
    for g in gens[1:]:
        gens[0]._check(g)
    stacked = np.hstack([circulant(g) for g in gens])
    dim = linalg.rank_dense(stacked, F)
    g = _pxl1(l)
    for v in gens:
        g = _pgcd(F, g, v.coeffs)
    gpoly = Poly.make(g, F)
    if dim != l - gpoly.degree:
        raise AssertionError("circulant rank disagrees with gcd degree")  # pragma: no cover
    facs = factors if factors is not None else factor_cyclic(l, F)
    containing = [f for f in facs if f.divides(gpoly)]
    return IdealReport(dim, dim == l, containing, gpoly)


def standard_basis_solve(generators, j):
    """Polynomials f_i with sum_i f_i * v_i = x^j (leftmost-pivot solution)."""
    from . import linalg

    gens = list(generators)
    if not gens:
        raise FieldError("no generators")
    rep = ideal_analyze(gens)
    if not rep.is_whole_algebra:
        raise IdealObstruction(
            f"generators span a proper ideal of dimension {rep.dimension}; "
            f"contained in maximal ideal(s) {', '.join('<%r>' % p for p in rep.containing)}",
            rep.containing)
    l, F = gens[0].l, gens[0].field
    A = np.hstack([circulant(g) for g in gens])
    e = np.zeros(l, dtype=np.int64)
    e[j % l] = 1
    sol = linalg.solve_dense(A, e, F)
    if sol is None:  # pragma: no cover - excluded by the ideal check
        raise IdealObstruction("no solution", rep.containing)
    fs = [GAElement(l, sol[i * l:(i + 1) * l].copy(), F) for i in range(len(gens))]
    acc = GAElement(l, np.zeros(l, dtype=np.int64), F)
    for f, v in zip(fs, gens):
        acc = acc + ga_mul(f, v)
    assert acc == ga_monomial(j, l, F), "standard-basis solution failed verification"
    return fs
