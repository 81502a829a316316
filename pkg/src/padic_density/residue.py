"""Arithmetic in the residue rings o/p^k of an unramified extension.

Elements are stored in power-basis coordinates modulo the defining
polynomial, with every coefficient reduced mod p^k.  All values are
immutable; the per-(spec, k) multiplication tables are cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

from .errors import NonUnit, SpecMismatch
from .fields import FieldSpec


@lru_cache(maxsize=None)
def _ring_context(spec: FieldSpec, k: int):
    """Reduction rows for x^f .. x^(2f-2) modulo the defining polynomial."""
    mod = p_k = spec.p ** k
    f = spec.f
    m = [c % p_k for c in spec.modulus]
    rows = []
    # row for x^(f+j), built by shifting the previous row and reducing
    cur = [(-m[i]) % p_k for i in range(f)]  # x^f
    rows.append(tuple(cur))
    for _ in range(f - 2):
        shifted = [0] + cur[:-1]
        top = cur[-1]
        cur = [(shifted[i] + top * rows[0][i]) % p_k for i in range(f)]
        rows.append(tuple(cur))
    return mod, tuple(rows)


@lru_cache(maxsize=None)
def _trace_weights(spec: FieldSpec, k: int):
    """Power sums of the modulus roots via Newton's identities, mod p^k."""
    f = spec.f
    m = spec.modulus
    c = [m[f - i] for i in range(1, f + 1)]  # c[i-1] = coeff of x^(f-i)
    s = [f]
    for j in range(1, f):
        acc = j * c[j - 1]
        for i in range(1, j):
            acc += c[i - 1] * s[j - i]
        s.append(-acc)
    p_k = spec.p ** k
    return tuple(v % p_k for v in s)


@dataclass(frozen=True)
class RingElem:
    """An element of o/p^k, as f power-basis coordinates mod p^k."""

    spec: FieldSpec
    k: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("precision k must be >= 1")
        p_k = self.spec.p ** self.k
        object.__setattr__(self, "coords",
                           tuple(int(c) % p_k for c in self.coords))
        if len(self.coords) != self.spec.f:
            raise ValueError("wrong number of coordinates")

    # -- construction --------------------------------------------------

    @classmethod
    def from_int(cls, spec, k, n):
        return cls(spec, k, (n,) + (0,) * (spec.f - 1))

    @classmethod
    def zero(cls, spec, k):
        return cls.from_int(spec, k, 0)

    @classmethod
    def one(cls, spec, k):
        return cls.from_int(spec, k, 1)

    # -- structure -----------------------------------------------------

    def _check(self, other):
        if self.spec != other.spec or self.k != other.k:
            raise SpecMismatch(f"{self.spec}@{self.k} vs {other.spec}@{other.k}")

    @property
    def is_zero(self):
        return all(c == 0 for c in self.coords)

    @property
    def is_unit(self):
        p = self.spec.p
        return any(c % p for c in self.coords)

    def residue(self) -> "RingElem":
        """Image in the residue field (k = 1)."""
        if self.k == 1:
            return self
        return RingElem(self.spec, 1, self.coords)

    def lift(self, k: int) -> "RingElem":
        """Reinterpret the same coordinates at precision k (k >= self.k)."""
        return RingElem(self.spec, k, self.coords)

    def truncate(self, k: int) -> "RingElem":
        if k > self.k:
            raise ValueError("cannot gain precision by truncation")
        return RingElem(self.spec, k, self.coords)

    def content_val(self) -> int:
        """min_i v_p(coords[i]); the valuation of the element, or k if 0."""
        if self.is_zero:
            return self.k
        p = self.spec.p
        v = self.k
        for c in self.coords:
            if c == 0:
                continue
            w = 0
            while c % p == 0:
                c //= p
                w += 1
            v = min(v, w)
        return v

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        self._check(other)
        m = self.spec.p ** self.k
        return RingElem(self.spec, self.k,
                        tuple((a + b) % m for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        self._check(other)
        m = self.spec.p ** self.k
        return RingElem(self.spec, self.k,
                        tuple((a - b) % m for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        m = self.spec.p ** self.k
        return RingElem(self.spec, self.k, tuple((-a) % m for a in self.coords))

    def scale(self, n: int):
        m = self.spec.p ** self.k
        return RingElem(self.spec, self.k, tuple((n * a) % m for a in self.coords))

    def __mul__(self, other):
        self._check(other)
        f = self.spec.f
        if f == 1:
            m = self.spec.p ** self.k
            return RingElem(self.spec, self.k, ((self.coords[0] * other.coords[0]) % m,))
        m, rows = _ring_context(self.spec, self.k)
        a, b = self.coords, other.coords
        prod_c = [0] * (2 * f - 1)
        for i in range(f):
            ai = a[i]
            if ai:
                for j in range(f):
                    prod_c[i + j] += ai * b[j]
        out = [c % m for c in prod_c[:f]]
        for j in range(f - 1):
            top = prod_c[f + j] % m
            if top:
                row = rows[j]
                for i in range(f):
                    out[i] = (out[i] + top * row[i]) % m
        return RingElem(self.spec, self.k, tuple(out))

    def pow(self, e: int) -> "RingElem":
        if e < 0:
            return self.inv().pow(-e)
        result = RingElem.one(self.spec, self.k)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inv(self) -> "RingElem":
        if not self.is_unit:
            raise NonUnit(f"{self} is not invertible")
        # inverse in the residue field, then Newton-lift to precision k
        q = self.spec.q
        r_inv = self.residue().pow(q - 2) if q > 2 else self.residue()
        x = r_inv.lift(self.k)
        two = RingElem.from_int(self.spec, self.k, 2)
        for _ in range(max(1, (self.k - 1).bit_length() + 1)):
            x = x * (two - self * x)
        return x

    def __repr__(self):
        return f"RingElem{self.coords}@{self.spec.p}^{self.k}"


def ring_arithmetic(a: RingElem, b: RingElem, op: str) -> RingElem:
    """Uniform entry point for add/sub/mul/inv (inv ignores b)."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise ValueError(f"unknown op {op!r}")


def teichmuller_lift(r: RingElem, k: int) -> RingElem:
    """The unique lift t of r with t^q = t in o/p^k."""
    if r.k != 1:
        r = r.residue()
    q = r.spec.q
    t = r.lift(k)
    for _ in range(k):
        nxt = t.pow(q)
        if nxt == t:
            break
        t = nxt
    return t


def trace_to_base(a: RingElem) -> int:
    """Trace to Z/p^k, from the power sums of the modulus roots."""
    w = _trace_weights(a.spec, a.k)
    p_k = a.spec.p ** a.k
    return sum(c * wi for c, wi in zip(a.coords, w)) % p_k


@lru_cache(maxsize=None)
def _frobenius_root(spec: FieldSpec, k: int) -> RingElem:
    """Root of the modulus congruent to x^p mod p (Newton lift)."""
    f = spec.f
    x = RingElem(spec, k, (0, 1) + (0,) * (f - 2)) if f >= 2 else RingElem.one(spec, k)
    r = x.pow(spec.p)
    m = spec.modulus

    def eval_poly(coeffs, at):
        out = RingElem.zero(spec, k)
        pw = RingElem.one(spec, k)
        for c in coeffs:
            out = out + pw.scale(c)
            pw = pw * at
        return out

    deriv = [i * m[i] for i in range(1, len(m))]
    for _ in range(k + 1):
        val = eval_poly(m, r)
        if val.is_zero:
            break
        r = r - val * eval_poly(deriv, r).inv()
    return r


def frobenius(a: RingElem) -> RingElem:
    """The lift of x -> x^p; used only to cross-check the trace."""
    if a.spec.f == 1:
        return a
    r = _frobenius_root(a.spec, a.k)
    out = RingElem.zero(a.spec, a.k)
    pw = RingElem.one(a.spec, a.k)
    for c in a.coords:
        out = out + pw.scale(c)
        pw = pw * r
    return out


def trace_by_frobenius(a: RingElem) -> int:
    acc = RingElem.zero(a.spec, a.k)
    cur = a
    for _ in range(a.spec.f):
        acc = acc + cur
        cur = frobenius(cur)
    # the sum is Galois-stable, hence a scalar
    assert all(c == 0 for c in acc.coords[1:]), "trace left the base ring"
    return acc.coords[0]


def legendre_symbol(x: RingElem) -> int:
    """Quadratic residue symbol on the residue field, 0 on the prime."""
    r = x.residue()
    if r.is_zero:
        return 0
    q = r.spec.q
    s = r.pow((q - 1) // 2)
    if s == RingElem.one(r.spec, 1):
        return 1
    return -1


def residue_field(spec: FieldSpec):
    """All elements of the residue field, coords-lexicographic order."""
    for coords in product(range(spec.p), repeat=spec.f):
        yield RingElem(spec, 1, coords)


def residue_units(spec: FieldSpec):
    for r in residue_field(spec):
        if not r.is_zero:
            yield r


def teichmuller_units(spec: FieldSpec, k: int) -> list[RingElem]:
    """Teichmuller lifts of the nonzero residues, in enumeration order."""
    return [teichmuller_lift(r, k) for r in residue_units(spec)]


def ring_elements(spec: FieldSpec, k: int):
    """Everything in o/p^k, coords-lexicographic."""
    for coords in product(range(spec.p ** k), repeat=spec.f):
        yield RingElem(spec, k, coords)


def ring_units(spec: FieldSpec, k: int):
    for e in ring_elements(spec, k):
        if e.is_unit:
            yield e
