"""Finite-precision elements of K and the additive character phase.

A nonzero value is (valuation, unit) with the unit a residue-ring element
whose precision is the relative precision of the value.  Sums can cancel
beyond the available digits; such results carry only an absolute precision
bound and raise PrecisionExhausted when their valuation is queried.

The additive character is e(alpha) = exp(-2 pi i Tr(alpha)) on the fraction
field; Phase stores the argument x of e^{2 pi i x} as a p-power-denominator
element of Q/Z, so char_phase(alpha) is the class of -Tr(alpha).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NonUnit, PrecisionExhausted, SpecMismatch
from .fields import FieldSpec
from .residue import RingElem, teichmuller_lift, trace_to_base

INF = float("inf")


def _int_val(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class Phase:
    """An element of Q/Z with p-power denominator: numerator / p^log_den."""

    p: int
    numerator: int
    log_den: int

    def __post_init__(self):
        p, num, m = self.p, self.numerator, self.log_den
        mod = p ** m
        num %= mod
        while m > 0 and num % p == 0:
            num //= p
            m -= 1
            mod //= p
        if num == 0:
            m = 0
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "log_den", m)

    @classmethod
    def zero(cls, p):
        return cls(p, 0, 0)

    @property
    def is_zero(self):
        return self.numerator == 0

    def __add__(self, other):
        if self.p != other.p:
            raise SpecMismatch("phases over different primes")
        m = max(self.log_den, other.log_den)
        num = (self.numerator * self.p ** (m - self.log_den)
               + other.numerator * self.p ** (m - other.log_den))
        return Phase(self.p, num, m)

    def __neg__(self):
        return Phase(self.p, -self.numerator, self.log_den)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, n: int):
        return Phase(self.p, self.numerator * n, self.log_den)

    def as_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.p ** self.log_den)

    def numeric(self) -> complex:
        import cmath
        return cmath.exp(2j * cmath.pi * float(self.as_fraction()))

    def __repr__(self):
        return f"Phase({self.numerator}/{self.p}^{self.log_den})"


@dataclass(frozen=True)
class PadicApprox:
    """An element of K known to finite precision.

    Exactly one of three states: exact zero; a unit times p^valuation with
    relative precision unit.k; or an indeterminate zero known only to lie
    in p^zero_abs_prec.
    """

    spec: FieldSpec
    valuation: int | None = None
    unit: RingElem | None = None
    zero_abs_prec: int | None = None
    is_exact_zero: bool = False

    def __post_init__(self):
        if self.is_exact_zero:
            assert self.unit is None and self.valuation is None
        elif self.unit is not None:
            assert self.unit.is_unit, "unit part must have nonzero residue"
            assert self.valuation is not None
        else:
            assert self.zero_abs_prec is not None

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, spec):
        return cls(spec, is_exact_zero=True)

    @classmethod
    def from_unit(cls, valuation: int, unit: RingElem):
        return cls(unit.spec, valuation=valuation, unit=unit)

    @classmethod
    def indeterminate(cls, spec, abs_prec: int):
        return cls(spec, zero_abs_prec=abs_prec)

    @classmethod
    def from_ring_elem(cls, elem: RingElem, shift: int = 0):
        """Value elem * p^shift; extracts the exact valuation if possible."""
        v = elem.content_val()
        if v >= elem.k:
            return cls.indeterminate(elem.spec, elem.k + shift)
        p_v = elem.spec.p ** v
        unit = RingElem(elem.spec, elem.k - v,
                        tuple(c // p_v for c in elem.coords))
        return cls.from_unit(v + shift, unit)

    @classmethod
    def from_exact_coords(cls, spec, coords, prec: int, shift: int = 0):
        """Exact value sum coords[i] zeta^i * p^shift (integer coordinates)."""
        if all(c == 0 for c in coords):
            return cls.zero(spec)
        p = spec.p
        v = min(_int_val(c, p) for c in coords if c)
        unit = RingElem(spec, prec, tuple(c // p ** v for c in coords))
        return cls.from_unit(v + shift, unit)

    @classmethod
    def from_teichmuller(cls, digit: RingElem, prec: int = 4):
        """A Teichmuller digit, exactly zero when its residue vanishes.

        Digits are exact representatives, so they can be re-lifted to any
        precision a downstream phase needs.
        """
        if digit.is_zero:
            return cls.zero(digit.spec)
        if digit.k < prec:
            digit = teichmuller_lift(digit.residue(), prec)
        return cls.from_unit(0, digit)

    @classmethod
    def from_int(cls, spec, n: int, prec: int):
        """Embed an integer with relative precision prec."""
        if n == 0:
            return cls.zero(spec)
        v = 0
        while n % spec.p == 0:
            n //= spec.p
            v += 1
        return cls.from_unit(v, RingElem.from_int(spec, prec, n))

    @classmethod
    def from_rational(cls, spec, value, prec: int):
        value = Fraction(value)
        if value == 0:
            return cls.zero(spec)
        num = cls.from_int(spec, value.numerator, prec)
        den = cls.from_int(spec, value.denominator, prec)
        return num.div(den)

    # -- queries ----------------------------------------------------------

    @property
    def is_zeroish(self):
        return self.unit is None

    def ord(self):
        """Valuation; INF for the exact zero."""
        if self.is_exact_zero:
            return INF
        if self.unit is None:
            raise PrecisionExhausted(
                f"valuation undetermined (only known to be >= {self.zero_abs_prec})",
                needed=self.zero_abs_prec + 1)
        return self.valuation

    @property
    def abs_prec(self):
        if self.is_exact_zero:
            return INF
        if self.unit is None:
            return self.zero_abs_prec
        return self.valuation + self.unit.k

    def residue_mod(self, j: int) -> RingElem:
        """The image of this value in o/p^j (requires valuation >= 0)."""
        if self.abs_prec < j:
            raise PrecisionExhausted(f"need absolute precision {j}", needed=j)
        if self.is_exact_zero or self.unit is None:
            return RingElem.zero(self.spec, j)
        if self.valuation < 0:
            raise ValueError("negative valuation has no residue in o/p^j")
        if self.valuation >= j:
            return RingElem.zero(self.spec, j)
        p_v = self.spec.p ** self.valuation
        u = self.unit.truncate(j - self.valuation)
        return RingElem(self.spec, j, tuple(c * p_v for c in u.coords))

    def teich_digits(self, count: int) -> list[RingElem]:
        """First Teichmuller digits of the value (valuation must be >= 0).

        Digit j is the Teichmuller representative of (value / p^j) mod p
        after stripping digits 0..j-1; all are returned at precision count.
        """
        if self.abs_prec < count:
            raise PrecisionExhausted(f"need {count} digits",
                                     needed=count)
        zero = RingElem.zero(self.spec, count)
        if self.is_zeroish or self.valuation >= count:
            return [zero] * count
        if self.valuation < 0:
            raise ValueError("digit expansion needs valuation >= 0")
        digits = [zero] * self.valuation
        u = self.unit.truncate(count - self.valuation)
        p = self.spec.p
        while len(digits) < count:
            d = teichmuller_lift(u.residue(), count)
            digits.append(d)
            if len(digits) < count:
                diff = u - d.truncate(u.k)
                assert diff.content_val() >= 1
                u = RingElem(self.spec, u.k - 1,
                             tuple(c // p for c in diff.coords))
        return digits

    # -- arithmetic --------------------------------------------------------

    def _chk(self, other):
        if self.spec != other.spec:
            raise SpecMismatch("mixed field specs")

    def __neg__(self):
        if self.is_zeroish:
            return self
        return PadicApprox.from_unit(self.valuation, -self.unit)

    def __add__(self, other):
        self._chk(other)
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        target = min(self.abs_prec, other.abs_prec)
        if self.unit is None or other.unit is None:
            vals = [x.valuation for x in (self, other) if x.unit is not None]
            if vals and vals[0] < target:
                lo = self if self.unit is not None else other
                rel = target - lo.valuation
                return PadicApprox.from_unit(lo.valuation, lo.unit.truncate(rel))
            return PadicApprox.indeterminate(self.spec, target)
        base = min(self.valuation, other.valuation)
        rel = target - base
        if rel <= 0:
            return PadicApprox.indeterminate(self.spec, target)

        def aligned(x):
            shift = x.valuation - base
            if shift >= rel:
                return RingElem.zero(x.spec, rel)
            u = x.unit.truncate(rel - shift)
            p_s = x.spec.p ** shift
            return RingElem(x.spec, rel, tuple(c * p_s for c in u.coords))

        total = aligned(self) + aligned(other)
        return PadicApprox.from_ring_elem(total, shift=base)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._chk(other)
        if self.is_exact_zero or other.is_exact_zero:
            return PadicApprox.zero(self.spec)
        if self.unit is None or other.unit is None:
            ind = self if self.unit is None else other
            full = other if self.unit is None else self
            if full.unit is None:
                return PadicApprox.indeterminate(
                    self.spec, self.zero_abs_prec + other.zero_abs_prec)
            return PadicApprox.indeterminate(
                self.spec, ind.zero_abs_prec + full.valuation)
        rel = min(self.unit.k, other.unit.k)
        return PadicApprox.from_unit(
            self.valuation + other.valuation,
            self.unit.truncate(rel) * other.unit.truncate(rel))

    def div(self, other):
        self._chk(other)
        if other.is_zeroish:
            raise NonUnit("division by a (possible) zero")
        if self.is_exact_zero:
            return self
        if self.unit is None:
            return PadicApprox.indeterminate(
                self.spec, self.zero_abs_prec - other.valuation)
        rel = min(self.unit.k, other.unit.k)
        return PadicApprox.from_unit(
            self.valuation - other.valuation,
            self.unit.truncate(rel) * other.unit.truncate(rel).inv())

    def shift(self, t: int):
        """Multiply by p^t (exact)."""
        if self.is_exact_zero:
            return self
        if self.unit is None:
            return PadicApprox.indeterminate(self.spec, self.zero_abs_prec + t)
        return PadicApprox.from_unit(self.valuation + t, self.unit)

    def scaled_by_int(self, n: int):
        if n == 0 or self.is_exact_zero:
            return PadicApprox.zero(self.spec)
        prec = self.unit.k if self.unit is not None else max(1, self.zero_abs_prec)
        return self * PadicApprox.from_int(self.spec, n, max(1, prec))

    def ord_ge(self, bound: int) -> bool:
        """Provably ord >= bound?  False means provably below."""
        if self.is_exact_zero:
            return True
        if self.unit is not None:
            return self.valuation >= bound
        if self.zero_abs_prec >= bound:
            return True
        raise PrecisionExhausted(
            f"cannot separate ord from {bound} at abs prec {self.zero_abs_prec}",
            needed=bound)

    def __repr__(self):
        if self.is_exact_zero:
            return "PadicApprox(0)"
        if self.unit is None:
            return f"PadicApprox(O(p^{self.zero_abs_prec}))"
        return f"PadicApprox(p^{self.valuation} * {self.unit.coords} + O(p^{self.abs_prec}))"


def char_phase(alpha: PadicApprox) -> Phase:
    """Phase of the additive character at alpha: -Tr(alpha) mod 1.

    The character is trivial on o (the different is trivial), so only the
    polar part matters; it must be fully determined at the available
    precision.
    """
    p = alpha.spec.p
    if alpha.is_exact_zero:
        return Phase.zero(p)
    if alpha.unit is None:
        if alpha.zero_abs_prec >= 0:
            return Phase.zero(p)
        raise PrecisionExhausted("phase undetermined", needed=0)
    if alpha.valuation >= 0:
        return Phase.zero(p)
    m = -alpha.valuation
    if alpha.unit.k < m:
        raise PrecisionExhausted("unit part too short for the phase",
                                 needed=0)
    tr = trace_to_base(alpha.unit.truncate(m))
    return Phase(p, -tr, m)


def char_value_is_real(alpha: PadicApprox) -> bool:
    ph = char_phase(alpha)
    return ph.log_den <= 1 if ph.p == 2 else ph.is_zero


def dyadic_unit_char(u: PadicApprox) -> int:
    """The quadratic character on dyadic units cut out by the first three
    Teichmuller digits: u = a + 2b + 4c mod p^3 maps to the character value
    of (c - b) / 2a."""
    if u.spec.p != 2:
        raise ValueError("defined only over dyadic fields")
    if u.is_zeroish or u.valuation != 0:
        raise NonUnit("argument must be a unit")
    a, b, c = u.teich_digits(3)
    w = (c - b) * a.inv()  # value of the character argument, times 2
    return -1 if trace_to_base(w.residue()) % 2 else 1
