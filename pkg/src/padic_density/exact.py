"""Exact algebraic values: the ring Q(zeta_8)[sqrt p] and finite phase sums.

ClosedValue holds the constants the closed-form evaluations produce
(fourth and eighth roots of unity, half-integer powers of q).  Coordinates sit over
the basis {1, z, z^2, z^3} x {1, sqrt p} with z = zeta_8.  For p = 2 the
sqrt-p block is folded into the zeta block at construction (sqrt 2 =
z - z^3), which keeps coordinates canonical and equality sound.

ExpSum is a multiset of phases with integer multiplicities and a rational
scale; it is what the brute-force integral oracle produces.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

from .errors import SpecMismatch
from .padics import Phase

_SQRT2_COORDS = {1: 1, 3: -1}  # sqrt 2 = zeta_8 - zeta_8^3


def _zeta_pow(j: int) -> tuple[int, int]:
    """zeta_8^j as (sign, index in 0..3)."""
    j %= 8
    return (1, j) if j < 4 else (-1, j - 4)


@dataclass(frozen=True)
class ClosedValue:
    p: int
    coords: tuple[Fraction, ...]  # length 8: zeta block, then sqrt-p block

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coords]
        assert len(cs) == 8
        if self.p == 2 and any(cs[4:]):
            folded = cs[:4] + [Fraction(0)] * 4
            for j in range(4):
                s = cs[4 + j]
                if s:
                    for shift, w in _SQRT2_COORDS.items():
                        sign, idx = _zeta_pow(j + shift)
                        folded[idx] += s * w * sign
            cs = folded
        object.__setattr__(self, "coords", tuple(cs))

    # -- constructors -------------------------------------------------

    @classmethod
    def rational(cls, p, value) -> "ClosedValue":
        return cls(p, (Fraction(value),) + (Fraction(0),) * 7)

    @classmethod
    def zero(cls, p):
        return cls.rational(p, 0)

    @classmethod
    def one(cls, p):
        return cls.rational(p, 1)

    @classmethod
    def zeta8(cls, p, j: int = 1) -> "ClosedValue":
        sign, idx = _zeta_pow(j)
        coords = [Fraction(0)] * 8
        coords[idx] = Fraction(sign)
        return cls(p, tuple(coords))

    @classmethod
    def i_unit(cls, p) -> "ClosedValue":
        return cls.zeta8(p, 2)

    @classmethod
    def sqrt_p(cls, p) -> "ClosedValue":
        coords = [Fraction(0)] * 8
        coords[4] = Fraction(1)
        return cls(p, tuple(coords))

    @classmethod
    def from_phase(cls, phase: Phase) -> "ClosedValue":
        """e^{2 pi i phase}; the denominator must divide 8."""
        p = phase.p
        if phase.is_zero:
            return cls.one(p)
        if p != 2 or phase.log_den > 3:
            raise ValueError(f"{phase} is not an eighth root of unity")
        return cls.zeta8(p, phase.numerator * (8 >> phase.log_den))

    @classmethod
    def sqrt_q_power(cls, p: int, f: int, half_steps: int) -> "ClosedValue":
        """q^{half_steps / 2} for q = p^f, exact."""
        e = f * half_steps
        if e % 2 == 0:
            return cls.rational(p, Fraction(p) ** (e // 2))
        body = cls.rational(p, Fraction(p) ** ((e - 1) // 2))
        return body * cls.sqrt_p(p)

    # -- ring operations -------------------------------------------------

    def _chk(self, other):
        if self.p != other.p:
            raise SpecMismatch("closed values over different primes")

    def __add__(self, other):
        self._chk(other)
        return ClosedValue(self.p, tuple(a + b for a, b in
                                         zip(self.coords, other.coords)))

    def __neg__(self):
        return ClosedValue(self.p, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._chk(other)
        out = [Fraction(0)] * 8
        for a_idx, a in enumerate(self.coords):
            if not a:
                continue
            ja, sa = a_idx % 4, a_idx // 4
            for b_idx, b in enumerate(other.coords):
                if not b:
                    continue
                jb, sb = b_idx % 4, b_idx // 4
                sign, idx = _zeta_pow(ja + jb)
                c = a * b * sign
                if sa and sb:
                    out[idx] += c * self.p
                else:
                    out[idx + 4 * (sa ^ sb)] += c
        return ClosedValue(self.p, tuple(out))

    def scaled(self, r) -> "ClosedValue":
        r = Fraction(r)
        return ClosedValue(self.p, tuple(c * r for c in self.coords))

    def pow(self, e: int) -> "ClosedValue":
        if e < 0:
            raise ValueError("negative powers not supported")
        result = ClosedValue.one(self.p)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- queries ----------------------------------------------------------

    @property
    def is_zero(self):
        return not any(self.coords)

    @property
    def is_rational(self):
        return not any(self.coords[1:])

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coords[0]

    def numeric(self) -> complex:
        z8 = cmath.exp(1j * cmath.pi / 4)
        rt = cmath.sqrt(self.p)
        total = 0j
        for idx, c in enumerate(self.coords):
            if c:
                total += float(c) * z8 ** (idx % 4) * (rt if idx >= 4 else 1)
        return total

    def to_json(self):
        return [f"{c.numerator}/{c.denominator}" for c in self.coords]

    def __repr__(self):
        return f"ClosedValue(p={self.p}, {self.to_json()})"


@dataclass(frozen=True)
class ExpSum:
    """Finite sum  scale * sum_phi mult(phi) e^{2 pi i phi}."""

    p: int
    terms: tuple[tuple[Phase, int], ...]
    scale: Fraction = Fraction(1)

    @classmethod
    def build(cls, p, phase_counts, scale=Fraction(1)) -> "ExpSum":
        merged = {}
        for phase, mult in phase_counts:
            merged[phase] = merged.get(phase, 0) + mult
        items = tuple(sorted(((ph, m) for ph, m in merged.items() if m),
                             key=lambda t: (t[0].log_den, t[0].numerator)))
        return cls(p, items, Fraction(scale))

    def shifted(self, phase: Phase) -> "ExpSum":
        """Multiply the whole sum by e^{2 pi i phase} (exact)."""
        return ExpSum.build(self.p, [(ph + phase, m) for ph, m in self.terms],
                            self.scale)

    def rescaled(self, r) -> "ExpSum":
        return ExpSum(self.p, self.terms, self.scale * Fraction(r))

    def numeric(self) -> complex:
        return complex(self.scale) * sum(m * ph.numeric() for ph, m in self.terms)

    def denominators_divide_8(self) -> bool:
        return all(ph.log_den == 0 or (ph.p == 2 and ph.log_den <= 3)
                   for ph, _ in self.terms)

    def as_closed_value(self) -> ClosedValue:
        total = ClosedValue.zero(self.p)
        for ph, m in self.terms:
            total = total + ClosedValue.from_phase(ph).scaled(m)
        return total.scaled(self.scale)

    def to_json(self):
        return {"scale": f"{self.scale.numerator}/{self.scale.denominator}",
                "terms": [[ph.numerator, ph.log_den, m] for ph, m in self.terms]}

    def __repr__(self):
        return f"ExpSum({self.to_json()})"


@dataclass(frozen=True)
class PhasedValue:
    """An exact product  e^{2 pi i phase} * value.

    Needed because the inhomogeneous Gauss integrals carry character values
    with arbitrary p-power denominators, which live outside the
    eight-coordinate ring.
    """

    phase: Phase
    value: ClosedValue

    @classmethod
    def pure(cls, value: ClosedValue) -> "PhasedValue":
        return cls(Phase.zero(value.p), value)

    @classmethod
    def zero(cls, p) -> "PhasedValue":
        return cls(Phase.zero(p), ClosedValue.zero(p))

    @property
    def is_zero(self):
        return self.value.is_zero

    def as_closed_value(self) -> ClosedValue:
        if self.is_zero or self.phase.is_zero:
            return self.value
        return ClosedValue.from_phase(self.phase) * self.value

    def numeric(self) -> complex:
        return self.phase.numeric() * self.value.numeric()


def numeric_eval(v) -> complex:
    """Double-precision evaluation of any exact value object."""
    return v.numeric()


def compare(exp_sum: ExpSum, closed, tol: float = 1e-9) -> bool:
    """Does the oracle sum match the closed form?

    Exact coordinate comparison whenever every phase of the sum is an
    eighth root of unity and the closed form lives in the ring; numeric
    comparison with relative tolerance otherwise.
    """
    if isinstance(closed, PhasedValue):
        if not closed.phase.is_zero:
            return compare(exp_sum.shifted(-closed.phase), closed.value, tol)
        closed = closed.value
    if exp_sum.denominators_divide_8():
        try:
            return exp_sum.as_closed_value() == closed
        except ValueError:
            pass
    a, b = exp_sum.numeric(), closed.numeric()
    return abs(a - b) <= tol * max(1.0, abs(b))
