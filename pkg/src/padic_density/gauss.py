"""Closed-form Gauss sums and Gauss integrals over unramified local fields.

Each function evaluates one of the closed forms used by the density
engine.  Values that can carry a character factor with an arbitrary
p-power denominator come back as PhasedValue; everything else is a
ClosedValue in Q(zeta_8)[sqrt p].  Indicators are always decided before
any division they guard.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import InternalInconsistency, PrecisionExhausted
from .exact import ClosedValue, ExpSum, PhasedValue
from .fields import FieldSpec
from .padics import PadicApprox, Phase, char_phase, dyadic_unit_char
from .residue import RingElem, legendre_symbol, residue_field, trace_to_base


def residue_gauss_sum(sigma: RingElem) -> ExpSum:
    """The q-term quadratic Gauss sum sum_{x in kappa} e(sigma x^2 / p)."""
    spec = sigma.spec
    if spec.p == 2:
        raise ValueError("quadratic Gauss sum is a non-dyadic tool")
    s1 = sigma.residue()
    phases = []
    for x in residue_field(spec):
        tr = trace_to_base(s1 * x * x)
        phases.append((Phase(spec.p, -tr, 1), 1))
    return ExpSum.build(spec.p, phases)


@lru_cache(maxsize=None)
def gauss_sign(spec: FieldSpec) -> ClosedValue:
    """The fourth root of unity eps with G(1) = eps^3 sqrt(q).

    Determined by direct summation; the four candidates are far apart, so
    a coarse numeric match is categorical.
    """
    if spec.p == 2:
        raise ValueError("defined for odd residue characteristic only")
    g = residue_gauss_sum(RingElem.one(spec, 1)).numeric()
    sqrt_q = ClosedValue.sqrt_q_power(spec.p, spec.f, 1)
    for j in range(4):
        eps = ClosedValue.i_unit(spec.p).pow(j)
        if abs(g - (eps.pow(3) * sqrt_q).numeric()) < 1e-6 * abs(g):
            return eps
    raise InternalInconsistency(f"no Gauss-sum normalizer matches for {spec}")


def _nondyadic_kernel(sigma: PadicApprox) -> ClosedValue:
    """Integral of e(sigma x^2) over o, p odd."""
    spec = sigma.spec
    t = sigma.ord()
    if t >= 0:
        return ClosedValue.one(spec.p)
    mag = ClosedValue.sqrt_q_power(spec.p, spec.f, t)
    if t % 2 == 0:
        return mag
    sign = gauss_sign(spec).pow(3).scaled(legendre_symbol(sigma.unit.residue()))
    return sign * mag


def _dyadic_kernel(sigma: PadicApprox) -> ClosedValue:
    """Integral of e(sigma x^2) over o, p = 2."""
    spec = sigma.spec
    t = sigma.ord()
    if t >= 0:
        return ClosedValue.one(2)
    if t == -1:
        return ClosedValue.zero(2)
    if sigma.unit.k < 3:
        raise PrecisionExhausted("unit of sigma needed mod p^3")
    u = sigma.unit.truncate(3)
    sign = 1
    if ((t + 1) * (spec.f - 1)) % 2:
        sign = -sign
    if (t + 1) % 2:
        sign *= dyadic_unit_char(PadicApprox.from_unit(0, u))
    upow = u.pow(2 ** spec.f - 1)
    phase = char_phase(PadicApprox.from_unit(-3, upow))
    return (ClosedValue.from_phase(phase)
            * ClosedValue.sqrt_q_power(2, spec.f, t + 1)).scaled(sign)


def square_exp_integral(sigma: PadicApprox, tau: PadicApprox) -> PhasedValue:
    """Integral over o of e(sigma x^2 + tau x), either parity.

    sigma must be nonzero with a determined valuation.
    """
    spec = sigma.spec
    p = spec.p
    ts = sigma.ord()
    if ts >= 0:
        if tau.ord_ge(0):
            return PhasedValue.pure(ClosedValue.one(p))
        return PhasedValue.zero(p)  # ord(sigma) > ord(tau) < 0
    if not tau.ord_ge(ts):
        return PhasedValue.zero(p)
    strictly_above = tau.ord_ge(ts + 1)
    if p != 2:
        # ord(sigma) <= ord(tau), t = ord(sigma) < 0
        phase = char_phase(-(tau * tau).div(sigma.scaled_by_int(4)))
        return PhasedValue(phase, _nondyadic_kernel(sigma))
    if not strictly_above:
        # equal orders
        if ts < -1:
            return PhasedValue.zero(2)
        lhs = sigma.shift(1).residue_mod(1)
        rhs = (tau * tau).shift(2).residue_mod(1)
        hit = ClosedValue.one(2) if lhs == rhs else ClosedValue.zero(2)
        return PhasedValue.pure(hit)
    phase = char_phase(-(tau * tau).div(sigma.scaled_by_int(4)))
    return PhasedValue(phase, _dyadic_kernel(sigma))


def twisted_unit_integral(sigma: PadicApprox) -> ClosedValue:
    """Integral of the residue symbol twisted by e(sigma x) over the units."""
    spec = sigma.spec
    if spec.p == 2:
        raise ValueError("non-dyadic only")
    if sigma.ord() != -1:
        return ClosedValue.zero(spec.p)
    sign = gauss_sign(spec).pow(3).scaled(legendre_symbol(sigma.unit.residue()))
    return sign * ClosedValue.sqrt_q_power(spec.p, spec.f, -1)


def hyperbolic_exp_integral(sigma: PadicApprox, tau1: PadicApprox,
                            tau2: PadicApprox) -> PhasedValue:
    """Integral over o^2 of e(sigma y1 y2 + tau1 y1 + tau2 y2)."""
    spec = sigma.spec
    ts = sigma.ord()
    if ts >= 0 and tau1.ord_ge(0) and tau2.ord_ge(0):
        return PhasedValue.pure(ClosedValue.one(spec.p))
    if not (tau1.ord_ge(ts) and tau2.ord_ge(ts)):
        return PhasedValue.zero(spec.p)
    if ts >= 0:
        return PhasedValue.zero(spec.p)  # some tau below zero, above sigma
    phase = char_phase(-(tau1 * tau2).div(sigma))
    return PhasedValue(phase, ClosedValue.sqrt_q_power(spec.p, spec.f, 2 * ts))


def anisotropic_exp_integral(sigma: PadicApprox, tau1: PadicApprox,
                             tau2: PadicApprox, rho: PadicApprox) -> PhasedValue:
    """Integral over o^2 of e(sigma (z1^2 + z1 z2 + rho z2^2) + tau . z)."""
    spec = sigma.spec
    ts = sigma.ord()
    if ts >= 0 and tau1.ord_ge(0) and tau2.ord_ge(0):
        return PhasedValue.pure(ClosedValue.one(2))
    if not (tau1.ord_ge(ts) and tau2.ord_ge(ts)):
        return PhasedValue.zero(2)
    if ts >= 0:
        return PhasedValue.zero(2)
    sign = -1 if (trace_to_base(rho.residue_mod(1)) % 2) and (ts % 2) else 1
    num = tau1 * tau2 - rho * tau1 * tau1 - tau2 * tau2
    den = (rho.scaled_by_int(4) - PadicApprox.from_int(spec, 1, rho.unit.k)) * sigma
    phase = char_phase(num.div(den))
    return PhasedValue(phase,
                       ClosedValue.sqrt_q_power(2, spec.f, 2 * ts).scaled(sign))


def unit_shell_integral(a: RingElem, alpha: PadicApprox, m: PadicApprox,
                        ell: int) -> ClosedValue:
    """Integral over the shell a + p of eta(s)^ell e(s alpha + s^{q-1} m / 8).

    a is a Teichmuller unit and m lies in (1 + p) cup p.
    """
    spec = a.spec
    a_val = PadicApprox.from_unit(0, a)
    alpha8 = alpha.shift(3)
    if not alpha8.ord_ge(0):
        return ClosedValue.zero(2)
    if ell % 2 == 0:
        x = alpha8 * a_val + m
        if not x.ord_ge(2):
            return ClosedValue.zero(2)
        phase = char_phase(x.shift(-3))
        return ClosedValue.from_phase(phase).scaled(Fraction(1, spec.q))
    # twisted by the dyadic unit character
    a0, a1 = alpha8.teich_digits(2)
    m_res = m.residue_mod(1)
    sign = -1 if (spec.f - 1) % 2 else 1
    scale = ClosedValue.sqrt_q_power(2, spec.f, -3)
    if not m_res.is_zero:
        # m in 1 + p; the indicator asks for 8 alpha in p
        if not a0.is_zero:
            return ClosedValue.zero(2)
        eta_m = dyadic_unit_char(m)
        arg = (alpha.shift(2) + m * PadicApprox.from_teichmuller(a1)) * a_val
        phase = char_phase(arg.shift(-2))
        return (ClosedValue.from_phase(phase) * scale).scaled(sign * eta_m)
    # m in p; the indicator asks for 8 alpha a in 1 + p
    if a0.is_zero or a0.residue() * a.residue() != RingElem.one(spec, 1):
        return ClosedValue.zero(2)
    one = PadicApprox.from_int(spec, 1, 4)
    eta_val = dyadic_unit_char(alpha8 * (one + m))
    m1 = m.teich_digits(2)[1]
    w = m1.residue() * a1.residue() * a0.residue().inv()
    phase = Phase(2, -trace_to_base(w), 1)
    return (ClosedValue.from_phase(phase) * scale).scaled(sign * eta_val)


def dyadic_residue_gauss_sum(sigma: RingElem, tau: RingElem) -> ExpSum:
    """sum over r in o/p of e((sigma r^2 + tau r)/2), exact q-term sum."""
    spec = sigma.spec
    if spec.p != 2:
        raise ValueError("dyadic only")
    s1, t1 = sigma.residue(), tau.residue()
    phases = []
    for r in residue_field(spec):
        w = s1 * r * r + t1 * r
        phases.append((Phase(2, -trace_to_base(w), 1), 1))
    return ExpSum.build(2, phases)
