"""Local densities of integral quadratic polynomials.

The density is one plus a sum of shell contributions, one per depth t of
the integration variable.  Odd residue characteristic uses the diagonal
reduction and quadratic Gauss integrals; the dyadic side uses the block
reduction and unit-shell integrals.  Each contribution is assembled in
Q(zeta_8)[sqrt p]; the total must come out rational, and that is asserted
on every run.

Two dyadic routes are implemented: a direct case table and the reference
route that sums unit-shell integrals.  They are compared term by term
whenever the case formulas' denominators are nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (InternalInconsistency, NonConvergent, PrecisionExhausted)
from .exact import ClosedValue
from .fields import FieldSpec
from .gauss import gauss_sign, unit_shell_integral
from .padics import INF, PadicApprox, char_phase, dyadic_unit_char
from .quadratic import (QuadraticPolynomial, ReducedDyadic, ReducedNonDyadic,
                        constant_normalize, reduce_dyadic, reduce_nondyadic)
from .residue import (RingElem, legendre_symbol, teichmuller_lift,
                      teichmuller_units, trace_to_base)


@dataclass
class TermTrace:
    t: int
    value: ClosedValue
    tag: str

    def to_json(self):
        return {"t": self.t, "value": self.value.to_json(), "tag": self.tag}


@dataclass
class TailInfo:
    kind: str                      # "none" | "geometric" | "divergent"
    ratio: Fraction | None = None
    total: Fraction | None = None
    start: int | None = None       # first depth covered by the tail
    bases: tuple | None = None     # stable values at start-2 and start-1

    def partial(self, k: int) -> Fraction:
        """Sum of the tail terms with depth at most k."""
        if self.kind != "geometric" or self.start is None or k < self.start:
            return Fraction(0)
        out = Fraction(0)
        for off, base in enumerate(self.bases):
            t, j = self.start + off, 1
            while t <= k:
                out += base * self.ratio ** j
                t, j = t + 2, j + 1
        return out

    def to_json(self):
        out = {"kind": self.kind}
        if self.ratio is not None:
            out["ratio"] = f"{self.ratio.numerator}/{self.ratio.denominator}"
        if self.total is not None:
            out["total"] = f"{self.total.numerator}/{self.total.denominator}"
        return out


@dataclass
class DensityResult:
    value: Fraction
    terms: list
    tail: TailInfo
    precision_used: int
    depth: object = INF     # last shell depth the sum can reach

    def density_at(self, k: int) -> Fraction:
        """The finite-level density the counting oracle must see at depth k."""
        out = Fraction(1)
        for tr in self.terms:
            if tr.t <= k:
                if not tr.value.is_rational:
                    raise ValueError("per-term trace is not rational")
                out += tr.value.as_fraction()
        return out + self.tail.partial(k)

    def to_json(self):
        return {"beta": f"{self.value.numerator}/{self.value.denominator}",
                "terms": [t.to_json() for t in self.terms],
                "tail": self.tail.to_json(),
                "precision": self.precision_used}


def _ord_or_inf(c: PadicApprox):
    if c.is_exact_zero:
        return INF
    return c.ord()


def _chi_ge(t_n, bound) -> int:
    """Indicator of ord(n_shift) >= bound, with ord(0) = infinity."""
    return 1 if t_n >= bound else 0


# -- non-dyadic --------------------------------------------------------------


@dataclass
class NonDyadicTermData:
    spec: FieldSpec
    n_items: list          # (t_i, legendre of unit(b_i)) for i in N
    t_d: object            # min over D of t_i, or INF
    n_shift: PadicApprox
    t_n: object
    precision: int

    @property
    def q(self):
        return self.spec.q

    def l_set(self, t):
        return [leg for (ti, leg) in self.n_items if ti - t < 0 and (ti - t) % 2]

    def tau(self, t) -> Fraction:
        s = Fraction(t)
        for ti, _ in self.n_items:
            if ti < t:
                s += Fraction(ti - t, 2)
        return s

    def delta(self, t) -> ClosedValue:
        legs = self.l_set(t)
        eps3 = gauss_sign(self.spec).pow(3)
        out = eps3.pow(len(legs))
        sign = 1
        for leg in legs:
            sign *= leg
        return out.scaled(sign)


def analyze_nondyadic(red: ReducedNonDyadic, n: PadicApprox,
                      assume_n_zero: bool = False) -> NonDyadicTermData:
    spec = n.spec
    n_items = []
    n_shift = n
    t_d = INF
    prec = n.unit.k if n.unit is not None else 8
    four = PadicApprox.from_int(spec, 4, max(4, prec))
    for b, c in red.terms:
        ob, oc = b.ord(), _ord_or_inf(c)
        if ob > oc:
            t_d = min(t_d, oc)
        else:
            n_items.append((ob, legendre_symbol(b.unit.residue())))
            if not c.is_exact_zero:
                n_shift = n_shift + (c * c).div(four * b)
    if n_shift.is_exact_zero:
        t_n = INF
    elif n_shift.is_zeroish:
        if not assume_n_zero:
            raise PrecisionExhausted(
                "completed target is zero at available precision; pass "
                "assume_n_zero if it vanishes exactly",
                needed=n_shift.zero_abs_prec + 3)
        n_shift, t_n = PadicApprox.zero(spec), INF
    else:
        t_n = n_shift.ord()
    return NonDyadicTermData(spec=spec, n_items=n_items, t_d=t_d,
                             n_shift=n_shift, t_n=t_n, precision=prec)


def beta_nondyadic(data: NonDyadicTermData) -> DensityResult:
    spec = data.spec
    q = data.q
    one_minus = Fraction(q - 1, q)
    terms = []

    def main_term(t):
        legs = data.l_set(t)
        if len(legs) % 2:
            return None
        tau2 = data.tau(t) * 2
        assert tau2.denominator == 1
        val = data.delta(t) * ClosedValue.sqrt_q_power(spec.p, spec.f,
                                                       int(tau2))
        return val.scaled(one_minus)

    t_main = min(data.t_d, data.t_n)
    tail = TailInfo("none")
    if t_main is INF:
        # all of D is empty and the completed target vanishes
        t0 = max([ti for ti, _ in data.n_items], default=0) + 1
        for t in range(1, t0 + 2):
            v = main_term(t)
            if v is not None and not v.is_zero:
                terms.append(TermTrace(t, v, "main"))
        stable = []
        for t in (t0, t0 + 1):
            v = main_term(t)
            stable.append(v.as_fraction() if v is not None else Fraction(0))
        ratio = Fraction(q) ** (2 - len(data.n_items))
        if any(stable):
            if ratio >= 1:
                raise NonConvergent(f"tail ratio {ratio} >= 1")
            total = sum(stable) * ratio / (1 - ratio)
            tail = TailInfo("geometric", ratio=ratio, total=total,
                            start=t0 + 2, bases=tuple(stable))
    else:
        for t in range(1, int(t_main) + 1):
            v = main_term(t)
            if v is not None and not v.is_zero:
                terms.append(TermTrace(t, v, "main"))
        if data.t_n is not INF and data.t_n < data.t_d:
            ts = int(data.t_n) + 1
            legs = data.l_set(ts)
            if len(legs) % 2 == 0:
                omega = ClosedValue.rational(spec.p, Fraction(-1, q))
            else:
                u_leg = legendre_symbol(data.n_shift.unit.residue())
                omega = gauss_sign(spec).scaled(u_leg) * \
                    ClosedValue.sqrt_q_power(spec.p, spec.f, -1)
            tau2 = data.tau(ts) * 2
            val = omega * data.delta(ts) * \
                ClosedValue.sqrt_q_power(spec.p, spec.f, int(tau2))
            if not val.is_zero:
                terms.append(TermTrace(ts, val, "boundary"))
    total = ClosedValue.one(spec.p)
    for tr in terms:
        total = total + tr.value
    if not total.is_rational:
        raise InternalInconsistency(f"density has irrational part: {total}")
    value = total.as_fraction()
    if tail.kind == "geometric":
        value += tail.total
    assert value >= 0, "negative density"
    if t_main is INF:
        depth = INF
    elif data.t_n is not INF and data.t_n < data.t_d:
        depth = int(data.t_n) + 1
    else:
        depth = int(t_main)
    return DensityResult(value=value, terms=terms, tail=tail,
                         precision_used=data.precision, depth=depth)


# -- dyadic -------------------------------------------------------------------


@dataclass
class SquareItem:
    t: int                 # min(ord b, ord c)
    cls: str               # "D" | "E" | "N"
    unit_b: PadicApprox    # unit part of b
    unit_pow: RingElem     # unit(b)^(q-1) mod p^3, for N items
    eta: int               # character value of unit(b), for N items
    shell_digit: RingElem | None  # binding digit for E items


@dataclass
class PairItem:
    t: int
    cls: str               # "D" | "N"


@dataclass
class DyadicTermData:
    spec: FieldSpec
    squares: list
    hyper: list
    aniso: list
    rho: PadicApprox
    rho_trace: int
    t_d: object
    n_shift: PadicApprox
    t_n: object
    precision: int

    @property
    def q(self):
        return self.spec.q

    def excluded(self, t) -> bool:
        return any(s.cls == "N" and s.t + 1 == t for s in self.squares)

    def l_parity(self, t) -> int:
        return sum(1 for s in self.squares
                   if s.cls == "N" and s.t - t + 1 < 0 and (s.t - t + 1) % 2) % 2

    def tau(self, t) -> Fraction:
        s = Fraction(t)
        for it in self.squares:
            if it.cls == "N" and it.t + 1 < t:
                s += Fraction(it.t - t + 1, 2)
        for it in self.hyper:
            if it.cls == "N" and it.t < t:
                s += it.t - t
        for it in self.aniso:
            if it.cls == "N" and it.t < t:
                s += it.t - t
        return s

    def delta(self, t) -> int:
        sign = 1
        for it in self.squares:
            if it.cls == "N" and it.t - t + 1 < 0 and (it.t - t + 1) % 2:
                if (self.spec.f - 1) % 2:
                    sign = -sign
                sign *= it.eta
        for it in self.aniso:
            if it.cls == "N" and it.t - t < 0 and (it.t - t) % 2:
                if self.rho_trace % 2:
                    sign = -sign
        return sign

    def m_of(self, t) -> PadicApprox:
        acc = RingElem.zero(self.spec, 3)
        for it in self.squares:
            if it.cls == "N" and it.t + 1 < t:
                acc = acc + it.unit_pow
        return PadicApprox.from_ring_elem(acc)

    def shell_set(self, t):
        """('all', None), ('single', digit) or ('empty', None)."""
        digits = [s.shell_digit for s in self.squares
                  if s.cls == "E" and s.t + 1 == t]
        if not digits:
            return ("all", None)
        first = digits[0]
        for d in digits[1:]:
            if d.residue() != first.residue():
                return ("empty", None)
        return ("single", first)

    def neg8n_digits(self, t):
        """Teichmuller digits (n0, n1) of -8 n_shift / p^t."""
        if self.t_n is INF:
            z = RingElem.zero(self.spec, 3)
            return z, z
        v = (-self.n_shift).shift(3 - t)
        d = v.teich_digits(2)
        return d[0], d[1]


def analyze_dyadic(red: ReducedDyadic, n: PadicApprox,
                   assume_n_zero: bool = False) -> DyadicTermData:
    spec = n.spec
    prec = n.unit.k if n.unit is not None else 8
    rho = red.rho
    rho_trace = trace_to_base(rho.residue_mod(1)) % 2
    four = PadicApprox.from_int(spec, 4, max(4, prec))
    one = PadicApprox.from_int(spec, 1, max(4, prec))
    n_shift = n
    t_d = INF
    squares = []
    for b, c in red.squares:
        ob, oc = b.ord(), _ord_or_inf(c)
        if b.unit.k < 3:
            raise PrecisionExhausted("square coefficient needed mod p^3 "
                                     "beyond its valuation", needed=ob + 3)
        unit_b = PadicApprox.from_unit(0, b.unit)
        t_i = min(ob, oc)
        if ob > oc:
            squares.append(SquareItem(int(oc), "D", unit_b, None, 0, None))
            t_d = min(t_d, oc)
        elif ob == oc:
            beta_res = b.unit.residue()
            gamma_res = c.unit.residue()
            digit = teichmuller_lift(beta_res * gamma_res.inv().pow(2), 3)
            squares.append(SquareItem(int(ob), "E", unit_b, None, 0, digit))
            t_d = min(t_d, ob + 1)
        else:
            upow = b.unit.truncate(3).pow(2 ** spec.f - 1)
            eta = dyadic_unit_char(unit_b)
            squares.append(SquareItem(int(ob), "N", unit_b, upow, eta, None))
            if not c.is_exact_zero:
                n_shift = n_shift + (c * c).div(four * b)
    hyper = []
    for b, c1, c2 in red.hyperbolic:
        ob = b.ord()
        oc = min(_ord_or_inf(c1), _ord_or_inf(c2))
        if ob > oc:
            hyper.append(PairItem(int(oc), "D"))
            t_d = min(t_d, oc)
        else:
            hyper.append(PairItem(int(ob), "N"))
            if not (c1.is_exact_zero or c2.is_exact_zero):
                n_shift = n_shift + (c1 * c2).div(b)
    aniso = []
    for b, c1, c2 in red.aniso:
        ob = b.ord()
        oc = min(_ord_or_inf(c1), _ord_or_inf(c2))
        if ob > oc:
            aniso.append(PairItem(int(oc), "D"))
            t_d = min(t_d, oc)
        else:
            aniso.append(PairItem(int(ob), "N"))
            num = rho * c1 * c1 + c2 * c2 - c1 * c2
            if not num.is_exact_zero:
                den = (rho.scaled_by_int(4) - one) * b
                n_shift = n_shift + num.div(den)
    if n_shift.is_exact_zero:
        t_n = INF
    elif n_shift.is_zeroish:
        if not assume_n_zero:
            raise PrecisionExhausted(
                "completed target is zero at available precision; pass "
                "assume_n_zero if it vanishes exactly",
                needed=n_shift.zero_abs_prec + 3)
        n_shift, t_n = PadicApprox.zero(spec), INF
    else:
        t_n = n_shift.ord()
    return DyadicTermData(spec=spec, squares=squares, hyper=hyper,
                          aniso=aniso, rho=rho, rho_trace=rho_trace,
                          t_d=t_d, n_shift=n_shift, t_n=t_n, precision=prec)


def _omega_lemma_sum(data: DyadicTermData, t: int) -> ClosedValue:
    """q times the sum of unit-shell integrals over the allowed shells."""
    kind, digit = data.shell_set(t)
    if kind == "empty":
        return ClosedValue.zero(2)
    alpha = (-data.n_shift).shift(-t)
    m = data.m_of(t)
    ell = data.l_parity(t)
    if kind == "single":
        shells = [teichmuller_lift(digit.residue(), 4)]
    else:
        shells = teichmuller_units(data.spec, 4)
    total = ClosedValue.zero(2)
    for a in shells:
        total = total + unit_shell_integral(a, alpha, m, ell)
    return total.scaled(data.spec.q)


def _omega_case_table(data: DyadicTermData, t: int):
    """The printed eight-case value, or None when a denominator vanishes."""
    spec = data.spec
    q = data.q
    kind, digit = data.shell_set(t)
    if kind == "empty":
        return ClosedValue.zero(2), "case1"
    ell = data.l_parity(t)
    m = data.m_of(t)
    m_res = m.residue_mod(1)
    m_unit = not m_res.is_zero
    nd0, nd1 = data.neg8n_digits(t)
    alpha = (-data.n_shift).shift(-t)
    alpha8 = alpha.shift(3)
    single = teichmuller_lift(digit.residue(), 4) if kind == "single" else None

    def case2(u):
        u_val = PadicApprox.from_teichmuller(u)
        x = alpha8 * u_val + m
        if not x.ord_ge(2):
            return ClosedValue.zero(2)
        return ClosedValue.from_phase(char_phase(x.shift(-3)))

    def case3():
        if nd0.is_zero:
            return None
        nd0_val = PadicApprox.from_teichmuller(nd0)
        x = nd0_val * m + alpha8
        if not x.ord_ge(2):
            return ClosedValue.zero(2)
        return ClosedValue.from_phase(char_phase(x.div(nd0_val).shift(-3)))

    def case4():
        if not m.ord_ge(2):
            return ClosedValue.zero(2)
        phase = ClosedValue.from_phase(char_phase(m.shift(-3)))
        return phase.scaled(q * _chi_ge(data.t_n, t) - 1)

    def case5():
        if m.is_zeroish or m.ord() != data.t_n + 3 - t:
            return ClosedValue.zero(2)
        m1 = m.teich_digits(2)[1]
        if nd1.is_zero:
            return None
        m1_val = PadicApprox.from_teichmuller(m1)
        nd1_val = PadicApprox.from_teichmuller(nd1)
        arg = m.shift(-3) - (m1_val * data.n_shift.div(nd1_val)).shift(-t)
        return ClosedValue.from_phase(char_phase(arg))

    def eta_scale():
        sign = -1 if (spec.f - 1) % 2 else 1
        return ClosedValue.sqrt_q_power(2, spec.f, -1).scaled(
            sign * dyadic_unit_char(m))

    def case6(u):
        if not _chi_ge(data.t_n, t - 2):
            return ClosedValue.zero(2)
        u_val = PadicApprox.from_teichmuller(u)
        nd1_val = PadicApprox.from_teichmuller(nd1)
        arg = (nd1_val * u_val * m).shift(-2) - (u_val * data.n_shift).shift(-t)
        return eta_scale() * ClosedValue.from_phase(char_phase(arg))

    def case7():
        if not _chi_ge(data.t_n, t - 2):
            return ClosedValue.zero(2)
        nd1_val = PadicApprox.from_teichmuller(nd1)
        x = nd1_val * m + alpha8.shift(-1)
        inner = q * (1 if x.ord_ge(2) else 0) - 1
        return eta_scale().scaled(inner)

    def case8():
        if data.t_n is INF or data.t_n != t - 3:
            return ClosedValue.zero(2)
        # here nd0 is a unit
        if kind == "single" and \
                nd0.residue() * single.residue() != RingElem.one(spec, 1):
            return ClosedValue.zero(2)
        eta_arg = data.n_shift.shift(3 - t) * \
            (PadicApprox.from_int(spec, 1, 4) + m)
        sign = -1 if (spec.f - 1) % 2 else 1
        m1 = m.teich_digits(2)[1]
        w = m1.residue() * nd1.residue() * nd0.residue().inv()
        from .padics import Phase
        phase = Phase(2, -trace_to_base(w), 1)
        return (ClosedValue.sqrt_q_power(2, spec.f, -1) *
                ClosedValue.from_phase(phase)).scaled(
                    sign * dyadic_unit_char(eta_arg))

    results = []
    if ell % 2 == 0:
        if single is not None:
            results.append((case2(single), "case2"))
        if kind == "all" or spec.f == 1:
            if m_unit:
                results.append((case3(), "case3"))
            elif data.t_n is INF or t <= data.t_n + 1:
                results.append((case4(), "case4"))
            else:
                results.append((case5(), "case5"))
    else:
        if m_unit:
            if single is not None:
                results.append((case6(single), "case6"))
            if kind == "all" or spec.f == 1:
                results.append((case7(), "case7"))
        else:
            results.append((case8(), "case8"))
    defined = [(v, tag) for v, tag in results if v is not None]
    if not defined:
        return None, results[0][1] + "-deferred"
    for (v1, t1), (v2, t2) in zip(defined, defined[1:]):
        if v1 != v2:
            raise InternalInconsistency(
                f"overlapping cases disagree at t={t}: {t1}={v1} {t2}={v2}")
    return defined[0]


def _dyadic_term(data: DyadicTermData, t: int, mode: str):
    """One shell contribution omega(t) delta(t) q^(tau(t)-1), with its tag."""
    spec = data.spec
    omega_case = tag = None
    if mode in ("case_table", "both"):
        omega_case, tag = _omega_case_table(data, t)
    omega_lemma = None
    if mode in ("lemma_sum", "both") or omega_case is None:
        omega_lemma = _omega_lemma_sum(data, t)
    if omega_case is not None and omega_lemma is not None:
        if omega_case != omega_lemma:
            raise InternalInconsistency(
                f"case table and shell sums disagree at t={t}: "
                f"{omega_case} vs {omega_lemma}")
    omega = omega_case if omega_case is not None else omega_lemma
    if tag is None:
        tag = "shell-sum"
    if omega.is_zero:
        return ClosedValue.zero(2), tag
    tau2 = (data.tau(t) - 1) * 2
    assert tau2.denominator == 1
    val = omega * ClosedValue.sqrt_q_power(2, spec.f, int(tau2))
    return val.scaled(data.delta(t)), tag


def beta_dyadic(data: DyadicTermData, mode: str = "both") -> DensityResult:
    if mode not in ("case_table", "lemma_sum", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    terms = []
    tail = TailInfo("none")
    t_stop = min(data.t_d, INF if data.t_n is INF else data.t_n + 3)
    if t_stop is not INF:
        for t in range(1, int(t_stop) + 1):
            if data.excluded(t):
                continue
            val, tag = _dyadic_term(data, t, mode)
            if not val.is_zero:
                terms.append(TermTrace(t, val, tag))
    else:
        thresholds = [s.t + 1 for s in data.squares] + \
            [h.t for h in data.hyper] + [a.t for a in data.aniso]
        t0 = 2 + max(thresholds, default=0)
        for t in range(1, t0 + 2):
            if data.excluded(t):
                continue
            val, tag = _dyadic_term(data, t, mode)
            if not val.is_zero:
                terms.append(TermTrace(t, val, tag))
        stable = []
        for t in (t0, t0 + 1, t0 + 2, t0 + 3):
            val, _ = _dyadic_term(data, t, mode)
            if not val.is_rational:
                raise InternalInconsistency("irrational stable tail term")
            stable.append(val.as_fraction())
        r_tilde = sum(1 for s in data.squares if s.cls == "N") + \
            2 * len([h for h in data.hyper if h.cls == "N"]) + \
            2 * len([a for a in data.aniso if a.cls == "N"])
        ratio = Fraction(data.q) ** (2 - r_tilde)
        for lo, hi in ((0, 2), (1, 3)):
            if stable[lo] * ratio != stable[hi]:
                raise InternalInconsistency("tail is not geometric")
        if any(stable[:2]):
            if ratio >= 1:
                raise NonConvergent(f"tail ratio {ratio} >= 1")
            total = (stable[0] + stable[1]) * ratio / (1 - ratio)
            tail = TailInfo("geometric", ratio=ratio, total=total,
                            start=t0 + 2, bases=(stable[0], stable[1]))
    total = ClosedValue.one(2)
    for tr in terms:
        total = total + tr.value
    if not total.is_rational:
        raise InternalInconsistency(f"density has irrational part: {total}")
    value = total.as_fraction()
    if tail.kind == "geometric":
        value += tail.total
    assert value >= 0, "negative density"
    depth = INF if t_stop is INF else int(t_stop)
    return DensityResult(value=value, terms=terms, tail=tail,
                         precision_used=data.precision, depth=depth)


# -- entry point --------------------------------------------------------------


def beta(Q: QuadraticPolynomial, n: PadicApprox, mode: str = "both",
         assume_n_zero: bool = False) -> DensityResult:
    """Density of Q(x) = n: normalize, reduce, analyze, evaluate."""
    Q0, n0 = constant_normalize(Q, n)
    if not n0.ord_ge(0):
        raise ValueError("target must be integral after normalization")
    if Q.spec.p == 2:
        red = reduce_dyadic(Q0)
        data = analyze_dyadic(red, n0, assume_n_zero=assume_n_zero)
        return beta_dyadic(data, mode=mode)
    red = reduce_nondyadic(Q0)
    data = analyze_nondyadic(red, n0, assume_n_zero=assume_n_zero)
    return beta_nondyadic(data)


def beta_rational(spec: FieldSpec, r: int, quad, lin, const, n,
                  mode: str = "both", assume_n_zero: bool = False,
                  precision: int = 12) -> DensityResult:
    """Convenience wrapper: exact rational input, automatic precision retry."""
    for prec in (precision, 4 * precision):
        def emb(v):
            return PadicApprox.from_rational(spec, v, prec)
        Q = QuadraticPolynomial(spec, r,
                                {k: emb(v) for k, v in quad.items()},
                                tuple(emb(v) for v in lin), emb(const))
        try:
            return beta(Q, emb(n), mode=mode, assume_n_zero=assume_n_zero)
        except PrecisionExhausted:
            if prec != precision:
                raise
    raise AssertionError("unreachable")
