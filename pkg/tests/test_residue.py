import random
from fractions import Fraction

import pytest

from padic_density import (FieldSpec, NonUnit, PadicApprox, Phase, RingElem,
                           SpecMismatch, char_phase, dyadic_unit_char,
                           frobenius, legendre_symbol, ring_arithmetic,
                           teichmuller_lift, trace_to_base)
from padic_density.residue import (residue_field, residue_units,
                                   ring_elements, trace_by_frobenius)

from conftest import embed


class TestRingArithmetic:
    def test_zeta_square_reduction(self):
        # GR(8, 2) with x^2 + x + 1: x * x = -x - 1 = 7 + 7x
        spec = FieldSpec(2, 2)
        x = RingElem(spec, 3, (0, 1))
        assert (x * x).coords == (7, 7)

    def test_inverse_in_z8(self):
        spec = FieldSpec(2, 1)
        three = RingElem.from_int(spec, 3, 3)
        assert ring_arithmetic(three, three, "inv").coords == (3,)
        with pytest.raises(NonUnit):
            RingElem.from_int(spec, 3, 2).inv()

    def test_spec_mismatch(self):
        a = RingElem.from_int(FieldSpec(3, 1), 2, 1)
        b = RingElem.from_int(FieldSpec(5, 1), 2, 1)
        with pytest.raises(SpecMismatch):
            ring_arithmetic(a, b, "add")
        with pytest.raises(SpecMismatch):
            a + RingElem.from_int(FieldSpec(3, 1), 3, 1)

    def test_inverses_random(self):
        rng = random.Random(1)
        for spec in (FieldSpec(2, 3), FieldSpec(3, 2), FieldSpec(7, 1)):
            for _ in range(25):
                k = rng.randint(1, 5)
                coords = [rng.randrange(spec.p ** k) for _ in range(spec.f)]
                e = RingElem(spec, k, coords)
                if not e.is_unit:
                    continue
                assert e * e.inv() == RingElem.one(spec, k)


class TestTeichmuller:
    def test_identity_and_zero(self):
        spec = FieldSpec(5, 1)
        assert teichmuller_lift(RingElem.one(spec, 1), 4).coords == (1,)
        assert teichmuller_lift(RingElem.zero(spec, 1), 4).is_zero

    def test_lift_of_two_mod_nine(self):
        spec = FieldSpec(3, 1)
        t = teichmuller_lift(RingElem.from_int(spec, 1, 2), 2)
        assert t.coords == (8,)
        assert t.pow(3) == t

    @pytest.mark.parametrize("p,f", [(2, 1), (2, 2), (2, 3),
                                     (3, 1), (3, 2), (5, 1)])
    def test_fixed_point_property(self, p, f):
        spec = FieldSpec(p, f)
        for k in (1, 2, 4, 6):
            for r in residue_field(spec):
                t = teichmuller_lift(r, k)
                assert t.pow(spec.q) == t
                assert t.residue() == r


class TestTrace:
    def test_trace_of_one(self):
        assert trace_to_base(RingElem.one(FieldSpec(2, 3), 2)) == 3

    def test_trace_of_generator(self):
        spec = FieldSpec(2, 2)
        assert trace_to_base(RingElem(spec, 1, (0, 1))) == 1

    def test_square_trace_identity_dyadic(self):
        # Tr(x^2) = Tr(x) exactly for Teichmuller representatives
        for f in (1, 2, 3, 4):
            spec = FieldSpec(2, f)
            for k in (1, 2, 4):
                for r in residue_field(spec):
                    t = teichmuller_lift(r, k)
                    assert trace_to_base(t * t) == trace_to_base(t)

    def test_matches_frobenius_iteration(self):
        rng = random.Random(7)
        for spec in (FieldSpec(2, 2), FieldSpec(2, 3), FieldSpec(3, 2),
                     FieldSpec(5, 2)):
            for _ in range(20):
                k = rng.randint(1, 5)
                a = RingElem(spec, k,
                             tuple(rng.randrange(spec.p ** k)
                                   for _ in range(spec.f)))
                assert trace_to_base(a) == trace_by_frobenius(a)

    def test_frobenius_is_residue_power(self):
        spec = FieldSpec(3, 2)
        for r in residue_field(spec):
            assert frobenius(r) == r.pow(3)


class TestLegendre:
    def test_values(self):
        assert legendre_symbol(RingElem.zero(FieldSpec(3, 1), 1)) == 0
        assert legendre_symbol(RingElem.from_int(FieldSpec(7, 1), 1, 2)) == 1
        # the residue generator at q = 9 is not a square
        assert legendre_symbol(RingElem(FieldSpec(3, 2), 1, (0, 1))) == -1

    def test_generator_by_exhaustive_squares(self):
        spec = FieldSpec(3, 2)
        zeta = RingElem(spec, 1, (0, 1))
        squares = {u * u for u in residue_units(spec)}
        assert zeta not in squares

    @pytest.mark.parametrize("p,f", [(3, 1), (5, 1), (7, 1),
                                     (3, 2), (5, 2), (7, 2)])
    def test_multiplicative(self, p, f):
        spec = FieldSpec(p, f)
        units = list(residue_units(spec))
        for a in units:
            for b in units:
                assert legendre_symbol(a * b) == \
                    legendre_symbol(a) * legendre_symbol(b)


class TestCharPhase:
    def test_trivial_on_integers(self):
        spec = FieldSpec(2, 1)
        assert char_phase(embed(spec, 5)).is_zero
        assert char_phase(PadicApprox.zero(spec)).is_zero

    def test_one_half(self):
        spec = FieldSpec(2, 1)
        ph = char_phase(embed(spec, Fraction(1, 2)))
        assert ph.as_fraction() == Fraction(1, 2)

    def test_zeta_over_three(self):
        spec = FieldSpec(3, 2)
        zeta = PadicApprox.from_unit(0, RingElem(spec, 8, (0, 1)))
        ph = char_phase(zeta.div(embed(spec, 3)))
        assert ph.as_fraction() == Fraction(1, 3)

    def test_additive(self):
        rng = random.Random(3)
        for spec in (FieldSpec(2, 2), FieldSpec(3, 1), FieldSpec(5, 2)):
            for _ in range(150):
                def rnd():
                    from conftest import random_unit
                    return random_unit(rng, spec, rng.randint(-4, 3), prec=10)
                x, y = rnd(), rnd()
                assert char_phase(x + y) == char_phase(x) + char_phase(y)

    def test_nontrivial_on_poles(self):
        # for every alpha outside o some integral beta detects it
        for spec in (FieldSpec(2, 2), FieldSpec(3, 1)):
            for val in (-1, -2):
                for u in residue_units(spec):
                    alpha = PadicApprox.from_unit(
                        val, teichmuller_lift(u, 6))
                    hits = []
                    for b in ring_elements(spec, -val):
                        prod = alpha * PadicApprox.from_exact_coords(
                            spec, b.coords, 6)
                        hits.append(not char_phase(prod).is_zero)
                    assert any(hits)

    def test_truncated_integral_identity(self):
        # averaging e(sigma x) over p^t / p^(k+t) detects membership in p^-t
        rng = random.Random(5)
        for spec in (FieldSpec(2, 1), FieldSpec(3, 1), FieldSpec(2, 2)):
            for _ in range(30):
                t = rng.randint(-2, 2)
                val = rng.randint(-4, 4)
                from conftest import random_unit
                sigma = random_unit(rng, spec, val, prec=12)
                k = max(1, -t - val + 1)
                total = 0j
                for x in ring_elements(spec, k):
                    xv = PadicApprox.from_exact_coords(spec, x.coords, 12,
                                                       shift=t)
                    total += char_phase(sigma * xv).numeric()
                total /= spec.q ** (k + t)
                expected = (1.0 / spec.q ** t) if val >= -t else 0.0
                assert abs(total - expected) < 1e-9

    def test_residue_sum_identity(self):
        # sum over o/p of e(sigma x / pi) = q * [sigma in p]
        for spec in (FieldSpec(2, 1), FieldSpec(3, 1), FieldSpec(2, 2)):
            for sigma in ring_elements(spec, 2):
                sv = PadicApprox.from_exact_coords(spec, sigma.coords, 8)
                total = 0j
                for x in residue_field(spec):
                    xv = PadicApprox.from_exact_coords(spec, x.coords, 8,
                                                       shift=-1)
                    total += char_phase(sv * xv).numeric()
                in_p = all(c % spec.p == 0 for c in sigma.coords)
                assert abs(total - (spec.q if in_p else 0.0)) < 1e-9


class TestDyadicUnitChar:
    def test_values_on_q2(self):
        spec = FieldSpec(2, 1)
        for n, want in ((1, 1), (3, -1), (5, -1), (7, 1)):
            assert dyadic_unit_char(embed(spec, n)) == want

    @pytest.mark.parametrize("f", [1, 2, 3])
    def test_multiplicative(self, f):
        spec = FieldSpec(2, f)
        units = [u for u in ring_elements(spec, 3) if u.is_unit]
        vals = {u: dyadic_unit_char(PadicApprox.from_unit(0, u))
                for u in units}
        for u1 in units:
            for u2 in units:
                assert vals[u1 * u2] == vals[u1] * vals[u2]

    def test_needs_three_digits(self):
        from padic_density import PrecisionExhausted
        spec = FieldSpec(2, 1)
        short = PadicApprox.from_unit(0, RingElem.from_int(spec, 2, 3))
        with pytest.raises(PrecisionExhausted):
            dyadic_unit_char(short)


class TestPhaseArithmetic:
    def test_normalization(self):
        assert Phase(2, 4, 3) == Phase(2, 1, 1)
        assert Phase(3, 9, 2) == Phase(3, 0, 0)
        assert (Phase(2, 1, 2) + Phase(2, 3, 2)).is_zero

    def test_fraction_and_numeric(self):
        ph = Phase(2, 3, 3)
        assert ph.as_fraction() == Fraction(3, 8)
        assert abs(ph.numeric() - complex(-0.7071067811865475,
                                          0.7071067811865476)) < 1e-12
