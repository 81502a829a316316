import random
from fractions import Fraction

import pytest

from padic_density import (ClosedValue, ExpSum, Phase, PhasedValue, compare,
                           numeric_eval)


def rnd_value(rng, p, height=9):
    return ClosedValue(p, tuple(Fraction(rng.randint(-height, height),
                                         rng.randint(1, 7))
                                for _ in range(8)))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_basic_identities(p):
    i = ClosedValue.i_unit(p)
    assert i * i == ClosedValue.rational(p, -1)
    s = ClosedValue.zeta8(p, 1) + ClosedValue.zeta8(p, 7)
    assert s * s == ClosedValue.rational(p, 2)
    rt = ClosedValue.sqrt_p(p)
    assert rt * rt == ClosedValue.rational(p, p)


def test_ring_axioms_random():
    rng = random.Random(11)
    for _ in range(1000):
        p = rng.choice((2, 3, 5, 7))
        a, b, c = (rnd_value(rng, p) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a


def test_numeric_respects_arithmetic():
    rng = random.Random(13)
    for _ in range(400):
        p = rng.choice((2, 3, 5))
        a, b = rnd_value(rng, p, 1000), rnd_value(rng, p, 1000)
        lhs = numeric_eval(a * b)
        rhs = numeric_eval(a) * numeric_eval(b)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_sqrt2_folds_into_eighth_roots():
    assert ClosedValue.sqrt_p(2) == \
        ClosedValue.zeta8(2, 1) - ClosedValue.zeta8(2, 3)
    v = ClosedValue.sqrt_q_power(2, 3, 1)   # sqrt 8 = 2 sqrt 2
    assert v == ClosedValue.sqrt_p(2).scaled(2)
    assert abs(numeric_eval(v) - 8 ** 0.5) < 1e-12


def test_sqrt_q_powers():
    assert ClosedValue.sqrt_q_power(3, 2, -1) == \
        ClosedValue.rational(3, Fraction(1, 3))
    assert ClosedValue.sqrt_q_power(5, 1, 4) == ClosedValue.rational(5, 25)
    half = ClosedValue.sqrt_q_power(7, 1, 1)
    assert half * half == ClosedValue.rational(7, 7)


def test_rationality_flags():
    v = ClosedValue.rational(3, Fraction(5, 9))
    assert v.is_rational and v.as_fraction() == Fraction(5, 9)
    w = ClosedValue.i_unit(3)
    assert not w.is_rational
    with pytest.raises(ValueError):
        w.as_fraction()


def test_exp_sum_examples():
    flat = ExpSum.build(2, [(Phase.zero(2), 3)])
    assert numeric_eval(flat) == 3 + 0j
    cancel = ExpSum.build(3, [(Phase(3, 0, 0), 1), (Phase(3, 1, 1), 1),
                              (Phase(3, 2, 1), 1)])
    assert abs(numeric_eval(cancel)) < 1e-12
    merged = ExpSum.build(2, [(Phase(2, 1, 1), 1), (Phase(2, 1, 1), 2)])
    assert merged.terms == ((Phase(2, 1, 1), 3),)


def test_compare_examples():
    assert compare(ExpSum.build(2, [(Phase.zero(2), 1)]), ClosedValue.one(2))
    assert not compare(ExpSum.build(2, [(Phase(2, 1, 1), 1)]),
                       ClosedValue.one(2))
    # the three-term quadratic residue sum at p = 3 equals -i sqrt(3)
    g = ExpSum.build(3, [(Phase(3, 0, 0), 1), (Phase(3, -1, 1), 2)])
    target = ClosedValue.i_unit(3).scaled(-1) * ClosedValue.sqrt_p(3)
    assert compare(g, target, 1e-9)


def test_compare_is_exact_for_eighth_roots():
    # exactly representable sums are compared by coordinates, not floats
    lhs = ExpSum.build(2, [(Phase(2, 1, 3), 1), (Phase(2, 7, 3), 1)])
    assert compare(lhs, ClosedValue.sqrt_p(2), tol=0.0)
    off = ClosedValue.sqrt_p(2) + ClosedValue.rational(2, Fraction(1, 10 ** 12))
    assert not compare(lhs, off, tol=0.0)


def test_phased_value_fold():
    import cmath
    pv = PhasedValue(Phase(2, 1, 2), ClosedValue.rational(2, 3))
    assert pv.as_closed_value() == ClosedValue.i_unit(2).scaled(3)
    deep = PhasedValue(Phase(2, 1, 4), ClosedValue.one(2))
    with pytest.raises(ValueError):
        deep.as_closed_value()
    assert abs(numeric_eval(deep) - cmath.exp(2j * cmath.pi / 16)) < 1e-12


def test_json_serialization():
    v = ClosedValue.zeta8(3, 2).scaled(Fraction(-2, 3))
    assert v.to_json() == ["0/1", "0/1", "-2/3", "0/1",
                           "0/1", "0/1", "0/1", "0/1"]
    s = ExpSum.build(2, [(Phase(2, 1, 1), 2)], Fraction(1, 4))
    assert s.to_json() == {"scale": "1/4", "terms": [[1, 1, 2]]}
