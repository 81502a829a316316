"""Shared builders for the test suite."""

import random
from fractions import Fraction

import pytest

from padic_density import (FieldSpec, PadicApprox, QuadraticPolynomial,
                           RingElem, select_rho)

EMBED_PREC = 14


def embed(spec, value, prec=EMBED_PREC):
    return PadicApprox.from_rational(spec, Fraction(value), prec)


def poly_int(spec, r, quad, lin=None, const=0, prec=EMBED_PREC):
    """Polynomial from integer/rational coefficient dicts."""
    lin = lin or {}
    return QuadraticPolynomial(
        spec, r,
        {key: embed(spec, v, prec) for key, v in quad.items()},
        tuple(embed(spec, lin.get(i, 0), prec) for i in range(r)),
        embed(spec, const, prec))


def random_unit(rng, spec, val, prec=EMBED_PREC):
    while True:
        coords = [rng.randrange(spec.p ** prec) for _ in range(spec.f)]
        if any(c % spec.p for c in coords):
            return PadicApprox.from_unit(val, RingElem(spec, prec, coords))


def random_reduced_nondyadic(rng, spec, r_max):
    """Diagonal polynomial with valuations in {0,1}; n of valuation <= 2.

    Returns (poly, n, n_shift) with the completed target computed over the
    rationals so the caller knows the exact valuation structure.
    """
    r = rng.randint(1, r_max)
    quad, lin = {}, {}
    shift = Fraction(0)
    for i in range(r):
        b = rng.choice([u for u in range(1, 3 * spec.p) if u % spec.p]) \
            * spec.p ** rng.randint(0, 1)
        quad[(i, i)] = b
        if rng.random() < 0.6:
            c = rng.randint(1, 3 * spec.p)
            lin[i] = c
            if _vp(c, spec.p) >= _vp(b, spec.p):
                shift += Fraction(c * c, 4 * b)
    n = rng.choice([u for u in range(1, 3 * spec.p) if u % spec.p]) \
        * spec.p ** rng.randint(0, 2)
    return poly_int(spec, r, quad, lin), n, Fraction(n) + shift


def random_reduced_dyadic(rng, spec, r_max, rho_val):
    """Block polynomial mixing squares, hyperbolic and anisotropic parts."""
    quad, lin = {}, {}
    pos = 0
    while pos < r_max:
        kind = rng.choice(["sq", "sq", "hyp", "an"])
        if kind == "sq":
            quad[(pos, pos)] = embed(
                spec, rng.choice([1, 3, 5, 7]) * 2 ** rng.randint(0, 1))
            if rng.random() < 0.65:
                lin[pos] = embed(spec, rng.randint(1, 12))
            pos += 1
        elif kind == "hyp" and pos + 1 < r_max:
            quad[(pos, pos + 1)] = embed(
                spec, rng.choice([1, 3]) * 2 ** rng.randint(0, 1))
            for d in (0, 1):
                if rng.random() < 0.5:
                    lin[pos + d] = embed(spec, rng.randint(1, 8))
            pos += 2
        elif kind == "an" and pos + 1 < r_max:
            b = embed(spec, rng.choice([1, 3]) * 2 ** rng.randint(0, 1))
            quad[(pos, pos)] = b
            quad[(pos, pos + 1)] = b
            quad[(pos + 1, pos + 1)] = b * rho_val
            for d in (0, 1):
                if rng.random() < 0.5:
                    lin[pos + d] = embed(spec, rng.randint(1, 8))
            pos += 2
        else:
            break
    if pos == 0:
        quad[(0, 0)] = embed(spec, 1)
        pos = 1
    r = pos
    return QuadraticPolynomial(
        spec, r, quad,
        tuple(lin.get(i, PadicApprox.zero(spec)) for i in range(r)),
        PadicApprox.zero(spec))


def _vp(n, p):
    n = abs(int(n))
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


@pytest.fixture
def rng():
    return random.Random(20240808)
