import random
from fractions import Fraction

import pytest

from padic_density import (DegenerateInput, FieldSpec, PadicApprox,
                           QuadraticPolynomial, Transform, apply_transform,
                           constant_normalize, count_density, legendre_symbol,
                           reduce_dyadic, reduce_nondyadic, select_rho,
                           trace_to_base)
from padic_density.residue import RingElem, residue_field

from conftest import embed, poly_int


def coeffs_agree(a: PadicApprox, b: PadicApprox, floor: int) -> bool:
    diff = a - b
    if diff.is_exact_zero or diff.is_zeroish:
        return True
    return diff.ord() >= floor


def polys_agree(Q1, Q2, floor=10):
    keys = set(Q1.quad) | set(Q2.quad)
    for key in keys:
        if not coeffs_agree(Q1.quad_at(*key), Q2.quad_at(*key), floor):
            return False
    for a, b in zip(Q1.lin, Q2.lin):
        if not coeffs_agree(a, b, floor):
            return False
    return coeffs_agree(Q1.const, Q2.const, floor)


class TestPolynomialModel:
    def test_integrality_enforced(self):
        spec = FieldSpec(3, 1)
        with pytest.raises(ValueError):
            poly_int(spec, 1, {(0, 0): Fraction(1, 3)})

    def test_degenerate_rejected(self):
        spec = FieldSpec(3, 1)
        with pytest.raises(DegenerateInput):
            QuadraticPolynomial(spec, 2, {(0, 0): embed(spec, 1)},
                                (PadicApprox.zero(spec),) * 2,
                                PadicApprox.zero(spec))

    def test_constant_normalize(self):
        spec = FieldSpec(3, 1)
        Q = poly_int(spec, 1, {(0, 0): 1}, const=1)
        Q2, n2 = constant_normalize(Q, embed(spec, 1))
        assert Q2.const.is_exact_zero
        assert n2.is_zeroish or n2.is_exact_zero
        Q3 = poly_int(spec, 1, {(0, 0): 1}, {0: 1}, const=3)
        Q4, n4 = constant_normalize(Q3, embed(spec, 0))
        assert n4.ord() == 1 and (n4 - embed(spec, -3)).is_zeroish


class TestApplyTransform:
    def test_identity(self):
        spec = FieldSpec(3, 1)
        Q = poly_int(spec, 2, {(0, 0): 1, (0, 1): 2}, {1: 5})
        T = Transform.identity(spec, 2, 8)
        assert polys_agree(apply_transform(Q, T), Q)

    def test_shear_on_square(self):
        # x^2 under x -> x + y gives x^2 + 2xy + y^2
        spec = FieldSpec(3, 1)
        Q = QuadraticPolynomial(spec, 2, {(0, 0): embed(spec, 1)},
                                (PadicApprox.zero(spec),) * 2,
                                PadicApprox.zero(spec), validate=False)
        one, zero = RingElem.one(spec, 8), RingElem.zero(spec, 8)
        T = Transform(((one, one), (zero, one)))
        QT = apply_transform(Q, T)
        assert QT.quad_at(0, 0).residue_mod(3).coords == (1,)
        assert QT.quad_at(0, 1).residue_mod(3).coords == (2,)
        assert QT.quad_at(1, 1).residue_mod(3).coords == (1,)

    def test_composition_is_associative(self, rng):
        spec = FieldSpec(2, 2)
        for _ in range(10):
            mats = []
            for _ in range(3):
                while True:
                    rows = tuple(tuple(RingElem(spec, 6,
                                                (rng.randrange(64),
                                                 rng.randrange(64)))
                                       for _ in range(2)) for _ in range(2))
                    try:
                        mats.append(Transform(rows))
                        break
                    except DegenerateInput:
                        continue
            a, b, c = mats
            lhs = a.compose(b).compose(c)
            rhs = a.compose(b.compose(c))
            assert lhs.matrix == rhs.matrix


class TestNonDyadicReduction:
    def test_diagonal_unchanged(self):
        spec = FieldSpec(3, 1)
        Q = poly_int(spec, 2, {(0, 0): 2, (1, 1): 3}, {0: 1})
        red = reduce_nondyadic(Q)
        vals = [(b.ord(), c.ord() if not c.is_exact_zero else None)
                for b, c in red.terms]
        assert vals == [(0, 0), (1, None)]

    def test_complete_the_square(self):
        # x^2 + xy + y^2 over Q_3 diagonalizes with valuations (0, 1)
        spec = FieldSpec(3, 1)
        red = reduce_nondyadic(poly_int(spec, 2,
                                        {(0, 0): 1, (0, 1): 1, (1, 1): 1}))
        assert sorted(b.ord() for b, _ in red.terms) == [0, 1]

    def test_hyperbolic_plane_determinant_class(self):
        # xy splits into units whose product has the class of -1
        spec = FieldSpec(5, 1)
        red = reduce_nondyadic(poly_int(spec, 2, {(0, 1): 1}))
        prod = 1
        for b, _ in red.terms:
            assert b.ord() == 0
            prod *= legendre_symbol(b.unit.residue())
        minus_one = legendre_symbol(RingElem.from_int(spec, 1, -1))
        assert prod == minus_one

    def test_transform_reproduces_reduction(self, rng):
        for spec in (FieldSpec(3, 1), FieldSpec(5, 1), FieldSpec(3, 2)):
            for _ in range(15):
                r = rng.randint(1, 3)
                quad = {}
                for i in range(r):
                    for j in range(i, r):
                        if rng.random() < 0.8:
                            quad[(i, j)] = rng.randint(1, 20) * \
                                spec.p ** rng.randint(0, 1)
                try:
                    Q = poly_int(spec, r, quad,
                                 {i: rng.randint(0, 9) for i in range(r)})
                except DegenerateInput:
                    continue
                red = reduce_nondyadic(Q)
                QT = apply_transform(Q, red.transform)
                for i in range(r):
                    assert coeffs_agree(QT.quad_at(i, i), red.terms[i][0], 9)
                    assert coeffs_agree(QT.lin[i], red.terms[i][1], 9)
                    for j in range(i + 1, r):
                        assert coeffs_agree(QT.quad_at(i, j),
                                            PadicApprox.zero(spec), 9)


class TestDyadicReduction:
    def test_xy_is_one_hyperbolic_block(self):
        spec = FieldSpec(2, 1)
        red = reduce_dyadic(poly_int(spec, 2, {(0, 1): 1}))
        assert not red.squares and not red.aniso
        assert len(red.hyperbolic) == 1
        assert red.hyperbolic[0][0].ord() == 0

    def test_norm_form_is_anisotropic_block(self):
        spec = FieldSpec(2, 1)
        red = reduce_dyadic(poly_int(spec, 2,
                                     {(0, 0): 1, (0, 1): 1, (1, 1): 1}))
        assert len(red.aniso) == 1 and not red.squares and not red.hyperbolic
        assert red.rho.unit.coords[0] % 8 == 1  # rho = 1 when f is odd

    def test_sum_of_squares_splits(self):
        spec = FieldSpec(2, 1)
        red = reduce_dyadic(poly_int(spec, 2, {(0, 0): 1, (1, 1): 1}))
        assert len(red.squares) == 2
        assert [b.ord() for b, _ in red.squares] == [0, 0]

    def test_transform_reproduces_reduction(self, rng):
        for spec in (FieldSpec(2, 1), FieldSpec(2, 2), FieldSpec(2, 3)):
            for _ in range(12):
                r = rng.randint(1, 3)
                quad = {}
                for i in range(r):
                    for j in range(i, r):
                        if rng.random() < 0.8:
                            quad[(i, j)] = rng.randint(1, 20) * \
                                2 ** rng.randint(0, 1)
                try:
                    Q = poly_int(spec, r, quad,
                                 {i: rng.randint(0, 9) for i in range(r)})
                except DegenerateInput:
                    continue
                red = reduce_dyadic(Q)
                QT = apply_transform(Q, red.transform)
                total_vars = len(red.squares) + \
                    2 * len(red.hyperbolic) + 2 * len(red.aniso)
                assert total_vars == r
                # density is preserved by the certified transform
                n = embed(spec, rng.randint(1, 8))
                k = 3 if spec.f < 3 else 2
                assert count_density(Q, n, k).count == \
                    count_density(QT, n, k).count


class TestSelectRho:
    def test_odd_degree_gives_one(self):
        for f in (1, 3):
            rho = select_rho(FieldSpec(2, f))
            assert rho.unit.residue() == RingElem.one(FieldSpec(2, f), 1)

    def test_f2_gives_cube_root(self):
        spec = FieldSpec(2, 2)
        rho = select_rho(spec, 6)
        assert rho.unit.residue().coords == (0, 1)
        # a primitive cube root of unity: rho^3 = 1 in the ring
        assert rho.unit.pow(3) == RingElem.one(spec, 6)

    @pytest.mark.parametrize("f", [1, 2, 3, 4])
    def test_trace_one_and_irreducible(self, f):
        spec = FieldSpec(2, f)
        rho = select_rho(spec)
        res = rho.unit.residue()
        assert trace_to_base(res) % 2 == 1
        # x^2 + x + rho has no residue root
        for z in residue_field(spec):
            assert z * z + z != -res


class TestOracleInvariance:
    def test_reduction_preserves_density(self, rng):
        specs = [FieldSpec(2, 1), FieldSpec(2, 2), FieldSpec(2, 3),
                 FieldSpec(3, 1), FieldSpec(3, 2), FieldSpec(5, 1),
                 FieldSpec(7, 1)]
        checked = 0
        for spec in specs:
            for _ in range(6):
                r = rng.randint(1, 3)
                quad = {}
                for i in range(r):
                    for j in range(i, r):
                        if rng.random() < 0.85:
                            quad[(i, j)] = rng.randint(1, 30) * \
                                spec.p ** rng.randint(0, 1)
                try:
                    Q = poly_int(spec, r, quad,
                                 {i: rng.randint(0, 10) for i in range(r)})
                except DegenerateInput:
                    continue
                red = reduce_dyadic(Q) if spec.p == 2 else reduce_nondyadic(Q)
                QT = apply_transform(Q, red.transform)
                n = embed(spec, rng.randint(1, 8))
                k = 3 if spec.q <= 5 else 2
                assert count_density(Q, n, k).count == \
                    count_density(QT, n, k).count
                checked += 1
        assert checked >= 30
