"""Quadratic polynomials over o and their block reduction.

For odd p every integral nondegenerate quadratic part diagonalizes over
GL_r(o).  Over an unramified dyadic field it splits into scaled unary
squares u x^2, hyperbolic planes u xy and anisotropic planes
u (x^2 + xy + rho y^2) with a fixed unit rho whose residue has absolute
trace one.  The reductions here are constructive: every division that
enters a transform is performed in the ring and certified, and Hensel /
Artin-Schreier roots are refined until the residual vanishes at working
precision, so the certified transform reproduces the reduced coefficients
on the nose.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import DegenerateInput, PrecisionExhausted
from .fields import FieldSpec
from .padics import INF, PadicApprox
from .residue import RingElem, residue_field, teichmuller_lift, trace_to_base


@dataclass
class QuadraticPolynomial:
    """x^t A x + b^t x + c with sparse upper-triangular quad coefficients."""

    spec: FieldSpec
    r: int
    quad: dict
    lin: tuple
    const: PadicApprox
    validate: bool = True

    def __post_init__(self):
        clean = {}
        for (i, j), c in self.quad.items():
            if i > j:
                i, j = j, i
            if not c.is_exact_zero:
                clean[(i, j)] = c
        self.quad = clean
        self.lin = tuple(self.lin)
        assert len(self.lin) == self.r
        if self.validate:
            for c in list(self.quad.values()) + list(self.lin) + [self.const]:
                if not c.ord_ge(0):
                    raise ValueError("polynomial is not integral")
            if self.gram_det().is_exact_zero:
                raise DegenerateInput("quadratic part is singular")

    def quad_at(self, i, j) -> PadicApprox:
        key = (i, j) if i <= j else (j, i)
        return self.quad.get(key, PadicApprox.zero(self.spec))

    def gram_det(self) -> PadicApprox:
        """Determinant of the symmetric matrix (A_ii, A_ij = quad_ij / 2)."""
        two = PadicApprox.from_int(self.spec, 2, self._work_prec())
        A = [[None] * self.r for _ in range(self.r)]
        for i in range(self.r):
            for j in range(self.r):
                c = self.quad_at(i, j)
                A[i][j] = c if i == j else c.div(two)
        return _det(A, self.spec)

    def _work_prec(self) -> int:
        precs = [c.unit.k
                 for c in list(self.quad.values()) + list(self.lin) + [self.const]
                 if c.unit is not None]
        return max(3, min(precs)) if precs else 8

    def evaluate(self, point) -> RingElem:
        """Value at a point of (o/p^k)^r, for cross-checks."""
        k = point[0].k
        acc = self.const.residue_mod(k)
        for (i, j), c in self.quad.items():
            acc = acc + c.residue_mod(k) * point[i] * point[j]
        for i, c in enumerate(self.lin):
            if not c.is_exact_zero:
                acc = acc + c.residue_mod(k) * point[i]
        return acc

    def to_json(self):
        def coeff(c):
            if c.is_exact_zero:
                return {"val": "inf", "unit": []}
            return {"val": c.valuation, "unit": list(c.unit.coords)}
        return {"field": self.spec.to_json(), "r": self.r,
                "quad": [[i, j, coeff(c)] for (i, j), c in sorted(self.quad.items())],
                "lin": [coeff(c) for c in self.lin],
                "const": coeff(self.const)}


def _det(A, spec) -> PadicApprox:
    n = len(A)
    if n == 1:
        return A[0][0]
    total = PadicApprox.zero(spec)
    for j in range(n):
        if A[0][j].is_exact_zero:
            continue
        minor = [[A[i][jj] for jj in range(n) if jj != j] for i in range(1, n)]
        term = A[0][j] * _det(minor, spec)
        total = total + (term if j % 2 == 0 else -term)
    return total


@dataclass(frozen=True)
class Transform:
    """A certified element of GL_r(o) at working precision."""

    matrix: tuple  # rows of RingElem, all at one precision

    @property
    def spec(self):
        return self.matrix[0][0].spec

    @property
    def r(self):
        return len(self.matrix)

    @property
    def prec(self):
        return self.matrix[0][0].k

    def __post_init__(self):
        det = _ring_det(self.matrix)
        if not det.is_unit:
            raise DegenerateInput("transform determinant is not a unit")

    @classmethod
    def identity(cls, spec, r, k):
        one, zero = RingElem.one(spec, k), RingElem.zero(spec, k)
        return cls(tuple(tuple(one if i == j else zero for j in range(r))
                         for i in range(r)))

    def compose(self, other: "Transform") -> "Transform":
        """self then other: matrix product self.matrix @ other.matrix."""
        a, b = self.matrix, other.matrix
        r = self.r
        rows = []
        for i in range(r):
            row = []
            for j in range(r):
                acc = RingElem.zero(self.spec, self.prec)
                for t in range(r):
                    acc = acc + a[i][t] * b[t][j]
                row.append(acc)
            rows.append(tuple(row))
        return Transform(tuple(rows))

    def to_json(self):
        return [[list(e.coords) for e in row] for row in self.matrix]


def _ring_det(matrix) -> RingElem:
    n = len(matrix)
    spec, k = matrix[0][0].spec, matrix[0][0].k
    if n == 1:
        return matrix[0][0]
    total = RingElem.zero(spec, k)
    for j in range(n):
        minor = [[matrix[i][jj] for jj in range(n) if jj != j]
                 for i in range(1, n)]
        term = matrix[0][j] * _ring_det(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def apply_transform(Q: QuadraticPolynomial, T: Transform) -> QuadraticPolynomial:
    """Coefficients of Q(T x), recomputed exactly at working precision.

    The transform entries are exact representatives, so structural zeros
    stay exact zeros in the result.
    """
    r = Q.r
    tp = [[PadicApprox.from_exact_coords(Q.spec, T.matrix[i][j].coords, T.prec)
           for j in range(r)] for i in range(r)]
    quad = {}

    def bump(a, b, val):
        key = (a, b) if a <= b else (b, a)
        quad[key] = quad.get(key, PadicApprox.zero(Q.spec)) + val

    for (i, j), c in Q.quad.items():
        for a in range(r):
            if tp[i][a].is_exact_zero:
                continue
            for b in range(r):
                if tp[j][b].is_exact_zero:
                    continue
                bump(a, b, c * tp[i][a] * tp[j][b])
    lin = []
    for a in range(r):
        acc = PadicApprox.zero(Q.spec)
        for i in range(r):
            if not Q.lin[i].is_exact_zero:
                acc = acc + Q.lin[i] * tp[i][a]
        lin.append(acc)
    return QuadraticPolynomial(Q.spec, r, quad, tuple(lin), Q.const,
                               validate=False)


def constant_normalize(Q: QuadraticPolynomial, n: PadicApprox):
    """Move the constant into the target: returns (Q - c, n - c)."""
    if Q.const.is_exact_zero:
        return Q, n
    stripped = QuadraticPolynomial(Q.spec, Q.r, dict(Q.quad), Q.lin,
                                   PadicApprox.zero(Q.spec), validate=False)
    return stripped, n - Q.const


# -- reduction ----------------------------------------------------------------


@dataclass
class ReducedNonDyadic:
    terms: list          # (b_i, c_i) with b_i a nonzero PadicApprox
    const: PadicApprox
    transform: Transform


@dataclass
class ReducedDyadic:
    squares: list        # (b_i, c_i)
    hyperbolic: list     # (b'_j, c'_j1, c'_j2)
    aniso: list          # (b''_k, c''_k1, c''_k2)
    rho: PadicApprox
    const: PadicApprox
    transform: Transform


def select_rho(spec: FieldSpec, prec: int = 8) -> PadicApprox:
    """First Teichmuller unit whose residue has absolute trace 1.

    Makes x^2 + x + rho irreducible over the residue field; this gives 1
    whenever f is odd.
    """
    if spec.p != 2:
        raise ValueError("rho is a dyadic datum")
    for res in residue_field(spec):
        if not res.is_zero and trace_to_base(res) % 2 == 1:
            return PadicApprox.from_unit(0, teichmuller_lift(res, prec))
    raise AssertionError("no trace-one residue exists")  # impossible


def _elementary(spec, r, k, entries) -> Transform:
    rows = [[RingElem.one(spec, k) if i == j else RingElem.zero(spec, k)
             for j in range(r)] for i in range(r)]
    for (i, j), v in entries.items():
        rows[i][j] = v if isinstance(v, RingElem) else RingElem.from_int(spec, k, v)
    return Transform(tuple(tuple(row) for row in rows))


def _swap(spec, r, k, i, j) -> Transform:
    rows = [[RingElem.one(spec, k) if a == b else RingElem.zero(spec, k)
             for b in range(r)] for a in range(r)]
    zero, one = RingElem.zero(spec, k), RingElem.one(spec, k)
    rows[i][i] = rows[j][j] = zero
    rows[i][j] = rows[j][i] = one
    return Transform(tuple(tuple(row) for row in rows))


def _coeff_ord(c: PadicApprox):
    # residuals below working precision never win a pivot; the degeneracy
    # guard at construction keeps this sound
    if c.is_exact_zero or c.is_zeroish:
        return INF
    return c.ord()


class _Reducer:
    """Shared machinery: applies elementary transforms and tracks them."""

    def __init__(self, Q: QuadraticPolynomial, prec: int):
        self.spec = Q.spec
        self.r = Q.r
        self.k = prec
        self.T = Transform.identity(Q.spec, Q.r, prec)
        self.cur = Q

    def apply(self, E: Transform):
        self.T = self.T.compose(E)
        self.cur = apply_transform(self.cur, E)

    def d(self, i):
        return self.cur.quad_at(i, i)

    def o(self, i, j):
        return self.cur.quad_at(i, j)

    def min_diag(self, start):
        best, arg = INF, None
        for i in range(start, self.r):
            v = _coeff_ord(self.d(i))
            if v < best:
                best, arg = v, i
        return best, arg

    def min_off(self, start):
        best, arg = INF, None
        for i in range(start, self.r):
            for j in range(i + 1, self.r):
                v = _coeff_ord(self.o(i, j))
                if v < best:
                    best, arg = v, (i, j)
        return best, arg

    def ring_of(self, c: PadicApprox) -> RingElem:
        """A working-precision representative of a value with ord >= 0."""
        j = c.abs_prec
        if j >= self.k:
            return c.residue_mod(self.k)
        if j < 1:
            raise PrecisionExhausted("transform entry undetermined")
        return c.residue_mod(int(j)).lift(self.k)

    def clear_with_unary_pivot(self, m):
        """Complete the square at position m: kill every o(m, j)."""
        d_m = self.d(m)
        two_dm = d_m.scaled_by_int(2)
        entries = {}
        for j in range(m + 1, self.r):
            omj = self.o(m, j)
            if omj.is_exact_zero or omj.is_zeroish:
                continue
            assert omj.ord() >= two_dm.ord(), "unary pivot rule violated"
            entries[(m, j)] = -self.ring_of(omj.div(two_dm))
        if entries:
            self.apply(_elementary(self.spec, self.r, self.k, entries))

    def clear_with_binary_pivot(self, m):
        """Decouple the plane (m, m+1) from every later variable."""
        for kv in range(m + 2, self.r):
            o_p = self.o(m, m + 1)
            d1, d2 = self.d(m), self.d(m + 1)
            det = d1 * d2.scaled_by_int(4) - o_p * o_p
            c1, c2 = self.o(m, kv), self.o(m + 1, kv)
            if (c1.is_exact_zero or c1.is_zeroish) and \
                    (c2.is_exact_zero or c2.is_zeroish):
                continue
            a = (o_p * c2 - d2.scaled_by_int(2) * c1).div(det)
            b = (o_p * c1 - d1.scaled_by_int(2) * c2).div(det)
            entries = {}
            if not (a.is_exact_zero or a.is_zeroish):
                entries[(m, kv)] = self.ring_of(a)
            if not (b.is_exact_zero or b.is_zeroish):
                entries[(m + 1, kv)] = self.ring_of(b)
            if entries:
                self.apply(_elementary(self.spec, self.r, self.k, entries))

    def hensel_root(self, a2: PadicApprox, a1: PadicApprox, a0: PadicApprox,
                    start: RingElem) -> RingElem:
        """Root of a2 z^2 + a1 z + a0 with a1 + 2 a2 z a unit, refined until
        the residual vanishes at working precision (minus a 2-digit slack)."""
        z = PadicApprox.from_ring_elem(start.lift(self.k) if start.k < self.k
                                       else start.truncate(self.k))
        floor = self.k - 2
        for _ in range(self.k + 3):
            val = a2 * z * z + a1 * z + a0
            if val.is_exact_zero or (val.is_zeroish and val.abs_prec >= floor) \
                    or (not val.is_zeroish and val.ord() >= floor):
                break
            der = a2.scaled_by_int(2) * z + a1
            z = z - val.div(der)
        else:
            raise PrecisionExhausted("Hensel iteration failed to settle")
        return self.ring_of(z)


def _artin_schreier_root(spec, target: RingElem) -> RingElem:
    """Solve z^2 + z = target over the residue field by scanning."""
    for z in residue_field(spec):
        if z * z + z == target:
            return z
    raise ArithmeticError("Artin-Schreier equation is not solvable")


def reduce_nondyadic(Q: QuadraticPolynomial) -> ReducedNonDyadic:
    """Diagonalize the quadratic part over GL_r(o), p odd."""
    if Q.spec.p == 2:
        raise ValueError("non-dyadic reduction needs p odd")
    red = _Reducer(Q, Q._work_prec())
    for m in range(Q.r):
        vd, di = red.min_diag(m)
        vo, oij = red.min_off(m)
        if vd is INF and vo is INF:
            raise DegenerateInput("quadratic part vanished during reduction")
        if vo < vd:
            i, j = oij
            # mix x_i <- x_i +- x_j to surface a minimal diagonal entry
            for sign in (1, -1):
                mixed = red.d(i) + red.o(i, j).scaled_by_int(sign) + red.d(j)
                if not mixed.is_zeroish and mixed.ord() == vo:
                    red.apply(_elementary(Q.spec, Q.r, red.k, {(j, i): sign}))
                    break
            else:
                raise PrecisionExhausted("pivot mixing undetermined")
            vd, di = red.min_diag(m)
        if di != m:
            red.apply(_swap(Q.spec, Q.r, red.k, m, di))
        red.clear_with_unary_pivot(m)
    final = apply_transform(Q, red.T)
    terms = []
    for i in range(Q.r):
        for j in range(i + 1, Q.r):
            leftover = final.quad_at(i, j)
            assert leftover.is_exact_zero or leftover.is_zeroish or \
                leftover.ord() >= red.k - 1, "off-diagonal residue too large"
        terms.append((final.quad_at(i, i), final.lin[i]))
    return ReducedNonDyadic(terms=terms, const=final.const, transform=red.T)


def reduce_dyadic(Q: QuadraticPolynomial) -> ReducedDyadic:
    """Split into squares, hyperbolic and anisotropic blocks, p = 2."""
    spec = Q.spec
    if spec.p != 2:
        raise ValueError("dyadic reduction needs p = 2")
    red = _Reducer(Q, Q._work_prec())
    rho = select_rho(spec, red.k)
    blocks = []
    m = 0
    while m < Q.r:
        vd, di = red.min_diag(m)
        vo, oij = red.min_off(m)
        if vd is INF and vo is INF:
            raise DegenerateInput("quadratic part vanished during reduction")
        if vd < vo:
            if di != m:
                red.apply(_swap(spec, Q.r, red.k, m, di))
            red.clear_with_unary_pivot(m)
            blocks.append(("sq", m))
            m += 1
            continue
        i, j = oij
        if i != m:
            red.apply(_swap(spec, Q.r, red.k, m, i))
        if j != m + 1:
            red.apply(_swap(spec, Q.r, red.k, m + 1, j))
        red.clear_with_binary_pivot(m)
        kind = _normalize_binary_block(red, m, rho)
        blocks.append((kind, m))
        m += 2
    final = apply_transform(Q, red.T)
    return _read_off_dyadic(final, blocks, rho, red)


def _normalize_binary_block(red: _Reducer, m: int, rho: PadicApprox) -> str:
    """Bring the split plane at (m, m+1) to u xy or u(x^2 + xy + rho y^2)."""
    spec = red.spec
    o_p = red.o(m, m + 1)
    t = o_p.ord()
    # scale x_{m+1} so the cross coefficient becomes exactly 2^t
    scale = PadicApprox.from_int(spec, 1, red.k).shift(t).div(o_p)
    red.apply(_elementary(spec, red.r, red.k,
                          {(m + 1, m + 1): red.ring_of(scale)}))
    alpha = red.d(m).shift(-t)
    gamma = red.d(m + 1).shift(-t)
    a_res = alpha.residue_mod(1) if alpha.ord_ge(0) else None
    g_res = gamma.residue_mod(1) if gamma.ord_ge(0) else None
    assert a_res is not None and g_res is not None
    tr = trace_to_base(a_res * g_res) % 2
    one = PadicApprox.from_int(spec, 1, red.k)
    if tr == 0:
        # hyperbolic: root of alpha z^2 + z + gamma
        if a_res.is_zero:
            start = -g_res
        else:
            w = _artin_schreier_root(spec, a_res * g_res)
            start = w * a_res.inv()
        z = red.hensel_root(alpha, one, gamma, start)
        red.apply(_elementary(spec, red.r, red.k,
                              {(m, m): z, (m + 1, m): RingElem.one(spec, red.k),
                               (m, m + 1): RingElem.one(spec, red.k),
                               (m + 1, m + 1): RingElem.zero(spec, red.k)}))
        # kill the residual y^2 coefficient through the unit cross term
        eps = red.d(m).shift(-t)
        u_cross = red.o(m, m + 1).shift(-t)
        a2 = red.d(m + 1).shift(-t)
        s = red.hensel_root(eps, u_cross, a2,
                            (-a2.div(u_cross)).residue_mod(1))
        red.apply(_elementary(spec, red.r, red.k, {(m, m + 1): s}))
        return "hyp"
    # anisotropic: make the first basis vector have unit length
    if a_res.is_zero:
        if not g_res.is_zero:
            red.apply(_swap(spec, red.r, red.k, m, m + 1))
        else:
            red.apply(_elementary(spec, red.r, red.k,
                                  {(m + 1, m): RingElem.one(spec, red.k)}))
    u = red.d(m).shift(-t)
    b_cross = red.o(m, m + 1).shift(-t)
    # x_{m+1} <- x_{m+1} * u / b_cross turns the block into u(x^2 + xy + nu y^2)
    red.apply(_elementary(spec, red.r, red.k,
                          {(m + 1, m + 1): red.ring_of(u.div(b_cross))}))
    nu = red.d(m + 1).shift(-t).div(u)
    shift_target = (nu + rho).residue_mod(1)
    s0 = _artin_schreier_root(spec, shift_target)
    one_m4r = one - rho.scaled_by_int(4)
    s = red.hensel_root(one_m4r, one_m4r, nu - rho, s0)
    red.apply(_elementary(spec, red.r, red.k, {(m, m + 1): s}))
    # rescale y by 1/(1 + 2s) to restore the unit cross coefficient
    s_val = PadicApprox.from_ring_elem(s)
    inv_sc = one.div(one + s_val.scaled_by_int(2))
    red.apply(_elementary(spec, red.r, red.k,
                          {(m + 1, m + 1): red.ring_of(inv_sc)}))
    return "an"


def _read_off_dyadic(final: QuadraticPolynomial, blocks, rho, red) -> ReducedDyadic:
    spec = final.spec
    squares, hyper, aniso = [], [], []
    prec_floor = red.k - 2
    for kind, m in blocks:
        if kind == "sq":
            squares.append((final.quad_at(m, m), final.lin[m]))
            continue
        b = final.quad_at(m, m + 1)
        if kind == "hyp":
            for res in (final.quad_at(m, m), final.quad_at(m + 1, m + 1)):
                _assert_small(res, prec_floor)
            hyper.append((b, final.lin[m], final.lin[m + 1]))
        else:
            _assert_small(final.quad_at(m, m) - b, prec_floor)
            _assert_small(final.quad_at(m + 1, m + 1) - b * rho, prec_floor)
            aniso.append((b, final.lin[m], final.lin[m + 1]))
    # cross terms between blocks must have been cleared
    in_block = {(m, m + 1) for kind, m in blocks if kind != "sq"}
    for (i, j) in final.quad:
        if i != j and (i, j) not in in_block:
            _assert_small(final.quad_at(i, j), prec_floor)
    return ReducedDyadic(squares=squares, hyperbolic=hyper, aniso=aniso,
                         rho=rho, const=final.const, transform=red.T)


def _assert_small(c: PadicApprox, floor: int):
    if c.is_exact_zero or c.is_zeroish or c.ord() >= floor:
        return
    raise AssertionError(f"residual coefficient {c} above the precision floor")
