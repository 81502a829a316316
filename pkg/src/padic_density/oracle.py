"""Brute-force ground truth: solution counting and discretized integrals.

Everything here is enumeration over residue rings.  Counting is organized
per independent variable block and convolved over the additive group of
o/p^k, which is still plain enumeration, just cache-friendly; no
character-sum shortcuts are used anywhere so the oracle stays structurally
independent of the closed forms it checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded
from .fields import FieldSpec
from .padics import PadicApprox, Phase
from .residue import RingElem, ring_elements
from .exact import ExpSum

DEFAULT_BUDGET = 10 ** 8


# -- vectorized Galois-ring arithmetic on encoded elements ------------------

class GRVec:
    """Elements of o/p^k encoded as integers sum c_i M^i with M = p^k.

    Small rings (f > 1, at most 4096 elements) get a one-time
    multiplication table so vectorized products become single gathers.
    """

    _cache: dict = {}

    def __new__(cls, spec: FieldSpec, k: int):
        key = (spec, k)
        hit = cls._cache.get(key)
        if hit is not None:
            return hit
        self = super().__new__(cls)
        self.spec = spec
        self.k = k
        self.M = spec.p ** k
        self.f = spec.f
        self.size = self.M ** self.f
        self.table = None
        self.add_table = None
        if self.f > 1:
            from .residue import _ring_context
            _, rows = _ring_context(spec, k)
            self.rows = [np.array(r, dtype=np.int64) for r in rows]
            if self.size <= 4096:
                self.table, self.add_table = self._build_tables()
        if len(cls._cache) > 16:
            cls._cache.clear()
        cls._cache[key] = self
        return self

    def _build_tables(self):
        codes = np.arange(self.size, dtype=np.int64)
        mul_t = np.empty((self.size, self.size), dtype=np.int16)
        add_t = np.empty((self.size, self.size), dtype=np.int16)
        for a in range(self.size):
            mul_t[a] = self._mul_generic(np.int64(a), codes)
            add_t[a] = self.add(np.int64(a), codes)
        return mul_t, add_t

    def encode(self, elem: RingElem) -> int:
        code = 0
        for i, c in enumerate(elem.coords):
            code += (c % self.M) * self.M ** i
        return code

    def digits(self, a):
        return [(a // self.M ** i) % self.M for i in range(self.f)]

    def add(self, a, b):
        if self.f == 1:
            return (a + b) % self.M
        if self.add_table is not None and (isinstance(a, np.ndarray)
                                           or isinstance(b, np.ndarray)):
            return self.add_table[a, b].astype(np.int64)
        da, db = self.digits(a), self.digits(b)
        out = 0
        for i in range(self.f):
            out = out + ((da[i] + db[i]) % self.M) * self.M ** i
        return out

    def mul(self, a, b):
        if self.f == 1:
            return (a * b) % self.M
        if self.table is not None and (isinstance(a, np.ndarray)
                                       or isinstance(b, np.ndarray)):
            return self.table[a, b].astype(np.int64)
        return self._mul_generic(a, b)

    def _mul_generic(self, a, b):
        da, db = self.digits(a), self.digits(b)
        f, M = self.f, self.M
        conv = [0] * (2 * f - 1)
        for i in range(f):
            for j in range(f):
                conv[i + j] = conv[i + j] + da[i] * db[j]
        out = [c % M for c in conv[:f]]
        for j in range(f - 1):
            top = conv[f + j] % M
            row = self.rows[j]
            for i in range(f):
                out[i] = (out[i] + top * row[i]) % M
        code = 0
        for i in range(f):
            code = code + out[i] * M ** i
        return code

    def all_codes(self):
        return np.arange(self.size, dtype=np.int64)


def _group_convolve(d1: np.ndarray, d2: np.ndarray, spec: FieldSpec, k: int):
    """Convolution over the additive group of o/p^k (exact, integer)."""
    M = spec.p ** k
    if spec.f == 1:
        lin = np.convolve(d1, d2)
        out = lin[:M].copy()
        out[: len(lin) - M] += lin[M:]
        return out
    shape = (M,) * spec.f
    a = d1.reshape(shape)
    b = d2.reshape(shape)
    out = np.zeros(shape, dtype=np.int64)
    nz = np.argwhere(a)
    for idx in nz:
        w = a[tuple(idx)]
        out += w * np.roll(b, shift=tuple(idx), axis=tuple(range(spec.f)))
    return out.reshape(-1)


@dataclass(frozen=True)
class CountResult:
    k: int
    count: int
    density: Fraction
    stabilized: bool


def _components(quad, r):
    """Connected components of the variable-coupling graph."""
    adj = {i: set() for i in range(r)}
    for (i, j) in quad:
        if i != j:
            adj[i].add(j)
            adj[j].add(i)
    seen, comps = set(), []
    for s in range(r):
        if s in seen:
            continue
        stack, comp = [s], []
        seen.add(s)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def _component_distribution(Q, comp, gr: GRVec, budget_left):
    """Counts of each value of the sub-polynomial on the given variables."""
    d = len(comp)
    n_pts = gr.size ** d
    if n_pts > budget_left:
        raise BudgetExceeded(f"{n_pts} points exceed the remaining budget")
    k = gr.k
    quad = {key: gr.encode(val.residue_mod(k)) for key, val in Q.quad.items()
            if key[0] in comp and key[1] in comp}
    lin = {i: gr.encode(Q.lin[i].residue_mod(k)) for i in comp}
    pos = {v: a for a, v in enumerate(comp)}
    dist = np.zeros(gr.size, dtype=np.int64)
    chunk = 1 << 22
    for start in range(0, n_pts, chunk):
        idx = np.arange(start, min(n_pts, start + chunk), dtype=np.int64)
        xs = [(idx // gr.size ** a) % gr.size for a in range(d)]
        val = np.zeros(len(idx), dtype=np.int64)
        for (i, j), c in quad.items():
            term = gr.mul(c, gr.mul(xs[pos[i]], xs[pos[j]]))
            val = gr.add(val, term)
        for i, c in lin.items():
            if c:
                val = gr.add(val, gr.mul(c, xs[pos[i]]))
        dist += np.bincount(val, minlength=gr.size)
    return dist, n_pts


def value_distribution(Q, k: int, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Counts of Q(x) - const over all x in (o/p^k)^r, indexed by value code."""
    gr = GRVec(Q.spec, k)
    comps = _components(Q.quad, Q.r)
    spent = 0
    dist = None
    for comp in comps:
        cd, cost = _component_distribution(Q, comp, gr, budget - spent)
        spent += cost
        if dist is None:
            dist = cd
        else:
            # convolutions run as flat integer multiply-adds, far cheaper
            # than a ring operation; weight them accordingly
            weight = 64 if Q.spec.f == 1 else 16
            spent += gr.size ** 2 // weight
            if spent > budget:
                raise BudgetExceeded("convolution exceeds the budget")
            dist = _group_convolve(dist, cd, Q.spec, k)
    if dist is None:
        dist = np.zeros(gr.size, dtype=np.int64)
        dist[0] = 1
    return dist


def _fold(dist: np.ndarray, spec: FieldSpec, k_from: int, k_to: int):
    """Push counts from o/p^k_from down to o/p^k_to."""
    if k_from == k_to:
        return dist
    hi, lo = spec.p ** k_from, spec.p ** k_to
    shape = []
    for _ in range(spec.f):
        shape.extend([hi // lo, lo])
    arr = dist.reshape(shape)
    arr = arr.sum(axis=tuple(2 * i for i in range(spec.f)))
    return arr.reshape(-1)


def count_density(Q, n: PadicApprox, k: int,
                  budget: int = DEFAULT_BUDGET) -> CountResult:
    """Exact count of Q(x) = n over (o/p^k)^r, scaled by q^{-k(r-1)}."""
    gr = GRVec(Q.spec, k)
    dist = value_distribution(Q, k, budget)
    target = (n - Q.const).residue_mod(k)
    count = int(dist[gr.encode(target)])
    dens = Fraction(count, Q.spec.q ** (k * (Q.r - 1)))
    return CountResult(k=k, count=count, density=dens, stabilized=False)


def density_ladder(Q, n: PadicApprox, k_max: int,
                   budget: int = DEFAULT_BUDGET):
    """(k, count, density) at every level 1..k_max from one enumeration.

    One joint distribution at k_max serves every level: solutions mod p^k
    are fibers of the k_max count, with the domain factor divided out.
    """
    spec = Q.spec
    dist = value_distribution(Q, k_max, budget)
    shifted = n - Q.const
    densities = []
    for k in range(1, k_max + 1):
        fk = _fold(dist, spec, k_max, k)
        grk = GRVec(spec, k)
        raw = int(fk[grk.encode(shifted.residue_mod(k))])
        dom = spec.q ** ((k_max - k) * Q.r)
        assert raw % dom == 0
        count = raw // dom
        densities.append((k, count, Fraction(count, spec.q ** (k * (Q.r - 1)))))
    return densities


def stabilized_density(Q, n: PadicApprox, k_max: int,
                       budget: int = DEFAULT_BUDGET) -> CountResult:
    """Smallest k whose scaled density persists through k_max (at least
    three equal values).  An early plateau that later moves again does not
    count as stabilized.
    """
    densities = density_ladder(Q, n, k_max, budget)
    final = densities[-1][2]
    start = k_max
    for k, _, dens in reversed(densities):
        if dens != final:
            break
        start = k
    if k_max - start >= 2:
        k, count, dens = densities[start - 1]
        return CountResult(k=k, count=count, density=dens, stabilized=True)
    k, count, dens = densities[-1]
    return CountResult(k=k, count=count, density=dens, stabilized=False)


# -- discretized integrals for the lemma suite -------------------------------

def quadratic_phase_oracle(spec: FieldSpec, coeffs, k: int, d: int,
                           budget: int = DEFAULT_BUDGET) -> ExpSum:
    """Riemann sum of e(sum coeffs[mono] x^mono) over o^d, vectorized.

    coeffs maps monomial exponent tuples of length d (total degree <= 2)
    to PadicApprox values.  Equivalent to enumerating (o/p^k)^d pointwise;
    points only matter modulo the polar depth L, so deeper digits enter as
    a multiplicity factor.
    """
    from .residue import _trace_weights

    L = 0
    for c in coeffs.values():
        if not c.is_exact_zero:
            L = max(L, -min(0, c.ord()))
    if L == 0:
        return ExpSum.build(spec.p, [(Phase.zero(spec.p), spec.q ** (k * d))],
                            Fraction(1, spec.q ** (k * d)))
    depth = min(k, L)          # enumerated digits per coordinate
    gr = GRVec(spec, L)        # arithmetic happens mod p^L
    n_pts = spec.q ** (depth * d)
    if n_pts > budget:
        raise BudgetExceeded(f"{n_pts} points")
    mult = spec.q ** ((k - depth) * d)
    p_L, p_e = spec.p ** L, spec.p ** depth
    scaled = {mono: gr.encode(c.shift(L).residue_mod(L))
              for mono, c in coeffs.items() if not c.is_exact_zero}
    per_var = p_e ** spec.f
    idx = np.arange(n_pts, dtype=np.int64)
    xs = []
    for a in range(d):
        vidx = (idx // per_var ** a) % per_var
        code = np.zeros(n_pts, dtype=np.int64)
        for i in range(spec.f):
            code += ((vidx // p_e ** i) % p_e) * gr.M ** i
        xs.append(code)
    w = np.zeros(n_pts, dtype=np.int64)
    for mono, code in scaled.items():
        term = np.full(n_pts, code, dtype=np.int64)
        for var, e in enumerate(mono):
            for _ in range(e):
                term = gr.mul(term, xs[var])
        w = gr.add(w, term)
    weights = _trace_weights(spec, L)
    tr = np.zeros(n_pts, dtype=np.int64)
    for i in range(spec.f):
        tr = (tr + weights[i] * ((w // gr.M ** i) % gr.M)) % p_L
    counts = np.bincount((-tr) % p_L, minlength=p_L)
    phases = [(Phase(spec.p, int(num), L), int(c) * mult)
              for num, c in enumerate(counts) if c]
    return ExpSum.build(spec.p, phases, Fraction(1, spec.q ** (k * d)))


def sum_integral_oracle(spec: FieldSpec, phase_fn, k: int, d: int = 1,
                        domain: str = "full", shell=None,
                        budget: int = DEFAULT_BUDGET) -> ExpSum:
    """Riemann sum of e(phase_fn(x)) over a domain of (o/p^k)^d.

    domain: "full" for o^d, "units" for the unit group (d = 1), "shell"
    for shell + p (d = 1, needs the shell representative).  phase_fn maps a
    tuple of PadicApprox to a Phase.  The scale is the measure of one cell.
    """
    q = spec.q
    if domain == "shell":
        pts = q ** (k - 1)
        if pts > budget:
            raise BudgetExceeded(f"{pts} points")
        base = PadicApprox.from_unit(0, shell)
        phases = []
        for z in ring_elements(spec, k - 1):
            x = base + PadicApprox.from_ring_elem(z.lift(k)).shift(1)
            phases.append((phase_fn((x,)), 1))
        return ExpSum.build(spec.p, phases, Fraction(1, q ** k))
    pts = q ** (k * d)
    if pts > budget:
        raise BudgetExceeded(f"{pts} points")
    phases = []
    elems = list(ring_elements(spec, k))
    if d == 1:
        for e in elems:
            if domain == "units" and not e.is_unit:
                continue
            phases.append((phase_fn((PadicApprox.from_ring_elem(e),)), 1))
    elif d == 2:
        vals = [PadicApprox.from_ring_elem(e) for e in elems]
        for x in vals:
            for y in vals:
                phases.append((phase_fn((x, y)), 1))
    else:
        raise ValueError("d > 2 not needed")
    return ExpSum.build(spec.p, phases, Fraction(1, q ** (k * d)))
