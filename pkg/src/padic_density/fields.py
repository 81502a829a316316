"""Field specifications for unramified extensions of Q_p.

A field is described by the prime p, the inertial degree f and a monic
degree-f integer polynomial that is irreducible mod p.  The residue rings
o/p^k are then Z/p^k[x] modulo that polynomial, the residue field has
q = p^f elements, the uniformizer is p itself and the different is trivial.
"""

from __future__ import annotations

from dataclasses import dataclass, field


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- polynomial helpers over F_p (coefficients low-to-high) -----------------

def _poly_trim(a):
    while a and a[-1] == 0:
        a = a[:-1]
    return a


def _poly_mulmod(a, b, m, p):
    res = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                res[i + j] = (res[i + j] + ai * bj) % p
    return _poly_divmod(res, m, p)[1]


def _poly_divmod(a, m, p):
    a = list(a)
    dm = len(m) - 1
    inv_lead = pow(m[-1], -1, p)
    q = [0] * max(0, len(a) - dm)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] % p
        if c:
            c = (c * inv_lead) % p
            q[i - dm] = c
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return q, _poly_trim([x % p for x in a])


def _poly_gcd(a, b, p):
    a, b = _poly_trim([x % p for x in a]), _poly_trim([x % p for x in b])
    while b:
        a, b = b, _poly_divmod(a, b, p)[1]
    return a


def _poly_powmod(a, e, m, p):
    result = [1]
    base = _poly_divmod(a, m, p)[1]
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, m, p)
        base = _poly_mulmod(base, base, m, p)
        e >>= 1
    return result


def is_irreducible(modulus, p: int) -> bool:
    """Rabin test for a monic polynomial over F_p (coeffs low-to-high)."""
    m = [c % p for c in modulus]
    f = len(m) - 1
    if f < 1 or m[-1] != 1:
        return False
    x = _poly_divmod([0, 1], m, p)[1]

    def sub(a, b):
        n = max(len(a), len(b))
        a = a + [0] * (n - len(a))
        b = b + [0] * (n - len(b))
        return _poly_trim([(ai - bi) % p for ai, bi in zip(a, b)])

    # x^(p^f) == x mod m
    h = x
    for _ in range(f):
        h = _poly_powmod(h, p, m, p)
    if sub(h, x):
        return False
    for ell in _prime_factors(f):
        h = x
        for _ in range(f // ell):
            h = _poly_powmod(h, p, m, p)
        if len(_poly_gcd(sub(h, x), m, p)) > 1:
            return False
    return True


def _root_is_primitive(modulus, p: int) -> bool:
    f = len(modulus) - 1
    q = p ** f
    x = [0, 1]
    for ell in _prime_factors(q - 1):
        h = _poly_powmod(x, (q - 1) // ell, modulus, p)
        if h == [1]:
            return False
    return True


def default_modulus(p: int, f: int) -> tuple[int, ...]:
    """Smallest-lex monic irreducible of degree f mod p with primitive root.

    Deterministic so that coordinates are reproducible across runs.  For
    f = 1 the modulus is x, which plays no role in degree-1 arithmetic.
    """
    if f == 1:
        return (0, 1)
    bound = p ** f
    fallback = None
    for idx in range(bound):
        coeffs = []
        v = idx
        for _ in range(f):
            coeffs.append(v % p)
            v //= p
        cand = tuple(coeffs) + (1,)
        if not is_irreducible(cand, p):
            continue
        if _root_is_primitive(cand, p):
            return cand
        if fallback is None:
            fallback = cand
    return fallback


@dataclass(frozen=True)
class FieldSpec:
    """The unramified extension of Q_p with inertial degree f.

    ``modulus`` holds integer coefficients low-to-high and defines every
    residue ring o/p^k as Z/p^k[x]/(modulus).
    """

    p: int
    f: int = 1
    modulus: tuple[int, ...] = field(default=None)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.f < 1:
            raise ValueError(f"f = {self.f} must be >= 1")
        if self.modulus is None:
            object.__setattr__(self, "modulus", default_modulus(self.p, self.f))
        else:
            object.__setattr__(self, "modulus", tuple(int(c) for c in self.modulus))
        m = self.modulus
        if len(m) != self.f + 1 or m[-1] != 1:
            raise ValueError("modulus must be monic of degree f")
        if not is_irreducible(m, self.p):
            raise ValueError("modulus is reducible mod p")

    @property
    def q(self) -> int:
        return self.p ** self.f

    def to_json(self) -> dict:
        return {"p": self.p, "f": self.f, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        return cls(p=int(data["p"]), f=int(data.get("f", 1)),
                   modulus=tuple(data["modulus"]) if "modulus" in data else None)

    def __repr__(self):
        return f"FieldSpec(p={self.p}, f={self.f})"
