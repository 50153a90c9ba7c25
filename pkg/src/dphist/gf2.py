"""Arithmetic in GF(2^(2 * 3^l)) modulo the trinomial x^(2L) + x^L + 1, L = 3^l.

Elements are Python ints whose bit ``i`` is the coefficient of ``x^i``.
"""

from dataclasses import dataclass, field

from .errors import InvalidParameter

__all__ = ["FieldParams", "clmul"]


def clmul(a, b):
    """Carry-less product of two bit polynomials."""
    if a.bit_length() < b.bit_length():
        a, b = b, a
    r = 0
    while b:
        low = b & -b
        r ^= a << (low.bit_length() - 1)
        b ^= low
    return r


def _poly_divmod(a, b):
    db = b.bit_length()
    q = 0
    while a.bit_length() >= db:
        shift = a.bit_length() - db
        q |= 1 << shift
        a ^= b << shift
    return q, a


@dataclass(frozen=True)
class FieldParams:
    ell: int
    bits: int = field(init=False)
    half: int = field(init=False)
    modulus: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.ell, int) or self.ell < 0:
            raise InvalidParameter(f"tower exponent must be a nonnegative integer, got {self.ell!r}")
        half = 3 ** self.ell
        object.__setattr__(self, "half", half)
        object.__setattr__(self, "bits", 2 * half)
        object.__setattr__(self, "modulus", (1 << (2 * half)) | (1 << half) | 1)

    @classmethod
    def from_order(cls, d0):
        """Params whose field has exactly ``d0`` elements."""
        ell, bits = 0, 2
        while (1 << bits) < d0:
            ell += 1
            bits = 2 * 3 ** ell
        if (1 << bits) != d0:
            raise InvalidParameter(f"{d0} is not of the form 2^(2*3^l)")
        return cls(ell)

    @property
    def order(self):
        return 1 << self.bits

    def check(self, a):
        if not isinstance(a, int) or a < 0 or a >> self.bits:
            raise InvalidParameter(f"{a!r} is not an element of GF(2^{self.bits})")
        return a

    def reduce(self, p):
        bits, half = self.bits, self.half
        mask = (1 << bits) - 1
        # x^(2L) = x^L + 1, so the high part folds back in two shifted copies
        while p >> bits:
            h = p >> bits
            p = (p & mask) ^ (h << half) ^ h
        return p

    def add(self, a, b):
        return self.check(a) ^ self.check(b)

    def mul(self, a, b):
        return self.reduce(clmul(self.check(a), self.check(b)))

    def inv(self, a):
        if self.check(a) == 0:
            raise InvalidParameter("zero has no multiplicative inverse")
        r0, r1 = self.modulus, a
        s0, s1 = 0, 1
        while r1:
            q, r = _poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, s0 ^ clmul(q, s1)
        # r0 is the gcd, which is 1 because the modulus is irreducible
        return self.reduce(s0)

    def evaluate(self, coeffs, x):
        """Horner evaluation of ``sum coeffs[i] x^i``."""
        self.check(x)
        acc = 0
        for c in reversed(coeffs):
            acc = self.reduce(clmul(acc, x)) ^ c
        return acc

    def interpolate(self, points):
        """Coefficients (degree 0 first) of the unique polynomial of degree < len(points)
        through the given ``(x, y)`` pairs."""
        xs = [self.check(x) for x, _ in points]
        ys = [self.check(y) for _, y in points]
        if len(set(xs)) != len(xs):
            raise InvalidParameter("interpolation points must have distinct x")
        k = len(xs)
        # master polynomial P(z) = prod (z - x_j), then synthetic division per point
        master = [1]
        for xj in xs:
            nxt = [0] * (len(master) + 1)
            for i, c in enumerate(master):
                nxt[i + 1] ^= c
                nxt[i] ^= self.reduce(clmul(c, xj))
            master = nxt
        coeffs = [0] * k
        for xi, yi in zip(xs, ys):
            # quotient P(z) / (z - x_i), highest degree first
            quot = [0] * k
            carry = 0
            for deg in range(k, 0, -1):
                carry = master[deg] ^ self.reduce(clmul(carry, xi))
                quot[deg - 1] = carry
            denom = self.evaluate(quot, xi)
            scale = self.mul(yi, self.inv(denom))
            for i in range(k):
                coeffs[i] ^= self.reduce(clmul(scale, quot[i]))
        return coeffs
