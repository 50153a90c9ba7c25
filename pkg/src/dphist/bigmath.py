"""Exact integer/rational helpers and the uniform randomness oracle.

Integers are plain Python ``int`` (arbitrary precision) and rationals are
:class:`fractions.Fraction`, which is always kept in lowest terms.  Nothing
in this module touches floating point.
"""

import hashlib
import os
from fractions import Fraction

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms

from .errors import InvalidParameter

__all__ = [
    "InvalidParameter",
    "RandomStream",
    "unit_fraction",
    "ceil_log2",
    "ln_bounds",
    "ceil_mul_ln",
]

_BLOCK = 4096
_ZERO_BLOCK = bytes(_BLOCK)


def unit_fraction(value):
    """Parse ``"1/E"`` (or an int ``E``, or a Fraction) into the denominator E.

    Only unit fractions 1/E with E >= 1 are accepted."""
    if isinstance(value, int):
        den = value
    else:
        frac = Fraction(value) if not isinstance(value, Fraction) else value
        if frac.numerator != 1:
            raise InvalidParameter(f"{value!s} is not of the form 1/E")
        den = frac.denominator
    if den < 1:
        raise InvalidParameter(f"{value!s} is not of the form 1/E with E >= 1")
    return den


class RandomStream:
    """Deterministic cryptographic bit source (ChaCha20 keystream).

    ``seed`` is 32 bytes; ``None`` draws it from OS entropy.  Labeled
    substreams are derived by hashing the parent key with the label, so they
    never overlap with the parent or with each other.

    A stream is single-consumer.  ``fixed_retries`` switches :meth:`uniform`
    into a constant-consumption mode: exactly that many candidates are drawn
    per call, and only if all of them are rejected does sampling fall back to
    further redraws.
    """

    def __init__(self, seed=None, *, label=b"", fixed_retries=None):
        if seed is None:
            seed = os.urandom(32)
        if len(seed) != 32:
            raise InvalidParameter("seed must be exactly 32 bytes")
        if isinstance(label, str):
            label = label.encode()
        self._seed = bytes(seed)
        self._key = hashlib.sha256(b"dphist-stream\x00" + self._seed + b"\x00" + label).digest()
        cipher = Cipher(algorithms.ChaCha20(self._key, bytes(16)), mode=None)
        self._enc = cipher.encryptor()
        self._buf = b""
        self._pos = 0
        self.fixed_retries = fixed_retries
        self.bits_consumed = 0

    @classmethod
    def from_hex(cls, text, **kwargs):
        text = text.strip().lower()
        if len(text) != 64:
            raise InvalidParameter("seed must be 64 hex characters")
        try:
            seed = bytes.fromhex(text)
        except ValueError as exc:
            raise InvalidParameter(f"seed is not valid hex: {exc}") from None
        return cls(seed, **kwargs)

    def substream(self, label):
        """Independent stream for ``label``; does not advance this stream."""
        if isinstance(label, str):
            label = label.encode()
        return RandomStream(self._key, label=label, fixed_retries=self.fixed_retries)

    def _bytes(self, k):
        out = bytearray()
        while k > 0:
            if self._pos >= len(self._buf):
                self._buf = self._enc.update(_ZERO_BLOCK)
                self._pos = 0
            take = min(k, len(self._buf) - self._pos)
            out += self._buf[self._pos:self._pos + take]
            self._pos += take
            k -= take
        return bytes(out)

    def bits(self, k):
        """Return a uniformly random integer in [0, 2^k)."""
        if k <= 0:
            return 0
        nbytes = (k + 7) // 8
        value = int.from_bytes(self._bytes(nbytes), "little")
        self.bits_consumed += k
        return value & ((1 << k) - 1)

    def uniform(self, d):
        """Uniform integer in [1, d] by rejection over the next power of two.

        This is the one expected-time loop in the library: each round accepts
        with probability > 1/2."""
        if not isinstance(d, int) or d < 1:
            raise InvalidParameter(f"uniform() needs an integer d >= 1, got {d!r}")
        if d == 1:
            return 1
        k = (d - 1).bit_length()
        if self.fixed_retries:
            accepted = None
            for _ in range(self.fixed_retries):
                r = self.bits(k)
                if accepted is None and r < d:
                    accepted = r
            if accepted is not None:
                return accepted + 1
        while True:
            r = self.bits(k)
            if r < d:
                return r + 1


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise InvalidParameter(f"expected an int or Fraction, got {type(x).__name__}")


def ceil_log2(x):
    """Least integer k with 2^k >= x, for rational x > 0 (exact)."""
    x = _as_fraction(x)
    if x <= 0:
        raise InvalidParameter("ceil_log2 needs x > 0")
    num, den = x.numerator, x.denominator
    k = num.bit_length() - den.bit_length()

    def ok(j):
        return (den << j) >= num if j >= 0 else den >= (num << -j)

    while not ok(k):
        k += 1
    while ok(k - 1):
        k -= 1
    return k


def _atanh_log_bounds(y, prec):
    """Bounds on ln(y) for rational y >= 1 via ln y = 2*atanh((y-1)/(y+1)).

    Returns (lo, hi) as integers scaled by 2^prec."""
    z = (y - 1) / (y + 1)
    if z == 0:
        return 0, 0
    scale = 1 << prec
    z2 = z * z
    power = z
    lo = hi = 0
    i = 0
    while True:
        term = 2 * power / (2 * i + 1) * scale
        lo += term.numerator // term.denominator
        hi += -((-term.numerator) // term.denominator)
        i += 1
        power *= z2
        # tail after i terms: sum_{j>=i} 2 z^{2j+1}/(2j+1) <= 2 z^{2i+1} / ((2i+1)(1-z^2))
        tail = 2 * power / ((2 * i + 1) * (1 - z2)) * scale
        if tail < 1:
            hi += -((-tail.numerator) // tail.denominator)
            return lo, hi


def ln_bounds(x, prec=64):
    """Rational (lo, hi) with lo <= ln(x) <= hi, width about 2^-prec * log2(x)."""
    x = _as_fraction(x)
    if x <= 0:
        raise InvalidParameter("ln_bounds needs x > 0")
    if x < 1:
        lo, hi = ln_bounds(1 / x, prec)
        return -hi, -lo
    j = ceil_log2(x)
    if Fraction(2) ** j != x:
        j -= 1
    y = x / Fraction(2) ** j
    ylo, yhi = _atanh_log_bounds(y, prec)
    l2lo, l2hi = _atanh_log_bounds(Fraction(2), prec)
    scale = 1 << prec
    return Fraction(ylo + j * l2lo, scale), Fraction(yhi + j * l2hi, scale)


def ceil_mul_ln(coef, x):
    """Exact ceil(coef * ln(x)) for rationals coef >= 0 and x > 0.

    The interval for ln(x) is tightened until both ends give the same
    ceiling; terminates because ln of a rational other than 1 is irrational."""
    coef = _as_fraction(coef)
    x = _as_fraction(x)
    if coef < 0:
        raise InvalidParameter("ceil_mul_ln needs coef >= 0")
    if coef == 0 or x == 1:
        return 0
    prec = 64
    while True:
        lo, hi = ln_bounds(x, prec)
        a, b = coef * lo, coef * hi
        ca = -((-a.numerator) // a.denominator)
        cb = -((-b.numerator) // b.denominator)
        if ca == cb:
            return ca
        prec *= 2
