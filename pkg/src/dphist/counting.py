"""Counting-query mechanisms with integer scaled CDFs.

A counting mechanism is a deterministic map ``(c, u) -> noisy count`` on
``[0, n] x [1, d]``; feeding it ``u ~ Uniform[1, d]`` gives the private
release.  Both mechanisms here are inverse-CDF samplers over an integer CDF
``F(c, z)`` with ``F(c, n) = d``, found by binary search.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .bigmath import ceil_log2, ceil_mul_ln
from .errors import InvalidParameter

__all__ = [
    "GeoSample",
    "FastSample",
    "geo_sample",
    "geo_cdf0",
    "fast_sample",
    "fast_cdf0",
    "mixture_release",
    "accuracy_radius",
]


def _check_unit_den(name, den):
    if not isinstance(den, int) or den < 1:
        raise InvalidParameter(f"{name} must be 1/E with integer E >= 1, got denominator {den!r}")


def _geo_k(e_den):
    # k = ceil(log2(2 / eps)) with eps = 1/e_den
    return ceil_log2(Fraction(2 * e_den))


class _InverseCDF:
    """Shared evaluate/cdf0 plumbing; subclasses provide ``cdf(c, z)``."""

    monotone = True

    def cdf0(self, z):
        self._check_z(z)
        return self.cdf(0, z)

    def evaluate(self, c, u):
        """Smallest z in [0, n] with F(c, z) >= u."""
        if not 0 <= c <= self.n:
            raise InvalidParameter(f"count c={c} outside [0, {self.n}]")
        if not 1 <= u <= self.d:
            raise InvalidParameter(f"randomness u={u} outside [1, d]")
        lo, hi = 0, self.n
        while lo < hi:
            mid = (lo + hi) // 2
            if self.cdf(c, mid) >= u:
                hi = mid
            else:
                lo = mid + 1
        return lo

    def __call__(self, c, u):
        return self.evaluate(c, u)

    def sample(self, c, stream):
        return self.evaluate(c, stream.uniform(self.d))

    def _check_z(self, z):
        if not 0 <= z <= self.n:
            raise InvalidParameter(f"z={z} outside [0, {self.n}]")


@dataclass(frozen=True)
class GeoSample(_InverseCDF):
    """Two-sided geometric noise clamped to [0, n], with e^(eps~/2) = 1 + 2^-k.

    ``d = (2^(k+1) + 1)(2^k + 1)^(n-1)`` so every CDF value is an integer
    over ``d``."""

    n: int
    e_den: int
    k: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidParameter(f"n must be a positive integer, got {self.n!r}")
        _check_unit_den("epsilon", self.e_den)
        k = _geo_k(self.e_den)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "d", ((1 << (k + 1)) + 1) * ((1 << k) + 1) ** (self.n - 1))

    @property
    def ratio(self):
        """Exact per-unit likelihood ratio 1 + 2^-k (= e^(eps~/2))."""
        return Fraction((1 << self.k) + 1, 1 << self.k)

    @property
    def header_gden(self):
        return 0

    def cdf(self, c, z):
        n, k = self.n, self.k
        if z < 0:
            return 0
        if z >= n:
            return self.d
        if z < c:
            return (1 << (k * (c - z))) * ((1 << k) + 1) ** (n - (c - z))
        return self.d - (1 << (k * (z - c + 1))) * ((1 << k) + 1) ** (n - 1 - (z - c))


@dataclass(frozen=True)
class FastSample(_InverseCDF):
    """Geometric noise truncated at radius t (tail dumped on c), clamped,
    then mixed with Uniform[0, n] at weight gamma = 1/g_den."""

    n: int
    e_den: int
    g_den: int
    k: int = field(init=False)
    t: int = field(init=False)
    d_prime: int = field(init=False)
    d: int = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or self.n < 1:
            raise InvalidParameter(f"n must be a positive integer, got {self.n!r}")
        _check_unit_den("epsilon", self.e_den)
        _check_unit_den("gamma", self.g_den)
        k = _geo_k(self.e_den)
        if self.g_den == 1:
            # the geometric part carries zero weight; any t works
            t = 0
        else:
            # log argument 8(n+1)(1-gamma)/(eps*gamma) is an integer here
            inner = ceil_log2(8 * (self.n + 1) * (self.g_den - 1) * self.e_den)
            t = -((-9 * self.e_den * inner) // 2) - 1
        d_prime = ((1 << (k + 1)) + 1) * ((1 << k) + 1) ** t
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "d_prime", d_prime)
        object.__setattr__(self, "d", (self.n + 1) * d_prime * self.g_den)

    @property
    def ratio(self):
        return Fraction((1 << self.k) + 1, 1 << self.k)

    @property
    def header_gden(self):
        return self.g_den

    def truncated_cdf(self, c, z):
        """F'(c, z): scaled CDF (over d') of the truncated, clamped geometric."""
        k, t, n = self.k, self.t, self.n
        if z < max(0, c - t):
            return 0
        if z < c:
            return (1 << (k * (c - z))) * ((1 << k) + 1) ** (t + 1 - (c - z)) - (1 << (k * (t + 1)))
        if z < min(c + t, n):
            return (self.d_prime - (1 << (k * (z - c + 1))) * ((1 << k) + 1) ** (t - (z - c))
                    + (1 << (k * (t + 1))))
        return self.d_prime

    def cdf(self, c, z):
        if z < 0:
            return 0
        if z >= self.n:
            return self.d
        return (z + 1) * self.d_prime + (self.g_den - 1) * (self.n + 1) * self.truncated_cdf(c, z)


def geo_sample(params, c, u):
    return params.evaluate(c, u)


def geo_cdf0(params, z):
    return params.cdf0(z)


def fast_sample(params, c, u):
    return params.evaluate(c, u)


def fast_cdf0(params, z):
    return params.cdf0(z)


def make_mechanism(n, e_den, g_den=0):
    """GeoSample when ``g_den == 0``, otherwise FastSample with gamma = 1/g_den."""
    if g_den == 0:
        return GeoSample(n, e_den)
    return FastSample(n, e_den, g_den)


def mixture_release(inner, fallback, g_den, stream):
    """With probability 1 - 1/g_den return ``inner(stream)``, else ``fallback(stream)``.

    The gamma event is ``uniform(g_den) == 1``."""
    _check_unit_den("gamma", g_den)
    if stream.uniform(g_den) == 1:
        return fallback(stream)
    return inner(stream)


def accuracy_radius(e_den, arg):
    """ceil((9 / (2 eps)) * ln(arg)), using eps~ > (4/9) eps."""
    return ceil_mul_ln(Fraction(9 * e_den, 2), Fraction(arg))
