"""Compact histograms: every bin's count is defined by a random polynomial.

A release is a degree-``n`` polynomial ``p`` over GF(d0).  Bin ``x`` gets
the count ``M0(T(p(x - 1)))``, where ``T`` maps a field element to its
integer value plus one and ``M0`` is :class:`EmptyBinSampler`.  The
polynomial is drawn uniformly among those that reproduce the noisy counts
of the nonzero bins, so any ``n + 1`` bins are jointly independent.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _accel
from .bigmath import ceil_log2
from .counting import make_mechanism
from .errors import FormatError, InvalidParameter
from .gf2 import FieldParams
from .histogram import _check_mechanism, noisy_counts, true_counts

__all__ = [
    "EmptyBinSampler",
    "choose_field_params",
    "CompactHistogramRepr",
    "compact_histogram",
    "compact_eval",
    "compact_eval_many",
]


@dataclass(frozen=True)
class EmptyBinSampler:
    """``M0(u0) = M(0, f(u0))`` where ``f`` squeezes ``[1, d0]`` onto ``[1, d]`` monotonically.

    With ``d0 = q d + r`` the first ``r`` values of ``[1, d]`` get ``q + 1``
    preimages and the rest get ``q``."""

    mech: object
    d0: int
    q: int = field(init=False)
    r: int = field(init=False)

    def __post_init__(self):
        d = self.mech.d
        if 3 * self.d0 < 4 * d:
            raise InvalidParameter(f"d0={self.d0} must be at least (4/3) d = (4/3) * {d}")
        q, r = divmod(self.d0, d)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)

    @property
    def n(self):
        return self.mech.n

    def f(self, u0):
        if not 1 <= u0 <= self.d0:
            raise InvalidParameter(f"u0={u0} outside [1, {self.d0}]")
        q, r = self.q, self.r
        if r and u0 <= r * (q + 1):
            return -(-u0 // (q + 1))
        return -(-(u0 - r) // q)

    def evaluate(self, u0):
        return self.mech.evaluate(0, self.f(u0))

    __call__ = evaluate

    def max_preimage(self, u):
        """``max{u0 : f(u0) <= u}`` for ``u`` in ``[0, d]``."""
        q, r = self.q, self.r
        if r and u <= r:
            return (q + 1) * u
        return q * u + r

    def cdf(self, v):
        """Scaled CDF of M0 over ``d0``: number of ``u0`` with ``M0(u0) <= v``."""
        if v < 0:
            return 0
        return self.max_preimage(self.mech.cdf0(min(v, self.n)))

    def support_range(self, v):
        """The contiguous block ``[lo, hi]`` of ``u0`` values with ``M0(u0) = v``."""
        if not 0 <= v <= self.n:
            raise InvalidParameter(f"count {v} outside [0, {self.n}]")
        lo, hi = self.cdf(v - 1) + 1, self.cdf(v)
        if lo > hi:
            raise InvalidParameter(f"empty-support: count {v} has probability zero under M0")
        return lo, hi

    def sample_support(self, v, stream):
        lo, hi = self.support_range(v)
        return lo + stream.uniform(hi - lo + 1) - 1


def m0_eval(sampler, u0):
    return sampler.evaluate(u0)


def m0_support_range(sampler, v):
    return sampler.support_range(v)


def choose_field_params(m, mech, e_den):
    """Smallest tower with ``d0 >= m`` and ``d / d0 <= eps / 30``."""
    need = ceil_log2(max(m, 30 * mech.d * e_den))
    ell = 0
    while 2 * 3 ** ell < need:
        ell += 1
    params = FieldParams(ell)
    return params, EmptyBinSampler(mech, params.order)


@dataclass(frozen=True)
class CompactHistogramRepr:
    ell: int
    n: int
    m: int
    e_den: int
    g_den: int
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))
        fp = self.field
        if len(self.coeffs) != self.n + 1:
            raise InvalidParameter(f"expected {self.n + 1} coefficients, got {len(self.coeffs)}")
        for c in self.coeffs:
            fp.check(c)
        if self.m > fp.order:
            raise InvalidParameter(f"universe m={self.m} exceeds the field order {fp.order}")

    @property
    def field(self):
        return FieldParams(self.ell)

    @property
    def mechanism(self):
        return make_mechanism(self.n, self.e_den, self.g_den)

    @property
    def sampler(self):
        return EmptyBinSampler(self.mechanism, self.field.order)

    def serialize(self):
        width = -(-self.field.bits // 4)
        head = f"compact {self.ell} {self.n} {self.m} {self.e_den} {self.g_den}\n"
        return head + "".join(f"{c:0{width}x}\n" for c in self.coeffs)

    @classmethod
    def parse(cls, text):
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise FormatError("empty repr file", line=1)
        head = lines[0].split(" ")
        if len(head) != 6 or head[0] != "compact":
            raise FormatError("header must be 'compact l n m e_den g_den'", line=1)
        try:
            ell, n, m, e_den, g_den = (int(tok) for tok in head[1:])
        except ValueError:
            raise FormatError("header fields must be decimal integers", line=1) from None
        if ell < 0 or n < 1 or m < 1 or e_den < 1 or g_den < 0:
            raise FormatError("header values out of range", line=1)
        if len(lines) != n + 2:
            raise FormatError(f"expected {n + 1} coefficient lines, got {len(lines) - 1}",
                              line=len(lines))
        width = -(-2 * 3 ** ell // 4)
        coeffs = []
        for lineno, tok in enumerate(lines[1:], start=2):
            if not tok or len(tok) > width or tok.strip("0123456789abcdef"):
                raise FormatError(f"coefficient must be at most {width} lowercase hex digits",
                                  line=lineno)
            coeffs.append(int(tok, 16))
        try:
            return cls(ell, n, m, e_den, g_den, tuple(coeffs))
        except InvalidParameter as exc:
            raise FormatError(str(exc)) from None

    def size_bits(self):
        return (self.n + 1) * self.field.bits


def compact_histogram(mech, sampler, dataset, stream):
    """Release a :class:`CompactHistogramRepr` for ``dataset``.

    Nonzero bins are noised with ``mech``; each gets a uniform field value
    in its M0 preimage block, and ``n + 1 - |A|`` padding points (the
    smallest labels outside A, possibly beyond ``m``) get uniform values."""
    _check_mechanism(mech, dataset)
    if sampler.mech != mech:
        raise InvalidParameter("the empty-bin sampler must wrap the release mechanism")
    fp = FieldParams.from_order(sampler.d0)
    n, m = dataset.n, dataset.m
    if m > fp.order or n + 1 > fp.order:
        raise InvalidParameter(f"GF(2^{fp.bits}) is too small for m={m} and n={n}")
    counts = true_counts(dataset)
    points = []
    for x, c in noisy_counts(mech, counts.keys(), counts, stream):
        points.append((x - 1, sampler.sample_support(c, stream) - 1))
    pad = 1
    while len(points) < n + 1:
        if pad not in counts:
            points.append((pad - 1, stream.uniform(fp.order) - 1))
        pad += 1
    coeffs = fp.interpolate(points)
    # the header records the inner mechanism so that eval can rebuild M0
    return CompactHistogramRepr(fp.ell, n, m, mech.e_den, mech.header_gden, tuple(coeffs))


def compact_eval(rep, x, sampler=None):
    """Count of bin ``x`` under the released polynomial."""
    if not isinstance(x, int) or not 1 <= x <= rep.m:
        raise InvalidParameter(f"label {x!r} outside [1, {rep.m}]")
    sampler = sampler or rep.sampler
    y = rep.field.evaluate(rep.coeffs, x - 1)
    return sampler.evaluate(y + 1)


def compact_eval_many(rep, labels=None, sampler=None, backend=None):
    """Counts for many bins at once (all of ``[1, m]`` by default)."""
    sampler = sampler or rep.sampler
    labels = list(range(1, rep.m + 1)) if labels is None else [int(x) for x in labels]
    for x in labels:
        if not 1 <= x <= rep.m:
            raise InvalidParameter(f"label {x} outside [1, {rep.m}]")
    fp = rep.field
    if fp.bits > _accel.MAX_BITS or backend == "python":
        return [compact_eval(rep, x, sampler) for x in labels]
    coeffs = np.tile(np.array(rep.coeffs, dtype=np.uint64), (len(labels), 1))
    ys = _accel.horner(coeffs, np.array(labels, dtype=np.uint64) - np.uint64(1),
                       fp.bits, fp.half, backend=backend)
    # M0(u0) = v exactly when cdf(v-1) < u0 <= cdf(v); B fits in uint64 here
    bounds = np.array([sampler.cdf(v) for v in range(rep.n + 1)], dtype=np.uint64)
    return np.searchsorted(bounds, ys + np.uint64(1), side="left").tolist()


def m0_pmf(sampler):
    """Exact pmf of M0 as a list of Fractions over counts ``0..n``."""
    return [Fraction(sampler.cdf(v) - sampler.cdf(v - 1), sampler.d0) for v in range(sampler.n + 1)]
