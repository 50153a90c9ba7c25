"""Pure-DP sparse histograms in strict polynomial time.

The empty bins are never noised one by one.  Instead the top ``n + 1`` order
statistics of ``m - |A|`` i.i.d. draws of ``M(0, U)`` are sampled directly
(exactly by :func:`ord_sample`, or approximately by
:func:`approx_ord_sample`) and attached to uniformly random distinct labels.
"""

from functools import lru_cache

from sortedcontainers import SortedList

from .counting import mixture_release
from .errors import InvalidParameter
from .histogram import PartialHistogram, basic_histogram, noisy_counts, true_counts, _check_mechanism

__all__ = [
    "ord_sample",
    "approx_conv_exp",
    "approx_bin_sample",
    "approx_ord_sample",
    "distinct_sample",
    "keep_heavy",
    "kh_prime",
    "sparse_histogram",
    "sparse_scale",
    "pure_sparse_delta_den",
    "random_histogram",
    "pure_sparse_histogram",
]


def _check_cdf(cdf):
    cdf = [int(v) for v in cdf]
    if len(cdf) < 2:
        raise InvalidParameter("a scaled CDF needs values for z = 0..n with n >= 1")
    if cdf[0] < 0 or any(a > b for a, b in zip(cdf, cdf[1:])):
        raise InvalidParameter("scaled CDF must be non-negative and non-decreasing")
    if cdf[-1] < 1:
        raise InvalidParameter("scaled CDF must total d >= 1")
    return cdf


def _order_stats(cdf, m, draw_level):
    """Shared skeleton: ``draw_level(v, L)`` gives how many of the top stats equal v."""
    n = len(cdf) - 1
    if m < n + 1:
        raise InvalidParameter(f"population m={m} must be at least n+1={n + 1}")
    ells = [0] * (n + 1)
    taken = 0
    for v in range(n, 0, -1):
        if taken < n + 1 and cdf[v] > 0:
            ells[v] = draw_level(v, taken)
            taken += ells[v]
    ells[0] = n + 1 - taken
    out = []
    for v in range(n, -1, -1):
        out.extend([v] * ells[v])
    return tuple(out)


def ord_sample(cdf, m, stream):
    """Exact top ``n + 1`` order statistics of ``m`` i.i.d. draws with scaled CDF ``cdf``.

    Each binomial is drawn as ``m - L`` Bernoulli trials, so this is only for
    small ``m``."""
    cdf = _check_cdf(cdf)
    n = len(cdf) - 1

    def level(v, taken):
        cap = n + 1 - taken
        hi, lo = cdf[v], cdf[v - 1]
        if lo == hi:
            return 0
        if lo == 0:
            return min(m - taken, cap)
        hits = 0
        for _ in range(m - taken):
            # success with probability 1 - F(v-1)/F(v)
            if stream.uniform(hi) > lo:
                hits += 1
                if hits == cap:
                    break
        return hits

    return _order_stats(cdf, m, level)


def _conv_trunc(a, b, t):
    """First ``t`` coefficients of the convolution of two nonnegative int vectors.

    Uses Kronecker substitution: pack each vector into one big integer with
    slots wide enough that no coefficient can carry into the next."""
    if not a or not b:
        return [0] * t
    bound = sum(a) * sum(b)
    width = bound.bit_length() + 1
    pa = pb = 0
    for x in reversed(a[:t]):
        pa = (pa << width) | x
    for x in reversed(b[:t]):
        pb = (pb << width) | x
    prod = pa * pb
    mask = (1 << width) - 1
    out = []
    for _ in range(t):
        out.append(prod & mask)
        prod >>= width
    return out


def _check_conv_input(s, t, a):
    if s < 1 or t < 1:
        raise InvalidParameter("need s >= 1 and t >= 1")
    if len(a) != t:
        raise InvalidParameter(f"vector length {len(a)} differs from t={t}")
    if any(x < 0 for x in a) or sum(a) > s:
        raise InvalidParameter("vector entries must be nonnegative with L1 norm at most s")


def approx_conv_exp(s, t, a, i):
    """Approximate ``s^i * (a/s)^{*i}`` truncated to length ``t`` by repeated squaring.

    Every level floors after dividing by ``s`` (by ``s^2`` on odd levels),
    so the result has L1 norm at most ``s`` and L1 error at most
    ``t (i - 1)`` against the exact power, after scaling by ``1/s``."""
    a = [int(x) for x in a]
    _check_conv_input(s, t, a)
    if i < 1:
        raise InvalidParameter("fold count i must be at least 1")
    return _ace(s, t, tuple(a), i)


def _ace(s, t, a, i):
    if i == 1:
        return list(a)
    b = _ace(s, t, a, i // 2)
    bb = _conv_trunc(b, b, t)
    if i % 2 == 0:
        return [x // s for x in bb]
    s2 = s * s
    return [x // s2 for x in _conv_trunc(list(a), bb, t)]


class _ApproxBin:
    """ApproxBinSample with the uniform draw ``u`` made explicit.

    Convexp results are cached per prefix length so that exact enumeration
    over every ``u`` in ``[1, s]`` costs the same as one run."""

    def __init__(self, s, t, m, p, q):
        if not (isinstance(s, int) and isinstance(m, int)) or m < 1 or s < m:
            raise InvalidParameter(f"need s >= m >= 1, got s={s}, m={m}")
        if t < 0 or q < 1 or not 0 <= p <= q:
            raise InvalidParameter(f"need t >= 0 and 0 <= p <= q with q >= 1, got t={t}, p={p}, q={q}")
        self.s, self.t, self.m = s, t, m
        self.p_scaled = s * p // q
        self._prefix = lru_cache(maxsize=None)(self._prefix_sums)

    def _prefix_sums(self, width):
        s, p1 = self.s, self.p_scaled
        a = [s - p1, p1][:width] + [0] * max(0, width - 2)
        out, acc = [], 0
        for x in _ace(s, width, tuple(a), self.m):
            acc += x
            out.append(acc)
        return out

    def __call__(self, u):
        t = self.t
        if t == 0:
            return 0
        width = 1
        while width < 2 * t:
            sums = self._prefix(width)
            for ell in range(width // 2, width):
                if sums[ell] >= u:
                    return min(ell, t)
            width *= 2
        return t


# the prefix sums are deterministic in (s, t, m, p, q), so runs can share them
_approx_bin = lru_cache(maxsize=1024)(_ApproxBin)


def approx_bin_sample(s, t, m, p, q, stream):
    """Sample close to ``min(Bin(m, p/q), t)``, within ``(m(t+1) - t)/s`` in TV."""
    sampler = _approx_bin(s, t, m, p, q)
    if t == 0:
        return 0
    return sampler(stream.uniform(s))


def approx_ord_sample(cdf, m, s, stream):
    """:func:`ord_sample` with each binomial replaced by :func:`approx_bin_sample`.

    TV distance to the exact sampler is at most ``m (n^2 + 2n) / s``."""
    cdf = _check_cdf(cdf)
    n = len(cdf) - 1
    if s < m:
        raise InvalidParameter(f"scale s={s} must be at least m={m}")

    def level(v, taken):
        return approx_bin_sample(s, n + 1 - taken, m - taken, cdf[v] - cdf[v - 1], cdf[v], stream)

    return _order_stats(cdf, m, level)


def distinct_sample(m, excluded, r, stream):
    """``r`` distinct labels drawn uniformly, in order, from ``[1, m]`` minus ``excluded``."""
    taken = SortedList(set(excluded))
    if taken and not (1 <= taken[0] and taken[-1] <= m):
        raise InvalidParameter(f"excluded labels must lie in [1, {m}]")
    if not 0 <= r <= m - len(taken):
        raise InvalidParameter(f"cannot draw {r} distinct labels from {m - len(taken)} free ones")
    out = []
    for _ in range(r):
        z = stream.uniform(m - len(taken))
        # the z-th free label is the least x with x - |{y in T : y <= x}| >= z
        lo, hi = 1, m
        while lo < hi:
            mid = (lo + hi) // 2
            if mid - taken.bisect_right(mid) >= z:
                hi = mid
            else:
                lo = mid + 1
        taken.add(lo)
        out.append(lo)
    return out


def _release_top(candidates, n, m):
    """Keep candidates whose count beats the (n+1)-th largest; ties go out."""
    ranked = sorted(enumerate(candidates), key=lambda item: (-item[1][1], item[0]))
    cutoff = ranked[n][1][1]
    kept = sorted(xc for _, xc in ranked[:n] if xc[1] > cutoff)
    return PartialHistogram(tuple(kept), m, n)


def keep_heavy(mech, dataset, stream):
    """Reference release: noise every bin, keep those above the (n+1)-th largest."""
    _check_mechanism(mech, dataset)
    m, n = dataset.m, dataset.n
    if m <= n:
        return basic_histogram(mech, range(1, m + 1), dataset, stream)
    noisy = noisy_counts(mech, range(1, m + 1), true_counts(dataset), stream)
    # a random labelling would break ties uniformly; ties are dropped anyway
    return _release_top(noisy, n, m)


def _kh_skeleton(mech, dataset, stream, order_stats):
    _check_mechanism(mech, dataset)
    m, n = dataset.m, dataset.n
    if m <= 2 * n:
        return basic_histogram(mech, range(1, m + 1), dataset, stream)
    counts = true_counts(dataset)
    nonzero = noisy_counts(mech, counts.keys(), counts, stream)
    labels = distinct_sample(m, counts.keys(), n + 1, stream)
    cdf = [mech.cdf0(z) for z in range(n + 1)]
    stats = order_stats(cdf, m - len(counts), stream)
    return _release_top(nonzero + list(zip(labels, stats)), n, m)


def kh_prime(mech, dataset, stream):
    """KeepHeavy in distribution, sampling the empty bins' top order statistics exactly."""
    return _kh_skeleton(mech, dataset, stream, ord_sample)


def sparse_scale(m, n, delta_den):
    """Scale ``s = (n^2 + 2n) |X| / delta`` for the approximate order statistics."""
    return (n * n + 2 * n) * m * delta_den


def sparse_histogram(mech, delta_den, dataset, stream):
    """KH' with approximate order statistics; within ``1/delta_den`` of KH' in TV."""
    if not isinstance(delta_den, int) or delta_den < 1:
        raise InvalidParameter("delta must be 1/D with integer D >= 1")
    if not getattr(mech, "monotone", False):
        raise InvalidParameter("sparse_histogram needs a monotone mechanism")
    s = sparse_scale(dataset.m, dataset.n, delta_den)
    return _kh_skeleton(mech, dataset, stream,
                        lambda cdf, pop, st: approx_ord_sample(cdf, pop, s, st))


def pure_sparse_delta_den(m, n, e_den, b1_den):
    """Denominator of ``delta = (eps/3) * beta1 * (1/(3m))^n``."""
    return 3 * e_den * b1_den * (3 * m) ** n


def random_histogram(m, n, stream):
    """Fallback release: ``n`` uniform labels, deduplicated, each given a uniform count in [0, n]."""
    labels = sorted({stream.uniform(m) for _ in range(n)})
    entries = []
    for x in labels:
        c = stream.uniform(n + 1) - 1
        if c > 0:
            entries.append((x, c))
    return PartialHistogram(tuple(entries), m, n)


def pure_sparse_histogram(mech, e_den, b1_den, dataset, stream):
    """(eps, 0)-DP sparse histogram: SparseHistogram mixed with :func:`random_histogram`.

    ``mech`` should be (eps/2)-DP for counting queries, e.g. ``GeoSample(n, e_den)``."""
    m, n = dataset.m, dataset.n
    if m < 2 * n + 1:
        raise InvalidParameter(f"pure sparse release needs m >= 2n+1, got m={m}, n={n}")
    if b1_den < 2:
        raise InvalidParameter("beta1 must be 1/B with B >= 2")
    delta_den = pure_sparse_delta_den(m, n, e_den, b1_den)
    return mixture_release(
        lambda st: sparse_histogram(mech, delta_den, dataset, st),
        lambda st: random_histogram(m, n, st),
        b1_den,
        stream,
    )
