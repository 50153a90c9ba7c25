"""Exact distributions, statistical distance, DP certificates and accuracy trials.

Everything here is an oracle: it recomputes distributions from first
principles (closed forms, brute-force enumeration, exact binomials) so that
tests can compare them against the samplers.
"""

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded, InvalidParameter
from .histogram import Dataset, true_counts
from .sparse import _ApproxBin

__all__ = [
    "ExactDistribution",
    "exact_mechanism_distribution",
    "statistical_distance",
    "dp_certify",
    "accuracy_trial",
    "clamped_geometric_pmf",
    "clamped_geometric_cdf",
    "fast_sample_oracle_pmf",
    "truncated_binomial_pmf",
    "conv_power_exact",
    "approx_bin_distribution",
    "brute_order_statistics",
    "multinomial_order_statistics",
    "basic_histogram_distribution",
    "random_histogram_distribution",
    "keep_heavy_distribution",
    "all_sparse_histograms",
    "enumerate_release",
    "ord_sample_distribution",
    "Certificate",
    "AccuracyReport",
    "binomial_sigma",
    "empirical_tv_sigma",
    "m0_sandwich",
    "polynomial_value_counts",
]

DEFAULT_BUDGET = 1 << 24


class ExactDistribution:
    """Outcome -> exact probability, summing to one."""

    def __init__(self, probs, check=True):
        self._p = {k: Fraction(v) for k, v in probs.items() if v != 0}
        if check:
            if any(v < 0 for v in self._p.values()):
                raise InvalidParameter("probabilities must be nonnegative")
            total = sum(self._p.values(), Fraction(0))
            if total != 1:
                raise InvalidParameter(f"probabilities sum to {total}, not 1")

    @classmethod
    def from_counts(cls, counts):
        total = sum(counts.values())
        return cls({k: Fraction(v, total) for k, v in counts.items()})

    @classmethod
    def point(cls, outcome):
        return cls({outcome: 1})

    def __getitem__(self, outcome):
        return self._p.get(outcome, Fraction(0))

    def __eq__(self, other):
        return isinstance(other, ExactDistribution) and self._p == other._p

    def __repr__(self):
        body = ", ".join(f"{k!r}: {v}" for k, v in sorted(self._p.items()))
        return f"ExactDistribution({{{body}}})"

    def __len__(self):
        return len(self._p)

    def items(self):
        return self._p.items()

    def support(self):
        return set(self._p)

    def mix(self, other, g_den):
        """``(1 - 1/g_den) * self + (1/g_den) * other``."""
        gamma = Fraction(1, g_den)
        keys = self.support() | other.support()
        return ExactDistribution({k: (1 - gamma) * self[k] + gamma * other[k] for k in keys})

    def map(self, fn):
        out = {}
        for k, v in self._p.items():
            key = fn(k)
            out[key] = out.get(key, 0) + v
        return ExactDistribution(out, check=False)


def exact_mechanism_distribution(mech, c, method="cdf", budget=DEFAULT_BUDGET):
    """Pmf of ``M(c, U)`` over ``[0, n]``.

    ``method="cdf"`` differences the scaled CDF; ``"enumerate"`` runs the
    mechanism on every ``u`` in ``[1, d]``."""
    if method == "cdf":
        prev, out = 0, {}
        for z in range(mech.n + 1):
            cur = mech.cdf(c, z)
            out[z] = Fraction(cur - prev, mech.d)
            prev = cur
        return ExactDistribution(out)
    if method == "enumerate":
        if mech.d > budget:
            raise BudgetExceeded(f"d={mech.d} exceeds the enumeration budget {budget}")
        return ExactDistribution.from_counts(Counter(mech.evaluate(c, u) for u in range(1, mech.d + 1)))
    raise InvalidParameter(f"unknown method {method!r}")


def statistical_distance(p, q):
    keys = p.support() | q.support()
    return sum((abs(p[k] - q[k]) for k in keys), Fraction(0)) / 2


# closed forms ---------------------------------------------------------------

def clamped_geometric_pmf(n, c, ratio):
    """``c + Z`` clamped to ``[0, n]``, where ``Pr[Z = z]`` is proportional to ``ratio^-|z|``."""
    alpha = 1 / Fraction(ratio)
    out = {}
    for y in range(n + 1):
        if y == 0:
            out[y] = alpha ** c / (1 + alpha)
        elif y == n:
            out[y] = alpha ** (n - c) / (1 + alpha)
        else:
            out[y] = (1 - alpha) / (1 + alpha) * alpha ** abs(y - c)
    return ExactDistribution(out)


def clamped_geometric_cdf(n, c, ratio, z):
    alpha = 1 / Fraction(ratio)
    if z < 0:
        return Fraction(0)
    if z >= n:
        return Fraction(1)
    if z < c:
        return alpha ** (c - z) / (1 + alpha)
    return 1 - alpha ** (z - c + 1) / (1 + alpha)


def _two_sided_geometric(ratio, z):
    alpha = 1 / Fraction(ratio)
    return (1 - alpha) / (1 + alpha) * alpha ** abs(z)


def fast_sample_oracle_pmf(n, c, ratio, t, g_den):
    """Truncate the geometric at radius ``t``, move the tail onto ``c``, clamp, mix with uniform."""
    alpha = 1 / Fraction(ratio)
    tail = 2 * alpha ** (t + 1) / (1 + alpha)
    shifted = {}
    for z in range(-t, t + 1):
        mass = _two_sided_geometric(ratio, z) + (tail if z == 0 else 0)
        y = min(max(c + z, 0), n)
        shifted[y] = shifted.get(y, 0) + mass
    geo = ExactDistribution(shifted)
    uniform = ExactDistribution({y: Fraction(1, n + 1) for y in range(n + 1)})
    return geo.mix(uniform, g_den)


def truncated_binomial_pmf(m, p, t):
    """``min(Bin(m, p), t)`` for rational ``p``."""
    p = Fraction(p)
    out = {}
    below = Fraction(0)
    for ell in range(t):
        prob = math.comb(m, ell) * p ** ell * (1 - p) ** (m - ell) if ell <= m else Fraction(0)
        out[ell] = prob
        below += prob
    out[t] = 1 - below
    return ExactDistribution(out)


def conv_power_exact(a, s, i, t):
    """First ``t`` entries of the ``i``-fold self-convolution of ``a / s``, exactly."""
    a = list(a[:t])
    acc = list(a)
    for _ in range(i - 1):
        nxt = [0] * t
        for j, x in enumerate(acc):
            if x:
                for k, y in enumerate(a[:t - j]):
                    nxt[j + k] += x * y
        acc = nxt
    return [Fraction(x, s ** i) for x in acc]


def approx_bin_distribution(s, t, m, p, q, budget=DEFAULT_BUDGET):
    """Exact output law of ApproxBinSample, enumerating every ``u`` in ``[1, s]``."""
    if s > budget:
        raise BudgetExceeded(f"s={s} exceeds the enumeration budget {budget}")
    if t == 0:
        return ExactDistribution.point(0)
    run = _ApproxBin(s, t, m, p, q)
    return ExactDistribution.from_counts(Counter(run(u) for u in range(1, s + 1)))


def _inverse(cdf, u):
    for z, v in enumerate(cdf):
        if v >= u:
            return z
    raise InvalidParameter("u exceeds the CDF total")


def brute_order_statistics(cdf, m, budget=DEFAULT_BUDGET):
    """Top ``n + 1`` order statistics by running every one of the ``d^m`` randomness tuples."""
    d, n = cdf[-1], len(cdf) - 1
    if d ** m > budget:
        raise BudgetExceeded(f"d^m = {d ** m} exceeds the enumeration budget {budget}")
    value = [_inverse(cdf, u) for u in range(1, d + 1)]
    counts = Counter()
    for us in itertools.product(range(d), repeat=m):
        counts[tuple(sorted((value[u] for u in us), reverse=True)[:n + 1])] += 1
    return ExactDistribution.from_counts(counts)


def multinomial_order_statistics(cdf, m):
    """Same law as :func:`brute_order_statistics`, summing over value histograms instead."""
    d, n = cdf[-1], len(cdf) - 1
    probs = [Fraction(cdf[0], d)] + [Fraction(cdf[v] - cdf[v - 1], d) for v in range(1, n + 1)]
    out = {}

    def rec(v, left, ways, prob, hist):
        if v == n:
            hist = hist + [left]
            full = []
            for val in range(n, -1, -1):
                full.extend([val] * hist[val])
            key = tuple(full[:n + 1])
            out[key] = out.get(key, 0) + ways * prob * probs[n] ** left
            return
        for k in range(left + 1):
            rec(v + 1, left - k, ways * math.comb(left, k), prob * probs[v] ** k, hist + [k])

    rec(0, m, 1, Fraction(1), [])
    return ExactDistribution(out)


def basic_histogram_distribution(mech, labels, dataset):
    """Exact law of the BasicHistogram output (as an entries tuple)."""
    counts = true_counts(dataset)
    labels = sorted(set(labels))
    per_bin = [exact_mechanism_distribution(mech, counts.get(x, 0)) for x in labels]
    out = {}
    for combo in itertools.product(*(sorted(p.items()) for p in per_bin)):
        prob = Fraction(1)
        for _, pr in combo:
            prob *= pr
        out[tuple(zip(labels, (z for z, _ in combo)))] = prob
    return ExactDistribution(out)


def keep_heavy_distribution(mech, dataset):
    """Exact law of KeepHeavy: noise every bin, keep counts above the (n+1)-th largest."""
    m, n = dataset.m, dataset.n
    if m <= n:
        raise InvalidParameter("KeepHeavy needs more bins than rows")
    full = basic_histogram_distribution(mech, range(1, m + 1), dataset)

    def rule(entries):
        cutoff = sorted((c for _, c in entries), reverse=True)[n]
        return tuple((x, c) for x, c in entries if c > cutoff)

    return full.map(rule)


def random_histogram_distribution(m, n):
    """Exact law of the pure-sparse fallback release, as entries tuples."""
    out = {}
    for labels in itertools.product(range(1, m + 1), repeat=n):
        distinct = sorted(set(labels))
        w = Fraction(1, m ** n * (n + 1) ** len(distinct))
        for cs in itertools.product(range(n + 1), repeat=len(distinct)):
            key = tuple((x, c) for x, c in zip(distinct, cs) if c > 0)
            out[key] = out.get(key, 0) + w
    return ExactDistribution(out)


def all_sparse_histograms(m, n):
    """Every histogram with at most ``n`` nonzero bins, counts in ``[1, n]``."""
    for size in range(n + 1):
        for labels in itertools.combinations(range(1, m + 1), size):
            for cs in itertools.product(range(1, n + 1), repeat=size):
                yield tuple(zip(labels, cs))


class _ScriptedStream:
    """Stream replaying a fixed prefix of draws, then answering 1 and recording the range."""

    def __init__(self, prefix):
        self.prefix = prefix
        self.ranges = []

    def uniform(self, d):
        k = len(self.ranges)
        self.ranges.append(d)
        if k < len(self.prefix):
            return self.prefix[k]
        self.prefix.append(1)
        return 1


def enumerate_release(fn, budget=DEFAULT_BUDGET):
    """Exact law of ``fn(stream)`` by running it on every path of uniform draws.

    ``fn`` may only call ``stream.uniform``; each path ``(u_1, ..., u_k)``
    has probability ``prod 1/d_i``."""
    out = {}
    prefix = []
    runs = 0
    while True:
        runs += 1
        if runs > budget:
            raise BudgetExceeded(f"more than {budget} randomness paths")
        st = _ScriptedStream(prefix)
        result = fn(st)
        used = st.prefix[:len(st.ranges)]
        prob = Fraction(1)
        for d in st.ranges:
            prob /= d
        out[result] = out.get(result, 0) + prob
        # odometer step over the draws actually made
        k = len(used) - 1
        while k >= 0 and used[k] == st.ranges[k]:
            k -= 1
        if k < 0:
            return ExactDistribution(out)
        prefix = used[:k] + [used[k] + 1]


def ord_sample_distribution(cdf, m):
    """Exact law of the sequential-binomial order-statistic sampler."""
    n = len(cdf) - 1
    out = {}

    def rec(v, taken, prob, ells):
        if v == 0:
            full = []
            for val in range(n, 0, -1):
                full.extend([val] * ells[val])
            full.extend([0] * (n + 1 - taken))
            key = tuple(full)
            out[key] = out.get(key, 0) + prob
            return
        if taken == n + 1 or cdf[v] == 0:
            rec(v - 1, taken, prob, {**ells, v: 0})
            return
        p = 1 - Fraction(cdf[v - 1], cdf[v])
        law = truncated_binomial_pmf(m - taken, p, n + 1 - taken)
        for ell, pr in law.items():
            rec(v - 1, taken + ell, prob * pr, {**ells, v: ell})

    rec(n, 0, Fraction(1), {})
    return ExactDistribution(out)


# DP certification -----------------------------------------------------------

@dataclass
class Certificate:
    ok: bool
    bound: Fraction
    max_ratio: object            # Fraction, or None when some ratio is unbounded
    witness: object              # (D, D', outcome, ratio) achieving the max / violating
    pairs: int

    def __bool__(self):
        return self.ok

    def describe(self):
        ratio = "inf" if self.max_ratio is None else str(self.max_ratio)
        head = "certified" if self.ok else "VIOLATION"
        d1, d2, h, _ = self.witness if self.witness else (None, None, None, None)
        where = f" at D={d1.rows if d1 else None} D'={d2.rows if d2 else None} h={h}"
        return f"{head}: max ratio {ratio} vs bound {self.bound} over {self.pairs} ordered pairs{where}"


def dp_certify(release_dist, m, n, bound, budget=DEFAULT_BUDGET):
    """Check ``Pr[h | D] <= bound * Pr[h | D']`` for all neighbours, both orders.

    ``release_dist(dataset)`` returns an :class:`ExactDistribution`."""
    bound = Fraction(bound)
    if m ** n > budget:
        raise BudgetExceeded(f"{m}^{n} datasets exceed the budget {budget}")
    cache = {}

    def dist(ds):
        if ds.rows not in cache:
            cache[ds.rows] = release_dist(ds)
        return cache[ds.rows]

    best, witness, pairs, ok = Fraction(0), None, 0, True
    for rows in itertools.product(range(1, m + 1), repeat=n):
        ds = Dataset(m, rows)
        p = dist(ds)
        for nb in ds.neighbors():
            q = dist(nb)
            pairs += 1
            for h, ph in p.items():
                qh = q[h]
                if qh == 0:
                    return Certificate(False, bound, None, (ds, nb, h, None), pairs)
                ratio = ph / qh
                if ratio > best:
                    best, witness = ratio, (ds, nb, h, ratio)
                if ratio > bound and ok:
                    ok = False
    return Certificate(ok, bound, best, witness, pairs)


# accuracy trials ------------------------------------------------------------

@dataclass
class AccuracyReport:
    trials: int
    per_bin: dict            # label -> successes
    simultaneous: int
    confidence: float

    def frequency(self, x):
        return Fraction(self.per_bin[x], self.trials)

    @property
    def simultaneous_frequency(self):
        return Fraction(self.simultaneous, self.trials)

    def interval(self, successes):
        """Clopper-Pearson interval for a success count."""
        from scipy.stats import beta

        alpha = 1 - self.confidence
        k, n = successes, self.trials
        lo = 0.0 if k == 0 else float(beta.ppf(alpha / 2, k, n - k + 1))
        hi = 1.0 if k == n else float(beta.ppf(1 - alpha / 2, k + 1, n - k))
        return lo, hi

    def half_width(self, successes):
        lo, hi = self.interval(successes)
        return (hi - lo) / 2


def accuracy_trial(release, dataset, a, trials, stream, bins=None, confidence=0.99):
    """Run ``release(stream)`` repeatedly and count bins landing within ``a`` of the truth."""
    if trials < 1:
        raise InvalidParameter("trials must be at least 1")
    counts = true_counts(dataset)
    bins = list(range(1, dataset.m + 1)) if bins is None else list(bins)
    per_bin = dict.fromkeys(bins, 0)
    together = 0
    for _ in range(trials):
        out = release(stream)
        got = out.as_dict() if hasattr(out, "as_dict") else dict(out)
        good = True
        for x in bins:
            if abs(got.get(x, 0) - counts.get(x, 0)) <= a:
                per_bin[x] += 1
            else:
                good = False
        together += good
    return AccuracyReport(trials, per_bin, together, confidence)


def binomial_sigma(p, trials):
    """Standard deviation of an empirical frequency (float; Monte Carlo bands only)."""
    p = float(p)
    return math.sqrt(max(p * (1 - p), 0.0) / trials)


def empirical_tv_sigma(dist, trials):
    """Scale of the empirical-TV fluctuation: (1/2) sum_h sqrt(p_h (1 - p_h) / N)."""
    return 0.5 * sum(binomial_sigma(p, trials) for _, p in dist.items())


# compact-histogram checks ---------------------------------------------------

def m0_sandwich(sampler):
    """Per-count facts relating M0 to M(0, U), as exact rationals.

    Returns a list of dicts with the probability ratio and the bounds
    ``q d / d0 <= ratio <= (q + 1) d / d0`` plus the CDF dominance check."""
    mech, d0, q = sampler.mech, sampler.d0, sampler.q
    d = mech.d
    lo_bound, hi_bound = Fraction(q * d, d0), Fraction((q + 1) * d, d0)
    rows = []
    for c in range(mech.n + 1):
        p = Fraction(mech.cdf0(c) - (mech.cdf0(c - 1) if c else 0), d)
        p0 = Fraction(sampler.cdf(c) - sampler.cdf(c - 1), d0)
        ratio = None if p == 0 else p0 / p
        rows.append({
            "c": c,
            "p": p,
            "p0": p0,
            "ratio": ratio,
            "within": (p0 == 0) if p == 0 else lo_bound <= ratio <= hi_bound,
            "near_one": p == 0 or (1 - Fraction(d, d0)) * p <= p0 <= (1 + Fraction(d, d0)) * p,
            "dominates": Fraction(sampler.cdf(c), d0) >= Fraction(mech.cdf0(c), d),
        })
    return rows


def polynomial_value_counts(fp, points, backend=None):
    """Joint values at ``points`` of every polynomial of degree < len(points) over a small field.

    Returns a count per joint value (length ``order^k``); the family is
    k-wise independent exactly when every count equals 1."""
    import numpy as np

    from . import _accel

    k, order = len(points), fp.order
    if order ** k > DEFAULT_BUDGET:
        raise BudgetExceeded(f"{order}^{k} polynomials exceed the budget")
    grid = np.indices((order,) * k, dtype=np.uint64).reshape(k, -1).T
    code = np.zeros(grid.shape[0], dtype=np.uint64)
    for x in points:
        y = _accel.horner(grid, np.uint64(x), fp.bits, fp.half, backend=backend)
        code = code * np.uint64(order) + y
    return np.bincount(code.astype(np.int64), minlength=order ** k)
