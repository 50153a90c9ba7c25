from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dphist import (Dataset, GeoSample, InvalidParameter, approx_bin_sample, approx_conv_exp,
                    approx_ord_sample, distinct_sample, kh_prime, ord_sample, pure_sparse_histogram,
                    sparse_histogram)
from dphist.sparse import _conv_trunc, _release_top, pure_sparse_delta_den, random_histogram, sparse_scale
from dphist.counting import accuracy_radius
from dphist.verify import (ExactDistribution, all_sparse_histograms, approx_bin_distribution, binomial_sigma,
                           brute_order_statistics, enumerate_release, keep_heavy_distribution,
                           random_histogram_distribution, statistical_distance)


def _max_z(samples, exact):
    n = sum(samples.values())
    emp = ExactDistribution.from_counts(samples)
    worst = 0.0
    for h in exact.support() | emp.support():
        sd = binomial_sigma(exact[h], n)
        if sd == 0:
            if emp[h] != exact[h]:
                return float("inf")
            continue
        worst = max(worst, abs(float(emp[h] - exact[h])) / sd)
    return worst


# order statistics -------------------------------------------------------------

def test_ord_sample_all_mass_at_zero(stream):
    for _ in range(50):
        assert ord_sample([8, 8, 8], 10, stream) == (0, 0, 0)


def test_ord_sample_mass_at_top_exact():
    cdf = [1, 8]
    law = enumerate_release(lambda st: ord_sample(cdf, 4, st))
    assert law == brute_order_statistics(cdf, 4)
    p0 = Fraction(1, 8)
    # (1, 1) unless at most one of the four draws is 1
    assert law[(1, 1)] == 1 - p0 ** 4 - 4 * (1 - p0) * p0 ** 3


def test_ord_sample_uniform_two_values_brute_force():
    cdf = [4, 8]
    assert enumerate_release(lambda st: ord_sample(cdf, 4, st)) == brute_order_statistics(cdf, 4)


def test_ord_sample_rejects_small_population(stream):
    with pytest.raises(InvalidParameter):
        ord_sample([1, 2, 3], 2, stream)


def test_approx_ord_sample_all_zero(stream):
    for _ in range(50):
        assert approx_ord_sample([9, 9, 9, 9], 12, 1 << 12, stream) == (0, 0, 0, 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 50), min_size=2, max_size=5), st.integers(0, 30), st.integers(0, 2 ** 32))
def test_approx_ord_sample_shape(steps, extra, seed):
    from dphist import RandomStream

    cdf = []
    acc = 0
    for s in steps:
        acc += s
        cdf.append(acc)
    cdf[-1] += 1
    n = len(cdf) - 1
    m = n + 1 + extra
    out = approx_ord_sample(cdf, m, m * 64, RandomStream(seed.to_bytes(32, "little")))
    assert len(out) == n + 1
    assert list(out) == sorted(out, reverse=True)
    assert all(0 <= v <= n for v in out)


# convolution powering ------------------------------------------------------------

def test_convexp_base_case():
    assert approx_conv_exp(10, 3, [1, 2, 3], 1) == [1, 2, 3]


def test_convexp_worked():
    assert approx_conv_exp(4, 2, [2, 2], 2) == [1, 2]
    assert approx_conv_exp(4, 2, [2, 2], 3) == [0, 1]


def test_convexp_rejects_heavy_vector():
    with pytest.raises(InvalidParameter):
        approx_conv_exp(4, 2, [3, 2], 2)


@given(st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=12),
       st.lists(st.integers(0, 10 ** 6), min_size=1, max_size=12), st.integers(1, 12))
def test_kronecker_convolution_matches_schoolbook(a, b, t):
    ref = [0] * t
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j < t:
                ref[i + j] += x * y
    assert _conv_trunc(a, b, t) == ref


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 2 ** 32), st.integers(1, 32), st.integers(1, 64), st.data())
def test_convexp_norm_and_prefix(s, t, i, data):
    weights = data.draw(st.lists(st.integers(0, 1000), min_size=t, max_size=t))
    total = sum(weights) or 1
    a = [w * s // total for w in weights]
    full = approx_conv_exp(s, t, a, i)
    assert sum(full) <= s
    for short in range(1, t):
        assert approx_conv_exp(s, short, a[:short], i) == full[:short]


# approximate binomials --------------------------------------------------------------

def test_approx_bin_t_zero(stream):
    assert approx_bin_sample(16, 0, 3, 1, 2, stream) == 0


def test_approx_bin_p_zero(stream):
    for _ in range(50):
        assert approx_bin_sample(1 << 10, 4, 7, 0, 5, stream) == 0


def test_approx_bin_bernoulli_third():
    s = 1 << 10
    law = approx_bin_distribution(s, 1, 1, 1, 3)
    p = Fraction(s // 3, s)
    assert law == ExactDistribution({0: 1 - p, 1: p})
    target = ExactDistribution({0: Fraction(2, 3), 1: Fraction(1, 3)})
    assert statistical_distance(law, target) <= Fraction(1, s)


def test_approx_bin_enumeration_matches_sampler(stream):
    law = approx_bin_distribution(64, 3, 5, 2, 7)
    draws = Counter(approx_bin_sample(64, 3, 5, 2, 7, stream) for _ in range(20000))
    assert _max_z(draws, law) <= 4


def test_approx_bin_rejects_small_scale(stream):
    with pytest.raises(InvalidParameter):
        approx_bin_sample(3, 1, 4, 1, 2, stream)


# distinct sampling ------------------------------------------------------------------------

def test_distinct_exhaustion(stream):
    out = distinct_sample(9, {2, 5}, 7, stream)
    assert sorted(out) == [1, 3, 4, 6, 7, 8, 9]


def test_distinct_m3_frequencies(stream):
    trials = 100000
    first = sum(distinct_sample(3, {2}, 2, stream) == [1, 3] for _ in range(trials))
    assert abs(first / trials - 0.5) <= 4 * binomial_sigma(Fraction(1, 2), trials)


def test_distinct_exact_law():
    law = enumerate_release(lambda st: tuple(distinct_sample(5, {1, 4}, 2, st)))
    assert law == ExactDistribution({(x, y): Fraction(1, 6) for x in (2, 3, 5) for y in (2, 3, 5) if x != y})


def test_distinct_large_universe(stream):
    out = distinct_sample(10 ** 6, set(), 5, stream)
    assert len(set(out)) == 5 and all(1 <= x <= 10 ** 6 for x in out)


def test_distinct_rejects_too_many(stream):
    with pytest.raises(InvalidParameter):
        distinct_sample(4, {1, 2}, 3, stream)


# KH', sparse and pure sparse ----------------------------------------------------------------

def test_release_top_drops_ties():
    cands = [(1, 2), (2, 2), (3, 1), (4, 0)]
    assert _release_top(cands, 1, 4).entries == ()
    assert _release_top(cands, 2, 4).entries == ((1, 2), (2, 2))
    assert _release_top([(1, 2), (2, 1), (3, 1)], 2, 3).entries == ((1, 2),)


def test_kh_prime_at_most_n_entries(stream):
    g = GeoSample(3, 1)
    ds = Dataset(20, (1, 2, 3))
    for _ in range(300):
        assert len(kh_prime(g, ds, stream)) <= 3


def test_kh_prime_small_universe_is_basic(stream):
    g = GeoSample(2, 1)
    h = kh_prime(g, Dataset(4, (1, 2)), stream)
    assert [x for x, _ in h] == [1, 2, 3, 4]


def test_kh_prime_matches_keep_heavy(stream):
    g = GeoSample(2, 1)
    ds = Dataset(5, (1, 1))
    exact = keep_heavy_distribution(g, ds)
    draws = Counter(kh_prime(g, ds, stream).entries for _ in range(100000))
    assert _max_z(draws, exact) <= 4


def test_sparse_scale_worked():
    assert pure_sparse_delta_den(5, 2, 1, 4) == 2700
    assert sparse_scale(5, 2, 2700) == 108000


def test_sparse_close_to_keep_heavy(stream):
    g = GeoSample(2, 1)
    ds = Dataset(5, (1, 2))
    exact = keep_heavy_distribution(g, ds)
    trials = 100000
    draws = Counter(sparse_histogram(g, 2700, ds, stream).entries for _ in range(trials))
    emp = ExactDistribution.from_counts(draws)
    sigma = 0.5 * sum(binomial_sigma(p, trials) for _, p in exact.items())
    assert float(statistical_distance(emp, exact)) <= 1 / 2700 + 3 * sigma


def test_fallback_law_and_support():
    for m, n in ((3, 1), (4, 2)):
        law = enumerate_release(lambda st: random_histogram(m, n, st).entries)
        assert law == random_histogram_distribution(m, n)
        floor = min(law[h] for h in all_sparse_histograms(m, n))
        import math

        assert floor >= Fraction(math.factorial(n), (n + 1) ** n * m ** n) >= Fraction(1, (3 * m) ** n)
        assert law.support() == set(all_sparse_histograms(m, n))


def test_pure_sparse_output_shape(stream):
    g = GeoSample(3, 1)
    ds = Dataset(9, (2, 2, 7))
    for _ in range(300):
        h = pure_sparse_histogram(g, 1, 4, ds, stream)
        assert len(h) <= 3 and all(1 <= c <= 3 for _, c in h)


def test_pure_sparse_rejects_small_universe(stream):
    with pytest.raises(InvalidParameter):
        pure_sparse_histogram(GeoSample(2, 1), 1, 4, Dataset(4, (1, 2)), stream)
    with pytest.raises(InvalidParameter):
        pure_sparse_histogram(GeoSample(2, 1), 1, 1, Dataset(5, (1, 2)), stream)


def test_pure_sparse_heavy_bin_accuracy(stream):
    # a count above t needs n > t while m >= 2n + 1; n = 90, m = 181 gives t = 80
    n, m, b_den = 90, 181, 10
    t = 2 * accuracy_radius(1, 4 * m * b_den)
    a = accuracy_radius(1, 4 * b_den)
    assert n > t
    g = GeoSample(n, 1)
    ds = Dataset(m, (3,) * n)
    trials = 3000
    good = sum(abs(pure_sparse_histogram(g, 1, 4 * b_den, ds, stream).count(3) - n) <= a
               for _ in range(trials))
    floor = 1 - Fraction(1, b_den)
    assert good / trials >= float(floor) - 4 * binomial_sigma(floor, trials)
