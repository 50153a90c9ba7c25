from collections import Counter
from fractions import Fraction

import pytest

from dphist import Dataset, FieldParams, GeoSample, EmptyBinSampler, InvalidParameter
from dphist.errors import BudgetExceeded
from dphist.verify import (ExactDistribution, accuracy_trial, brute_order_statistics, clamped_geometric_cdf,
                           clamped_geometric_pmf, conv_power_exact, dp_certify, empirical_tv_sigma,
                           enumerate_release, m0_sandwich, multinomial_order_statistics,
                           ord_sample_distribution, polynomial_value_counts, statistical_distance,
                           truncated_binomial_pmf)


def test_distribution_must_sum_to_one():
    with pytest.raises(InvalidParameter):
        ExactDistribution({0: Fraction(1, 2)})
    with pytest.raises(InvalidParameter):
        ExactDistribution({0: Fraction(3, 2), 1: Fraction(-1, 2)})


def test_distribution_basics():
    p = ExactDistribution.from_counts({"a": 1, "b": 3})
    assert p["b"] == Fraction(3, 4) and p["z"] == 0
    assert p.support() == {"a", "b"}
    q = p.mix(ExactDistribution.point("z"), 4)
    assert q["z"] == Fraction(1, 4) and q["a"] == Fraction(3, 16)
    assert p.map(lambda _: 0) == ExactDistribution.point(0)


def test_statistical_distance():
    p = ExactDistribution({0: Fraction(1, 2), 1: Fraction(1, 2)})
    assert statistical_distance(p, p) == 0
    assert statistical_distance(p, ExactDistribution.point(0)) == Fraction(1, 2)
    assert statistical_distance(ExactDistribution.point(0), ExactDistribution.point(1)) == 1


def test_clamped_geometric_pmf_and_cdf_agree():
    for n, c, ratio in ((1, 0, 2), (3, 1, Fraction(3, 2)), (5, 5, Fraction(9, 8))):
        pmf = clamped_geometric_pmf(n, c, ratio)
        acc = Fraction(0)
        for z in range(n + 1):
            acc += pmf[z]
            assert clamped_geometric_cdf(n, c, ratio, z) == acc


def test_clamped_geometric_worked():
    # n=2, c=0, ratio 3/2 is GeoSample(2, 1) at zero: scaled CDF 9, 11, 15 over 15
    pmf = clamped_geometric_pmf(2, 0, Fraction(3, 2))
    assert [pmf[z] for z in range(3)] == [Fraction(9, 15), Fraction(2, 15), Fraction(4, 15)]


def test_truncated_binomial():
    law = truncated_binomial_pmf(3, Fraction(1, 2), 2)
    assert [law[k] for k in range(3)] == [Fraction(1, 8), Fraction(3, 8), Fraction(1, 2)]
    assert truncated_binomial_pmf(2, 0, 1) == ExactDistribution.point(0)


def test_conv_power_exact_small():
    # (1/2, 1/2)^{*2} = (1/4, 1/2, 1/4)
    assert conv_power_exact([1, 1, 0], 2, 2, 3) == [Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]


def test_order_statistic_oracles_agree():
    for cdf, m in (([1, 3], 2), ([2, 3, 5], 3), ([0, 4, 4, 6], 4)):
        brute = brute_order_statistics(cdf, m)
        assert multinomial_order_statistics(cdf, m) == brute
        assert ord_sample_distribution(cdf, m) == brute


def test_brute_budget():
    with pytest.raises(BudgetExceeded):
        brute_order_statistics([1, 8], 10, budget=1000)


def test_enumerate_release_simple():
    law = enumerate_release(lambda st: st.uniform(2) + (st.uniform(3) if st.uniform(2) == 1 else 0))
    # first draw a in {1,2}; second b in {1,2}; b == 1 adds a uniform on {1,2,3}
    expected = Counter()
    for a in (1, 2):
        for b in (1, 2):
            for c in ((1, 2, 3) if b == 1 else (None,)):
                expected[a + (c or 0)] += Fraction(1, 12) if b == 1 else Fraction(1, 4)
    assert law == ExactDistribution(dict(expected))


def test_dp_certify_constant_release():
    const = lambda ds: ExactDistribution.point(())
    cert = dp_certify(const, 2, 2, 1)
    assert cert.ok and cert.max_ratio == 1
    assert cert.pairs == 4 * 2
    assert cert.describe().startswith("certified")


def test_dp_certify_identity_is_not_private():
    ident = lambda ds: ExactDistribution.point(ds.rows)
    cert = dp_certify(ident, 2, 1, 100)
    assert not cert and cert.max_ratio is None
    assert "VIOLATION" in cert.describe()


def test_dp_certify_mixture_has_finite_ratio():
    # randomized response: identity mixed with uniform-on-rows, weight 1/2
    def rr(ds):
        uni = ExactDistribution({(x,): Fraction(1, 2) for x in (1, 2)})
        return ExactDistribution.point(ds.rows).mix(uni, 2)

    cert = dp_certify(rr, 2, 1, 3)
    assert cert.ok and cert.max_ratio == 3
    assert not dp_certify(rr, 2, 1, Fraction(5, 2))


def test_dp_certify_budget():
    with pytest.raises(BudgetExceeded):
        dp_certify(lambda ds: None, 10, 8, 1, budget=100)


def test_accuracy_trial_identity(stream):
    ds = Dataset(4, (1, 1, 3))
    rep = accuracy_trial(lambda st: {1: 2, 3: 1}, ds, 0, 50, stream)
    assert rep.simultaneous_frequency == 1
    assert all(rep.frequency(x) == 1 for x in range(1, 5))
    lo, hi = rep.interval(50)
    assert hi == 1.0 and lo > 0.85


def test_accuracy_simultaneous_at_most_each(stream):
    ds = Dataset(5, (2, 2))
    g = GeoSample(2, 1)
    from dphist import basic_histogram

    rep = accuracy_trial(lambda st: basic_histogram(g, range(1, 6), ds, st), ds, 0, 400, stream)
    assert rep.simultaneous <= min(rep.per_bin.values())
    lo, hi = rep.interval(rep.per_bin[2])
    assert lo <= float(rep.frequency(2)) <= hi


def test_empirical_tv_sigma():
    p = ExactDistribution({0: Fraction(1, 2), 1: Fraction(1, 2)})
    assert empirical_tv_sigma(p, 100) == pytest.approx(0.05)
    assert empirical_tv_sigma(ExactDistribution.point(0), 100) == 0


def test_m0_sandwich_rows():
    rows = m0_sandwich(EmptyBinSampler(GeoSample(2, 1), 64))
    assert len(rows) == 3
    assert all(r["within"] and r["dominates"] for r in rows)
    assert sum(r["p0"] for r in rows) == 1


def test_polynomial_value_counts_tiny_field():
    fp = FieldParams(0)          # GF(4)
    counts = polynomial_value_counts(fp, [0, 1])
    assert counts.tolist() == [1] * 16
    assert polynomial_value_counts(fp, [2, 2]).max() == 4
