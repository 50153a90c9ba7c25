from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from dphist import FastSample, GeoSample, InvalidParameter, mixture_release
from dphist.counting import accuracy_radius, fast_cdf0, fast_sample, geo_cdf0, geo_sample, make_mechanism
from dphist.verify import ExactDistribution, enumerate_release, statistical_distance


def test_geo_worked_n2():
    g = GeoSample(2, 1)
    assert (g.k, g.d) == (1, 15)
    assert [geo_cdf0(g, z) for z in range(3)] == [9, 11, 15]
    assert [geo_sample(g, 0, u) for u in (9, 10, 12)] == [0, 1, 2]
    assert (g.cdf(2, 0), g.cdf(2, 1)) == (4, 6)
    assert geo_sample(g, 2, 5) == 1


def test_geo_worked_n1():
    g = GeoSample(1, 1)
    assert g.d == 5 and g.cdf0(0) == 3


def test_geo_u_one_is_smallest_support_point():
    for c in range(5):
        g = GeoSample(4, 2)
        assert g(c, 1) == 0


def test_fast_worked_instance():
    f = FastSample(1, 1, 2)
    assert (f.k, f.t, f.d_prime, f.d) == (1, 17, 645700815, 2582803260)
    assert f.truncated_cdf(0, 0) == 387682633
    assert fast_cdf0(f, 0) == 1421066081 and fast_cdf0(f, 1) == f.d
    assert fast_sample(f, 0, 1421066081) == 0
    assert fast_sample(f, 0, 1421066082) == 1
    # F(0)/d = (1/2) F'(0)/d' + (1/2)(1/2)
    assert Fraction(f.cdf0(0), f.d) == Fraction(1, 2) * Fraction(387682633, f.d_prime) + Fraction(1, 4)


def test_fast_u_d_gives_n():
    f = FastSample(3, 2, 4)
    for c in range(4):
        assert f(c, f.d) == 3


def test_fast_far_below_c_is_uniform_only():
    f = FastSample(100, 1, 2)
    c = 100
    assert c - f.t > 0
    for z in range(c - f.t):
        assert f.truncated_cdf(c, z) == 0
        assert f.cdf(c, z) == (z + 1) * f.d_prime


def test_gamma_one_is_uniform():
    f = FastSample(3, 1, 1)
    assert [f.cdf0(z) for z in range(4)] == [(z + 1) * f.d_prime for z in range(4)]


@pytest.mark.parametrize("mech", [GeoSample(3, 1), GeoSample(2, 3), FastSample(2, 1, 1)])
def test_monotone_exhaustive(mech):
    for c in range(mech.n + 1):
        outs = [mech(c, u) for u in range(1, mech.d + 1)]
        assert outs == sorted(outs)
        assert all(0 <= z <= mech.n for z in outs)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 12), st.integers(1, 6), st.integers(1, 8), st.data())
def test_monotone_probes(n, e_den, g_den, data):
    mech = FastSample(n, e_den, g_den)
    c = data.draw(st.integers(0, n))
    u1 = data.draw(st.integers(1, mech.d))
    u2 = data.draw(st.integers(u1, mech.d))
    assert mech(c, u1) <= mech(c, u2)


@pytest.mark.parametrize("n,e_den", [(1, 1), (3, 2), (5, 4), (8, 8)])
def test_geo_counting_query_dp(n, e_den):
    g = GeoSample(n, e_den)
    for c in range(n):
        for z in range(n + 1):
            p = g.cdf(c, z) - g.cdf(c, z - 1)
            q = g.cdf(c + 1, z) - g.cdf(c + 1, z - 1)
            assert p <= g.ratio * q and q <= g.ratio * p


def test_cdf0_nondecreasing_and_total():
    for mech in (GeoSample(6, 3), FastSample(6, 3, 5)):
        vals = [mech.cdf0(z) for z in range(7)]
        assert vals == sorted(vals) and vals[-1] == mech.d


@pytest.mark.parametrize("bad", [dict(c=-1, u=1), dict(c=3, u=1), dict(c=0, u=0), dict(c=0, u=16)])
def test_evaluate_rejects_out_of_range(bad):
    with pytest.raises(InvalidParameter):
        GeoSample(2, 1).evaluate(**bad)


def test_cdf0_rejects_out_of_range():
    with pytest.raises(InvalidParameter):
        GeoSample(2, 1).cdf0(3)


@pytest.mark.parametrize("args", [(0, 1), (2, 0)])
def test_geo_rejects_params(args):
    with pytest.raises(InvalidParameter):
        GeoSample(*args)


def test_make_mechanism():
    assert make_mechanism(2, 1) == GeoSample(2, 1)
    assert make_mechanism(2, 1, 4) == FastSample(2, 1, 4)


def _toy(stream):
    return {1: "a", 2: "a", 3: "b"}[stream.uniform(3)]


def _fallback(stream):
    return "abc"[stream.uniform(3) - 1]


def test_mixture_gamma_one_is_fallback():
    law = enumerate_release(lambda st: mixture_release(_toy, lambda s: "z", 1, st))
    assert law == ExactDistribution.point("z")


def test_mixture_exact_law():
    inner = ExactDistribution({"a": Fraction(2, 3), "b": Fraction(1, 3)})
    fallback = ExactDistribution({k: Fraction(1, 3) for k in "abc"})
    for g_den in (2, 3, 5):
        law = enumerate_release(lambda st: mixture_release(_toy, _fallback, g_den, st))
        assert law == inner.mix(fallback, g_den)
        assert statistical_distance(law, inner) <= Fraction(1, g_den)


def test_accuracy_radius_values():
    assert accuracy_radius(1, 20) == 14      # ceil(4.5 * ln 20) = ceil(13.48)
    assert accuracy_radius(1, 40) == 17
    assert accuracy_radius(1, 2560) == 36
