"""Self-checks run by ``dphist verify SUITE``; one PASS/FAIL line per check."""

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from . import verify as V
from .bigmath import RandomStream
from .compact import choose_field_params
from .counting import FastSample, GeoSample, accuracy_radius, mixture_release
from .gf2 import FieldParams
from .histogram import Dataset, basic_histogram, stability_delta, stability_threshold
from .sparse import approx_conv_exp, ord_sample, pure_sparse_histogram

SUITES = ("cdf", "dp", "distance", "accuracy", "field")


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""

    def line(self):
        return f"{'PASS' if self.ok else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


def suite_cdf(stream, trials):
    out = []
    bad = []
    for n in range(1, 9):
        for e in range(1, 9):
            g = GeoSample(n, e)
            for c in range(n + 1):
                for z in range(n + 1):
                    if Fraction(g.cdf(c, z), g.d) != V.clamped_geometric_cdf(n, c, g.ratio, z):
                        bad.append((n, e, c, z))
    out.append(Check("geo-cdf closed form, n,e_den in 1..8", not bad, f"mismatches={bad[:3]}"))
    bad = []
    for n, e, gd in itertools.product(range(1, 5), (1, 2), (2, 4)):
        f = FastSample(n, e, gd)
        for c in range(n + 1):
            if V.exact_mechanism_distribution(f, c) != V.fast_sample_oracle_pmf(n, c, f.ratio, f.t, gd):
                bad.append((n, e, gd, c))
    out.append(Check("fast-sample mixture oracle, n<=4", not bad, f"mismatches={bad[:3]}"))
    f = FastSample(1, 1, 2)
    out.append(Check("fast-sample worked instance", (f.d, f.cdf0(0)) == (2582803260, 1421066081),
                     f"d={f.d} F(0)={f.cdf0(0)}"))
    return out


def suite_dp(stream, trials):
    out = []
    g = GeoSample(2, 1)
    cert = V.dp_certify(lambda ds: V.basic_histogram_distribution(g, range(1, 4), ds), 3, 2, g.ratio ** 2)
    out.append(Check("basic+geo m=3 n=2", cert.ok, cert.describe()))
    ident = V.dp_certify(lambda ds: V.ExactDistribution.point(ds.rows), 3, 2, g.ratio ** 2)
    out.append(Check("identity release is rejected", not ident.ok, ident.describe()))
    fb = V.random_histogram_distribution(3, 1)
    floor = min((fb[h] for h in V.all_sparse_histograms(3, 1)), default=0)
    out.append(Check("fallback full support m=3 n=1", floor >= Fraction(1, 9),
                     f"min probability {floor} >= 1/9"))
    g8 = GeoSample(8, 1)
    b = stability_threshold(g8, 100)
    tight = stability_delta(g8, b) <= Fraction(1, 100) < (stability_delta(g8, b - 1) if b else 2)
    out.append(Check("stability threshold n=8 delta=1/100", tight,
                     f"b={b} delta(b)={stability_delta(g8, b)}"))
    return out


def suite_distance(stream, trials):
    out = []
    rng = random.Random(stream.bits(64))
    worst = Fraction(0)
    ok = True
    for _ in range(40):
        s = rng.randrange(2, 1 << 32)
        t = rng.randrange(1, 17)
        i = rng.randrange(1, 65)
        p = rng.randrange(0, s + 1)
        a = [s - p, p] + [0] * (t - 2) if t >= 2 else [s]
        approx = approx_conv_exp(s, t, a, i)
        exact = V.conv_power_exact(a, s, i, t)
        err = sum((abs(Fraction(x, s) - y) for x, y in zip(approx, exact)), Fraction(0))
        bound = Fraction(t * (i - 1), s)
        ok &= err <= bound
        worst = max(worst, err / bound if bound else 0)
    out.append(Check("approx-conv-exp L1 bound, 40 instances", ok, f"worst error/bound={float(worst):.3g}"))
    ok = True
    for m, t in itertools.product(range(1, 11), range(0, 6)):
        for p in (Fraction(0), Fraction(1, 7), Fraction(1, 3), Fraction(1, 2), Fraction(1)):
            law = V.approx_bin_distribution(4096, t, m, p.numerator, p.denominator)
            tv = V.statistical_distance(law, V.truncated_binomial_pmf(m, p, t))
            ok &= tv <= Fraction(m * (t + 1) - t, 4096)
    out.append(Check("approx-bin-sample TV bound, s=2^12", ok))
    ok = True
    for cdf in ([2, 4], [1, 3, 4], [2, 2, 4], [0, 1, 3]):
        ok &= V.ord_sample_distribution(cdf, 3) == V.brute_order_statistics(cdf, 3)
        ok &= V.enumerate_release(lambda st, cdf=cdf: ord_sample(cdf, 3, st)) == V.brute_order_statistics(cdf, 3)
    out.append(Check("ord-sample exact law vs brute force, m=3", ok))
    inner = V.ExactDistribution({0: Fraction(1, 2), 1: Fraction(1, 3), 2: Fraction(1, 6)})
    fallback = V.ExactDistribution({0: Fraction(1, 3), 1: Fraction(1, 3), 2: Fraction(1, 3)})
    mixed = V.enumerate_release(lambda st: mixture_release(
        lambda s2: {1: 0, 2: 0, 3: 0, 4: 1, 5: 1, 6: 2}[s2.uniform(6)],
        lambda s2: s2.uniform(3) - 1, 4, st))
    ok = mixed == inner.mix(fallback, 4) and V.statistical_distance(mixed, inner) <= Fraction(1, 4)
    out.append(Check("mixture law and distance <= gamma", ok, f"distance={V.statistical_distance(mixed, inner)}"))
    return out


def suite_accuracy(stream, trials):
    out = []
    trials = trials or 20000
    g = GeoSample(4, 1)
    ds = Dataset(3, (1, 1, 1, 2))
    for b_den in (10, 20):
        a = accuracy_radius(1, 2 * b_den)
        rep = V.accuracy_trial(lambda st: basic_histogram(g, range(1, 4), ds, st), ds, a, trials, stream)
        floor = 1 - Fraction(1, b_den)
        worst = min(rep.frequency(x) for x in rep.per_bin)
        sigma = V.binomial_sigma(floor, trials)
        out.append(Check(f"basic per-query beta=1/{b_den} a={a}", float(worst) >= float(floor) - 4 * sigma,
                         f"min frequency {float(worst):.4f} vs {float(floor):.3f} - 4 sigma"))
    n, m, b_den = 12, 16, 10
    g = GeoSample(n, 1)
    ds = Dataset(m, (5,) * n)
    a = accuracy_radius(1, 4 * b_den)
    runs = max(trials // 10, 200)
    rep = V.accuracy_trial(lambda st: pure_sparse_histogram(g, 1, 4 * b_den, ds, st), ds, a, runs, stream,
                           bins=[5])
    floor = 1 - Fraction(1, b_den)
    freq = rep.frequency(5)
    out.append(Check(f"pure-sparse heavy bin within a={a}",
                     float(freq) >= float(floor) - 4 * V.binomial_sigma(floor, runs),
                     f"frequency {float(freq):.4f} over {runs} trials"))
    return out


def suite_field(stream, trials):
    out = []
    rng = random.Random(stream.bits(64))
    for ell in (1, 2):
        fp = FieldParams(ell)
        ok = all(fp.mul(a, fp.inv(a)) == 1 for a in (rng.randrange(1, fp.order) for _ in range(1000)))
        out.append(Check(f"inverses GF(2^{fp.bits})", ok))
    fp = FieldParams(2)
    xs = rng.sample(range(fp.order), 5)
    pts = [(x, rng.randrange(fp.order)) for x in xs]
    coeffs = fp.interpolate(pts)
    out.append(Check("interpolation round-trip n=4", all(fp.evaluate(coeffs, x) == y for x, y in pts)))
    fp = FieldParams(1)
    ok = True
    for _ in range(5):
        counts = V.polynomial_value_counts(fp, rng.sample(range(fp.order), 3))
        ok &= bool((counts == 1).all())
    out.append(Check("3-wise independence GF(64), 5 point sets", ok))
    _, sampler = choose_field_params(10, GeoSample(2, 2), 1)
    rows = V.m0_sandwich(sampler)
    ok = all(r["within"] and r["near_one"] and r["dominates"] for r in rows)
    out.append(Check("empty-bin sampler sandwich m=10 n=2", ok, f"d0={sampler.d0} q={sampler.q} r={sampler.r}"))
    return out


def run_suite(name, seed=None, trials=None):
    stream = RandomStream(seed, label=f"verify-{name}")
    fn = globals()[f"suite_{name}"]
    return fn(stream, trials)
