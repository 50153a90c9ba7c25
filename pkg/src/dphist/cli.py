"""``dphist`` command line: run, eval, verify.

Exit codes: 0 ok, 1 a verification check failed, 2 usage or input error,
3 infeasible parameters.
"""

import argparse
import sys
from fractions import Fraction

from .bigmath import RandomStream, ceil_mul_ln, unit_fraction
from .compact import CompactHistogramRepr, choose_field_params, compact_eval, compact_eval_many, compact_histogram
from .counting import FastSample, GeoSample, accuracy_radius
from .errors import FormatError, InfeasibleParameters, InvalidParameter
from .histogram import Dataset, basic_histogram, stability_delta, stability_histogram, stability_threshold
from .sparse import pure_sparse_histogram
from .suites import SUITES, run_suite

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3
MECHANISMS = ("basic", "stability", "pure-sparse", "compact")
DEFAULT_BETA_DEN = 10


class UsageError(Exception):
    pass


def _unit(text, flag):
    try:
        return unit_fraction(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag} must be a unit fraction 1/E, got {text!r}") from None


def _seed_stream(seed):
    if seed is None:
        return RandomStream()
    try:
        return RandomStream.from_hex(seed)
    except InvalidParameter as exc:
        raise UsageError(f"--seed: {exc}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="dphist", description="Exact differentially private histograms.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="release a histogram")
    run.add_argument("--mechanism", required=True, choices=MECHANISMS)
    run.add_argument("--universe", required=True, type=int, help="universe size m (labels 1..m)")
    run.add_argument("--epsilon", required=True, help="privacy budget 1/E")
    run.add_argument("--delta", help="1/D, required for stability")
    run.add_argument("--beta", help=f"failure probability 1/B (default 1/{DEFAULT_BETA_DEN})")
    run.add_argument("--gamma", help="override the uniform mixture weight 1/G")
    run.add_argument("--counter", choices=("geo", "fast"), default="geo",
                     help="counting mechanism inside compact releases")
    run.add_argument("--input", required=True)
    run.add_argument("--output", required=True)
    run.add_argument("--seed", help="64 hex characters; OS entropy if omitted")
    run.add_argument("--pad-output", action="store_true",
                     help="pad sparse outputs to n lines with '0 0' sentinels")

    ev = sub.add_parser("eval", help="evaluate bins of a compact release")
    ev.add_argument("--repr", required=True)
    group = ev.add_mutually_exclusive_group(required=True)
    group.add_argument("--bin", type=int)
    group.add_argument("--all", action="store_true", help="print 'label count' for every bin")

    ver = sub.add_parser("verify", help="run a self-check suite")
    ver.add_argument("suite", choices=SUITES)
    ver.add_argument("--seed")
    ver.add_argument("--trials", type=int, help="Monte Carlo trials for the accuracy suite")
    return parser


def _run_config(args):
    """Parameter checks that need no data."""
    if args.universe < 1:
        raise UsageError("--universe must be positive")
    cfg = {
        "e_den": _unit(args.epsilon, "--epsilon"),
        "b_den": _unit(args.beta, "--beta") if args.beta else DEFAULT_BETA_DEN,
        "d_den": _unit(args.delta, "--delta") if args.delta else None,
        "g_den": _unit(args.gamma, "--gamma") if args.gamma else None,
    }
    if args.mechanism == "stability" and cfg["d_den"] is None:
        raise UsageError("delta required: --mechanism stability needs --delta 1/D")
    if args.mechanism != "stability" and cfg["d_den"] is not None:
        raise UsageError(f"--delta does not apply to --mechanism {args.mechanism}")
    if args.counter == "fast" and args.mechanism != "compact":
        raise UsageError("--counter only applies to --mechanism compact")
    if cfg["b_den"] < 2:
        raise InfeasibleParameters("beta must be below 1")
    return cfg


def _report(lines):
    for line in lines:
        print(line)


def _run(args):
    cfg = _run_config(args)
    stream = _seed_stream(args.seed)
    try:
        with open(args.input, encoding="ascii") as fh:
            dataset = Dataset.parse(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise FormatError(f"{args.input} is not ASCII") from None
    if dataset.m != args.universe:
        raise UsageError(f"--universe {args.universe} disagrees with the dataset header m={dataset.m}")
    m, n = dataset.m, dataset.n
    e_den, b_den = cfg["e_den"], cfg["b_den"]
    beta = f"1/{b_den}"
    lines = []

    if args.mechanism == "basic":
        g_den = cfg["g_den"] or 2 * m * b_den
        mech = FastSample(n, e_den, g_den)
        hist = basic_histogram(mech, range(1, m + 1), dataset, stream)
        lines += [f"mechanism: basic over all {m} bins, FastSample(n={n}, eps=1/{e_den}, gamma=1/{g_den})",
                  f"privacy: epsilon=1/{e_den} delta=0",
                  f"accuracy: per-query a={accuracy_radius(e_den, 2 * b_den)} beta={beta}; "
                  f"simultaneous a={accuracy_radius(e_den, 2 * m * b_den)} beta={beta}"]
        text = hist.serialize(pad_to=m if args.pad_output else None)
    elif args.mechanism == "stability":
        d_den = cfg["d_den"]
        g_den = cfg["g_den"] or max(2 * n * b_den, 4 * d_den)
        mech = FastSample(n, e_den, g_den)
        b = stability_threshold(mech, d_den)
        hist = stability_histogram(mech, b, dataset, stream)
        t = 2 + accuracy_radius(e_den, 8 * b_den * d_den)
        lines += [f"mechanism: stability, FastSample(n={n}, eps=1/{e_den}, gamma=1/{g_den}), threshold b={b}",
                  f"privacy: epsilon=1/{e_den} delta=1/{d_den} "
                  f"(exact 2*Pr[M(1,U)>b] = {stability_delta(mech, b)})",
                  f"accuracy: per-query a={accuracy_radius(e_den, 2 * b_den)} on counts > t={t} beta={beta}; "
                  f"simultaneous a={2 + accuracy_radius(e_den, 8 * n * b_den * d_den)} beta={beta}"]
        text = hist.serialize(pad_to=n if args.pad_output else None)
    elif args.mechanism == "pure-sparse":
        if m < 2 * n + 1:
            raise InfeasibleParameters(f"pure-sparse needs universe m >= 2n+1 = {2 * n + 1}, got m={m}")
        mech = GeoSample(n, e_den)
        hist = pure_sparse_histogram(mech, e_den, 4 * b_den, dataset, stream)
        lines += [f"mechanism: pure-sparse, GeoSample(n={n}, eps=1/{e_den}), beta1=1/{4 * b_den}",
                  f"privacy: epsilon=1/{e_den} delta=0",
                  f"accuracy: per-query a={accuracy_radius(e_den, 4 * b_den)} on counts > "
                  f"t={2 * accuracy_radius(e_den, 4 * m * b_den)} beta={beta}; "
                  f"simultaneous a={2 * accuracy_radius(e_den, 2 * m * b_den)} beta={beta}"]
        text = hist.serialize(pad_to=n if args.pad_output else None)
    else:
        inner_den = -(-10 * e_den // 9)
        if args.counter == "fast":
            g_den = cfg["g_den"] or 2 * m * b_den
            mech = FastSample(n, inner_den, g_den)
            per_query = ceil_mul_ln(Fraction(5 * e_den), 2 * b_den)
            simultaneous = ceil_mul_ln(Fraction(5 * e_den), 2 * m * b_den)
        else:
            mech = GeoSample(n, inner_den)
            per_query = accuracy_radius(inner_den, b_den)
            simultaneous = accuracy_radius(inner_den, m * b_den)
        fp, sampler = choose_field_params(m, mech, e_den)
        rep = compact_histogram(mech, sampler, dataset, stream)
        lines += [f"mechanism: compact, {type(mech).__name__}(n={n}, eps'=1/{inner_den}), "
                  f"field l={fp.ell} d0=2^{fp.bits}",
                  f"privacy: epsilon=1/{e_den} delta=0",
                  f"accuracy: per-query a={per_query} beta={beta}; "
                  f"simultaneous a={simultaneous} beta={beta}"]
        text = rep.serialize()

    with open(args.output, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
    _report(lines)
    return EXIT_OK


def _eval(args):
    try:
        with open(args.repr, encoding="ascii") as fh:
            rep = CompactHistogramRepr.parse(fh.read())
    except OSError as exc:
        raise UsageError(f"cannot read {args.repr}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise FormatError(f"{args.repr} is not ASCII") from None
    if args.all:
        for x, c in enumerate(compact_eval_many(rep), start=1):
            print(f"{x} {c}")
        return EXIT_OK
    if not 1 <= args.bin <= rep.m:
        raise UsageError(f"--bin {args.bin} outside [1, {rep.m}]")
    print(compact_eval(rep, args.bin))
    return EXIT_OK


def _verify(args):
    seed = None
    if args.seed is not None:
        seed = _seed_stream(args.seed)._key
    failed = False
    for check in run_suite(args.suite, seed=seed, trials=args.trials):
        print(check.line())
        failed |= not check.ok
    return EXIT_CHECK if failed else EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _run, "eval": _eval, "verify": _verify}[args.command]
    try:
        return handler(args)
    except InfeasibleParameters as exc:
        print(f"dphist: infeasible parameters: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, FormatError) as exc:
        print(f"dphist: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameter as exc:
        print(f"dphist: invalid parameter: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
