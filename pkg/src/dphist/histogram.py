"""Datasets, partial histograms, and the two direct release algorithms."""

from dataclasses import dataclass
from fractions import Fraction

from sortedcontainers import SortedDict

from .errors import FormatError, InfeasibleParameters, InvalidParameter

__all__ = [
    "Dataset",
    "PartialHistogram",
    "true_counts",
    "basic_histogram",
    "stability_histogram",
    "stability_threshold",
    "stability_delta",
]


@dataclass(frozen=True)
class Dataset:
    """An ordered tuple of ``n >= 1`` rows, each a label in ``[1, m]``."""

    m: int
    rows: tuple

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise InvalidParameter(f"universe size must be a positive integer, got {self.m!r}")
        rows = tuple(self.rows)
        if not rows:
            raise InvalidParameter("a dataset needs at least one row")
        for i, x in enumerate(rows):
            if not isinstance(x, int) or not 1 <= x <= self.m:
                raise InvalidParameter(f"row {i} holds label {x!r}, outside [1, {self.m}]")
        object.__setattr__(self, "rows", rows)

    @property
    def n(self):
        return len(self.rows)

    def neighbors(self):
        """Every dataset obtained by changing exactly one row."""
        for i, x in enumerate(self.rows):
            for y in range(1, self.m + 1):
                if y != x:
                    yield Dataset(self.m, self.rows[:i] + (y,) + self.rows[i + 1:])

    @classmethod
    def parse(cls, text):
        lines = text.splitlines()
        if not lines:
            raise FormatError("empty dataset file", line=1)
        head = lines[0].split()
        if len(head) != 2:
            raise FormatError("header must be 'm n'", line=1)
        m, n = (_parse_int(tok, 1) for tok in head)
        if n < 1:
            raise FormatError("n must be at least 1", line=1)
        body = [(i + 2, ln.strip()) for i, ln in enumerate(lines[1:]) if ln.strip()]
        if len(body) != n:
            raise FormatError(f"header declares {n} rows but the file holds {len(body)}",
                              line=len(lines))
        rows = []
        for lineno, tok in body:
            x = _parse_int(tok, lineno)
            if not 1 <= x <= m:
                raise FormatError(f"label {x} outside [1, {m}]", line=lineno)
            rows.append(x)
        return cls(m, tuple(rows))

    def serialize(self):
        return f"{self.m} {self.n}\n" + "".join(f"{x}\n" for x in self.rows)

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="ascii") as fh:
                return cls.parse(fh.read())
        except UnicodeDecodeError:
            raise FormatError(f"{path}: dataset file must be ASCII") from None


def _parse_int(tok, lineno):
    if not tok.isascii() or not tok.isdigit():
        raise FormatError(f"expected a nonnegative decimal integer, got {tok!r}", line=lineno)
    return int(tok)


@dataclass(frozen=True)
class PartialHistogram:
    """Sorted ``(label, count)`` pairs; bins not listed are implicitly zero."""

    entries: tuple
    m: int
    n: int

    def __post_init__(self):
        entries = tuple((int(x), int(c)) for x, c in self.entries)
        prev = 0
        for x, c in entries:
            if x <= prev:
                raise InvalidParameter("histogram labels must be strictly increasing")
            if x > self.m:
                raise InvalidParameter(f"label {x} outside [1, {self.m}]")
            if not 0 <= c <= self.n:
                raise InvalidParameter(f"count {c} for label {x} outside [0, {self.n}]")
            prev = x
        object.__setattr__(self, "entries", entries)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def count(self, x):
        return self.as_dict().get(x, 0)

    def as_dict(self):
        return dict(self.entries)

    def serialize(self, pad_to=None):
        """``label count`` lines; ``pad_to`` appends ``0 0`` sentinels up to that many lines."""
        lines = [f"{x} {c}\n" for x, c in self.entries]
        if pad_to is not None:
            if pad_to < len(lines):
                raise InvalidParameter(f"cannot pad {len(lines)} entries down to {pad_to}")
            lines.extend(["0 0\n"] * (pad_to - len(lines)))
        return "".join(lines)

    @classmethod
    def parse(cls, text, m, n):
        entries = []
        for lineno, raw in enumerate(text.split("\n"), start=1):
            if not raw:
                continue
            parts = raw.split(" ")
            if len(parts) != 2:
                raise FormatError("expected 'label count'", line=lineno)
            x, c = (_parse_int(tok, lineno) for tok in parts)
            if x == 0 and c == 0:
                continue   # padding sentinel
            entries.append((x, c))
        try:
            return cls(tuple(entries), m, n)
        except InvalidParameter as exc:
            raise FormatError(str(exc)) from None


def true_counts(dataset):
    """Nonzero bin counts, in ascending label order."""
    counts = SortedDict()
    for x in dataset.rows:
        counts[x] = counts.get(x, 0) + 1
    return counts


def _check_mechanism(mech, dataset):
    if mech.n != dataset.n:
        raise InvalidParameter(f"mechanism handles n={mech.n} but the dataset has {dataset.n} rows")


def noisy_counts(mech, labels, counts, stream):
    """``mech(c_x, u_x)`` for each label, drawing ``u_x`` in the given order."""
    return [(x, mech.evaluate(counts.get(x, 0), stream.uniform(mech.d))) for x in labels]


def basic_histogram(mech, labels, dataset, stream):
    """Noisy count for every bin in ``labels``.

    The label set must not depend on the data; that is the caller's job."""
    _check_mechanism(mech, dataset)
    labels = sorted(set(labels))
    if labels and not (1 <= labels[0] and labels[-1] <= dataset.m):
        raise InvalidParameter(f"labels must lie in [1, {dataset.m}]")
    entries = noisy_counts(mech, labels, true_counts(dataset), stream)
    return PartialHistogram(tuple(entries), dataset.m, dataset.n)


def stability_histogram(mech, b, dataset, stream):
    """Noise the nonzero bins and keep those whose noisy count exceeds ``b``."""
    if not 0 <= b <= dataset.n:
        raise InvalidParameter(f"threshold b={b} outside [0, {dataset.n}]")
    _check_mechanism(mech, dataset)
    counts = true_counts(dataset)
    entries = noisy_counts(mech, counts.keys(), counts, stream)
    return PartialHistogram(tuple((x, c) for x, c in entries if c > b), dataset.m, dataset.n)


def stability_delta(mech, b):
    """Exact ``2 * Pr[M(1, U) > b]``."""
    return 2 * Fraction(mech.d - mech.cdf(1, b), mech.d)


def stability_threshold(mech, delta_den):
    """Least ``b`` in ``[0, n]`` with ``2 * Pr[M(1, U) > b] <= 1/delta_den``."""
    if not isinstance(delta_den, int) or delta_den < 1:
        raise InvalidParameter("delta must be 1/D with integer D >= 1")

    def ok(b):
        return 2 * delta_den * (mech.d - mech.cdf(1, b)) <= mech.d

    if not ok(mech.n):
        # unreachable for mechanisms with F(1, n) = d; kept for foreign mechanisms
        raise InfeasibleParameters(
            f"delta-infeasible: smallest achievable delta is {stability_delta(mech, mech.n)}")
    lo, hi = 0, mech.n
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo
