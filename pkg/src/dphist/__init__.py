"""Exact, finite-precision differentially private histograms."""

from .bigmath import RandomStream, ceil_log2, ceil_mul_ln, unit_fraction
from .compact import (
    CompactHistogramRepr,
    EmptyBinSampler,
    choose_field_params,
    compact_eval,
    compact_histogram,
)
from .counting import FastSample, GeoSample, make_mechanism, mixture_release
from .errors import BudgetExceeded, FormatError, InfeasibleParameters, InvalidParameter
from .gf2 import FieldParams
from .histogram import (
    Dataset,
    PartialHistogram,
    basic_histogram,
    stability_histogram,
    stability_threshold,
    true_counts,
)
from .sparse import (
    approx_bin_sample,
    approx_conv_exp,
    approx_ord_sample,
    distinct_sample,
    kh_prime,
    ord_sample,
    pure_sparse_histogram,
    sparse_histogram,
)

__version__ = "0.1.0"
