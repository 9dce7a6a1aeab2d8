"""Fast generator and verification toolkit for the smallest-unused
shared-factor sequence (1, 2, 4, 6, 3, 9, 12, ...) and its gcd-threshold
generalizations."""

from .analysis import (
    C_PRIME,
    FitSample,
    TermClass,
    classify_term,
    fit_c,
    fit_report,
    line_residuals,
    predicted_index,
    prime_position_estimate,
    ratio_extremes,
    smooth,
)
from .factor_sieve import FactorTable, build_spf
from .generator import EkgGenerator, Rule, Term, naive_generate, read_dump, write_dump
from .permutation import (
    CycleRecord,
    PermutationView,
    build_view,
    cycle_of,
    cycle_with_autoextend,
    enumerate_cycles,
    verify_prefix_coverage,
)

__version__ = "0.1.0"

__all__ = [
    "C_PRIME",
    "CycleRecord",
    "EkgGenerator",
    "FactorTable",
    "FitSample",
    "PermutationView",
    "Rule",
    "Term",
    "TermClass",
    "build_spf",
    "build_view",
    "classify_term",
    "cycle_of",
    "cycle_with_autoextend",
    "enumerate_cycles",
    "fit_c",
    "fit_report",
    "line_residuals",
    "naive_generate",
    "predicted_index",
    "prime_position_estimate",
    "ratio_extremes",
    "read_dump",
    "smooth",
    "verify_prefix_coverage",
    "write_dump",
]
