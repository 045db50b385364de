"""Permutation families that shatter k-tuples: constructions, checkers and exact search."""
from .checkers import (
    CoverageReport,
    count_orders,
    coverage,
    es_guarantee,
    es_witness,
    follows_everywhere,
    satisfies_partial,
    satisfies_total,
    shattered_fraction,
)
from .constructions import (
    fractional_family,
    kcube_step,
    little_construction,
    perfect_family,
    q34,
    shatter_family,
)
from .core import DomainError, Family, FamilyFormatError, Permutation, parse_family, format_family
from .oracle import SearchReport, max_shattered, min_family_size, monotonicity_probe
from .separators import PartitionSystem, binary_splits, separating_system

__all__ = [
    "CoverageReport",
    "DomainError",
    "Family",
    "FamilyFormatError",
    "PartitionSystem",
    "Permutation",
    "SearchReport",
    "binary_splits",
    "count_orders",
    "coverage",
    "es_guarantee",
    "es_witness",
    "follows_everywhere",
    "format_family",
    "fractional_family",
    "kcube_step",
    "little_construction",
    "max_shattered",
    "min_family_size",
    "monotonicity_probe",
    "parse_family",
    "perfect_family",
    "q34",
    "satisfies_partial",
    "satisfies_total",
    "separating_system",
    "shatter_family",
    "shattered_fraction",
]
