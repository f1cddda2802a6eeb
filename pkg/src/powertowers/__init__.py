"""Power towers of rationals: enumeration, evaluation, and sequence harnesses.

The package enumerates finite power towers of positive rationals in weight
order with value-level dedup, evaluates them to certified precision, and
drives two classical sequence procedures (nested-interval refinement and
the digit-array diagonal) over pluggable sources, plus a density probe for
how well the stream approximates a target number.
"""

from .approx import (
    NAMED_TARGETS,
    DensityProfile,
    ProfileRow,
    TargetSpec,
    best_approx,
    certified_error,
    density_profile,
    error_string,
)
from .cantor import (
    DEFAULT_SCAN_BUDGET,
    BudgetExhausted,
    DiagonalElement,
    DiagonalResult,
    DifferenceProfile,
    DifferenceRow,
    Eq15Example,
    FileStream,
    NestedLevel,
    NestedTrace,
    RationalsCalkinWilf,
    SequenceSource,
    SourceItem,
    TowerEnumeration,
    default_digit_rule,
    diagonal,
    diagonal_difference_profile,
    eq15_sequence,
    index_of_value,
    nested_intervals,
    series_string,
)
from .enumeration import (
    CheckpointError,
    DedupLedger,
    Enumerator,
    FlagEvent,
    PrefixReport,
    SequenceEntry,
    entry_record,
    generate_weight_block,
)
from .evaluator import (
    DEFAULT_CAP_DIGITS,
    DEFAULT_START_DIGITS,
    Comparison,
    DigitUndecidable,
    PrecisionCapExceeded,
    RealBall,
    compare_values,
    decimal_digits,
    digits_to_bits,
    eval_ball,
    eval_interval,
)
from .expr import Atom, ParseError, Rational, Tower, parse, render, tower
from .reference_listing import (
    KNOWN_DUPLICATES,
    KNOWN_EXTRAS,
    REFERENCE_LISTING,
    REPRODUCIBLE_COUNT,
    ReferenceEntry,
)
from .values import BigPow, Exact, Pw, Rad, classify, exact_rational

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "BigPow",
    "BudgetExhausted",
    "CheckpointError",
    "Comparison",
    "DEFAULT_CAP_DIGITS",
    "DEFAULT_SCAN_BUDGET",
    "DEFAULT_START_DIGITS",
    "DedupLedger",
    "DensityProfile",
    "DiagonalElement",
    "DiagonalResult",
    "DifferenceProfile",
    "DifferenceRow",
    "DigitUndecidable",
    "Enumerator",
    "Eq15Example",
    "Exact",
    "FileStream",
    "FlagEvent",
    "KNOWN_DUPLICATES",
    "KNOWN_EXTRAS",
    "NAMED_TARGETS",
    "NestedLevel",
    "NestedTrace",
    "ParseError",
    "PrecisionCapExceeded",
    "PrefixReport",
    "ProfileRow",
    "Pw",
    "Rad",
    "Rational",
    "RationalsCalkinWilf",
    "RealBall",
    "REFERENCE_LISTING",
    "REPRODUCIBLE_COUNT",
    "ReferenceEntry",
    "SequenceEntry",
    "SequenceSource",
    "SourceItem",
    "TargetSpec",
    "Tower",
    "TowerEnumeration",
    "best_approx",
    "certified_error",
    "classify",
    "compare_values",
    "decimal_digits",
    "default_digit_rule",
    "density_profile",
    "diagonal",
    "diagonal_difference_profile",
    "digits_to_bits",
    "entry_record",
    "eq15_sequence",
    "error_string",
    "eval_ball",
    "eval_interval",
    "exact_rational",
    "generate_weight_block",
    "index_of_value",
    "nested_intervals",
    "parse",
    "render",
    "series_string",
    "tower",
]
