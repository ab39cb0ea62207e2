"""Semimetric spaces with explicit triangle functions, contraction
classification, Picard iteration with certified a-priori bounds, and
brute-force oracles on finite instances."""

from .contraction import (
    ContractionKind,
    ContractionCertificate,
    ConstantsEstimate,
    SelfMap,
    StepFactorResult,
    ApplicabilityRecord,
    applicability,
    defining_rhs,
    estimate_min_constants,
    step_contraction_factor,
    verify_contraction,
)
from .expressions import (
    Expression,
    ExpressionError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    parse_expression,
)
from .search import Finding, SearchConfig, SearchResult, counterexample_search
from .solver import (
    BoundReport,
    BoundUnavailable,
    DomainEscapeError,
    IterationTrace,
    a_priori_bound,
    brute_force_fixed_points,
    picard_iterate,
    verify_bound,
)
from .space import (
    FiniteSemimetricSpace,
    IntervalSpace,
    SpaceReport,
    StructuralError,
    TriangleViolation,
    check_generalized_triangle,
    continuity_harness,
    default_battery,
    minimal_b_constant,
    space_from_json,
    validate_semimetric,
)
from .trifun import (
    AxiomReport,
    ChainBoundReport,
    EvaluationError,
    HomogeneityReport,
    LimitDeviationReport,
    TriangleFunctionSpec,
    additive,
    bscaled,
    chain_bound_constant,
    chain_report,
    chain_value,
    check_axioms,
    check_homogeneity,
    check_limit_deviation,
    custom,
    evaluate,
    maximum,
    power,
    unit_profile,
    unit_profile_inverse,
)

__version__ = "0.1.0"

__all__ = [
    "ApplicabilityRecord",
    "AxiomReport",
    "BoundReport",
    "BoundUnavailable",
    "ChainBoundReport",
    "ConstantsEstimate",
    "ContractionCertificate",
    "ContractionKind",
    "DomainEscapeError",
    "EvaluationError",
    "Expression",
    "ExpressionError",
    "ExpressionSyntaxError",
    "Finding",
    "FiniteSemimetricSpace",
    "HomogeneityReport",
    "IntervalSpace",
    "IterationTrace",
    "LimitDeviationReport",
    "SearchConfig",
    "SearchResult",
    "SelfMap",
    "SpaceReport",
    "StepFactorResult",
    "StructuralError",
    "TriangleFunctionSpec",
    "TriangleViolation",
    "UnknownIdentifierError",
    "a_priori_bound",
    "additive",
    "applicability",
    "brute_force_fixed_points",
    "bscaled",
    "chain_bound_constant",
    "chain_report",
    "chain_value",
    "check_axioms",
    "check_generalized_triangle",
    "check_homogeneity",
    "check_limit_deviation",
    "continuity_harness",
    "counterexample_search",
    "custom",
    "default_battery",
    "defining_rhs",
    "estimate_min_constants",
    "evaluate",
    "maximum",
    "minimal_b_constant",
    "parse_expression",
    "picard_iterate",
    "power",
    "space_from_json",
    "step_contraction_factor",
    "unit_profile",
    "unit_profile_inverse",
    "validate_semimetric",
    "verify_bound",
    "verify_contraction",
]
