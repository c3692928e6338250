"""Constrained feature-space search: rules, feasibility index, MC-PSO."""

from .feasibility import (
    FeasibilityIndex,
    FeasibilityResult,
    build_feasibility_index,
    index_from_text,
    index_to_text,
    is_feasible,
    molecule_tuple,
    vector_tuple,
)
from .pso import (
    Candidate,
    PENALTY,
    PSOConfig,
    PropertyTarget,
    TargetSpec,
    mc_pso,
    pso_minimize,
)
from .rules import (
    GE,
    LE,
    LinearRule,
    RuleSet,
    default_rules,
    rules_from_text,
    rules_to_text,
)

__all__ = [
    "Candidate",
    "FeasibilityIndex",
    "FeasibilityResult",
    "GE",
    "LE",
    "LinearRule",
    "PENALTY",
    "PSOConfig",
    "PropertyTarget",
    "RuleSet",
    "TargetSpec",
    "build_feasibility_index",
    "default_rules",
    "index_from_text",
    "index_to_text",
    "is_feasible",
    "mc_pso",
    "molecule_tuple",
    "pso_minimize",
    "rules_from_text",
    "rules_to_text",
    "vector_tuple",
]
