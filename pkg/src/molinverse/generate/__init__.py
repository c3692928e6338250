"""Isomorph-free structure generation under count constraints."""

from .core import (
    GenerationSpec,
    GenerationStats,
    UNBOUNDED,
    check_termination,
    generate,
    ranges_ok,
    satisfy_constraint,
    spec_from_vector,
)
from .supervertex import generate_supervertex

__all__ = [
    "GenerationSpec",
    "GenerationStats",
    "UNBOUNDED",
    "check_termination",
    "generate",
    "generate_supervertex",
    "ranges_ok",
    "satisfy_constraint",
    "spec_from_vector",
]
