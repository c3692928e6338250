"""Persistent branchable workflow tree (MolData store)."""

from .methods import IngestError, ingest_csv, load_dataset, load_feature_set, run_method
from .store import (
    DATASET,
    FEATURE_SET,
    GENERATION_RESULT,
    KINDS,
    LINEAGE,
    MERGED_FEATURE_SET,
    MODEL,
    NOTE,
    SEARCH_RESULT,
    LineageError,
    MolDataNode,
    Workspace,
    WorkspaceError,
)

__all__ = [
    "DATASET",
    "FEATURE_SET",
    "GENERATION_RESULT",
    "IngestError",
    "KINDS",
    "LINEAGE",
    "LineageError",
    "MERGED_FEATURE_SET",
    "MODEL",
    "MolDataNode",
    "NOTE",
    "SEARCH_RESULT",
    "Workspace",
    "WorkspaceError",
    "ingest_csv",
    "load_dataset",
    "load_feature_set",
    "run_method",
]
