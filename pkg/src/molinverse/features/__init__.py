"""Substructure-count features: vocabulary extraction and encoding."""

from .featurize import (
    MAX_FRAGMENT_EDGES,
    connected_bond_subsets,
    count_fragment,
    encode,
    extract_vocabulary,
    fragment_keys,
    merge_schemas,
)
from .schema import (
    AROMATIC_RINGS,
    Descriptor,
    ELEMENT,
    FRAGMENT,
    FeatureSchema,
    FeatureVector,
    FragmentPattern,
    RINGS,
    ordered_schema,
)

__all__ = [
    "AROMATIC_RINGS",
    "Descriptor",
    "ELEMENT",
    "FRAGMENT",
    "FeatureSchema",
    "FeatureVector",
    "FragmentPattern",
    "MAX_FRAGMENT_EDGES",
    "RINGS",
    "connected_bond_subsets",
    "count_fragment",
    "encode",
    "extract_vocabulary",
    "fragment_keys",
    "merge_schemas",
    "ordered_schema",
]
