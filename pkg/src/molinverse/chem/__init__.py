"""Molecular graphs: SMILES I/O, canonical labeling, ring perception."""

from .canon import (
    CanonicalForm,
    canonical_key,
    canonical_labeling,
    canonize_graph,
    molecule_from_key,
)
from .elements import (
    ChemError,
    DEFAULT_TABLE,
    ElementTable,
    EXTENDED_TABLE,
    UnknownElementError,
)
from .molecule import ConnectivityError, Molecule, ValenceError
from .rings import aromatic_ring_count, ring_count, sssr
from .smiles import SmilesError, parse_smiles, write_smiles

__all__ = [
    "CanonicalForm",
    "ChemError",
    "ConnectivityError",
    "DEFAULT_TABLE",
    "ElementTable",
    "EXTENDED_TABLE",
    "Molecule",
    "SmilesError",
    "UnknownElementError",
    "ValenceError",
    "aromatic_ring_count",
    "canonical_key",
    "canonical_labeling",
    "canonize_graph",
    "molecule_from_key",
    "parse_smiles",
    "ring_count",
    "sssr",
    "write_smiles",
]
