"""Dataset access: QM9 subsets and the offline synthetic stand-in."""

from .qm9 import (
    E_GAP,
    E_LUMO,
    qm9_from_csv,
    random_qm9_molecule,
    surrogate_properties,
    synthetic_qm9,
    write_dataset_csv,
)

__all__ = [
    "E_GAP",
    "E_LUMO",
    "qm9_from_csv",
    "random_qm9_molecule",
    "surrogate_properties",
    "synthetic_qm9",
    "write_dataset_csv",
]
