"""QM9-style dataset access with an offline synthetic fallback.

``qm9_from_csv`` draws a seeded subset from a local copy of the public
QM9 export when one is available.  Without network or a local file, the
``synthetic_qm9`` sampler produces a deterministic set of QM9-scale
molecules (up to 9 heavy atoms over C, N, O, F) with surrogate orbital
properties: a locally additive part plus a tight-binding eigenvalue
term, scaled to Hartree-like magnitudes.  The surrogate is not DFT and
is clearly labeled as a stand-in wherever it is used.
"""

from __future__ import annotations

import csv

import numpy as np

from ..chem import (
    DEFAULT_TABLE,
    ElementTable,
    Molecule,
    aromatic_ring_count,
    parse_smiles,
    ring_count,
    write_smiles,
)

E_LUMO = "E_lumo"
E_GAP = "E_gap"

_ALPHA = {"C": -0.300, "N": -0.340, "O": -0.380, "F": -0.420,
          "S": -0.330, "Cl": -0.400, "Br": -0.390}
_BETA = 0.070
_ATOM_L = {"C": -0.004, "N": -0.009, "O": -0.013, "F": -0.016,
           "S": -0.006, "Cl": -0.011, "Br": -0.010}
_ORDER_L = {1: 0.003, 2: -0.007, 3: -0.012}
_ATOM_G = {"C": -0.002, "N": -0.004, "O": -0.006, "F": -0.008,
           "S": -0.003, "Cl": -0.005, "Br": -0.005}
_ORDER_G = {1: 0.000, 2: -0.012, 3: -0.020}
_W_LUMO = 0.30
_W_GAP = 0.35


def _tight_binding(m: Molecule):
    n = len(m)
    H = np.zeros((n, n))
    for i, e in enumerate(m.elements):
        H[i, i] = _ALPHA[e]
    for i, j, order in m.bonds:
        H[i, j] = H[j, i] = -_BETA * order
    ev = np.linalg.eigvalsh(H)
    occ = n // 2
    if occ == 0:
        return float(ev[0]), 0.15
    lumo = float(ev[occ]) if occ < n else float(ev[-1])
    gap = lumo - float(ev[occ - 1])
    return lumo, gap


def surrogate_properties(m: Molecule) -> dict:
    """Deterministic (E_lumo, E_gap) surrogate in Hartree-like units."""
    tb_lumo, tb_gap = _tight_binding(m)
    rc = ring_count(m)
    ac = aromatic_ring_count(m)
    lumo = (
        0.02
        + sum(_ATOM_L[e] for e in m.elements)
        + sum(_ORDER_L[o] for _, _, o in m.bonds)
        + 0.006 * rc
        - 0.010 * ac
        + _W_LUMO * (tb_lumo + 0.25)
    )
    gap = (
        0.27
        + sum(_ATOM_G[e] for e in m.elements)
        + sum(_ORDER_G[o] for _, _, o in m.bonds)
        + 0.004 * rc
        - 0.015 * ac
        + _W_GAP * (tb_gap - 0.10)
    )
    return {E_LUMO: lumo, E_GAP: gap}


def random_qm9_molecule(
    rng, max_atoms: int = 9, table: ElementTable = DEFAULT_TABLE
) -> Molecule:
    """One random connected valence-valid molecule, QM9-sized."""
    symbols = table.symbols
    n = int(rng.integers(1, max_atoms + 1))
    while True:
        elements = [symbols[rng.integers(len(symbols))] for _ in range(n)]
        free = [table.valence(e) for e in elements]
        bonds = {}
        ok = True
        for v in range(1, n):
            anchors = [u for u in range(v) if free[u] >= 1]
            if not anchors:
                ok = False
                break
            u = int(anchors[rng.integers(len(anchors))])
            max_order = min(free[u], free[v], 3)
            order = 1
            if max_order > 1 and rng.random() < 0.35:
                order = int(rng.integers(2, max_order + 1))
            bonds[(u, v)] = order
            free[u] -= order
            free[v] -= order
        if not ok:
            continue
        if n >= 3:
            for _ in range(int(rng.integers(0, 3))):
                if rng.random() > 0.3:
                    continue
                cands = [
                    (u, v)
                    for u in range(n)
                    for v in range(u + 1, n)
                    if (u, v) not in bonds and free[u] >= 1 and free[v] >= 1
                ]
                if not cands:
                    break
                u, v = cands[rng.integers(len(cands))]
                bonds[(u, v)] = 1
                free[u] -= 1
                free[v] -= 1
        return Molecule.from_graph(
            elements, [(u, v, o) for (u, v), o in bonds.items()], table
        )


def synthetic_qm9(n: int = 1000, seed: int = 20240901, max_atoms: int = 9):
    """Deterministic QM9-scale molecules with surrogate properties.

    Returns (molecules, {property name: list of values}).
    """
    rng = np.random.default_rng(seed)
    mols = [random_qm9_molecule(rng, max_atoms) for _ in range(n)]
    lumo, gap = [], []
    for m in mols:
        p = surrogate_properties(m)
        lumo.append(p[E_LUMO])
        gap.append(p[E_GAP])
    return mols, {E_LUMO: lumo, E_GAP: gap}


def qm9_from_csv(path, n: int = 1000, seed: int = 0):
    """Seeded random subset of a local QM9 CSV export.

    Accepts `smiles` plus `lumo`/`E_lumo` and `gap`/`E_gap` columns.
    Rows whose SMILES fall outside the supported subset are skipped.
    """
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        cols = {c.lower(): c for c in reader.fieldnames or []}
        smiles_col = cols.get("smiles")
        lumo_col = cols.get("lumo") or cols.get("e_lumo")
        gap_col = cols.get("gap") or cols.get("e_gap")
        if not (smiles_col and lumo_col and gap_col):
            raise ValueError("CSV needs smiles, lumo and gap columns")
        for row in reader:
            rows.append((row[smiles_col], float(row[lumo_col]), float(row[gap_col])))
    rng = np.random.default_rng(seed)
    rng.shuffle(rows)
    mols, lumo, gap = [], [], []
    for smiles, e_lumo, e_gap in rows:
        if len(mols) == n:
            break
        try:
            mols.append(parse_smiles(smiles))
        except Exception:
            continue
        lumo.append(e_lumo)
        gap.append(e_gap)
    if len(mols) < n:
        raise ValueError(f"only {len(mols)} usable rows in {path}")
    return mols, {E_LUMO: lumo, E_GAP: gap}


def write_dataset_csv(path, mols, properties: dict):
    """CSV with a smiles column plus one column per property."""
    names = list(properties)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["smiles"] + names)
        for i, m in enumerate(mols):
            writer.writerow(
                [write_smiles(m)] + [repr(properties[name][i]) for name in names]
            )
