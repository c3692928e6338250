"""Substructure vocabulary extraction and bag-of-counts encoding.

Fragments are connected bond subsets of 1..4 edges; an occurrence is a
distinct bond subset, so symmetric fragments still count once per
placement.  Vocabularies are the union of every fragment seen across a
dataset, and encoding counts each schema descriptor on one molecule.
"""

from __future__ import annotations

from functools import lru_cache

from ..chem import (
    ElementTable,
    EXTENDED_TABLE,
    Molecule,
    aromatic_ring_count,
    canonical_key,
    ring_count,
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

MAX_FRAGMENT_EDGES = 4


def connected_bond_subsets(m: Molecule, max_edges: int = MAX_FRAGMENT_EDGES):
    """All connected bond subsets of m with 1..max_edges bonds.

    Grows each subset by frontier extension; a visited set keyed on the
    sorted bond-index tuple dedupes the different growth orders.
    """
    bonds = m.bonds
    nb = len(bonds)
    # bond adjacency: bonds sharing an atom
    incident: dict[int, list[int]] = {}
    for k, (i, j, _) in enumerate(bonds):
        incident.setdefault(i, []).append(k)
        incident.setdefault(j, []).append(k)
    adjacent_bonds = [set() for _ in range(nb)]
    for ks in incident.values():
        for a in ks:
            for b in ks:
                if a != b:
                    adjacent_bonds[a].add(b)

    seen: set[tuple[int, ...]] = set()
    frontier = [(k,) for k in range(nb)]
    for f in frontier:
        seen.add(f)
    out = list(frontier)
    while frontier:
        nxt = []
        for subset in frontier:
            if len(subset) == max_edges:
                continue
            reachable = set()
            for k in subset:
                reachable |= adjacent_bonds[k]
            for k in reachable:
                if k in subset:
                    continue
                grown = tuple(sorted(subset + (k,)))
                if grown not in seen:
                    seen.add(grown)
                    nxt.append(grown)
        out.extend(nxt)
        frontier = nxt
    return out


@lru_cache(maxsize=200_000)
def _subgraph_key(elements: tuple[str, ...], bonds: tuple) -> str:
    sub = Molecule(elements, bonds, tuple(0 for _ in elements))
    return canonical_key(sub)


def subgraph_of(m: Molecule, bond_subset: tuple[int, ...]) -> tuple:
    """Relabeled (elements, bonds) of the fragment a bond subset spans."""
    atoms = sorted({a for k in bond_subset for a in m.bonds[k][:2]})
    relabel = {a: i for i, a in enumerate(atoms)}
    elements = tuple(m.elements[a] for a in atoms)
    bonds = tuple(
        sorted(
            (relabel[m.bonds[k][0]], relabel[m.bonds[k][1]], m.bonds[k][2])
            for k in bond_subset
        )
    )
    return elements, bonds


def fragment_keys(m: Molecule, levels) -> dict[str, int]:
    """Occurrence count per fragment key for all levels at once."""
    levels = set(levels)
    counts: dict[str, int] = {}
    for subset in connected_bond_subsets(m, max(levels)):
        if len(subset) not in levels:
            continue
        elements, bonds = subgraph_of(m, subset)
        key = _subgraph_key(elements, bonds)
        counts[key] = counts.get(key, 0) + 1
    return counts


def extract_vocabulary(
    dataset, levels, table: ElementTable = EXTENDED_TABLE
) -> FeatureSchema:
    """Schema of every element present, ring counts, and every fragment
    appearing anywhere in the dataset at the requested levels."""
    dataset = list(dataset)
    if not dataset:
        raise ValueError("cannot extract a vocabulary from an empty dataset")
    levels = frozenset(levels)
    if not levels or not levels <= {1, 2, 3, 4}:
        raise ValueError("levels must be a non-empty subset of {1,2,3,4}")

    elements_present: set[str] = set()
    frag_keys: set[str] = set()
    for m in dataset:
        elements_present.update(m.elements)
        frag_keys.update(fragment_keys(m, levels))

    descriptors = [Descriptor(ELEMENT, e) for e in sorted(elements_present)]
    descriptors.append(Descriptor(RINGS, "rings"))
    descriptors.append(Descriptor(AROMATIC_RINGS, "aromatic_rings"))
    for key in frag_keys:
        pattern = FragmentPattern.from_key(key)
        descriptors.append(Descriptor(FRAGMENT, key, pattern.edge_count))
    return ordered_schema(descriptors, levels, table)


def count_fragment(m: Molecule, f: FragmentPattern) -> int:
    """Distinct connected bond subsets of m isomorphic to the fragment."""
    count = 0
    for subset in connected_bond_subsets(m, f.edge_count):
        if len(subset) != f.edge_count:
            continue
        elements, bonds = subgraph_of(m, subset)
        if _subgraph_key(elements, bonds) == f.key:
            count += 1
    return count


def encode(m: Molecule, schema: FeatureSchema) -> FeatureVector:
    """Count every schema descriptor on one molecule."""
    if not len(schema):
        raise ValueError("schema is empty")
    frag_counts = fragment_keys(m, schema.levels) if schema.levels else {}
    values = []
    for d in schema.descriptors:
        if d.kind == ELEMENT:
            values.append(m.heavy_atom_count(d.key))
        elif d.kind == RINGS:
            values.append(ring_count(m))
        elif d.kind == AROMATIC_RINGS:
            values.append(aromatic_ring_count(m))
        else:
            values.append(frag_counts.get(d.key, 0))
    return FeatureVector(schema, tuple(values))


def merge_schemas(a: FeatureSchema, b: FeatureSchema) -> FeatureSchema:
    """Deduplicated union of two schemas in canonical order."""
    if a.table != b.table:
        raise ValueError("schemas were built over different element sets")
    return ordered_schema(
        list(a.descriptors) + list(b.descriptors), a.levels | b.levels, a.table
    )
