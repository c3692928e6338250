"""Feature schemas: ordered descriptor lists and their text manifests.

A descriptor is an element count, the ring count, the aromatic-ring
count, or the occurrence count of a fragment pattern.  Order is fixed at
creation: element counts first (configured-set order), then the two ring
descriptors, then fragments sorted by (edge count, canonical key).
"""

from __future__ import annotations

from dataclasses import dataclass

from ..chem import ElementTable, EXTENDED_TABLE, Molecule, canonical_key, molecule_from_key


@dataclass(frozen=True)
class FragmentPattern:
    """A small connected labeled graph keyed by its canonical form."""

    graph: Molecule
    key: str
    edge_count: int

    @classmethod
    def from_graph(cls, graph: Molecule) -> "FragmentPattern":
        return cls(graph, canonical_key(graph), len(graph.bonds))

    @classmethod
    def from_key(cls, key: str) -> "FragmentPattern":
        graph = molecule_from_key(key)
        return cls(graph, key, len(graph.bonds))


# descriptor kinds
ELEMENT = "element"
RINGS = "rings"
AROMATIC_RINGS = "aromatic_rings"
FRAGMENT = "fragment"

_KIND_RANK = {ELEMENT: 0, RINGS: 1, AROMATIC_RINGS: 2, FRAGMENT: 3}


@dataclass(frozen=True)
class Descriptor:
    kind: str
    key: str  # element symbol, "rings", "aromatic_rings", or fragment key
    edge_count: int = 0

    def sort_key(self, table: ElementTable):
        if self.kind == ELEMENT:
            return (0, table.order(self.key), "")
        return (_KIND_RANK[self.kind], self.edge_count, self.key)


@dataclass(frozen=True)
class FeatureSchema:
    descriptors: tuple[Descriptor, ...]
    levels: frozenset[int]
    table: ElementTable = EXTENDED_TABLE

    def __post_init__(self):
        keys = [(d.kind, d.key) for d in self.descriptors]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate descriptor keys in schema")

    def __len__(self) -> int:
        return len(self.descriptors)

    def index_of(self, kind: str, key: str) -> int:
        for i, d in enumerate(self.descriptors):
            if d.kind == kind and d.key == key:
                return i
        raise KeyError((kind, key))

    def fragment_descriptors(self) -> list[tuple[int, Descriptor]]:
        return [(i, d) for i, d in enumerate(self.descriptors) if d.kind == FRAGMENT]

    def element_descriptors(self) -> list[tuple[int, Descriptor]]:
        return [(i, d) for i, d in enumerate(self.descriptors) if d.kind == ELEMENT]

    def filtered(self, keep: set[tuple[str, str]]) -> "FeatureSchema":
        """Sub-schema keeping descriptors whose (kind, key) is in ``keep``."""
        kept = tuple(d for d in self.descriptors if (d.kind, d.key) in keep)
        return FeatureSchema(kept, self.levels, self.table)

    def to_manifest(self) -> str:
        lines = [f"{d.kind}\t{d.key}\t{d.edge_count}" for d in self.descriptors]
        header = f"#levels\t{','.join(str(l) for l in sorted(self.levels))}"
        elems = f"#elements\t{','.join(self.table.symbols)}"
        return "\n".join([header, elems] + lines) + "\n"

    @classmethod
    def from_manifest(cls, text: str) -> "FeatureSchema":
        from ..chem.elements import DEFAULT_TABLE

        levels: frozenset[int] = frozenset()
        table = EXTENDED_TABLE
        descriptors = []
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#levels"):
                _, vals = line.split("\t")
                levels = frozenset(int(v) for v in vals.split(",") if v)
            elif line.startswith("#elements"):
                _, vals = line.split("\t")
                symbols = tuple(vals.split(","))
                table = (
                    DEFAULT_TABLE
                    if symbols == DEFAULT_TABLE.symbols
                    else EXTENDED_TABLE
                )
            else:
                kind, key, edge_count = line.split("\t")
                descriptors.append(Descriptor(kind, key, int(edge_count)))
        return cls(tuple(descriptors), levels, table)


def ordered_schema(
    descriptors, levels, table: ElementTable = EXTENDED_TABLE
) -> FeatureSchema:
    """Schema with the canonical descriptor ordering applied."""
    uniq = {}
    for d in descriptors:
        uniq.setdefault((d.kind, d.key), d)
    ordered = sorted(uniq.values(), key=lambda d: d.sort_key(table))
    return FeatureSchema(tuple(ordered), frozenset(levels), table)


@dataclass(frozen=True)
class FeatureVector:
    schema: FeatureSchema
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.schema):
            raise ValueError("vector length does not match schema")
        if any(v < 0 for v in self.values):
            raise ValueError("feature counts must be non-negative")
