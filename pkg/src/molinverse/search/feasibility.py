"""Data-driven feasibility screening of candidate feature vectors.

Real molecules occupy a thin subset of count space.  The index stores the
4-tuple of connected-subgraph counts (1..4 edges) of every molecule
enumerated exhaustively up to a size cap, plus those of the training
molecules; a candidate vector is feasible only if its own 4-tuple lands
on (or within a Chebyshev radius of) one of these points.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from ..chem import EXTENDED_TABLE, ElementTable, Molecule
from ..features import FRAGMENT, FeatureVector, connected_bond_subsets
from ..generate import GenerationSpec, generate
from .rules import RuleSet

Tuple4 = tuple[int, int, int, int]


@dataclass(frozen=True)
class FeasibilityIndex:
    points: frozenset
    elements: tuple[str, ...]
    max_atoms: int
    dataset_size: int
    tolerance: int = 0

    def __post_init__(self):
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")

    def contains(self, point: Tuple4) -> bool:
        if point in self.points:
            return True
        if self.tolerance == 0:
            return False
        t = self.tolerance
        return any(
            max(abs(a - b) for a, b in zip(point, q)) <= t for q in self.points
        )


def molecule_tuple(m: Molecule) -> Tuple4:
    """Counts of connected bond subsets with 1..4 edges."""
    sizes = Counter(len(s) for s in connected_bond_subsets(m, 4))
    return (sizes[1], sizes[2], sizes[3], sizes[4])


def vector_tuple(x: FeatureVector) -> Tuple4:
    """The candidate's 4-tuple: fragment counts summed by edge count."""
    levels = x.schema.levels
    if not {1, 2, 3, 4} <= levels:
        raise ValueError("schema must cover fragment levels 1..4")
    sums = [0, 0, 0, 0]
    for d, v in zip(x.schema.descriptors, x.values):
        if d.kind == FRAGMENT:
            sums[d.edge_count - 1] += v
    return tuple(sums)


def build_feasibility_index(
    elements,
    max_atoms: int = 7,
    dataset=(),
    table: ElementTable = EXTENDED_TABLE,
    tolerance: int = 0,
    schema=None,
) -> FeasibilityIndex:
    """Exhaustive enumeration up to max_atoms plus dataset tuples.

    With ``schema`` given, each molecule's tuple is computed by encoding
    it in that schema, so the index stays consistent with candidate
    vectors even when the schema covers only part of the fragment
    vocabulary.  Without one, tuples are full connected-subset counts
    (identical when the schema holds the complete vocabulary).
    """
    elements = tuple(elements)
    if max_atoms < 1:
        raise ValueError("max_atoms must be >= 1")
    for e in elements:
        if e not in table:
            raise ValueError(f"element {e!r} outside the configured set")
    if schema is None:
        tuple_of = molecule_tuple
    else:
        from ..features import encode

        def tuple_of(m):
            return vector_tuple(encode(m, schema))

    points = set()
    for size in range(1, max_atoms + 1):
        for combo in itertools.combinations_with_replacement(elements, size):
            spec = GenerationSpec(
                atoms=dict(Counter(combo)),
                max_structures=None,
                edge_augmentation=True,
                table=table,
            )
            for m in generate(spec):
                points.add(tuple_of(m))
    dataset = list(dataset)
    for m in dataset:
        points.add(tuple_of(m))
    return FeasibilityIndex(
        frozenset(points), elements, max_atoms, len(dataset), tolerance
    )


@dataclass(frozen=True)
class FeasibilityResult:
    ok: bool
    reason: str | None = None
    violations: int = 0

    def __bool__(self) -> bool:
        return self.ok


def is_feasible(
    x: FeatureVector, index: FeasibilityIndex | None, rules: RuleSet
) -> FeasibilityResult:
    """Bounds, then linear rules, then index membership.

    The reason names the first failed check; the violation count spans all
    checks so the optimizer's penalty scales with how broken a vector is.
    """
    reason = None
    violations = 0
    for key, (lo, hi) in rules.bounds.items():
        v = x.values[x.schema.index_of(*_split_key(key, x))]
        if not lo <= v <= hi:
            violations += 1
            if reason is None:
                reason = f"bound violated: {key} = {v} outside [{lo}, {hi}]"
    for rule in rules.linears:
        if not rule.holds(x):
            violations += 1
            if reason is None:
                reason = f"rule violated: {rule.describe()}"
    if index is not None and not index.contains(vector_tuple(x)):
        violations += 1
        if reason is None:
            reason = "subgraph-count tuple not in the feasibility index"
    return FeasibilityResult(violations == 0, reason, violations)


def _split_key(key: str, x: FeatureVector):
    # bound keys address descriptors by bare key; kind is recoverable
    for d in x.schema.descriptors:
        if d.key == key:
            return d.kind, d.key
    raise KeyError(f"descriptor {key!r} not in schema")


def index_to_text(index: FeasibilityIndex) -> str:
    lines = [
        f"#elements\t{','.join(index.elements)}",
        f"#max_atoms\t{index.max_atoms}",
        f"#dataset_size\t{index.dataset_size}",
        f"#tolerance\t{index.tolerance}",
    ]
    for p in sorted(index.points):
        lines.append("\t".join(str(v) for v in p))
    return "\n".join(lines) + "\n"


def index_from_text(text: str) -> FeasibilityIndex:
    meta = {}
    points = set()
    for line in text.splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition("\t")
            meta[key] = value
        else:
            points.add(tuple(int(v) for v in line.split("\t")))
    return FeasibilityIndex(
        frozenset(points),
        tuple(e for e in meta.get("elements", "").split(",") if e),
        int(meta.get("max_atoms", 0)),
        int(meta.get("dataset_size", 0)),
        int(meta.get("tolerance", 0)),
    )
