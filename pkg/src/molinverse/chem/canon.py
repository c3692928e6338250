"""Canonical labeling by partition refinement and individualization.

The search keeps an ordered partition of vertices, refines it to an
equitable one, and on ties individualizes each vertex of the first largest
non-singleton cell.  Every discrete leaf yields a candidate labeling; the
canonical form is the lexicographically smallest serialized relabeling,
and leaf pairs with equal serializations yield automorphism generators
from which vertex orbits are accumulated.

The canonizer is generic over (vertex colors, edge-order adjacency) so the
same machinery serves molecules and condensed fragment graphs.
"""

from __future__ import annotations

from dataclasses import dataclass

from .molecule import Molecule


@dataclass(frozen=True)
class CanonicalForm:
    key: str
    labeling: tuple[int, ...]  # vertex index -> canonical position
    orbits: tuple[tuple[int, ...], ...]
    generators: tuple[tuple[int, ...], ...] = ()  # automorphism perms found


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def groups(self) -> tuple[tuple[int, ...], ...]:
        by_root: dict[int, list[int]] = {}
        for v in range(len(self.parent)):
            by_root.setdefault(self.find(v), []).append(v)
        return tuple(tuple(sorted(g)) for g in sorted(by_root.values()))


def _refine(partition: list[list[int]], adj: list[dict[int, int]]) -> list[list[int]]:
    """Refine an ordered partition to equitability.

    A vertex signature is the multiset of (bond order, neighbor cell) pairs;
    cells splitting on signatures keep a deterministic sub-cell order so the
    whole search is reproducible.
    """
    n = sum(len(c) for c in partition)
    cell_of = [0] * n
    while True:
        for ci, cell in enumerate(partition):
            for v in cell:
                cell_of[v] = ci
        new_partition: list[list[int]] = []
        changed = False
        for cell in partition:
            if len(cell) == 1:
                new_partition.append(cell)
                continue
            sigs: dict[tuple, list[int]] = {}
            for v in cell:
                sig = tuple(sorted((order, cell_of[w]) for w, order in adj[v].items()))
                sigs.setdefault(sig, []).append(v)
            if len(sigs) == 1:
                new_partition.append(cell)
            else:
                changed = True
                for sig in sorted(sigs):
                    new_partition.append(sigs[sig])
        if not changed:
            return new_partition
        partition = new_partition


def _serialize(perm_inv: list[int], colors, adj) -> tuple:
    """Relabeled-graph code: color sequence then upper-triangular orders."""
    n = len(perm_inv)
    code = [tuple(colors[v] for v in perm_inv)]
    for a in range(n):
        va = perm_inv[a]
        row = adj[va]
        for b in range(a + 1, n):
            code.append(row.get(perm_inv[b], 0))
    return tuple(code)


def canonize_graph(colors: list, adj: list[dict[int, int]]) -> CanonicalForm:
    """Canonical form of a vertex-colored, edge-order-weighted graph.

    ``colors`` entries must be mutually comparable (use tuples of strings
    and ints).  Returns the key string, the labeling (vertex -> canonical
    position) and the automorphism orbits.
    """
    n = len(colors)
    cells: dict = {}
    for v in range(n):
        cells.setdefault(colors[v], []).append(v)
    partition = [cells[c] for c in sorted(cells)]

    uf = _UnionFind(n)
    best: dict = {"code": None, "perm": None}
    leaves: dict[tuple, list[int]] = {}
    gens: list[tuple[int, ...]] = []

    def descend(partition: list[list[int]]):
        partition = _refine(partition, adj)
        target = None
        target_idx = -1
        for ci, cell in enumerate(partition):
            if len(cell) > 1 and (target is None or len(cell) > len(target)):
                target = cell
                target_idx = ci
        if target is None:
            # discrete partition: a candidate labeling
            perm_inv = [cell[0] for cell in partition]
            code = _serialize(perm_inv, colors, adj)
            if code in leaves:
                other = leaves[code]
                # positions agree, so other[k] -> perm_inv[k] is an automorphism
                g = [0] * n
                for k in range(n):
                    uf.union(other[k], perm_inv[k])
                    g[other[k]] = perm_inv[k]
                gens.append(tuple(g))
            else:
                leaves[code] = perm_inv
                if best["code"] is None or code < best["code"]:
                    best["code"] = code
                    best["perm"] = perm_inv
            return
        tried: list[int] = []
        for v in target:
            # skip vertices already known symmetric to a tried one
            if any(uf.find(v) == uf.find(u) for u in tried):
                continue
            tried.append(v)
            child = (
                partition[:target_idx]
                + [[v], [w for w in target if w != v]]
                + partition[target_idx + 1 :]
            )
            descend(child)

    descend(partition)
    perm_inv = best["perm"]
    labeling = [0] * n
    for pos, v in enumerate(perm_inv):
        labeling[v] = pos
    key = _key_string(best["code"], n)
    return CanonicalForm(key, tuple(labeling), uf.groups(), tuple(gens))


def _key_string(code: tuple, n: int) -> str:
    color_part = ";".join(",".join(str(x) for x in c) for c in code[0])
    tri = "".join(str(d) for d in code[1:])
    return f"{color_part}|{tri}"


def molecule_colors(m: Molecule) -> list[tuple]:
    """Initial vertex coloring: element, degree, incident bond orders."""
    incident: list[list[int]] = [[] for _ in m.elements]
    for i, j, order in m.bonds:
        incident[i].append(order)
        incident[j].append(order)
    return [
        (m.elements[v], len(incident[v]), tuple(sorted(incident[v])))
        for v in range(len(m.elements))
    ]


def canonical_labeling(m: Molecule) -> CanonicalForm:
    """Canonical form of a molecule.

    The key only encodes elements and bond orders; implicit hydrogens are a
    function of those, so isomorphism of the labeled multigraph is exactly
    key equality.
    """
    form = canonize_graph(molecule_colors(m), m.adjacency())
    # compress the key to element symbols (degree/orders are derivable)
    perm_inv = sorted(range(len(m.elements)), key=lambda v: form.labeling[v])
    adj = m.adjacency()
    tri = []
    for a in range(len(perm_inv)):
        row = adj[perm_inv[a]]
        for b in range(a + 1, len(perm_inv)):
            tri.append(row.get(perm_inv[b], 0))
    key = ",".join(m.elements[v] for v in perm_inv) + "|" + "".join(map(str, tri))
    return CanonicalForm(key, form.labeling, form.orbits, form.generators)


def canonical_key(m: Molecule) -> str:
    return canonical_labeling(m).key


def molecule_from_key(key: str, table=None) -> Molecule:
    """Rebuild the (canonically labeled) molecule a key serializes."""
    from .elements import EXTENDED_TABLE

    table = table or EXTENDED_TABLE
    elem_part, tri = key.split("|")
    elements = tuple(elem_part.split(","))
    n = len(elements)
    bonds = []
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            order = int(tri[k])
            k += 1
            if order:
                bonds.append((i, j, order))
    return Molecule.from_graph(elements, bonds, table)
