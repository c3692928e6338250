"""Immutable molecular multigraph with implicit hydrogens.

Atoms are heavy atoms only; hydrogens are derived from unused valence and
stored as per-atom counts.  Every constructor validates the full set of
structural invariants (valence, connectivity, no self loops, no parallel
bonds), so any ``Molecule`` in flight is known-good.
"""

from __future__ import annotations

from dataclasses import dataclass

from .elements import ChemError, ElementTable, EXTENDED_TABLE

Bond = tuple[int, int, int]  # (i, j, order) with i < j


class ValenceError(ChemError):
    pass


class ConnectivityError(ChemError):
    pass


def normalize_bonds(bonds) -> tuple[Bond, ...]:
    """Sort endpoints within each bond and the bond list itself."""
    out = []
    for i, j, order in bonds:
        if i == j:
            raise ChemError(f"self-loop on atom {i}")
        if order not in (1, 2, 3):
            raise ChemError(f"bond order {order} not in {{1,2,3}}")
        out.append((min(i, j), max(i, j), order))
    out.sort()
    for a, b in zip(out, out[1:]):
        if a[:2] == b[:2]:
            raise ChemError(f"parallel bonds between atoms {a[0]} and {a[1]}")
    return tuple(out)


@dataclass(frozen=True)
class Molecule:
    elements: tuple[str, ...]
    bonds: tuple[Bond, ...]
    hcounts: tuple[int, ...]

    @classmethod
    def from_graph(
        cls, elements, bonds, table: ElementTable = EXTENDED_TABLE
    ) -> "Molecule":
        """Build a molecule from heavy atoms and bonds, filling implicit H.

        Raises ``ValenceError`` if incident bond orders exceed an atom's
        valence and ``ConnectivityError`` if the graph is not a single
        component.
        """
        elements = tuple(elements)
        if not elements:
            raise ChemError("molecule needs at least one atom")
        bonds = normalize_bonds(bonds)
        n = len(elements)
        used = [0] * n
        for i, j, order in bonds:
            if not (0 <= i < n and 0 <= j < n):
                raise ChemError(f"bond ({i},{j}) references a missing atom")
            used[i] += order
            used[j] += order
        hcounts = []
        for idx, sym in enumerate(elements):
            val = table.valence(sym)
            if used[idx] > val:
                raise ValenceError(
                    f"atom {idx} ({sym}): incident bond orders {used[idx]} "
                    f"exceed valence {val}"
                )
            hcounts.append(val - used[idx])
        mol = cls(elements, bonds, tuple(hcounts))
        if not mol.is_connected():
            raise ConnectivityError("molecule graph is not connected")
        return mol

    def __len__(self) -> int:
        return len(self.elements)

    def neighbors(self, idx: int) -> list[tuple[int, int]]:
        """(neighbor index, bond order) pairs of atom ``idx``."""
        out = []
        for i, j, order in self.bonds:
            if i == idx:
                out.append((j, order))
            elif j == idx:
                out.append((i, order))
        return out

    def adjacency(self) -> list[dict[int, int]]:
        adj: list[dict[int, int]] = [dict() for _ in self.elements]
        for i, j, order in self.bonds:
            adj[i][j] = order
            adj[j][i] = order
        return adj

    def degree(self, idx: int) -> int:
        return sum(1 for i, j, _ in self.bonds if idx in (i, j))

    def is_connected(self) -> bool:
        n = len(self.elements)
        if n == 1:
            return True
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == n

    def heavy_atom_count(self, symbol: str) -> int:
        return sum(1 for s in self.elements if s == symbol)
