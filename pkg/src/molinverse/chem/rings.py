"""Ring perception: cyclomatic count, SSSR, and aromatic-ring detection.

The ring-count feature is the cyclomatic number.  For aromatic detection a
smallest-set-of-smallest-rings basis is built from per-bond shortest
cycles; an aromatic ring is a 6-membered all-carbon cycle whose bond
orders alternate 1/2 around the ring.
"""

from __future__ import annotations

from collections import deque

from .molecule import Molecule


def ring_count(m: Molecule) -> int:
    """Cyclomatic number |bonds| - |atoms| + 1 of a connected molecule."""
    return len(m.bonds) - len(m.elements) + 1


def _shortest_cycle_through(m: Molecule, bond: tuple[int, int, int]):
    """Shortest cycle containing ``bond``: BFS path i->j avoiding the bond."""
    i, j, _ = bond
    adj = m.adjacency()
    prev = {i: None}
    queue = deque([i])
    while queue:
        v = queue.popleft()
        if v == j:
            break
        for w in adj[v]:
            if w in prev:
                continue
            if (v, w) in ((i, j), (j, i)):
                continue
            prev[w] = v
            queue.append(w)
    if j not in prev:
        return None
    path = []
    v: int | None = j
    while v is not None:
        path.append(v)
        v = prev[v]
    return path  # vertices j..i; the removed bond closes the cycle


def sssr(m: Molecule) -> list[list[int]]:
    """A smallest-set-of-smallest-rings basis as vertex cycles.

    Candidate cycles are the shortest cycle through each bond; they are
    added shortest-first while linearly independent over GF(2) in edge
    space, stopping at the cyclomatic number.
    """
    target = ring_count(m)
    if target == 0:
        return []
    bond_index = {(i, j): k for k, (i, j, _) in enumerate(m.bonds)}

    def edge_vector(cycle: list[int]) -> int:
        vec = 0
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            k = bond_index[(min(a, b), max(a, b))]
            vec |= 1 << k
        return vec

    candidates = []
    for bond in m.bonds:
        cyc = _shortest_cycle_through(m, bond)
        if cyc is not None:
            candidates.append(cyc)
    candidates.sort(key=len)

    basis: list[int] = []
    rings: list[list[int]] = []
    for cyc in candidates:
        vec = edge_vector(cyc)
        reduced = vec
        for b in basis:
            reduced = min(reduced, reduced ^ b)
        if reduced:
            basis.append(reduced)
            basis.sort(reverse=True)
            rings.append(cyc)
            if len(rings) == target:
                break
    return rings


def aromatic_ring_count(m: Molecule) -> int:
    """6-membered all-carbon SSSR rings with alternating 1/2 bond orders."""
    adj = m.adjacency()
    count = 0
    for cyc in sssr(m):
        if len(cyc) != 6:
            continue
        if any(m.elements[v] != "C" for v in cyc):
            continue
        orders = [
            adj[a][b] for a, b in zip(cyc, cyc[1:] + cyc[:1])
        ]
        if sorted(set(orders)) != [1, 2]:
            continue
        if all(a != b for a, b in zip(orders, orders[1:] + orders[:1])):
            count += 1
    return count
