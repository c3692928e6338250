"""Isomorph-free exhaustive molecule generation.

Structures grow one atom (plus its attaching bond) at a time.  A child is
kept only when the newly added vertex lies in the automorphism orbit of
the canonically-first degree-1 vertex of the child; every tree on the
atom budget is then reached along exactly one construction path, so the
stream is duplicate-free without any global memory.  Rings are closed by
an optional second pass that adds bonds between existing atoms under the
same discipline, with the canonically-least non-bridge edge playing the
role of the distinguished leaf.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field

from ..chem import (
    EXTENDED_TABLE,
    ElementTable,
    Molecule,
    aromatic_ring_count,
    canonical_labeling,
    ring_count,
)
from ..features import (
    AROMATIC_RINGS,
    ELEMENT,
    FRAGMENT,
    FeatureVector,
    FragmentPattern,
    RINGS,
    fragment_keys,
)

UNBOUNDED = 10**9


@dataclass
class GenerationSpec:
    """What to generate: an exact atom budget plus count-range constraints."""

    atoms: dict
    fragments: dict = field(default_factory=dict)  # key -> (lo, hi)
    rings: tuple = (0, UNBOUNDED)
    aromatic_rings: tuple = (0, UNBOUNDED)
    allowed_orders: tuple = (1, 2, 3)
    max_structures: int | None = 20
    time_budget: float | None = None
    edge_augmentation: bool | None = None  # None: on iff ring range wants rings
    supervertices: dict = field(default_factory=dict)  # key -> (lo, hi)
    table: ElementTable = EXTENDED_TABLE

    def __post_init__(self):
        self.atoms = {e: int(c) for e, c in self.atoms.items() if c}
        for e, c in self.atoms.items():
            if e not in self.table:
                raise ValueError(f"unknown element {e!r} in atom budget")
            if c < 0:
                raise ValueError(f"negative atom count for {e}")
        if sum(self.atoms.values()) < 1:
            raise ValueError("atom budget must contain at least one atom")
        for name, ranges in (
            ("fragments", self.fragments),
            ("supervertices", self.supervertices),
        ):
            for key, (lo, hi) in ranges.items():
                if not (0 <= lo <= hi):
                    raise ValueError(f"bad {name} range {key!r}: [{lo}, {hi}]")
        for lo, hi in (self.rings, self.aromatic_rings):
            if not (0 <= lo <= hi):
                raise ValueError("ring ranges need 0 <= lo <= hi")
        if not self.allowed_orders or not set(self.allowed_orders) <= {1, 2, 3}:
            raise ValueError("allowed_orders must be a non-empty subset of {1,2,3}")
        self.allowed_orders = tuple(sorted(set(self.allowed_orders)))

    def edge_phase(self) -> bool:
        if self.edge_augmentation is not None:
            return self.edge_augmentation
        if self.rings == (0, UNBOUNDED):  # unconstrained: stay acyclic
            return False
        return self.rings[1] > 0

    def fragment_levels(self) -> set[int]:
        return {FragmentPattern.from_key(k).edge_count for k in self.fragments}


@dataclass
class GenerationStats:
    visited: int = 0
    pruned: int = 0
    emitted: int = 0
    duplicates: int = 0
    visited_by_depth: dict = field(default_factory=dict)
    pruned_by_depth: dict = field(default_factory=dict)

    def saw(self, depth: int):
        self.visited += 1
        self.visited_by_depth[depth] = self.visited_by_depth.get(depth, 0) + 1

    def cut(self, depth: int):
        self.pruned += 1
        self.pruned_by_depth[depth] = self.pruned_by_depth.get(depth, 0) + 1

    def trace(self) -> str:
        lines = ["depth\tvisited\tpruned"]
        for d in sorted(set(self.visited_by_depth) | set(self.pruned_by_depth)):
            lines.append(
                f"{d}\t{self.visited_by_depth.get(d, 0)}"
                f"\t{self.pruned_by_depth.get(d, 0)}"
            )
        return "\n".join(lines) + "\n"


def _fragment_counts(g: Molecule, levels: set[int]) -> dict:
    if not levels or not g.bonds:
        return {}
    return fragment_keys(g, levels)


def satisfy_constraint(g: Molecule, spec: GenerationSpec) -> bool:
    """Full-molecule acceptance: budget, fragment ranges, ring ranges."""
    placed = Counter(g.elements)
    if dict(placed) != spec.atoms:
        return False
    return ranges_ok(g, spec)


def ranges_ok(g: Molecule, spec: GenerationSpec) -> bool:
    """Fragment and ring ranges only; the atom budget is checked elsewhere.

    Super-vertex runs need this split because their expanded molecules
    contain fragment atoms on top of the free-atom budget.
    """
    counts = _fragment_counts(g, spec.fragment_levels())
    for key, (lo, hi) in spec.fragments.items():
        if not lo <= counts.get(key, 0) <= hi:
            return False
    if not spec.rings[0] <= ring_count(g) <= spec.rings[1]:
        return False
    if not spec.aromatic_rings[0] <= aromatic_ring_count(g) <= spec.aromatic_rings[1]:
        return False
    return True


def check_termination(g: Molecule, remaining: Counter, spec: GenerationSpec) -> bool:
    """True when no completion of g can satisfy the spec (prune).

    Uses count monotonicity (adding atoms or bonds never lowers a fragment
    or ring count) and a greedy attachability simulation for the
    remaining atom budget.
    """
    counts = _fragment_counts(g, spec.fragment_levels())
    for key, (lo, hi) in spec.fragments.items():
        if counts.get(key, 0) > hi:
            return True
    rc = ring_count(g)
    if rc > spec.rings[1]:
        return True

    o_min = spec.allowed_orders[0]
    free_total = sum(g.hcounts)
    if remaining:
        # attach remaining atoms greedily, highest valence first; each
        # attachment spends o_min on both sides, the cheapest possible
        valences = sorted(
            (spec.table.valence(e) for e in remaining.elements()), reverse=True
        )
        for w in valences:
            if free_total < o_min or w < o_min:
                return True
            free_total += w - 2 * o_min
        return False

    # budget exhausted: counts below lo are final unless bonds can still be
    # added in the edge pass
    if spec.edge_phase() and free_total >= 2 * o_min:
        return False
    for key, (lo, hi) in spec.fragments.items():
        if counts.get(key, 0) < lo:
            return True
    if rc < spec.rings[0]:
        return True
    ar = aromatic_ring_count(g)
    if not spec.aromatic_rings[0] <= ar <= spec.aromatic_rings[1]:
        return True
    return False


def _orbit_of(orbits, v: int):
    for orb in orbits:
        if v in orb:
            return orb
    raise ValueError(f"vertex {v} not in any orbit")


def _new_vertex_is_canonical(child: Molecule, new_idx: int) -> bool:
    """The canonical-augmentation test for the atom-addition phase."""
    form = canonical_labeling(child)
    leaves = [v for v in range(len(child)) if child.degree(v) == 1]
    first = min(leaves, key=lambda v: form.labeling[v])
    return new_idx in _orbit_of(form.orbits, first)


def _bridges(n: int, adj) -> set:
    """Bridge edges as (i, j) with i < j, by iterative DFS lowpoints."""
    disc = [-1] * n
    low = [0] * n
    out: set = set()
    timer = [0]
    for root in range(n):
        if disc[root] != -1:
            continue
        stack = [(root, -1, iter(adj[root]))]
        disc[root] = low[root] = timer[0]
        timer[0] += 1
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if w == parent:  # no parallel bonds, so skip-always is safe
                    continue
                if disc[w] == -1:
                    disc[w] = low[w] = timer[0]
                    timer[0] += 1
                    stack.append((w, v, iter(adj[w])))
                    advanced = True
                    break
                low[v] = min(low[v], disc[w])
            if not advanced:
                stack.pop()
                if stack:
                    u = stack[-1][0]
                    low[u] = min(low[u], low[v])
                    if low[v] > disc[u]:
                        out.add((min(u, v), max(u, v)))
    return out


def _new_edge_is_canonical(child: Molecule, edge: tuple) -> bool:
    """Canonical-augmentation test for the ring-closing edge phase.

    Accept iff the added edge is automorphic to the non-bridge edge whose
    canonical endpoint positions are lexicographically least.
    """
    form = canonical_labeling(child)
    adj = child.adjacency()
    bridges = _bridges(len(child), adj)
    cyc = [(i, j) for i, j, _ in child.bonds if (i, j) not in bridges]
    lab = form.labeling

    def pos(e):
        a, b = lab[e[0]], lab[e[1]]
        return (min(a, b), max(a, b))

    target = min(cyc, key=pos)
    return edge in _edge_orbit(cyc, target, form.generators)


def _edge_orbit(edges, target, generators):
    """Closure of one edge under the harvested automorphism generators."""
    edge_set = set(edges)
    orbit = {target}
    frontier = [target]
    while frontier:
        i, j = frontier.pop()
        for g in generators:
            image = (min(g[i], g[j]), max(g[i], g[j]))
            if image in edge_set and image not in orbit:
                orbit.add(image)
                frontier.append(image)
    return orbit


def _pair_orbit_reps(pairs, generators):
    """One representative per automorphism orbit of candidate vertex pairs."""
    pairs = sorted(pairs)
    index = {p: k for k, p in enumerate(pairs)}
    parent = list(range(len(pairs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in pairs:
        for g in generators:
            image = (min(g[p[0]], g[p[1]]), max(g[p[0]], g[p[1]]))
            if image in index:
                ra, rb = find(index[p]), find(index[image])
                if ra != rb:
                    parent[rb] = ra
    reps = sorted({find(k) for k in range(len(pairs))})
    return [pairs[k] for k in reps]


class _Run:
    """Mutable state shared across one generation recursion."""

    def __init__(self, spec, pruning, dedup, stats, should_stop):
        self.spec = spec
        self.pruning = pruning
        self.dedup = dedup
        self.stats = stats
        self.should_stop = should_stop
        self.seen_keys: set[str] = set()
        self.done = False
        self.deadline = (
            time.monotonic() + spec.time_budget if spec.time_budget else None
        )

    def out_of_time(self) -> bool:
        if self.deadline is not None and time.monotonic() > self.deadline:
            self.done = True
        if self.should_stop is not None and self.should_stop():
            self.done = True
        return self.done

    def emit(self, g: Molecule):
        key = canonical_labeling(g).key
        if self.dedup and key in self.seen_keys:
            self.stats.duplicates += 1
            return
        self.seen_keys.add(key)
        self.stats.emitted += 1
        cap = self.spec.max_structures
        if cap is not None and self.stats.emitted >= cap:
            self.done = True
        yield g


def generate(
    spec: GenerationSpec,
    *,
    pruning: bool = True,
    dedup: bool = True,
    stats: GenerationStats | None = None,
    should_stop=None,
):
    """Stream every molecule matching the spec, without duplicates.

    One seed per distinct budgeted element, in element-table order; the
    rest is depth-first, so emission order is deterministic.
    """
    if spec.supervertices:
        from .supervertex import generate_supervertex

        yield from generate_supervertex(
            spec, pruning=pruning, stats=stats, should_stop=should_stop
        )
        return
    run = _Run(spec, pruning, dedup, stats or GenerationStats(), should_stop)
    budget = Counter(spec.atoms)
    for e in spec.table.symbols:
        if run.done:
            return
        if budget[e] == 0:
            continue
        seed = Molecule.from_graph((e,), (), spec.table)
        remaining = budget.copy()
        remaining[e] -= 1
        yield from _augment(seed, +remaining, run)


def _augment(g: Molecule, remaining: Counter, run: _Run):
    if run.done or run.out_of_time():
        return
    spec = run.spec
    run.stats.saw(len(g))

    if not remaining:
        if satisfy_constraint(g, spec):
            yield from run.emit(g)
        if spec.edge_phase() and not run.done:
            yield from _edge_augment(g, run)
        return

    if run.pruning and check_termination(g, remaining, spec):
        run.stats.cut(len(g))
        return

    form = canonical_labeling(g)
    reps = sorted(min(orb) for orb in form.orbits)
    n = len(g)
    for v in reps:
        free_v = g.hcounts[v]
        if free_v == 0:
            continue
        for e in spec.table.symbols:
            if remaining[e] == 0:
                continue
            val_e = spec.table.valence(e)
            for order in spec.allowed_orders:
                if order > free_v or order > val_e:
                    continue
                child = Molecule.from_graph(
                    g.elements + (e,), g.bonds + ((v, n, order),), spec.table
                )
                if not _new_vertex_is_canonical(child, n):
                    continue
                rem = remaining.copy()
                rem[e] -= 1
                yield from _augment(child, +rem, run)
                if run.done:
                    return


def _edge_augment(g: Molecule, run: _Run):
    """Ring-closing pass: add bonds between existing atoms of g."""
    if run.done or run.out_of_time():
        return
    spec = run.spec
    run.stats.saw(len(g))
    if run.pruning and ring_count(g) >= spec.rings[1]:
        # every child has one more ring; monotone, so stop here
        run.stats.cut(len(g))
        return

    adj = g.adjacency()
    form = canonical_labeling(g)
    o_min = spec.allowed_orders[0]
    candidates = [
        (u, v)
        for u in range(len(g))
        for v in range(u + 1, len(g))
        if v not in adj[u] and g.hcounts[u] >= o_min and g.hcounts[v] >= o_min
    ]
    for u, v in _pair_orbit_reps(candidates, form.generators):
        for order in spec.allowed_orders:
            if order > g.hcounts[u] or order > g.hcounts[v]:
                continue
            child = Molecule.from_graph(
                g.elements, g.bonds + ((u, v, order),), spec.table
            )
            if not _new_edge_is_canonical(child, (u, v)):
                continue
            if run.pruning and check_termination(child, Counter(), spec):
                run.stats.cut(len(child))
                continue
            if satisfy_constraint(child, spec):
                yield from run.emit(child)
            if run.done:
                return
            yield from _edge_augment(child, run)
            if run.done:
                return


def spec_from_vector(
    x: FeatureVector,
    tolerance=0,
    *,
    max_structures: int | None = 20,
    time_budget: float | None = None,
    allowed_orders: tuple = (1, 2, 3),
) -> GenerationSpec:
    """Turn a feature vector into the spec whose solutions re-encode to it.

    Element counts become the exact atom budget; every count descriptor
    becomes the range [count - tolerance, count + tolerance], floored at
    0.  ``tolerance`` is one int for every descriptor, or a mapping from
    descriptor key to int for per-key slack (missing keys get 0).
    """
    if isinstance(tolerance, dict):
        per_key = tolerance
        if any(t < 0 for t in per_key.values()):
            raise ValueError("tolerance must be non-negative")
    else:
        if tolerance < 0:
            raise ValueError("tolerance must be non-negative")
        per_key = None
    if not x.schema.element_descriptors():
        raise ValueError("schema has no element-count descriptors")

    def widen(key, v):
        t = per_key.get(key, 0) if per_key is not None else tolerance
        return (max(0, int(v) - t), int(v) + t)

    atoms = {}
    fragments = {}
    rings = (0, UNBOUNDED)
    aromatic = (0, UNBOUNDED)
    for d, v in zip(x.schema.descriptors, x.values):
        if d.kind == ELEMENT:
            if v:
                atoms[d.key] = int(v)
        elif d.kind == RINGS:
            rings = widen(d.key, v)
        elif d.kind == AROMATIC_RINGS:
            aromatic = widen(d.key, v)
        elif d.kind == FRAGMENT:
            fragments[d.key] = widen(d.key, v)
    return GenerationSpec(
        atoms=atoms,
        fragments=fragments,
        rings=rings,
        aromatic_rings=aromatic,
        allowed_orders=allowed_orders,
        max_structures=max_structures,
        time_budget=time_budget,
        table=x.schema.table,
    )
