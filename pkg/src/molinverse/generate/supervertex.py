"""Generation with whole fragments placed as single units.

The growing structure is tracked twice: as the expanded molecule (real
atoms and bonds) and as a condensed graph whose vertices are units, an
atom or a whole fragment instance, colored by element symbol or fragment
key.  The canonical-augmentation test runs on the condensed graph; the
attachment atom inside a unit is chosen one representative per orbit of
the expanded graph, so symmetric attachment sites are not re-explored.
Different condensations of one molecule can survive the condensed test,
so emission always dedupes on the expanded canonical key.
"""

from __future__ import annotations

from collections import Counter

from ..chem import Molecule, canonical_labeling, canonize_graph, ring_count
from ..features import FragmentPattern
from .core import (
    GenerationSpec,
    GenerationStats,
    _fragment_counts,
    _Run,
    ranges_ok,
)


def _condensed_graph(n_units, unit_of, bonds):
    """Condensed adjacency with inter-unit bond multisets packed to ints."""
    inter: dict = {}
    for i, j, order in bonds:
        ui, uj = unit_of[i], unit_of[j]
        if ui != uj:
            pair = (min(ui, uj), max(ui, uj))
            inter.setdefault(pair, []).append(order)
    adj: list[dict[int, int]] = [dict() for _ in range(n_units)]
    for (ui, uj), orders in inter.items():
        w = 0
        for o in sorted(orders):  # orders are 1..3, base 4 packing is unique
            w = w * 4 + o
        adj[ui][uj] = w
        adj[uj][ui] = w
    return adj


class _State:
    """One node of the super-vertex search: expanded graph + unit partition."""

    def __init__(self, elements, bonds, labels, unit_atoms, table):
        self.elements = elements
        self.bonds = bonds
        self.labels = labels  # per unit: element symbol or fragment key
        self.unit_atoms = unit_atoms
        self.molecule = Molecule.from_graph(elements, bonds, table)
        self.unit_of = {}
        for ui, atoms in enumerate(unit_atoms):
            for a in atoms:
                self.unit_of[a] = ui

    def condensed(self):
        adj = _condensed_graph(len(self.labels), self.unit_of, self.bonds)
        colors = [(label,) for label in self.labels]
        return canonize_graph(colors, adj), adj

    def add_unit(self, label, part_elements, part_bonds, attach_local,
                 host_atom, order, table):
        base = len(self.elements)
        shifted = tuple((base + i, base + j, o) for i, j, o in part_bonds)
        return _State(
            self.elements + tuple(part_elements),
            self.bonds + shifted + ((host_atom, base + attach_local, order),),
            self.labels + (label,),
            self.unit_atoms + (tuple(range(base, base + len(part_elements))),),
            table,
        )


def _unit_parts(label, patterns):
    """(elements, bonds) of the unit a label denotes."""
    if label in patterns:
        g = patterns[label].graph
        return g.elements, g.bonds
    return (label,), ()


def _attachment_reps(state: _State, unit: int, o_min: int):
    """Attachment atoms of an existing unit, one per expanded-graph orbit."""
    form = canonical_labeling(state.molecule)
    root = {}
    for orb in form.orbits:
        for v in orb:
            root[v] = orb[0]
    reps = []
    seen = set()
    for a in sorted(state.unit_atoms[unit]):
        if state.molecule.hcounts[a] < o_min:
            continue
        if root[a] in seen:
            continue
        seen.add(root[a])
        reps.append(a)
    return reps


def _pattern_attachment_reps(pattern: FragmentPattern, o_min: int):
    """Attachment atoms of a fresh fragment, one per fragment orbit."""
    form = canonical_labeling(pattern.graph)
    reps = []
    seen = set()
    for orb in form.orbits:
        a = orb[0]
        if pattern.graph.hcounts[a] >= o_min and orb[0] not in seen:
            seen.add(orb[0])
            reps.append(a)
    return sorted(reps)


def _condensed_test(state: _State) -> bool:
    """New unit (the last one) must be canonically removable."""
    n_units = len(state.labels)
    if n_units == 1:
        return True
    form, adj = state.condensed()
    leaves = [u for u in range(n_units) if len(adj[u]) == 1]
    first = min(leaves, key=lambda u: form.labeling[u])
    for orb in form.orbits:
        if first in orb:
            return n_units - 1 in orb
    return False


def generate_supervertex(
    spec: GenerationSpec,
    *,
    pruning: bool = True,
    stats: GenerationStats | None = None,
    should_stop=None,
):
    """Stream molecules for a spec with fragment super-vertices.

    Dedup on the expanded canonical key is always on here; condensed-level
    canonical augmentation alone cannot separate different condensations
    of the same molecule.
    """
    patterns = {}
    for key in spec.supervertices:
        pattern = FragmentPattern.from_key(key)
        if not any(h > 0 for h in pattern.graph.hcounts):
            raise ValueError(f"fragment {key!r} has no free valence")
        patterns[key] = pattern

    run = _Run(spec, pruning, True, stats or GenerationStats(), should_stop)
    levels = spec.fragment_levels()

    seeds = []
    budget = Counter(spec.atoms)
    for e in spec.table.symbols:
        if budget[e] > 0:
            rem = budget.copy()
            rem[e] -= 1
            seeds.append(((e,), +rem, Counter()))
    for key in sorted(patterns):
        if spec.supervertices[key][1] > 0:
            seeds.append(((key,), budget.copy(), Counter({key: 1})))

    for labels, rem_atoms, placed in seeds:
        if run.done:
            return
        part_elements, part_bonds = _unit_parts(labels[0], patterns)
        state = _State(
            tuple(part_elements), tuple(part_bonds), labels,
            (tuple(range(len(part_elements))),), spec.table,
        )
        yield from _saugment(state, rem_atoms, placed, patterns, run, levels)


def _saugment(state, rem_atoms, placed, patterns, run, levels):
    if run.done or run.out_of_time():
        return
    spec = run.spec
    mol = state.molecule
    run.stats.saw(len(mol))

    lows_met = all(
        placed[key] >= lo for key, (lo, _) in spec.supervertices.items()
    )
    if not rem_atoms and lows_met:
        if ranges_ok(mol, spec):
            yield from run.emit(mol)
            if run.done:
                return
        if spec.edge_phase():
            yield from _sedge(mol, run)
            if run.done:
                return

    if run.pruning and _sprune(mol, spec, levels):
        run.stats.cut(len(mol))
        return

    options = []
    for e in spec.table.symbols:
        if rem_atoms[e] > 0:
            options.append(e)
    for key in sorted(patterns):
        if placed[key] < spec.supervertices[key][1]:
            options.append(key)
    if not options:
        return

    o_min = spec.allowed_orders[0]
    form, adj = state.condensed()
    unit_reps = sorted(min(orb) for orb in form.orbits)
    for unit in unit_reps:
        for host in _attachment_reps(state, unit, o_min):
            free_host = mol.hcounts[host]
            for label in options:
                part_elements, part_bonds = _unit_parts(label, patterns)
                if label in patterns:
                    attach_sites = _pattern_attachment_reps(patterns[label], o_min)
                else:
                    attach_sites = [0]
                for local in attach_sites:
                    if label in patterns:
                        free_new = patterns[label].graph.hcounts[local]
                    else:
                        free_new = spec.table.valence(label)
                    for order in spec.allowed_orders:
                        if order > free_host or order > free_new:
                            continue
                        child = state.add_unit(
                            label, part_elements, part_bonds, local,
                            host, order, spec.table,
                        )
                        if not _condensed_test(child):
                            continue
                        if label in patterns:
                            rem2, placed2 = rem_atoms, placed + Counter({label: 1})
                        else:
                            rem2 = rem_atoms.copy()
                            rem2[label] -= 1
                            rem2 = +rem2
                            placed2 = placed
                        yield from _saugment(
                            child, rem2, placed2, patterns, run, levels
                        )
                        if run.done:
                            return


def _sprune(mol, spec, levels) -> bool:
    """Monotone-only pruning; the greedy attachability check does not
    model whole-fragment additions, so it is skipped here."""
    counts = _fragment_counts(mol, levels)
    for key, (lo, hi) in spec.fragments.items():
        if counts.get(key, 0) > hi:
            return True
    return ring_count(mol) > spec.rings[1]


def _sedge(mol, run, visited=None):
    """Ring closure between existing atoms, exhaustive with dedup.

    The condensed-phase parents do not line up with the canonical-edge
    parents of the atom mode, so this pass explores all additions and
    relies on a visited set plus emission dedup instead.
    """
    if run.done or run.out_of_time():
        return
    spec = run.spec
    if visited is None:
        visited = set()
    key = canonical_labeling(mol).key
    if key in visited:
        return
    visited.add(key)
    run.stats.saw(len(mol))
    if run.pruning and ring_count(mol) >= spec.rings[1]:
        run.stats.cut(len(mol))
        return
    adj = mol.adjacency()
    o_min = spec.allowed_orders[0]
    for u in range(len(mol)):
        for v in range(u + 1, len(mol)):
            if v in adj[u]:
                continue
            for order in spec.allowed_orders:
                if order > mol.hcounts[u] or order > mol.hcounts[v]:
                    continue
                child = Molecule.from_graph(
                    mol.elements, mol.bonds + ((u, v, order),), spec.table
                )
                if ranges_ok(child, spec):
                    yield from run.emit(child)
                if run.done:
                    return
                yield from _sedge(child, run, visited)
                if run.done:
                    return
