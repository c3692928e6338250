"""SMILES reading and writing for the supported subset.

Supported grammar: organic-subset atoms (C, N, O, F, S, Cl, Br), bracket
atoms with an explicit H count, bond symbols ``- = #`` (single by
default), branches, ring-closure digits ``1``-``9`` and ``%nn``, and
lowercase aromatic atoms which are kekulized at parse time.  Charges,
isotopes, stereo markers and wildcards are rejected with an explicit
message.

Writing always emits canonical SMILES: a depth-first walk from canonical
position 0 with branches ordered by canonical position, so isomorphic
molecules serialize to byte-identical strings.
"""

from __future__ import annotations

from .canon import canonical_labeling
from .elements import ChemError, ElementTable, EXTENDED_TABLE
from .molecule import Molecule, ValenceError


class SmilesError(ChemError):
    """Syntax or semantic error in a SMILES string, with position."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


_ORGANIC = ("Cl", "Br", "C", "N", "O", "F", "S")
_AROMATIC = {"c": "C", "n": "N", "o": "O", "s": "S"}
_UNSUPPORTED = {
    "@": "stereochemistry marker '@'",
    "/": "stereo bond '/'",
    "\\": "stereo bond '\\'",
    "+": "charge '+'",
    ".": "disconnected-fragment dot '.'",
    "*": "wildcard atom '*'",
    ":": "explicit aromatic bond ':'",
}


class _Atom:
    __slots__ = ("element", "aromatic", "explicit_h", "index")

    def __init__(self, element, aromatic, explicit_h, index):
        self.element = element
        self.aromatic = aromatic
        self.explicit_h = explicit_h  # None unless a bracket atom fixed it
        self.index = index


def parse_smiles(text: str, table: ElementTable = EXTENDED_TABLE) -> Molecule:
    """Parse a SMILES string into a :class:`Molecule`.

    Implicit hydrogens are filled from unused valence; aromatic rings are
    kekulized to alternating single/double bonds.
    """
    if not text:
        raise SmilesError("empty SMILES string")
    atoms: list[_Atom] = []
    bonds: list[tuple[int, int, int, bool]] = []  # (i, j, order, from_aromatic)
    stack: list[int] = []
    ring_open: dict[int, tuple[int, int | None, int]] = {}
    prev: int | None = None
    pending_order: int | None = None
    pos = 0
    n = len(text)

    def add_atom(element, aromatic, explicit_h, at):
        nonlocal prev, pending_order
        if element not in table:
            raise SmilesError(
                f"element {element!r} outside the configured set", at
            )
        atom = _Atom(element, aromatic, explicit_h, len(atoms))
        atoms.append(atom)
        if prev is not None:
            order = pending_order if pending_order is not None else 1
            implicit_aromatic = (
                pending_order is None and aromatic and atoms[prev].aromatic
            )
            bonds.append((prev, atom.index, order, implicit_aromatic))
        prev = atom.index
        pending_order = None

    while pos < n:
        ch = text[pos]
        if ch in _UNSUPPORTED:
            raise SmilesError(f"unsupported feature: {_UNSUPPORTED[ch]}", pos)
        if ch == "(":
            if prev is None:
                raise SmilesError("branch before any atom", pos)
            stack.append(prev)
            pos += 1
        elif ch == ")":
            if not stack:
                raise SmilesError("unmatched ')'", pos)
            prev = stack.pop()
            pos += 1
        elif ch in "-=#":
            if pending_order is not None:
                raise SmilesError("two bond symbols in a row", pos)
            pending_order = {"-": 1, "=": 2, "#": 3}[ch]
            pos += 1
        elif ch.isdigit() or ch == "%":
            if prev is None:
                raise SmilesError("ring closure before any atom", pos)
            if ch == "%":
                if pos + 2 >= n or not text[pos + 1 : pos + 3].isdigit():
                    raise SmilesError("'%' needs two digits", pos)
                num = int(text[pos + 1 : pos + 3])
                pos += 3
            else:
                num = int(ch)
                pos += 1
            if num in ring_open:
                other, other_order, other_pos = ring_open.pop(num)
                order = pending_order if pending_order is not None else other_order
                if (
                    pending_order is not None
                    and other_order is not None
                    and pending_order != other_order
                ):
                    raise SmilesError(
                        f"ring bond {num} has conflicting orders", pos
                    )
                if other == prev:
                    raise SmilesError(f"ring bond {num} closes onto itself", pos)
                implicit_aromatic = (
                    order is None and atoms[prev].aromatic and atoms[other].aromatic
                )
                bonds.append((other, prev, order or 1, implicit_aromatic))
            else:
                ring_open[num] = (prev, pending_order, pos)
            pending_order = None
        elif ch == "[":
            end = text.find("]", pos)
            if end < 0:
                raise SmilesError("unclosed bracket atom", pos)
            body = text[pos + 1 : end]
            element, hcount, aromatic = _parse_bracket(body, pos + 1)
            add_atom(element, aromatic, hcount, pos)
            pos = end + 1
        else:
            matched = False
            for sym in _ORGANIC:
                if text.startswith(sym, pos):
                    add_atom(sym, False, None, pos)
                    pos += len(sym)
                    matched = True
                    break
            if not matched:
                if ch in _AROMATIC:
                    add_atom(_AROMATIC[ch], True, None, pos)
                    pos += 1
                else:
                    raise SmilesError(f"unexpected character {ch!r}", pos)

    if stack:
        raise SmilesError("unclosed branch '('")
    if ring_open:
        nums = ", ".join(str(k) for k in sorted(ring_open))
        raise SmilesError(f"unclosed ring bond {nums}")

    final_bonds = _kekulize(atoms, bonds, table)
    mol = Molecule.from_graph([a.element for a in atoms], final_bonds, table)
    _check_explicit_h(atoms, mol, table)
    return mol


def _parse_bracket(body: str, at: int) -> tuple[str, int, bool]:
    """Parse the inside of a bracket atom: element plus optional H count."""
    for ch in body:
        if ch in _UNSUPPORTED:
            raise SmilesError(f"unsupported feature: {_UNSUPPORTED[ch]}", at)
        if ch == "-":
            raise SmilesError("unsupported feature: charge '-'", at)
    i = 0
    if i < len(body) and body[i].isdigit():
        raise SmilesError("unsupported feature: isotope label", at)
    elem = None
    aromatic = False
    for sym in _ORGANIC:
        if body.startswith(sym):
            elem = sym
            i = len(sym)
            break
    if elem is None and body and body[0] in _AROMATIC:
        elem = _AROMATIC[body[0]]
        aromatic = True
        i = 1
    if elem is None:
        raise SmilesError(f"cannot read bracket atom [{body}]", at)
    hcount = 0
    rest = body[i:]
    if rest:
        if not rest.startswith("H"):
            raise SmilesError(f"cannot read bracket atom [{body}]", at)
        rest = rest[1:]
        hcount = int(rest) if rest else 1
        if rest and not rest.isdigit():
            raise SmilesError(f"cannot read bracket atom [{body}]", at)
    return elem, hcount, aromatic


def _kekulize(atoms, bonds, table) -> list[tuple[int, int, int]]:
    """Assign alternating orders to aromatic bonds via perfect matching.

    Each aromatic carbon, and each aromatic nitrogen without an explicit H,
    must get exactly one double bond among its aromatic bonds; aromatic O/S
    and explicit-H nitrogens contribute a lone pair instead.  Fails when no
    such matching exists.
    """
    aromatic_bonds = [
        (i, j) for i, j, order, is_arom in bonds if is_arom
    ]
    fixed = [(i, j, order) for i, j, order, is_arom in bonds if not is_arom]
    if not aromatic_bonds:
        return fixed

    needs_double = set()
    for a in atoms:
        if not a.aromatic:
            continue
        if a.element in ("O", "S"):
            continue
        if a.element == "N" and a.explicit_h:
            continue
        needs_double.add(a.index)

    adj: dict[int, list[int]] = {}
    for i, j in aromatic_bonds:
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)

    double: set[tuple[int, int]] = set()
    matched: set[int] = set()
    order_todo = sorted(needs_double)

    def backtrack(k: int) -> bool:
        while k < len(order_todo) and order_todo[k] in matched:
            k += 1
        if k == len(order_todo):
            return True
        v = order_todo[k]
        for w in adj.get(v, []):
            if w in matched or w not in needs_double:
                continue
            double.add((min(v, w), max(v, w)))
            matched.add(v)
            matched.add(w)
            if backtrack(k + 1):
                return True
            double.discard((min(v, w), max(v, w)))
            matched.discard(v)
            matched.discard(w)
        return False

    if not backtrack(0):
        raise SmilesError("aromatic ring cannot be kekulized")
    out = list(fixed)
    for i, j in aromatic_bonds:
        key = (min(i, j), max(i, j))
        out.append((i, j, 2 if key in double else 1))
    return out


def _check_explicit_h(atoms, mol: Molecule, table):
    for atom in atoms:
        if atom.explicit_h is None:
            continue
        actual = mol.hcounts[atom.index]
        if actual != atom.explicit_h:
            raise ValenceError(
                f"atom {atom.index} ({atom.element}): explicit H{atom.explicit_h} "
                f"inconsistent with valence (needs {actual})"
            )


_BOND_SYMBOL = {1: "", 2: "=", 3: "#"}


def write_smiles(m: Molecule) -> str:
    """Canonical SMILES: DFS from canonical position 0.

    At each atom the unvisited neighbors are emitted in canonical-position
    order, all but the last wrapped in parentheses; ring-closure digits are
    assigned in encounter order.
    """
    form = canonical_labeling(m)
    pos = form.labeling
    start = pos.index(0)
    adj = m.adjacency()
    n = len(m.elements)

    visited = [False] * n
    ring_bonds: dict[tuple[int, int], int] = {}
    # find non-tree edges of the canonical DFS up front
    parent = [-1] * n
    order_of = lambda v: sorted(adj[v], key=lambda w: pos[w])
    stack = [start]
    visited[start] = True
    dfs_nontree = []
    while stack:
        v = stack.pop()
        for w in reversed(order_of(v)):
            if not visited[w]:
                visited[w] = True
                parent[w] = v
                stack.append(w)
            elif parent[v] != w and (min(v, w), max(v, w)) not in {
                (min(a, b), max(a, b)) for a, b in dfs_nontree
            }:
                dfs_nontree.append((v, w))

    next_digit = [1]
    for a, b in dfs_nontree:
        key = (min(a, b), max(a, b))
        ring_bonds[key] = next_digit[0]
        next_digit[0] += 1

    def digit_token(d: int) -> str:
        return str(d) if d <= 9 else f"%{d:02d}"

    visited = [False] * n
    out: list[str] = []

    def walk(v: int, incoming: int | None):
        visited[v] = True
        out.append(m.elements[v])
        closures = []
        children = []
        for w in order_of(v):
            key = (min(v, w), max(v, w))
            if key in ring_bonds:
                closures.append((w, key))
            elif not visited[w] and w != incoming:
                children.append(w)
        for w, key in closures:
            out.append(_BOND_SYMBOL[adj[v][w]] + digit_token(ring_bonds[key]))
        for idx, w in enumerate(children):
            if visited[w]:
                continue
            bond = _BOND_SYMBOL[adj[v][w]]
            last = idx == len(children) - 1
            if not last:
                out.append("(")
            out.append(bond)
            walk(w, v)
            if not last:
                out.append(")")

    walk(start, None)
    return "".join(out)
