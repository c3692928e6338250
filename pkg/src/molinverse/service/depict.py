"""Deterministic 2D molecule depiction as SVG.

Layout strategy: each ring from the smallest-set-of-smallest-rings is
drawn as a regular polygon; fused rings are built outward from a shared
edge, spiro rings from the shared atom.  Acyclic atoms start at jittered
positions next to an already-placed neighbor and settle by a fixed
number of force-directed iterations with a fixed seed, so the same
molecule always yields byte-identical output.
"""

from __future__ import annotations

import math

import numpy as np

from ..chem import Molecule, sssr

MAX_ATOMS = 100
BOND_PX = 40.0
MARGIN = 30.0
_ITERATIONS = 300
_SEED = 7


class DepictError(ValueError):
    pass


def _place_rings(m: Molecule, pos, fixed):
    rings = sssr(m)
    # largest first so fused smaller rings attach to an existing edge
    rings.sort(key=len, reverse=True)
    adj = m.adjacency()
    anchor_x = 0.0
    for ring in rings:
        k = len(ring)
        radius = 0.5 / math.sin(math.pi / k)
        placed = [a for a in ring if fixed[a]]
        if len(placed) >= 2:
            # find a shared bonded edge to build the new polygon on
            edge = None
            for a in placed:
                for b in placed:
                    if a < b and b in adj[a]:
                        edge = (a, b)
                        break
                if edge:
                    break
            if edge is None:
                placed = placed[:1]
            else:
                a, b = edge
                ax, ay = pos[a]
                bx, by = pos[b]
                mx, my = (ax + bx) / 2, (ay + by) / 2
                ex, ey = bx - ax, by - ay
                elen = math.hypot(ex, ey) or 1.0
                # polygon center sits apothem away from the edge midpoint,
                # on the side pointing away from already-placed atoms
                apo = radius * math.cos(math.pi / k)
                nx, ny = -ey / elen, ex / elen
                others = [i for i in range(len(m)) if fixed[i] and i not in (a, b)]
                if others:
                    ox = sum(pos[i][0] for i in others) / len(others)
                    oy = sum(pos[i][1] for i in others) / len(others)
                    if (mx + nx - ox) ** 2 + (my + ny - oy) ** 2 < (
                        mx - nx - ox
                    ) ** 2 + (my - ny - oy) ** 2:
                        nx, ny = -nx, -ny
                cx, cy = mx + apo * nx, my + apo * ny
                order = _ring_order(ring, adj, start=a, then=b)
                base = math.atan2(ay - cy, ax - cx)
                step = 2 * math.pi / k
                # sweep direction chosen so atom b lands on its polygon slot
                tb = base + step
                if (cx + radius * math.cos(tb) - bx) ** 2 + (
                    cy + radius * math.sin(tb) - by
                ) ** 2 > 1e-6:
                    step = -step
                for t, atom in enumerate(order):
                    if not fixed[atom]:
                        theta = base + t * step
                        pos[atom] = (
                            cx + radius * math.cos(theta),
                            cy + radius * math.sin(theta),
                        )
                        fixed[atom] = True
                continue
        if len(placed) == 1:
            a = placed[0]
            cx = pos[a][0] + radius
            cy = pos[a][1]
            order = _ring_order(ring, adj, start=a)
            base = math.atan2(pos[a][1] - cy, pos[a][0] - cx)
        else:
            cx, cy = anchor_x, 0.0
            anchor_x += 2 * radius + 1.5
            order = _ring_order(ring, adj, start=min(ring))
            base = math.pi / 2
        step = 2 * math.pi / len(ring)
        for t, atom in enumerate(order):
            if not fixed[atom]:
                theta = base + t * step
                pos[atom] = (cx + radius * math.cos(theta), cy + radius * math.sin(theta))
                fixed[atom] = True


def _ring_order(ring, adj, start, then=None):
    """Ring atoms in cyclic walk order beginning at start (then next)."""
    members = set(ring)
    order = [start]
    prev = None
    current = start
    if then is not None:
        order.append(then)
        prev, current = start, then
    while len(order) < len(ring):
        nxt = next(
            w for w in adj[current] if w in members and w != prev and w not in order
        )
        order.append(nxt)
        prev, current = current, nxt
    return order


def _layout(m: Molecule):
    n = len(m)
    pos = [(0.0, 0.0)] * n
    fixed = [False] * n
    _place_rings(m, pos, fixed)
    rng = np.random.default_rng(_SEED)
    adj = m.adjacency()

    if not any(fixed):
        pos[0] = (0.0, 0.0)
        fixed[0] = True
    # seed every chain atom near an already-placed neighbor, BFS order
    remaining = True
    while remaining:
        remaining = False
        for i in range(n):
            if fixed[i]:
                continue
            anchors = [w for w in adj[i] if fixed[w]]
            if not anchors:
                remaining = True
                continue
            ax, ay = pos[anchors[0]]
            theta = rng.random() * 2 * math.pi
            pos[i] = (ax + math.cos(theta), ay + math.sin(theta))
            fixed[i] = True
            remaining = remaining or not all(fixed)

    ring_atoms = set()
    for ring in sssr(m):
        ring_atoms.update(ring)
    free = [i for i in range(n) if i not in ring_atoms]
    if not free or n == 1:
        return pos

    p = np.array(pos)
    free_idx = np.array(free)
    bonds = [(i, j) for i, j, _ in m.bonds]
    for _ in range(_ITERATIONS):
        force = np.zeros_like(p)
        delta = p[:, None, :] - p[None, :, :]
        dist = np.sqrt((delta**2).sum(axis=2)) + 1e-9
        np.fill_diagonal(dist, np.inf)
        # pairwise repulsion keeps branches from overlapping
        rep = 0.25 / dist**2
        force += (delta / dist[:, :, None] * rep[:, :, None]).sum(axis=1)
        for i, j in bonds:
            d = p[j] - p[i]
            ln = math.hypot(*d) + 1e-9
            pull = 0.5 * (ln - 1.0) * d / ln
            force[i] += pull
            force[j] -= pull
        p[free_idx] += 0.1 * force[free_idx]
    return [(float(x), float(y)) for x, y in p]


def _label(m: Molecule, idx: int) -> str | None:
    sym = m.elements[idx]
    h = m.hcounts[idx]
    if sym == "C" and len(m) > 1:
        return None
    if h == 0:
        return sym
    if h == 1:
        return f"{sym}H"
    return f"{sym}H{h}"


def depict(m: Molecule) -> str:
    """Render a molecule to a standalone SVG document string."""
    if len(m) > MAX_ATOMS:
        raise DepictError(f"molecule has {len(m)} atoms; depiction limit is {MAX_ATOMS}")
    pos = _layout(m)
    xs = [p[0] for p in pos]
    ys = [p[1] for p in pos]
    ox, oy = min(xs), min(ys)
    scale = BOND_PX
    pts = [
        ((x - ox) * scale + MARGIN, (y - oy) * scale + MARGIN) for x, y in pos
    ]
    width = (max(xs) - ox) * scale + 2 * MARGIN
    height = (max(ys) - oy) * scale + 2 * MARGIN

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.1f}" '
        f'height="{height:.1f}" viewBox="0 0 {width:.1f} {height:.1f}">',
        '<g stroke="black" stroke-width="1.5" fill="none">',
    ]
    labelled = {i for i in range(len(m)) if _label(m, i) is not None}
    for i, j, order in m.bonds:
        (x1, y1), (x2, y2) = pts[i], pts[j]
        dx, dy = x2 - x1, y2 - y1
        ln = math.hypot(dx, dy) or 1.0
        ux, uy = dx / ln, dy / ln
        # pull line ends back from atom labels so text stays readable
        if i in labelled:
            x1, y1 = x1 + 9 * ux, y1 + 9 * uy
        if j in labelled:
            x2, y2 = x2 - 9 * ux, y2 - 9 * uy
        nx, ny = -uy, ux
        offsets = {1: (0.0,), 2: (-2.2, 2.2), 3: (-3.0, 0.0, 3.0)}[order]
        for off in offsets:
            parts.append(
                f'<line x1="{x1 + off * nx:.2f}" y1="{y1 + off * ny:.2f}" '
                f'x2="{x2 + off * nx:.2f}" y2="{y2 + off * ny:.2f}"/>'
            )
    parts.append("</g>")
    parts.append('<g font-family="sans-serif" font-size="13" fill="black">')
    for i in range(len(m)):
        label = _label(m, i)
        if label is None:
            continue
        x, y = pts[i]
        parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" text-anchor="middle" '
            f'dominant-baseline="middle">{label}</text>'
        )
    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
