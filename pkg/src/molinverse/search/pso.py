"""Constrained particle swarm search over integer feature vectors.

Particles move in a continuous box; the objective rounds each position to
the nearest integer vector, predicts the targeted properties, and scores
the squared band-normalized distance to the targets.  Infeasible vectors
get a large penalty per violated constraint, and every feasible rounded
vector whose predictions all land inside their bands is archived.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..features import FRAGMENT, FeatureVector
from .feasibility import FeasibilityIndex
from .rules import RuleSet

PENALTY = 1e6
GRADE = 1e2  # slope within a violation-count plateau


@dataclass(frozen=True)
class PropertyTarget:
    value: float
    band: float | None = None  # None: use the model's sigma
    weight: float = 1.0

    def __post_init__(self):
        if self.band is not None and self.band <= 0:
            raise ValueError("band half-width must be positive")
        if self.weight <= 0:
            raise ValueError("weight must be positive")


@dataclass(frozen=True)
class TargetSpec:
    properties: tuple  # ((name, PropertyTarget), ...)

    @classmethod
    def of(cls, **targets) -> "TargetSpec":
        entries = []
        for name, t in targets.items():
            if isinstance(t, PropertyTarget):
                entries.append((name, t))
            elif isinstance(t, tuple):
                entries.append((name, PropertyTarget(*t)))
            else:
                entries.append((name, PropertyTarget(float(t))))
        return cls(tuple(entries))

    def __post_init__(self):
        if not self.properties:
            raise ValueError("at least one target property is required")


@dataclass(frozen=True)
class Candidate:
    vector: FeatureVector
    predicted: dict
    loss: float


@dataclass
class PSOConfig:
    swarm: int = 100
    iterations: int = 200
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    velocity_clamp: float = 0.5  # fraction of each dimension's range
    candidates: int = 50  # stop early once the archive holds this many


def pso_minimize(f, bounds, config: PSOConfig | None = None, seed: int = 0,
                 stop=None, init=None):
    """Minimize f over a box; returns (best position, best value).

    ``f`` maps an (n, d) position block to n fitness values.  Reflective
    boundary handling; velocities clamped per dimension.  ``init``
    optionally places leading particles at given positions (clipped to
    the box); the rest start uniformly at random.
    """
    config = config or PSOConfig()
    bounds = np.asarray(bounds, dtype=float)
    lo, hi = bounds[:, 0], bounds[:, 1]
    if np.any(lo > hi):
        raise ValueError("each bound needs lo <= hi")
    span = np.where(hi > lo, hi - lo, 1.0)
    vmax = config.velocity_clamp * span

    rng = np.random.default_rng(seed)
    n, d = config.swarm, len(bounds)
    pos = lo + rng.random((n, d)) * (hi - lo)
    if init is not None and len(init):
        init = np.clip(np.asarray(init, dtype=float)[:n], lo, hi)
        pos[: len(init)] = init
    vel = (rng.random((n, d)) - 0.5) * vmax
    fit = f(pos)
    pbest, pbest_fit = pos.copy(), fit.copy()
    g = int(np.argmin(pbest_fit))
    gbest, gbest_fit = pbest[g].copy(), float(pbest_fit[g])

    for _ in range(config.iterations):
        if stop is not None and stop():
            break
        r1 = rng.random((n, d))
        r2 = rng.random((n, d))
        vel = (
            config.inertia * vel
            + config.cognitive * r1 * (pbest - pos)
            + config.social * r2 * (gbest[None, :] - pos)
        )
        vel = np.clip(vel, -vmax, vmax)
        pos = pos + vel
        # reflect positions back into the box, flipping velocity
        for _bounce in range(4):  # a clamped step can overshoot at most a little
            under = pos < lo
            over = pos > hi
            if not (under.any() or over.any()):
                break
            pos = np.where(under, 2 * lo - pos, pos)
            pos = np.where(over, 2 * hi - pos, pos)
            vel = np.where(under | over, -vel, vel)
        pos = np.clip(pos, lo, hi)

        fit = f(pos)
        improved = fit < pbest_fit
        pbest[improved] = pos[improved]
        pbest_fit[improved] = fit[improved]
        g = int(np.argmin(pbest_fit))
        if pbest_fit[g] < gbest_fit:
            gbest, gbest_fit = pbest[g].copy(), float(pbest_fit[g])
    return gbest, gbest_fit


def _resolve_models(models, targets: TargetSpec):
    by_prop = {m.property_name: m for m in models}
    schema = models[0].schema
    for m in models:
        if m.schema.descriptors != schema.descriptors:
            raise ValueError("models must share one feature schema")
    resolved = []
    for name, t in targets.properties:
        if name not in by_prop:
            raise ValueError(f"no model predicts property {name!r}")
        band = t.band if t.band is not None else by_prop[name].sigma
        if band is None or not band > 0:  # rejects nan sigma too
            raise ValueError(f"no usable band for property {name!r}")
        resolved.append((name, by_prop[name], t.value, band, t.weight))
    return schema, resolved


def mc_pso(
    models,
    targets: TargetSpec,
    rules: RuleSet,
    index: FeasibilityIndex | None,
    config: PSOConfig | None = None,
    seed: int = 0,
    should_stop=None,
    warm_starts=None,
):
    """Search feature space for vectors predicted inside all target bands.

    Returns the archive of distinct feasible in-band integer vectors as
    Candidates sorted by loss.  An empty list means the search found
    nothing within its budget; that is an answer, not an error.

    ``warm_starts`` optionally supplies known-realizable vectors (for
    example training encodings); up to a quarter of the swarm starts on a
    seeded sample of them, anchoring the search near real chemistry.
    """
    config = config or PSOConfig()
    schema, resolved = _resolve_models(models, targets)
    keys = [d.key for d in schema.descriptors]
    bounds = []
    for key in keys:
        lo, hi = rules.bounds.get(key, (0, 10))
        bounds.append((float(lo), float(hi)))

    # vectorized constraint evaluation; semantics match is_feasible exactly
    # (positions live inside the bound box, so bounds cannot be violated)
    lin_A = np.zeros((len(rules.linears), len(keys)))
    lin_rel = np.zeros(len(rules.linears))
    lin_c = np.zeros(len(rules.linears))
    key_index = {key: k for k, key in enumerate(keys)}
    for r, rule in enumerate(rules.linears):
        for key, coef in rule.coeffs:
            if key in key_index:
                lin_A[r, key_index[key]] += coef
        lin_rel[r] = 1.0 if rule.rel == ">=" else -1.0
        lin_c[r] = rule.const
    tuple_masks = None
    index_points = None
    if index is not None:
        index_points = np.array(sorted(index.points), dtype=float)
        tuple_masks = np.zeros((4, len(keys)))
        for k, d in enumerate(schema.descriptors):
            if d.kind == FRAGMENT:
                tuple_masks[d.edge_count - 1, k] = 1.0
        if not {1, 2, 3, 4} <= schema.levels:
            raise ValueError(
                "feasibility index needs fragment levels 1..4 in the schema"
            )

    archive: dict[tuple, Candidate] = {}

    def fitness(pos: np.ndarray) -> np.ndarray:
        X = np.rint(pos).astype(int)
        X[X < 0] = 0
        Xf = X.astype(float)
        preds = {
            name: model.predict_matrix(Xf) for name, model, _, _, _ in resolved
        }
        loss = np.zeros(len(X))
        in_band = np.ones(len(X), dtype=bool)
        for name, _, value, band, weight in resolved:
            loss += weight * ((preds[name] - value) / band) ** 2
            in_band &= np.abs(preds[name] - value) <= band

        violations = np.zeros(len(X), dtype=int)
        # magnitude term: a slope toward feasibility on top of the flat
        # per-violation penalty, never enough to outrank one violation
        grade = np.zeros(len(X))
        if len(rules.linears):
            lhs = Xf @ lin_A.T
            short = np.where(lin_rel[None, :] > 0, lin_c[None, :] - lhs,
                             lhs - lin_c[None, :])
            bad = short > 0
            violations += bad.sum(axis=1)
            grade += np.where(bad, short, 0.0).sum(axis=1)
        if index is not None:
            tuples = Xf @ tuple_masks.T
            cheb = (
                np.abs(tuples[:, None, :] - index_points[None, :, :])
                .max(axis=2)
                .min(axis=1)
            )
            over = cheb - index.tolerance
            bad = over > 0
            violations += bad.astype(int)
            grade += np.where(bad, over, 0.0)

        out = loss + PENALTY * violations + GRADE * grade
        for i in np.nonzero(in_band & (violations == 0))[0]:
            vec = tuple(int(v) for v in X[i])
            if vec not in archive:
                archive[vec] = Candidate(
                    FeatureVector(schema, vec),
                    {name: float(preds[name][i]) for name, *_ in resolved},
                    float(loss[i]),
                )
        return out

    def stop():
        if should_stop is not None and should_stop():
            return True
        return len(archive) >= config.candidates

    init = None
    if warm_starts is not None:
        rows = np.array(
            [w.values if isinstance(w, FeatureVector) else w for w in warm_starts],
            dtype=float,
        )
        if len(rows):
            k = min(len(rows), max(1, config.swarm // 4))
            pick = np.random.default_rng(seed).choice(len(rows), size=k, replace=False)
            init = rows[pick]

    pso_minimize(fitness, bounds, config, seed, stop=stop, init=init)
    return sorted(archive.values(), key=lambda c: (c.loss, c.vector.values))
