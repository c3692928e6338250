"""End-to-end inverse design: from property targets to structures.

The full loop on the benchmark set. Train lasso models for two
orbital-energy properties, slice them down to the descriptors they
actually use, constrain the search with structural rules and the
data-driven feasibility index, run the constrained particle swarm,
and rebuild molecules from the archive vectors.

This is the expensive demo; expect a few minutes on one core.

Run:  python3 demos/inverse_design.py
"""

import time

import numpy as np

from molinverse.chem import write_smiles
from molinverse.data import E_GAP, E_LUMO, synthetic_qm9
from molinverse.features import (
    AROMATIC_RINGS,
    ELEMENT,
    FRAGMENT,
    RINGS,
    FeatureVector,
    encode,
    extract_vocabulary,
)
from molinverse.generate import generate, spec_from_vector
from molinverse.regress import cross_validate, project_model, select_features, train
from molinverse.search import (
    PSOConfig,
    PropertyTarget,
    TargetSpec,
    build_feasibility_index,
    default_rules,
    mc_pso,
)

TARGET_LUMO = 0.0
TARGET_GAP = 0.25


def main():
    t0 = time.time()
    mols, props = synthetic_qm9(1000)
    schema = extract_vocabulary(mols, {1, 2, 3, 4})
    X = [FeatureVector(schema, tuple(encode(m, schema).values)) for m in mols]
    print(f"featurized: {len(schema)} descriptors ({time.time()-t0:.0f}s)")

    models, sigmas = {}, {}
    for prop in (E_LUMO, E_GAP):
        models[prop] = train(X, props[prop], "lasso", l1=1e-3,
                             schema=schema, property_name=prop)
        _, sigmas[prop] = cross_validate(X, props[prop], "lasso",
                                         l1=1e-3, k=10, seed=0)
        print(f"{prop}: sigma = {sigmas[prop]:.4f} Ha")

    # search only the features the models care about, plus the
    # structural counts the generator needs
    keep = set()
    for d in schema.descriptors:
        if d.kind in (ELEMENT, RINGS, AROMATIC_RINGS) or (
            d.kind == FRAGMENT and d.edge_count == 1
        ):
            keep.add((d.kind, d.key))
    for m in models.values():
        for d in select_features(m).descriptors:
            keep.add((d.kind, d.key))
    reduced = schema.filtered(keep)
    p_lumo = project_model(models[E_LUMO], reduced)
    p_gap = project_model(models[E_GAP], reduced)
    print(f"search space reduced to {len(reduced)} descriptors")

    pos = {(d.kind, d.key): k for k, d in enumerate(schema.descriptors)}
    cols = np.array([pos[(d.kind, d.key)] for d in reduced.descriptors])
    Xr = np.array([x.values for x in X], dtype=float)[:, cols]
    rules = default_rules(reduced, training_X=Xr)
    elements = sorted({e for m in mols for e in m.elements})
    index = build_feasibility_index(elements, max_atoms=5, dataset=mols,
                                    table=schema.table, schema=reduced)
    print(f"feasibility index: {len(index.points)} tuples "
          f"({time.time()-t0:.0f}s)")

    targets = TargetSpec.of(
        E_lumo=PropertyTarget(TARGET_LUMO, 1.5 * sigmas[E_LUMO]),
        E_gap=PropertyTarget(TARGET_GAP, 1.5 * sigmas[E_GAP]),
    )
    config = PSOConfig(swarm=200, iterations=1000, candidates=50)
    archive = {}
    for seed in range(3):
        for c in mc_pso([p_lumo, p_gap], targets, rules, index, config,
                        seed=seed, warm_starts=Xr):
            archive.setdefault(c.vector.values, c)
    print(f"archive: {len(archive)} distinct in-band vectors")

    # sensitive descriptors must match exactly or predictions drift
    u = np.maximum(
        np.abs(p_lumo.weights / p_lumo.stds) / sigmas[E_LUMO],
        np.abs(p_gap.weights / p_gap.stds) / sigmas[E_GAP],
    )
    tolerance = {d.key: 0 if ui > 0.5 else 1
                 for d, ui in zip(reduced.descriptors, u)
                 if d.kind in (RINGS, AROMATIC_RINGS, FRAGMENT)}

    shown = 0
    for c in sorted(archive.values(), key=lambda c: c.loss):
        spec = spec_from_vector(c.vector, tolerance,
                                max_structures=3, time_budget=5.0)
        for m in generate(spec):
            x = encode(m, reduced)
            print(f"  {write_smiles(m):<24} "
                  f"lumo={p_lumo.predict(x):+.4f} gap={p_gap.predict(x):.4f}")
            shown += 1
        if shown >= 15:
            break
    print(f"done in {time.time()-t0:.0f}s")


if __name__ == "__main__":
    main()
