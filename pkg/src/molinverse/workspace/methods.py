"""Workspace method dispatch: each run appends one child node.

Payload formats by node kind:
  dataset            CSV, canonical SMILES first column, properties after
  feature-set(s)     JSON {"schema": manifest text, "smiles": [...],
                     "matrix": [[counts]]}
  model              the regressor's self-contained text format
  search-result      JSON {"schema": ..., "candidates": [{"values",
                     "predicted", "loss"}], "params": {...}}
  generation-result  JSON {"items": [{"values": [...], "smiles": [...]}],
                     "params": {...}}
  note               plain text
"""

from __future__ import annotations

import csv
import io
import json
import math
import os

from ..chem import SmilesError, canonical_key, parse_smiles, write_smiles
from ..features import (
    FeatureSchema,
    FeatureVector,
    encode,
    extract_vocabulary,
    merge_schemas,
)
from ..generate import generate, spec_from_vector
from ..regress import KINDS as MODEL_KINDS
from ..regress import fit_best, model_from_text, model_to_text
from ..search import (
    PSOConfig,
    PropertyTarget,
    TargetSpec,
    build_feasibility_index,
    default_rules,
    mc_pso,
    rules_from_text,
)
from .store import (
    DATASET,
    FEATURE_SET,
    GENERATION_RESULT,
    LINEAGE,
    MERGED_FEATURE_SET,
    MODEL,
    NOTE,
    SEARCH_RESULT,
    LineageError,
    MolDataNode,
    Workspace,
    WorkspaceError,
)


class IngestError(WorkspaceError):
    pass


def ingest_csv(source, directory, name: str) -> Workspace:
    """Create a workspace whose root dataset node holds the CSV contents.

    ``source`` is a filesystem path or raw CSV text.  The header needs a
    ``smiles`` column (case-insensitive); every other column is a numeric
    property.  Errors carry 1-based row numbers.
    """
    source = str(source)
    if "\n" not in source and os.path.exists(source):
        with open(source, newline="", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    reader = csv.reader(io.StringIO(text))
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise IngestError(f"CSV syntax error: {exc}") from exc
    if not rows:
        raise IngestError("empty CSV")
    header = rows[0]
    lowered = [c.strip().lower() for c in header]
    if "smiles" not in lowered:
        raise IngestError("missing required column 'smiles'")
    smiles_idx = lowered.index("smiles")
    prop_names = [c.strip() for i, c in enumerate(header) if i != smiles_idx]
    if len(set(prop_names)) != len(prop_names):
        raise IngestError("duplicate property column names")

    mols = []
    props: dict[str, list[float]] = {p: [] for p in prop_names}
    seen: dict[str, int] = {}
    for row_no, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise IngestError(
                f"row {row_no}: expected {len(header)} columns, got {len(row)}"
            )
        smiles = row[smiles_idx].strip()
        try:
            m = parse_smiles(smiles)
        except SmilesError as exc:
            raise IngestError(f"row {row_no}: bad SMILES {smiles!r}: {exc}") from exc
        key = canonical_key(m)
        if key in seen:
            raise IngestError(
                f"row {row_no}: duplicate structure (same molecule as row {seen[key]})"
            )
        seen[key] = row_no
        values = {}
        for col, cell in zip(header, row):
            if col == header[smiles_idx]:
                continue
            cell = cell.strip()
            if not cell:
                raise IngestError(f"row {row_no}: missing value in column {col!r}")
            try:
                v = float(cell)
            except ValueError as exc:
                raise IngestError(
                    f"row {row_no}: column {col!r} is not a number: {cell!r}"
                ) from exc
            if not math.isfinite(v):
                raise IngestError(f"row {row_no}: column {col!r} is not finite")
            values[col.strip()] = v
        mols.append(m)
        for p in prop_names:
            props[p].append(values[p])

    if not mols:
        raise IngestError("CSV has no data rows")

    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(["smiles"] + prop_names)
    for i, m in enumerate(mols):
        writer.writerow([write_smiles(m)] + [repr(props[p][i]) for p in prop_names])

    ws = Workspace.create(directory, name)
    ws.add_node(
        DATASET,
        None,
        "ingest_csv",
        {"rows": len(mols), "properties": prop_names},
        out.getvalue().encode("utf-8"),
    )
    return ws


def load_dataset(ws: Workspace, node: MolDataNode):
    """(molecules, {property: values}) from a dataset node payload."""
    reader = csv.reader(io.StringIO(ws.payload_text(node)))
    rows = list(reader)
    header = rows[0]
    mols = [parse_smiles(r[0]) for r in rows[1:]]
    props = {}
    for i, name in enumerate(header):
        if i > 0:
            props[name] = [float(r[i]) for r in rows[1:]]
    return mols, props


def load_feature_set(ws: Workspace, node: MolDataNode):
    d = json.loads(ws.payload_text(node))
    schema = FeatureSchema.from_manifest(d["schema"])
    return schema, d["smiles"], d["matrix"]


def _check_lineage(kind: str, parent: MolDataNode):
    allowed = LINEAGE[kind]
    if allowed is not None and parent.kind not in allowed:
        raise LineageError(f"{kind} cannot descend from {parent.kind}")


def run_method(ws: Workspace, parent_id: str, method: str, params: dict | None = None):
    """Dispatch a method against a parent node; returns the new node.

    The computation runs before anything touches disk, so a failure
    leaves the workspace unchanged.
    """
    params = dict(params or {})
    parent = ws.node(parent_id)
    handler = _METHODS.get(method)
    if handler is None:
        raise WorkspaceError(
            f"unknown method {method!r}; expected one of {sorted(_METHODS)}"
        )
    kind, payload, recorded = handler(ws, parent, params)
    _check_lineage(kind, parent)
    return ws.add_node(kind, parent.id, method, recorded, payload)


def _method_extract_features(ws, parent, params):
    _check_lineage(FEATURE_SET, parent)
    levels = sorted(int(l) for l in params.get("levels", [1, 2, 3]))
    mols, _ = load_dataset(ws, ws.ancestor_of_kind(parent.id, DATASET))
    schema = extract_vocabulary(mols, set(levels))
    matrix = [list(encode(m, schema).values) for m in mols]
    payload = json.dumps(
        {
            "schema": schema.to_manifest(),
            "smiles": [write_smiles(m) for m in mols],
            "matrix": matrix,
        }
    ).encode("utf-8")
    return FEATURE_SET, payload, {"levels": levels, "features": len(schema)}


def _method_merge_features(ws, parent, params):
    _check_lineage(MERGED_FEATURE_SET, parent)
    other_id = params.get("with")
    if not other_id:
        raise WorkspaceError("merge_features needs params['with'] = node id")
    other = ws.node(other_id)
    if other.kind not in (FEATURE_SET, MERGED_FEATURE_SET):
        raise LineageError(f"cannot merge with a {other.kind} node")
    schema_a, smiles_a, matrix_a = load_feature_set(ws, parent)
    schema_b, smiles_b, _ = load_feature_set(ws, other)
    if smiles_a != smiles_b:
        raise WorkspaceError("feature sets cover different molecule lists")
    merged = merge_schemas(schema_a, schema_b)
    mols = [parse_smiles(s) for s in smiles_a]
    matrix = [list(encode(m, merged).values) for m in mols]
    payload = json.dumps(
        {"schema": merged.to_manifest(), "smiles": smiles_a, "matrix": matrix}
    ).encode("utf-8")
    return (
        MERGED_FEATURE_SET,
        payload,
        {"with": other_id, "features": len(merged)},
    )


def _method_build_model(ws, parent, params):
    _check_lineage(MODEL, parent)
    prop = params.get("property")
    if not prop:
        raise WorkspaceError("build_model needs params['property']")
    kinds = tuple(params.get("kinds", MODEL_KINDS))
    folds = int(params.get("folds", 10))
    if folds < 2:
        raise WorkspaceError("folds must be >= 2")
    seed = int(params.get("seed", 0))
    schema, smiles, matrix = load_feature_set(ws, parent)
    dataset = ws.ancestor_of_kind(parent.id, DATASET)
    _, props = load_dataset(ws, dataset)
    if prop not in props:
        raise WorkspaceError(
            f"dataset has no property {prop!r}; available: {sorted(props)}"
        )
    model, _, best = fit_best(
        [FeatureVector(schema, tuple(r)) for r in matrix],
        props[prop],
        kinds=kinds,
        k=folds,
        seed=seed,
        schema=schema,
        property_name=prop,
        fingerprint=f"{dataset.id}:{prop}",
    )
    payload = model_to_text(model).encode("utf-8")
    recorded = {
        "property": prop,
        "kinds": list(kinds),
        "folds": folds,
        "seed": seed,
        "selected": {"kind": best.kind, "l1": best.l1, "l2": best.l2},
        "cv_r2": best.r2,
        "cv_rmse": best.rmse,
    }
    return MODEL, payload, recorded


def _method_search(ws, parent, params):
    _check_lineage(SEARCH_RESULT, parent)
    models = [model_from_text(ws.payload_text(parent))]
    for node_id in params.get("with_models", []):
        node = ws.node(node_id)
        if node.kind != MODEL:
            raise LineageError(f"with_models entry {node_id!r} is a {node.kind}")
        models.append(model_from_text(ws.payload_text(node)))
    schema = models[0].schema

    raw_targets = params.get("targets")
    if not raw_targets:
        raise WorkspaceError("search needs params['targets']")
    entries = {}
    for name, t in raw_targets.items():
        if isinstance(t, dict):
            entries[name] = PropertyTarget(
                float(t["value"]),
                None if t.get("band") is None else float(t["band"]),
                float(t.get("weight", 1.0)),
            )
        else:
            entries[name] = PropertyTarget(float(t))
    targets = TargetSpec.of(**entries)

    feat = ws.node(parent.parent)  # the feature set the model trained on
    _, _, matrix = load_feature_set(ws, feat)
    rules = default_rules(schema, training_X=matrix)
    for key, (lo, hi) in (params.get("bounds") or {}).items():
        rules.bounds[key] = (int(lo), int(hi))
    if params.get("rules_text"):
        extra = rules_from_text(params["rules_text"])
        rules.bounds.update(extra.bounds)
        rules.linears.extend(extra.linears)

    index = None
    if params.get("use_index", True):
        mols, _ = load_dataset(ws, ws.ancestor_of_kind(parent.id, DATASET))
        elements = sorted({e for m in mols for e in m.elements})
        index = build_feasibility_index(
            elements,
            max_atoms=int(params.get("index_max_atoms", 5)),
            dataset=mols,
            table=schema.table,
            tolerance=int(params.get("index_tolerance", 0)),
            schema=schema,
        )

    config = PSOConfig(**params.get("pso", {}))
    seed = int(params.get("seed", 0))
    candidates = mc_pso(
        models, targets, rules, index, config, seed, warm_starts=matrix
    )
    payload = json.dumps(
        {
            "schema": schema.to_manifest(),
            "candidates": [
                {
                    "values": list(c.vector.values),
                    "predicted": c.predicted,
                    "loss": c.loss,
                }
                for c in candidates
            ],
        }
    ).encode("utf-8")
    recorded = {
        "targets": {
            name: {"value": t.value, "band": t.band, "weight": t.weight}
            for name, t in targets.properties
        },
        "seed": seed,
        "use_index": bool(params.get("use_index", True)),
        "found": len(candidates),
    }
    return SEARCH_RESULT, payload, recorded


def _method_generate(ws, parent, params):
    _check_lineage(GENERATION_RESULT, parent)
    d = json.loads(ws.payload_text(parent))
    schema = FeatureSchema.from_manifest(d["schema"])
    tolerance = int(params.get("tolerance", 0))
    per_vector = params.get("max_structures", 20)
    time_budget = params.get("time_budget")
    top = params.get("max_vectors")
    items = []
    for entry in d["candidates"][: top if top else None]:
        x = FeatureVector(schema, tuple(entry["values"]))
        spec = spec_from_vector(
            x, tolerance, max_structures=per_vector, time_budget=time_budget
        )
        smiles = [write_smiles(m) for m in generate(spec)]
        items.append({"values": entry["values"], "smiles": smiles})
    payload = json.dumps({"items": items}).encode("utf-8")
    recorded = {
        "tolerance": tolerance,
        "max_structures": per_vector,
        "vectors": len(items),
        "molecules": sum(len(i["smiles"]) for i in items),
    }
    return GENERATION_RESULT, payload, recorded


def _method_note(ws, parent, params):
    text = params.get("text", "")
    return NOTE, text.encode("utf-8"), {"text": text}


_METHODS = {
    "extract_features": _method_extract_features,
    "merge_features": _method_merge_features,
    "build_model": _method_build_model,
    "search": _method_search,
    "generate": _method_generate,
    "note": _method_note,
}
