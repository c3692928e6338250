"""Self-contained text format for trained models.

Sections are introduced by ``[name]`` headers; the embedded schema
manifest makes the document sufficient to predict on new molecules.
"""

from __future__ import annotations

import numpy as np

from ..features import FeatureSchema
from .linear import RegressionModel


def model_to_text(model: RegressionModel) -> str:
    lines = ["[model]"]
    lines.append(f"kind\t{model.kind}")
    lines.append(f"property\t{model.property_name}")
    lines.append(f"l1\t{float(model.l1)!r}")
    lines.append(f"l2\t{float(model.l2)!r}")
    lines.append(f"intercept\t{float(model.intercept)!r}")
    lines.append(f"r2\t{float(model.r2)!r}")
    lines.append(f"rmse\t{float(model.rmse)!r}")
    lines.append(f"fingerprint\t{model.training_fingerprint}")
    lines.append("[schema]")
    lines.append(model.schema.to_manifest().rstrip("\n"))
    lines.append("[weights]")
    for w, mean, std in zip(model.weights, model.means, model.stds):
        lines.append(f"{float(w)!r}\t{float(mean)!r}\t{float(std)!r}")
    return "\n".join(lines) + "\n"


def model_from_text(text: str) -> RegressionModel:
    section = None
    meta: dict[str, str] = {}
    schema_lines: list[str] = []
    rows: list[tuple[float, float, float]] = []
    for line in text.splitlines():
        if line in ("[model]", "[schema]", "[weights]"):
            section = line
            continue
        if not line.strip():
            continue
        if section == "[model]":
            key, _, value = line.partition("\t")
            meta[key] = value
        elif section == "[schema]":
            schema_lines.append(line)
        elif section == "[weights]":
            w, mean, std = line.split("\t")
            rows.append((float(w), float(mean), float(std)))
    schema = FeatureSchema.from_manifest("\n".join(schema_lines))
    weights = np.array([r[0] for r in rows])
    means = np.array([r[1] for r in rows])
    stds = np.array([r[2] for r in rows])
    return RegressionModel(
        kind=meta["kind"],
        schema=schema,
        weights=weights,
        intercept=float(meta["intercept"]),
        means=means,
        stds=stds,
        l1=float(meta["l1"]),
        l2=float(meta["l2"]),
        property_name=meta.get("property", ""),
        r2=float(meta["r2"]),
        rmse=float(meta["rmse"]),
        training_fingerprint=meta.get("fingerprint", ""),
    )
