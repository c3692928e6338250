"""Explicit chemical rules constraining the feature-vector search.

A rule set carries inclusive per-descriptor bounds and linear
inequalities over descriptor keys.  ``default_rules`` ships bounds from
the training data plus three inequalities any valence-valid connected
molecule must satisfy, so the optimizer never wastes time on vectors no
molecule can realize.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..chem import ElementTable
from ..features import ELEMENT, FRAGMENT, FeatureSchema, FeatureVector, FragmentPattern

LE = "<="
GE = ">="


@dataclass(frozen=True)
class LinearRule:
    coeffs: tuple  # ((descriptor key, coefficient), ...)
    rel: str
    const: float
    label: str = ""

    def __post_init__(self):
        if self.rel not in (LE, GE):
            raise ValueError(f"relation must be {LE!r} or {GE!r}")
        for _, c in self.coeffs:
            if not (c == c and abs(c) != float("inf")):
                raise ValueError("coefficients must be finite")

    def evaluate(self, x: FeatureVector) -> float:
        total = 0.0
        by_key = {d.key: v for d, v in zip(x.schema.descriptors, x.values)}
        for key, coef in self.coeffs:
            total += coef * by_key.get(key, 0)
        return total

    def holds(self, x: FeatureVector) -> bool:
        value = self.evaluate(x)
        return value <= self.const if self.rel == LE else value >= self.const

    def describe(self) -> str:
        if self.label:
            return self.label
        expr = "+".join(f"{coef:g}*{key}" for key, coef in self.coeffs)
        return f"{expr} {self.rel} {self.const:g}"


@dataclass
class RuleSet:
    bounds: dict = field(default_factory=dict)  # key -> (lo, hi)
    linears: list = field(default_factory=list)

    def __post_init__(self):
        for key, (lo, hi) in self.bounds.items():
            if lo > hi:
                raise ValueError(f"bound for {key!r} has lo > hi")


def default_rules(
    schema: FeatureSchema, training_X=None, hi_factor: int = 2
) -> RuleSet:
    """Training-derived bounds and structural inequalities.

    Bounds default to [0, hi_factor x max observed count] per descriptor.
    The inequalities: each 1-edge fragment count is capped by either
    endpoint's total valence supply; 1-edge fragments must cover a
    spanning tree; and order-weighted 1-edge counts cannot exceed half
    the valence sum (handshake).
    """
    table: ElementTable = schema.table
    bounds = {}
    if training_X is not None:
        maxima = [0] * len(schema)
        for row in training_X:
            values = row.values if isinstance(row, FeatureVector) else row
            for k, v in enumerate(values):
                maxima[k] = max(maxima[k], int(v))
        for d, m in zip(schema.descriptors, maxima):
            bounds[d.key] = (0, hi_factor * m)

    linears = []
    one_edge = []
    for d in schema.descriptors:
        if d.kind == FRAGMENT and d.edge_count == 1:
            pattern = FragmentPattern.from_key(d.key)
            order = pattern.graph.bonds[0][2]
            one_edge.append((d.key, pattern.graph.elements, order))
    element_keys = [d.key for d in schema.descriptors if d.kind == ELEMENT]

    for key, endpoints, order in one_edge:
        for e in sorted(set(endpoints)):
            linears.append(
                LinearRule(
                    ((key, 1.0), (e, -float(table.valence(e)))),
                    LE,
                    0.0,
                    label=f"#{key} <= valence({e}) * #{e}",
                )
            )
    if one_edge and element_keys:
        coeffs = tuple((key, 1.0) for key, _, _ in one_edge) + tuple(
            (e, -1.0) for e in element_keys
        )
        linears.append(
            LinearRule(coeffs, GE, -1.0, label="bonds >= atoms - 1 (spanning tree)")
        )
        coeffs = tuple((key, 2.0 * order) for key, _, order in one_edge) + tuple(
            (e, -float(table.valence(e))) for e in element_keys
        )
        linears.append(
            LinearRule(coeffs, LE, 0.0, label="handshake valence bound")
        )
    if training_X is not None and element_keys:
        elem_cols = [
            k for k, d in enumerate(schema.descriptors) if d.kind == ELEMENT
        ]
        max_total = 0
        for row in training_X:
            values = row.values if isinstance(row, FeatureVector) else row
            max_total = max(max_total, int(sum(values[k] for k in elem_cols)))
        linears.append(
            LinearRule(
                tuple((e, 1.0) for e in element_keys),
                LE,
                float(max_total),
                label=f"total atoms <= {max_total} (training size envelope)",
            )
        )
    return RuleSet(bounds, linears)


def rules_to_text(rules: RuleSet) -> str:
    lines = []
    for key, (lo, hi) in sorted(rules.bounds.items()):
        lines.append(f"bound\t{key}\t{lo}\t{hi}")
    for rule in rules.linears:
        expr = "+".join(f"{coef:g}*{key}" for key, coef in rule.coeffs)
        lines.append(f"linear\t{expr}\t{rule.rel}\t{rule.const:g}")
    return "\n".join(lines) + "\n" if lines else ""


def rules_from_text(text: str) -> RuleSet:
    bounds = {}
    linears = []
    for ln, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if parts[0] == "bound" and len(parts) == 4:
            bounds[parts[1]] = (int(parts[2]), int(parts[3]))
        elif parts[0] == "linear" and len(parts) == 4:
            coeffs = []
            for term in parts[1].split("+"):
                coef, _, key = term.partition("*")
                coeffs.append((key, float(coef)))
            linears.append(LinearRule(tuple(coeffs), parts[2], float(parts[3])))
        else:
            raise ValueError(f"unparseable rule line {ln}: {line!r}")
    return RuleSet(bounds, linears)
