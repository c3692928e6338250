/** Static parameter schemas for the run form, one per pipeline method.
 *
 * The form renders from these descriptions; the server stays the final
 * authority on validation.  Fields marked advanced stay hidden until
 * the advanced toggle is on.
 */

export type FieldKind = "number" | "text" | "select" | "targets" | "ranges";

export interface FieldSpec {
  name: string;
  label: string;
  kind: FieldKind;
  advanced?: boolean;
  options?: string[];
  placeholder?: string;
  initial?: unknown;
  min?: number;
  max?: number;
  integer?: boolean;
}

export interface MethodSchema {
  method: string;
  label: string;
  parentKinds: string[];
  fields: FieldSpec[];
}

export const METHOD_SCHEMAS: MethodSchema[] = [
  {
    method: "extract_features",
    label: "Extract features",
    parentKinds: ["dataset"],
    fields: [
      {
        name: "levels",
        label: "Fragment levels (comma separated)",
        kind: "text",
        initial: "1,2,3",
        placeholder: "1,2,3",
      },
    ],
  },
  {
    method: "merge_features",
    label: "Merge feature sets",
    parentKinds: ["feature-set", "merged-feature-set"],
    fields: [
      {
        name: "with",
        label: "Merge with node id",
        kind: "text",
        placeholder: "sibling feature-set id",
      },
    ],
  },
  {
    method: "build_model",
    label: "Train model",
    parentKinds: ["feature-set", "merged-feature-set"],
    fields: [
      { name: "property", label: "Property", kind: "text", placeholder: "E_lumo" },
      {
        name: "kinds",
        label: "Model kinds",
        kind: "text",
        initial: "lasso,ridge,elasticnet",
        advanced: true,
      },
      { name: "folds", label: "CV folds", kind: "number", initial: 10, min: 2, integer: true, advanced: true },
      { name: "seed", label: "Seed", kind: "number", initial: 0, integer: true, advanced: true },
    ],
  },
  {
    method: "search",
    label: "Search targets",
    parentKinds: ["model"],
    fields: [
      { name: "targets", label: "Property targets", kind: "targets" },
      { name: "ranges", label: "Feature ranges", kind: "ranges", advanced: true },
      { name: "use_index", label: "Feasibility index", kind: "select", options: ["on", "off"], initial: "on", advanced: true },
      { name: "index_max_atoms", label: "Index atom cap", kind: "number", initial: 5, min: 1, integer: true, advanced: true },
      { name: "swarm", label: "Swarm size", kind: "number", initial: 100, min: 1, integer: true, advanced: true },
      { name: "iterations", label: "Iterations", kind: "number", initial: 200, min: 1, integer: true, advanced: true },
      { name: "candidates", label: "Archive cap", kind: "number", initial: 50, min: 1, integer: true, advanced: true },
      { name: "seed", label: "Seed", kind: "number", initial: 0, integer: true, advanced: true },
      { name: "rules_text", label: "Extra rules (tab separated)", kind: "text", advanced: true },
    ],
  },
  {
    method: "generate",
    label: "Generate structures",
    parentKinds: ["search-result"],
    fields: [
      { name: "max_structures", label: "Structures per vector", kind: "number", initial: 20, min: 1, integer: true },
      { name: "tolerance", label: "Count tolerance", kind: "number", initial: 0, min: 0, integer: true, advanced: true },
      { name: "max_vectors", label: "Vector cap", kind: "number", advanced: true, min: 1, integer: true },
      { name: "time_budget", label: "Seconds per vector", kind: "number", advanced: true, min: 0 },
    ],
  },
  {
    method: "note",
    label: "Attach note",
    parentKinds: [
      "dataset",
      "feature-set",
      "merged-feature-set",
      "model",
      "search-result",
      "generation-result",
      "note",
    ],
    fields: [{ name: "text", label: "Text", kind: "text" }],
  },
];

export function schemasFor(parentKind: string): MethodSchema[] {
  return METHOD_SCHEMAS.filter((s) => s.parentKinds.includes(parentKind));
}
