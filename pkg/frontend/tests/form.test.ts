import { beforeEach, describe, expect, it } from "vitest";

import { RunForm } from "../src/form.js";
import { METHOD_SCHEMAS, schemasFor } from "../src/schema.js";

function schema(method: string) {
  const s = METHOD_SCHEMAS.find((x) => x.method === method);
  if (!s) throw new Error(`no schema for ${method}`);
  return s;
}

describe("run form validation", () => {
  beforeEach(() => {
    document.body.textContent = "";
  });

  it("band defaults to the model sigma for a known property", () => {
    const form = new RunForm(schema("search"), { sigmas: { E_lumo: 0.0124 } });
    form.setTarget(0, { property: "E_lumo", value: "0.0" });
    expect(form.params().targets).toEqual({
      E_lumo: { value: 0, band: 0.0124 },
    });
  });

  it("rejects a non-positive band and disables submit", () => {
    const form = new RunForm(schema("search"));
    form.setTarget(0, { property: "E_gap", value: "0.25", band: "-1" });
    expect(form.isValid()).toBe(false);
    expect(form.errorFor("target.0")).toMatch(/band/);
    expect(form.submit.disabled).toBe(true);
  });

  it("accepts an explicit positive band", () => {
    const form = new RunForm(schema("search"));
    form.setTarget(0, { property: "E_gap", value: "0.25", band: "0.02" });
    expect(form.isValid()).toBe(true);
    expect(form.submit.disabled).toBe(false);
  });

  it("range rows demand lo <= hi", () => {
    const form = new RunForm(schema("search"));
    form.setTarget(0, { property: "E_lumo", value: "0" , band: "0.01"});
    form.addRangeRow("aromatic_rings", "2", "1");
    expect(form.isValid()).toBe(false);
    expect(form.errorFor("range.0")).toMatch(/lo must be <= hi/);
    form.setRange(0, { lo: "0", hi: "0" });
    expect(form.isValid()).toBe(true);
    expect(form.params().bounds).toEqual({ aromatic_rings: [0, 0] });
  });

  it("hides advanced fields until the toggle is on", () => {
    const form = new RunForm(schema("search"));
    expect(form.root.querySelector(".field-swarm")).toBeNull();
    expect(form.root.querySelector(".field-targets")).not.toBeNull();
    form.setAdvanced(true);
    expect(form.root.querySelector(".field-swarm")).not.toBeNull();
  });

  it("packs pso parameters into a nested object", () => {
    const form = new RunForm(schema("search"));
    form.setAdvanced(true);
    form.setTarget(0, { property: "E_lumo", value: "0", band: "0.01" });
    form.setSimple("swarm", "200");
    form.setSimple("iterations", "500");
    const params = form.params();
    expect(params.pso).toEqual({ swarm: 200, iterations: 500, candidates: 50 });
    expect(params).not.toHaveProperty("swarm");
  });

  it("parses levels into a number list", () => {
    const form = new RunForm(schema("extract_features"));
    form.setSimple("levels", "1, 2, 4");
    expect(form.params().levels).toEqual([1, 2, 4]);
  });

  it("build_model folds below 2 invalid", () => {
    const form = new RunForm(schema("build_model"));
    form.setAdvanced(true);
    form.setSimple("property", "E_lumo");
    form.setSimple("folds", "1");
    expect(form.isValid()).toBe(false);
    expect(form.errorFor("folds")).toMatch(/>= 2/);
  });

  it("offers only methods that fit the parent kind", () => {
    expect(schemasFor("model").map((s) => s.method)).toEqual(["search", "note"]);
    expect(schemasFor("dataset").map((s) => s.method)).toContain("extract_features");
    expect(schemasFor("dataset").map((s) => s.method)).not.toContain("generate");
  });
});
