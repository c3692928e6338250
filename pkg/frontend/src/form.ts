/** Run form built from a static method schema.
 *
 * The form keeps its own validation state and refuses to produce a
 * request body while invalid; the submit button tracks that state.
 * Property bands default to the selected model's sigma and feature
 * ranges validate lo <= hi inline.
 */

import { FieldSpec, MethodSchema } from "./schema.js";

export interface TargetRow {
  property: string;
  value: string;
  band: string;
  sigma?: number;
}

export interface RangeRow {
  key: string;
  lo: string;
  hi: string;
}

export interface FormContext {
  /** property name -> model sigma, used as the default band */
  sigmas?: Record<string, number>;
  /** descriptor keys offered in the range grid */
  featureKeys?: string[];
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export class RunForm {
  readonly root: HTMLElement;
  readonly submit: HTMLButtonElement;
  private advanced = false;
  private targetRows: TargetRow[] = [];
  private rangeRows: RangeRow[] = [];
  private simpleValues: Record<string, string> = {};
  private errors: Record<string, string> = {};
  onSubmit: (params: Record<string, unknown>) => void = () => {};

  constructor(
    readonly schema: MethodSchema,
    readonly context: FormContext = {},
  ) {
    this.root = el("form", "run-form");
    this.root.addEventListener("submit", (ev) => {
      ev.preventDefault();
      if (this.isValid()) this.onSubmit(this.params());
    });
    this.submit = el("button", "submit") as HTMLButtonElement;
    this.submit.type = "submit";
    this.submit.textContent = `Run ${schema.label.toLowerCase()}`;
    for (const field of schema.fields) {
      if (field.kind === "targets") {
        this.addTargetRow();
      } else if (field.kind !== "ranges" && field.initial !== undefined) {
        this.simpleValues[field.name] = String(field.initial);
      }
    }
    this.render();
  }

  setAdvanced(on: boolean) {
    this.advanced = on;
    this.render();
  }

  get advancedOn(): boolean {
    return this.advanced;
  }

  addTargetRow(property = "", value = "") {
    const sigma = this.context.sigmas?.[property];
    this.targetRows.push({
      property,
      value,
      band: sigma !== undefined ? String(sigma) : "",
      sigma,
    });
    this.render();
  }

  addRangeRow(key = "", lo = "", hi = "") {
    this.rangeRows.push({ key, lo, hi });
    this.render();
  }

  setTarget(i: number, patch: Partial<TargetRow>) {
    const row = this.targetRows[i];
    Object.assign(row, patch);
    if (patch.property !== undefined) {
      const sigma = this.context.sigmas?.[patch.property];
      row.sigma = sigma;
      if (sigma !== undefined && row.band.trim() === "") {
        row.band = String(sigma);
      }
    }
    this.render();
  }

  setRange(i: number, patch: Partial<RangeRow>) {
    Object.assign(this.rangeRows[i], patch);
    this.render();
  }

  setSimple(name: string, value: string) {
    this.simpleValues[name] = value;
    this.render();
  }

  private validate() {
    this.errors = {};
    for (const field of this.schema.fields) {
      if (field.kind === "targets") {
        this.targetRows.forEach((row, i) => {
          if (!row.property.trim()) {
            this.errors[`target.${i}`] = "property name required";
          } else if (row.value.trim() === "" || isNaN(Number(row.value))) {
            this.errors[`target.${i}`] = "numeric target value required";
          } else if (row.band.trim() !== "") {
            const band = Number(row.band);
            if (isNaN(band) || band <= 0) {
              this.errors[`target.${i}`] = "band must be > 0";
            }
          }
        });
        if (this.targetRows.length === 0) {
          this.errors["targets"] = "at least one target";
        }
      } else if (field.kind === "ranges") {
        this.rangeRows.forEach((row, i) => {
          if (!row.key.trim()) {
            this.errors[`range.${i}`] = "feature key required";
            return;
          }
          const lo = Number(row.lo);
          const hi = Number(row.hi);
          if (row.lo.trim() === "" || row.hi.trim() === "" || isNaN(lo) || isNaN(hi)) {
            this.errors[`range.${i}`] = "numeric lo and hi required";
          } else if (lo > hi) {
            this.errors[`range.${i}`] = "lo must be <= hi";
          }
        });
      } else {
        const raw = (this.simpleValues[field.name] ?? "").trim();
        if (raw === "") continue;
        if (field.kind === "number") {
          const v = Number(raw);
          if (isNaN(v)) {
            this.errors[field.name] = "must be a number";
          } else if (field.integer && !Number.isInteger(v)) {
            this.errors[field.name] = "must be an integer";
          } else if (field.min !== undefined && v < field.min) {
            this.errors[field.name] = `must be >= ${field.min}`;
          } else if (field.max !== undefined && v > field.max) {
            this.errors[field.name] = `must be <= ${field.max}`;
          }
        }
      }
    }
  }

  isValid(): boolean {
    this.validate();
    return Object.keys(this.errors).length === 0;
  }

  errorFor(key: string): string | undefined {
    return this.errors[key];
  }

  /** The request params this form would submit right now. */
  params(): Record<string, unknown> {
    const out: Record<string, unknown> = {};
    for (const field of this.schema.fields) {
      if (field.kind === "targets") {
        const targets: Record<string, unknown> = {};
        for (const row of this.targetRows) {
          if (!row.property.trim()) continue;
          const entry: Record<string, unknown> = { value: Number(row.value) };
          if (row.band.trim() !== "") entry.band = Number(row.band);
          targets[row.property.trim()] = entry;
        }
        out.targets = targets;
      } else if (field.kind === "ranges") {
        if (this.rangeRows.length) {
          const bounds: Record<string, [number, number]> = {};
          for (const row of this.rangeRows) {
            if (!row.key.trim()) continue;
            bounds[row.key.trim()] = [Number(row.lo), Number(row.hi)];
          }
          out.bounds = bounds;
        }
      } else {
        const raw = (this.simpleValues[field.name] ?? "").trim();
        if (raw === "") continue;
        if (field.name === "levels") {
          out.levels = raw.split(",").map((s) => Number(s.trim()));
        } else if (field.name === "kinds") {
          out.kinds = raw.split(",").map((s) => s.trim());
        } else if (field.name === "use_index") {
          out.use_index = raw === "on";
        } else if (field.kind === "number") {
          out[field.name] = Number(raw);
        } else {
          out[field.name] = raw;
        }
      }
    }
    if (this.schema.method === "search") {
      const pso: Record<string, number> = {};
      for (const key of ["swarm", "iterations", "candidates"]) {
        if (key in out) {
          pso[key] = out[key] as number;
          delete out[key];
        }
      }
      if (Object.keys(pso).length) out.pso = pso;
    }
    return out;
  }

  private visibleFields(): FieldSpec[] {
    return this.schema.fields.filter((f) => this.advanced || !f.advanced);
  }

  private render() {
    this.validate();
    this.root.textContent = "";
    for (const field of this.visibleFields()) {
      const wrap = el("div", `field field-${field.name}`);
      wrap.appendChild(el("label", "field-label", field.label));
      if (field.kind === "targets") {
        this.renderTargets(wrap);
      } else if (field.kind === "ranges") {
        this.renderRanges(wrap);
      } else if (field.kind === "select") {
        const select = el("select") as HTMLSelectElement;
        select.name = field.name;
        for (const opt of field.options ?? []) {
          const o = el("option", undefined, opt) as HTMLOptionElement;
          o.value = opt;
          select.appendChild(o);
        }
        select.value = this.simpleValues[field.name] ?? "";
        select.addEventListener("change", () => this.setSimple(field.name, select.value));
        wrap.appendChild(select);
      } else {
        const input = el("input") as HTMLInputElement;
        input.name = field.name;
        input.value = this.simpleValues[field.name] ?? "";
        if (field.placeholder) input.placeholder = field.placeholder;
        input.addEventListener("input", () => {
          this.simpleValues[field.name] = input.value;
          this.refreshValidity();
        });
        wrap.appendChild(input);
        const err = this.errors[field.name];
        if (err) wrap.appendChild(el("span", "error", err));
      }
      this.root.appendChild(wrap);
    }
    this.submit.disabled = Object.keys(this.errors).length > 0;
    this.root.appendChild(this.submit);
  }

  private refreshValidity() {
    this.validate();
    this.submit.disabled = Object.keys(this.errors).length > 0;
  }

  private renderTargets(wrap: HTMLElement) {
    this.targetRows.forEach((row, i) => {
      const line = el("div", "target-row");
      const prop = el("input", "target-property") as HTMLInputElement;
      prop.placeholder = "property";
      prop.value = row.property;
      prop.addEventListener("change", () => this.setTarget(i, { property: prop.value }));
      const value = el("input", "target-value") as HTMLInputElement;
      value.placeholder = "target";
      value.value = row.value;
      value.addEventListener("change", () => this.setTarget(i, { value: value.value }));
      const band = el("input", "target-band") as HTMLInputElement;
      band.placeholder = "band (model sigma)";
      band.value = row.band;
      band.addEventListener("change", () => this.setTarget(i, { band: band.value }));
      line.append(prop, value, band);
      const err = this.errors[`target.${i}`];
      if (err) line.appendChild(el("span", "error", err));
      wrap.appendChild(line);
    });
    const add = el("button", "add-target", "+ target") as HTMLButtonElement;
    add.type = "button";
    add.addEventListener("click", () => this.addTargetRow());
    wrap.appendChild(add);
  }

  private renderRanges(wrap: HTMLElement) {
    this.rangeRows.forEach((row, i) => {
      const line = el("div", "range-row");
      const key = el("input", "range-key") as HTMLInputElement;
      key.placeholder = "feature key";
      key.value = row.key;
      if (this.context.featureKeys) {
        key.setAttribute("list", "feature-keys");
      }
      key.addEventListener("change", () => this.setRange(i, { key: key.value }));
      const lo = el("input", "range-lo") as HTMLInputElement;
      lo.placeholder = "lo";
      lo.value = row.lo;
      lo.addEventListener("change", () => this.setRange(i, { lo: lo.value }));
      const hi = el("input", "range-hi") as HTMLInputElement;
      hi.placeholder = "hi";
      hi.value = row.hi;
      hi.addEventListener("change", () => this.setRange(i, { hi: hi.value }));
      line.append(key, lo, hi);
      const err = this.errors[`range.${i}`];
      if (err) line.appendChild(el("span", "error", err));
      wrap.appendChild(line);
    });
    const add = el("button", "add-range", "+ range") as HTMLButtonElement;
    add.type = "button";
    add.addEventListener("click", () => this.addRangeRow());
    wrap.appendChild(add);
  }
}
