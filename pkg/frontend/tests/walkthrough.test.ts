/**
 * End-to-end walkthrough against a live service process.
 *
 * Spawns the Python service, then drives the real UI components
 * (upload, tree, run form, poller, gallery) through a full session:
 * ingest a CSV, featurize, train, search with a sigma-defaulted band
 * and an aromatic [0,0] constraint, generate, and page through the
 * SVG gallery.  Run with `npm run walkthrough`; it needs the Python
 * package installed.
 */

import { spawn, ChildProcess } from "node:child_process";
import { readFileSync } from "node:fs";
import { join } from "node:path";
import { JSDOM } from "jsdom";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient, TreeNode } from "../src/api.js";
import { RunForm } from "../src/form.js";
import { Gallery } from "../src/gallery.js";
import { METHOD_SCHEMAS } from "../src/schema.js";
import { App } from "../src/main.js";

const PORT = 8234 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let service: ChildProcess;

// the components need a DOM, but fetch / FormData / Blob must stay
// node's own so multipart uploads reach the real service
const dom = new JSDOM("<!doctype html><html><body></body></html>", {
  url: BASE,
});
(globalThis as unknown as { document: Document }).document =
  dom.window.document;

async function waitForService(): Promise<void> {
  for (let i = 0; i < 120; i++) {
    try {
      const res = await fetch(`${BASE}/workspaces`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 500));
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  service = spawn(
    "python3",
    [
      "-m",
      "uvicorn",
      "--factory",
      "molinverse.service.app:create_app",
      "--port",
      String(PORT),
      "--log-level",
      "warning",
    ],
    {
      env: {
        ...process.env,
        MID_DATA_DIR: join(process.cwd(), `.walkthrough-data-${PORT}`),
      },
      stdio: ["ignore", "inherit", "inherit"],
    },
  );
  await waitForService();
});

afterAll(() => {
  service?.kill("SIGKILL");
});

function schema(method: string) {
  return METHOD_SCHEMAS.find((s) => s.method === method)!;
}

describe("full session against the live service", () => {
  it("ingests, trains, searches and shows generated structures", async () => {
    const api = new ApiClient(BASE);
    const app = new App(api);
    document.body.appendChild(app.root);

    // 1. ingest the dataset CSV through the upload path
    const csv = readFileSync(join(__dirname, "fixtures", "walkthrough.csv"));
    await app.ingest(`walk-${Date.now()}`, new Blob([csv], { type: "text/csv" }));
    expect(app.workspace).not.toBeNull();
    let nodes = (await api.tree(app.workspace!)).nodes;
    expect(nodes.length).toBe(1);
    const root = nodes[0];
    expect(root.kind).toBe("dataset");

    // 2. featurize, then train: tree must reach three levels
    const featJob = await app.launch(root, "extract_features", {
      levels: [1, 2, 3, 4],
    });
    expect(featJob?.state).toBe("done");
    const featNode = featJob!.node!;
    const modelJob = await app.launch(
      { ...root, id: featNode, kind: "feature-set" } as TreeNode,
      "build_model",
      { property: "E_lumo", kinds: ["lasso"], folds: 3 },
    );
    expect(modelJob?.state).toBe("done");
    await app.refreshTree();
    expect(app.tree.depth()).toBeGreaterThanOrEqual(3);

    // 3. the search form defaults the band to the model sigma
    const modelNode = modelJob!.node!;
    const modelDetail = await api.node(modelNode);
    const sigma = Number(modelDetail.params.cv_rmse);
    expect(sigma).toBeGreaterThan(0);
    const form = new RunForm(schema("search"), { sigmas: { E_lumo: sigma } });
    form.setAdvanced(true);
    form.setTarget(0, { property: "E_lumo", value: "-0.0288" });
    form.addRangeRow("aromatic_rings", "0", "0");
    form.setSimple("swarm", "100");
    form.setSimple("iterations", "300");
    form.setSimple("candidates", "40");
    expect(form.isValid()).toBe(true);
    const params = form.params();
    expect((params.targets as Record<string, { band: number }>).E_lumo.band).toBe(sigma);
    expect((params.bounds as Record<string, number[]>).aromatic_rings).toEqual([0, 0]);

    // 4. launch the search and poll the job to completion
    const searchJob = await app.launch(
      { ...root, id: modelNode, kind: "model" } as TreeNode,
      "search",
      params,
    );
    expect(searchJob?.state).toBe("done");
    const found = (await api.candidates(searchJob!.node!)).candidates;
    expect(found.length).toBeGreaterThan(0);

    // 5. generate structures from the archive
    const genJob = await app.launch(
      { ...root, id: searchJob!.node!, kind: "search-result" } as TreeNode,
      "generate",
      { tolerance: 1, max_structures: 5, time_budget: 3, max_vectors: 20 },
    );
    expect(genJob?.state).toBe("done");

    // 6. the gallery pages 20 SVG structures
    const gallery = new Gallery(api, genJob!.node!);
    await gallery.load(0);
    const images = gallery.root.querySelectorAll("img");
    expect(images.length).toBe(20);
    const svg = await api.svg(images[0].alt);
    expect(svg).toContain("<svg");

    // the rebuilt tree shows the whole lineage
    await app.refreshTree();
    expect(app.tree.depth()).toBeGreaterThanOrEqual(5);
  });
});
