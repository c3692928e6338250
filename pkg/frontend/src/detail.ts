/** Detail pane for the selected tree node.
 *
 * Dataset and generation nodes get a molecule gallery, model nodes a
 * metrics table, search nodes a candidate list.  All content comes
 * straight from the API; the pane is display only.
 */

import { ApiClient, TreeNode, CandidateEntry } from "./api.js";
import { Gallery } from "./gallery.js";

function table(rows: (string | number)[][], header: string[]): HTMLTableElement {
  const t = document.createElement("table");
  const thead = document.createElement("thead");
  const hr = document.createElement("tr");
  for (const h of header) {
    const th = document.createElement("th");
    th.textContent = h;
    hr.appendChild(th);
  }
  thead.appendChild(hr);
  t.appendChild(thead);
  const tbody = document.createElement("tbody");
  for (const row of rows) {
    const tr = document.createElement("tr");
    for (const cell of row) {
      const td = document.createElement("td");
      td.textContent = String(cell);
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
  t.appendChild(tbody);
  return t;
}

export class DetailPane {
  readonly root: HTMLElement;
  gallery: Gallery | null = null;

  constructor(private api: ApiClient) {
    this.root = document.createElement("div");
    this.root.className = "detail";
  }

  async show(node: TreeNode): Promise<void> {
    this.root.textContent = "";
    this.gallery = null;
    const title = document.createElement("h2");
    title.textContent = `${node.kind} ${node.id.slice(0, 8)}`;
    this.root.appendChild(title);
    const meta = document.createElement("pre");
    meta.className = "node-params";
    meta.textContent = JSON.stringify(node.params, null, 2);
    this.root.appendChild(meta);

    try {
      if (
        node.kind === "dataset" ||
        node.kind === "generation-result" ||
        node.kind === "feature-set" ||
        node.kind === "merged-feature-set"
      ) {
        this.gallery = new Gallery(this.api, node.id);
        this.root.appendChild(this.gallery.root);
        await this.gallery.load(0);
      } else if (node.kind === "model") {
        const model = await this.api.model(node.id);
        const p = model.params as Record<string, unknown>;
        const sel = (p.selected ?? {}) as Record<string, unknown>;
        this.root.appendChild(
          table(
            [
              [
                String(p.property ?? ""),
                String(sel.kind ?? ""),
                Number(p.cv_r2 ?? NaN).toFixed(3),
                Number(p.cv_rmse ?? NaN).toFixed(4),
              ],
            ],
            ["property", "kind", "R2", "RMSE"],
          ),
        );
      } else if (node.kind === "search-result") {
        const data = await this.api.candidates(node.id);
        const rows = data.candidates.slice(0, 50).map((c: CandidateEntry) => [
          c.loss.toFixed(4),
          Object.entries(c.predicted)
            .map(([k, v]) => `${k}=${v.toFixed(4)}`)
            .join(" "),
        ]);
        this.root.appendChild(table(rows, ["loss", "predicted"]));
      }
    } catch (err) {
      const msg = document.createElement("div");
      msg.className = "error";
      msg.textContent = err instanceof Error ? err.message : String(err);
      this.root.appendChild(msg);
    }
  }
}
