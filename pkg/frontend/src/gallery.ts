/** Paged molecule gallery, 20 structures per page.
 *
 * Each cell is an <img> pointing at the service's SVG depiction
 * endpoint; no chemistry happens client side.
 */

import { ApiClient } from "./api.js";

export const PAGE_SIZE = 20;

export class Gallery {
  readonly root: HTMLElement;
  page = 0;
  private smiles: string[] = [];
  private total = 0;

  constructor(
    private api: ApiClient,
    private nodeId: string,
  ) {
    this.root = document.createElement("div");
    this.root.className = "gallery";
  }

  get pageCount(): number {
    return Math.max(1, Math.ceil(this.total / PAGE_SIZE));
  }

  async load(page = 0): Promise<void> {
    this.page = page;
    const data = await this.api.molecules(this.nodeId, page * PAGE_SIZE, PAGE_SIZE);
    this.total = data.total;
    this.smiles = data.smiles;
    this.render();
  }

  private render() {
    this.root.textContent = "";
    const grid = document.createElement("div");
    grid.className = "gallery-grid";
    for (const smi of this.smiles) {
      const cell = document.createElement("figure");
      cell.className = "gallery-cell";
      const img = document.createElement("img");
      img.src = this.api.svgUrl(smi);
      img.alt = smi;
      const caption = document.createElement("figcaption");
      caption.textContent = smi;
      cell.append(img, caption);
      grid.appendChild(cell);
    }
    this.root.appendChild(grid);

    const nav = document.createElement("div");
    nav.className = "gallery-nav";
    const prev = document.createElement("button");
    prev.textContent = "prev";
    prev.disabled = this.page === 0;
    prev.addEventListener("click", () => void this.load(this.page - 1));
    const label = document.createElement("span");
    label.textContent = `page ${this.page + 1} / ${this.pageCount} (${this.total} molecules)`;
    const next = document.createElement("button");
    next.textContent = "next";
    next.disabled = this.page >= this.pageCount - 1;
    next.addEventListener("click", () => void this.load(this.page + 1));
    nav.append(prev, label, next);
    this.root.appendChild(nav);
  }
}
