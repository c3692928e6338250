/** MolData tree navigator.
 *
 * Renders exactly the nodes the server reports, parents before
 * children, with expand/collapse and per-node status badges driven by
 * job polling.  Selection fires a callback so the detail pane can
 * follow.
 */

import { TreeNode } from "./api.js";

export interface TreeCallbacks {
  onSelect: (node: TreeNode) => void;
}

export class TreeView {
  readonly root: HTMLElement;
  private nodes: TreeNode[] = [];
  private collapsed = new Set<string>();
  private badges = new Map<string, string>();
  selected: string | null = null;

  constructor(private callbacks: TreeCallbacks) {
    this.root = document.createElement("div");
    this.root.className = "tree";
  }

  setNodes(nodes: TreeNode[]) {
    this.nodes = nodes;
    this.render();
  }

  setBadge(nodeId: string, badge: string | null) {
    if (badge === null) {
      this.badges.delete(nodeId);
    } else {
      this.badges.set(nodeId, badge);
    }
    this.render();
  }

  select(nodeId: string) {
    this.selected = nodeId;
    const node = this.nodes.find((n) => n.id === nodeId);
    if (node) this.callbacks.onSelect(node);
    this.render();
  }

  toggle(nodeId: string) {
    if (this.collapsed.has(nodeId)) {
      this.collapsed.delete(nodeId);
    } else {
      this.collapsed.add(nodeId);
    }
    this.render();
  }

  /** Depth of the deepest rendered node, root = 1. */
  depth(): number {
    const parent = new Map(this.nodes.map((n) => [n.id, n.parent]));
    let deepest = 0;
    for (const n of this.nodes) {
      let d = 1;
      let p = n.parent;
      while (p) {
        d += 1;
        p = parent.get(p) ?? null;
      }
      deepest = Math.max(deepest, d);
    }
    return deepest;
  }

  private childrenOf(id: string | null): TreeNode[] {
    return this.nodes.filter((n) => n.parent === id);
  }

  private render() {
    this.root.textContent = "";
    const renderLevel = (parent: string | null, container: HTMLElement) => {
      for (const node of this.childrenOf(parent)) {
        const item = document.createElement("div");
        item.className = "tree-node";
        item.dataset.id = node.id;
        const row = document.createElement("div");
        row.className = node.id === this.selected ? "tree-row selected" : "tree-row";

        const kids = this.childrenOf(node.id);
        const caret = document.createElement("span");
        caret.className = "caret";
        caret.textContent = kids.length ? (this.collapsed.has(node.id) ? "+" : "-") : " ";
        caret.addEventListener("click", (ev) => {
          ev.stopPropagation();
          this.toggle(node.id);
        });
        row.appendChild(caret);

        const label = document.createElement("span");
        label.className = "tree-label";
        label.textContent = `${node.kind} ${node.id.slice(0, 8)}`;
        row.appendChild(label);

        const badge = this.badges.get(node.id);
        if (badge) {
          const b = document.createElement("span");
          b.className = `badge badge-${badge}`;
          b.textContent = badge;
          row.appendChild(b);
        }
        row.addEventListener("click", () => this.select(node.id));
        item.appendChild(row);

        if (kids.length && !this.collapsed.has(node.id)) {
          const sub = document.createElement("div");
          sub.className = "tree-children";
          renderLevel(node.id, sub);
          item.appendChild(sub);
        }
        container.appendChild(item);
      }
    };
    renderLevel(null, this.root);
  }
}
