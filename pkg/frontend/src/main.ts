/** Application shell: workspace picker, tree, run form, job monitor.
 *
 * State lives on the server; every refresh rebuilds the view from the
 * API, so a browser reload never loses work.
 */

import { ApiClient, Job, TreeNode } from "./api.js";
import { DetailPane } from "./detail.js";
import { RunForm } from "./form.js";
import { JobPoller } from "./poll.js";
import { MethodSchema, schemasFor } from "./schema.js";
import { TreeView } from "./tree.js";

declare global {
  interface Window {
    MID_API_BASE?: string;
  }
}

export class App {
  readonly root: HTMLElement;
  readonly tree: TreeView;
  readonly detail: DetailPane;
  workspace: string | null = null;
  private formHost: HTMLElement;
  private statusBar: HTMLElement;
  private currentForm: RunForm | null = null;
  private advanced = false;

  constructor(readonly api: ApiClient) {
    this.root = document.createElement("div");
    this.root.className = "app";
    this.statusBar = document.createElement("div");
    this.statusBar.className = "status";

    const side = document.createElement("div");
    side.className = "sidebar";
    side.appendChild(this.buildUpload());
    this.tree = new TreeView({ onSelect: (n) => void this.onSelect(n) });
    side.appendChild(this.tree.root);

    const mainPane = document.createElement("div");
    mainPane.className = "main";
    this.detail = new DetailPane(this.api);
    this.formHost = document.createElement("div");
    this.formHost.className = "form-host";
    mainPane.append(this.statusBar, this.detail.root, this.formHost);

    this.root.append(side, mainPane);
  }

  status(text: string) {
    this.statusBar.textContent = text;
  }

  private buildUpload(): HTMLElement {
    const box = document.createElement("div");
    box.className = "upload";
    const name = document.createElement("input");
    name.placeholder = "workspace name";
    name.className = "ws-name";
    const file = document.createElement("input");
    file.type = "file";
    file.accept = ".csv";
    const button = document.createElement("button");
    button.textContent = "Ingest CSV";
    button.addEventListener("click", () => {
      const f = file.files?.[0];
      if (!f || !name.value.trim()) {
        this.status("pick a CSV file and a workspace name");
        return;
      }
      void this.ingest(name.value.trim(), f);
    });
    box.append(name, file, button);
    return box;
  }

  async ingest(name: string, csv: Blob): Promise<void> {
    try {
      const res = await this.api.createWorkspace(name, csv);
      this.workspace = res.workspace;
      this.status(`workspace ${res.workspace} created`);
      await this.refreshTree();
      this.tree.select(res.root);
    } catch (err) {
      this.status(err instanceof Error ? err.message : String(err));
    }
  }

  async openWorkspace(name: string): Promise<void> {
    this.workspace = name;
    await this.refreshTree();
  }

  async refreshTree(): Promise<void> {
    if (!this.workspace) return;
    const tree = await this.api.tree(this.workspace);
    this.tree.setNodes(tree.nodes);
  }

  private async onSelect(node: TreeNode): Promise<void> {
    await this.detail.show(node);
    this.buildRunForms(node);
  }

  private async modelSigmas(node: TreeNode): Promise<Record<string, number>> {
    // band defaults come from the selected model's cross-validated RMSE
    if (node.kind !== "model") return {};
    const detail = await this.api.node(node.id);
    const prop = String(detail.params.property ?? "");
    const sigma = Number(detail.params.cv_rmse ?? NaN);
    return prop && isFinite(sigma) ? { [prop]: sigma } : {};
  }

  private buildRunForms(node: TreeNode) {
    this.formHost.textContent = "";
    this.currentForm = null;
    const schemas = schemasFor(node.kind);
    if (!schemas.length) return;

    const picker = document.createElement("select");
    picker.className = "method-picker";
    for (const s of schemas) {
      const opt = document.createElement("option");
      opt.value = s.method;
      opt.textContent = s.label;
      picker.appendChild(opt);
    }
    const advanced = document.createElement("label");
    advanced.className = "advanced-toggle";
    const check = document.createElement("input");
    check.type = "checkbox";
    check.checked = this.advanced;
    check.addEventListener("change", () => {
      this.advanced = check.checked;
      this.currentForm?.setAdvanced(this.advanced);
    });
    advanced.append(check, document.createTextNode(" advanced"));

    const host = document.createElement("div");
    const mount = async (schema: MethodSchema) => {
      const sigmas = await this.modelSigmas(node);
      const form = new RunForm(schema, { sigmas });
      form.setAdvanced(this.advanced);
      form.onSubmit = (params) => void this.launch(node, schema.method, params);
      this.currentForm = form;
      host.textContent = "";
      host.appendChild(form.root);
    };
    picker.addEventListener("change", () => {
      const schema = schemas.find((s) => s.method === picker.value);
      if (schema) void mount(schema);
    });
    this.formHost.append(picker, advanced, host);
    void mount(schemas[0]);
  }

  async launch(
    node: TreeNode,
    method: string,
    params: Record<string, unknown>,
  ): Promise<Job | null> {
    if (!this.workspace) return null;
    try {
      const res = await this.api.run(this.workspace, node.id, method, params);
      this.status(`job ${res.job} queued (${method})`);
      this.tree.setBadge(node.id, "queued");
      return await this.monitor(res.job, node.id);
    } catch (err) {
      this.status(err instanceof Error ? err.message : String(err));
      return null;
    }
  }

  monitor(jobId: string, parentId: string): Promise<Job> {
    return new Promise((resolve, reject) => {
      const poller = new JobPoller(this.api, jobId, {
        onUpdate: (job) => {
          this.tree.setBadge(parentId, job.state);
          const bits = Object.entries(job.progress)
            .map(([k, v]) => `${k}=${v}`)
            .join(" ");
          this.status(`job ${job.id}: ${job.state} ${bits}`);
        },
        onDone: (job) => {
          this.tree.setBadge(parentId, null);
          if (job.state === "done") {
            this.status(`job ${job.id} done`);
            void this.refreshTree().then(() => {
              if (job.node) this.tree.select(job.node);
            });
          } else {
            this.status(`job ${job.id} failed: ${job.error ?? "unknown"}`);
          }
          resolve(job);
        },
        onError: (err) => reject(err),
      });
      poller.start();
    });
  }
}

export function boot(): App {
  const api = new ApiClient(window.MID_API_BASE ?? "");
  const app = new App(api);
  document.body.appendChild(app.root);
  return app;
}

if (typeof document !== "undefined" && document.currentScript) {
  boot();
}
