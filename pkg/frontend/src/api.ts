/** Typed client for the inverse-design service HTTP API.
 *
 * Every method maps to one documented endpoint; errors carry the
 * server's machine code and message verbatim so the UI can surface
 * them without translation.
 */

export interface TreeNode {
  id: string;
  parent: string | null;
  kind: string;
  method: string;
  params: Record<string, unknown>;
  created_at: string;
}

export interface TreeResponse {
  workspace: string;
  nodes: TreeNode[];
  text: string;
}

export interface Job {
  id: string;
  workspace: string;
  parent: string;
  method: string;
  state: "queued" | "running" | "done" | "failed";
  node: string | null;
  progress: Record<string, unknown>;
  error: string | null;
}

export interface NodeDetail {
  workspace: string;
  id: string;
  parent: string | null;
  kind: string;
  method: string;
  params: Record<string, unknown>;
  created_at: string;
  payload_sha256: string;
  payload_size: number;
}

export interface MoleculePage {
  total: number;
  offset: number;
  limit: number;
  smiles: string[];
}

export interface CandidateEntry {
  values: number[];
  predicted: Record<string, number>;
  loss: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function unwrap<T>(res: Response): Promise<T> {
  if (res.ok) {
    return (await res.json()) as T;
  }
  let code = "unknown";
  let message = res.statusText;
  try {
    const body = await res.json();
    if (body && body.error) {
      code = body.error.code ?? code;
      message = body.error.message ?? message;
    } else if (body && body.detail) {
      message = JSON.stringify(body.detail);
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(res.status, code, message);
}

export class ApiClient {
  constructor(
    public baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async listWorkspaces(): Promise<{ workspaces: { name: string; nodes: number }[] }> {
    return unwrap(await this.fetchFn(this.url("/workspaces")));
  }

  async createWorkspace(
    name: string,
    csv: Blob | File,
  ): Promise<{ workspace: string; root: string }> {
    const form = new FormData();
    form.append("name", name);
    form.append("file", csv, "dataset.csv");
    return unwrap(
      await this.fetchFn(this.url("/workspaces"), { method: "POST", body: form }),
    );
  }

  async tree(workspace: string): Promise<TreeResponse> {
    return unwrap(
      await this.fetchFn(this.url(`/workspaces/${workspace}/tree`)),
    );
  }

  async run(
    workspace: string,
    parent: string,
    method: string,
    params: Record<string, unknown>,
  ): Promise<{ job: string }> {
    return unwrap(
      await this.fetchFn(
        this.url(`/workspaces/${workspace}/nodes/${parent}/run`),
        {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify({ method, params }),
        },
      ),
    );
  }

  async job(id: string): Promise<Job> {
    return unwrap(await this.fetchFn(this.url(`/jobs/${id}`)));
  }

  async cancelJob(id: string): Promise<Job> {
    return unwrap(
      await this.fetchFn(this.url(`/jobs/${id}`), { method: "DELETE" }),
    );
  }

  async node(id: string): Promise<NodeDetail> {
    return unwrap(await this.fetchFn(this.url(`/nodes/${id}`)));
  }

  async molecules(id: string, offset = 0, limit = 20): Promise<MoleculePage> {
    return unwrap(
      await this.fetchFn(
        this.url(`/nodes/${id}/molecules?offset=${offset}&limit=${limit}`),
      ),
    );
  }

  async model(id: string): Promise<{ id: string; params: Record<string, unknown>; text: string }> {
    return unwrap(await this.fetchFn(this.url(`/nodes/${id}/model`)));
  }

  async candidates(id: string): Promise<{ id: string; candidates: CandidateEntry[] }> {
    return unwrap(await this.fetchFn(this.url(`/nodes/${id}/candidates`)));
  }

  svgUrl(smiles: string): string {
    return this.url(`/molecules/svg?smiles=${encodeURIComponent(smiles)}`);
  }

  async svg(smiles: string): Promise<string> {
    const res = await this.fetchFn(this.svgUrl(smiles));
    if (!res.ok) {
      await unwrap(res);
    }
    return await res.text();
  }
}
