// Typed client for the service HTTP surface. The UI talks to the backend
// exclusively through this module; errors carry the HTTP status and the
// server's detail string so callers can branch on 409 vs 422.

import type {
  ClipInfo,
  JobInfo,
  OutlineCommand,
  OutlineDoc,
  OutlineEditResult,
  PaperInfo,
  ReferenceEntry,
  SynthesisResult,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

export class ServiceError extends Error {
  readonly status: number;
  readonly detail: string;
  /** Server-side revision, present on stale-revision 409 responses. */
  readonly revision?: number;

  constructor(status: number, detail: string, revision?: number) {
    super(`service responded ${status}: ${detail}`);
    this.name = "ServiceError";
    this.status = status;
    this.detail = detail;
    this.revision = revision;
  }
}

export interface ServiceClientOptions {
  token?: string;
  fetchFn?: FetchLike;
}

export class ServiceClient {
  private readonly baseUrl: string;
  private readonly token?: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, options: ServiceClientOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.token = options.token;
    this.fetchFn = options.fetchFn ?? ((input, init) => fetch(input, init));
  }

  private headers(hasBody: boolean): Record<string, string> {
    const headers: Record<string, string> = {};
    if (hasBody) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async request(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<Response> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(body !== undefined),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (response.ok) return response;

    let detail = response.statusText || `HTTP ${response.status}`;
    let revision: number | undefined;
    try {
      const parsed = await response.json();
      if (parsed && typeof parsed.detail === "string") detail = parsed.detail;
      if (parsed && typeof parsed.revision === "number") {
        revision = parsed.revision;
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ServiceError(response.status, detail, revision);
  }

  private async json<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.request(method, path, body);
    return (await response.json()) as T;
  }

  async createWorkspace(): Promise<string> {
    const data = await this.json<{ workspace_id: string }>("POST", "/workspaces");
    return data.workspace_id;
  }

  async listClips(workspaceId: string): Promise<ClipInfo[]> {
    const data = await this.json<{ clips: ClipInfo[] }>(
      "GET",
      `/workspaces/${workspaceId}/clips`,
    );
    return data.clips;
  }

  async addClip(
    workspaceId: string,
    text: string,
    seedReferenceIds: string[],
  ): Promise<ClipInfo> {
    return this.json<ClipInfo>("POST", `/workspaces/${workspaceId}/clips`, {
      text,
      seed_reference_ids: seedReferenceIds,
    });
  }

  async startSynthesis(workspaceId: string, clipIds: string[]): Promise<string> {
    const data = await this.json<{ job_id: string }>(
      "POST",
      `/workspaces/${workspaceId}/syntheses`,
      { clip_ids: clipIds },
    );
    return data.job_id;
  }

  async getJob(workspaceId: string, jobId: string): Promise<JobInfo> {
    return this.json<JobInfo>(
      "GET",
      `/workspaces/${workspaceId}/syntheses/${jobId}`,
    );
  }

  async getHierarchy(workspaceId: string, jobId: string): Promise<SynthesisResult> {
    return this.json<SynthesisResult>(
      "GET",
      `/workspaces/${workspaceId}/hierarchies/${jobId}`,
    );
  }

  async getOutline(workspaceId: string): Promise<OutlineDoc> {
    return this.json<OutlineDoc>("GET", `/workspaces/${workspaceId}/outline`);
  }

  async applyOutline(
    workspaceId: string,
    command: OutlineCommand,
  ): Promise<OutlineEditResult> {
    return this.json<OutlineEditResult>(
      "PUT",
      `/workspaces/${workspaceId}/outline`,
      command,
    );
  }

  async getOutlineMarkdown(workspaceId: string): Promise<string> {
    const response = await this.request(
      "GET",
      `/workspaces/${workspaceId}/outline/markdown`,
    );
    return response.text();
  }

  async getReferences(workspaceId: string): Promise<ReferenceEntry[]> {
    const data = await this.json<{ references: ReferenceEntry[] }>(
      "GET",
      `/workspaces/${workspaceId}/references`,
    );
    return data.references;
  }

  async getPaper(paperId: string): Promise<PaperInfo> {
    return this.json<PaperInfo>("GET", `/papers/${paperId}`);
  }
}
