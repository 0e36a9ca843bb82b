/** Thin REST client; every method issues exactly one request. */

import type { RunResultData, SnapshotResponse } from "./types";

export type Fetcher = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetcher: Fetcher = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "Content-Type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const response = await this.fetcher(this.base + path, init);
    if (!response.ok) {
      let detail = response.statusText;
      try {
        detail = ((await response.json()) as { detail?: string }).detail ?? detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  getNotebook(): Promise<SnapshotResponse> {
    return this.request("GET", "/api/notebook");
  }

  setScratchpadVisible(value: boolean): Promise<{ revision: number }> {
    return this.request("PATCH", "/api/notebook", { scratchpadVisible: value });
  }

  createCell(container: string, after: string, kind = "code"): Promise<{ cellId: string }> {
    return this.request("POST", "/api/cells", { container, after, kind });
  }

  deleteCell(cellId: string): Promise<{ staled: string[] }> {
    return this.request("DELETE", `/api/cells/${cellId}`);
  }

  updateCell(
    cellId: string,
    body: { source?: string; pinned?: boolean; folded?: boolean },
  ): Promise<{ staled: string[] }> {
    return this.request("PATCH", `/api/cells/${cellId}`, body);
  }

  runCell(cellId: string): Promise<RunResultData> {
    return this.request("POST", `/api/cells/${cellId}/run`);
  }

  moveCell(cellId: string, target: "scratch" | "main"): Promise<{ sectionId?: string }> {
    return this.request("POST", `/api/cells/${cellId}/move`, { target });
  }

  moveSection(sectionId: string): Promise<{ staled: string[] }> {
    return this.request("POST", `/api/sections/${sectionId}/move`);
  }

  runAll(): Promise<{ results: RunResultData[] }> {
    return this.request("POST", "/api/notebook/run-all");
  }

  save(): Promise<{ revision: number }> {
    return this.request("POST", "/api/notebook/save");
  }
}
