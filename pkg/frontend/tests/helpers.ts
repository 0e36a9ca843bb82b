/** Shared test scaffolding: snapshots and a counting fake transport. */

import { ApiClient, Fetcher } from "../src/api";
import type { CellData, NotebookData, SectionData } from "../src/types";

export function cell(id: string, overrides: Partial<CellData> = {}): CellData {
  return {
    id,
    kind: "code",
    source: `${id} = 1`,
    outputs: [],
    status: "unrun",
    pinned: false,
    folded: false,
    summary: null,
    ...overrides,
  };
}

export function section(
  id: string,
  anchor: string,
  cells: CellData[],
  rank = 0,
): SectionData {
  return { id, anchor, rank, cells };
}

export function notebook(
  mainCells: CellData[] = [],
  sections: SectionData[] = [],
  scratchpadVisible = true,
): NotebookData {
  return { mainCells, sections, scratchpadVisible, kernelSpec: "calc" };
}

export interface RecordedRequest {
  method: string;
  path: string;
  body: unknown;
}

/** Fake transport: records every command and answers 200 with a stub. */
export class FakeTransport {
  requests: RecordedRequest[] = [];
  snapshot: NotebookData = notebook();
  revision = 0;

  readonly fetcher: Fetcher = (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body ? JSON.parse(init.body as string) : undefined;
    this.requests.push({ method, path: url, body });
    const payload =
      method === "GET"
        ? { revision: this.revision, notebook: this.snapshot }
        : { revision: this.revision, cellId: "stub", sectionId: "stub", staled: [], outputs: [], classification: "linear", duration: 0, results: [] };
    return Promise.resolve(
      new Response(JSON.stringify(payload), {
        status: 200,
        headers: { "Content-Type": "application/json" },
      }),
    );
  };

  client(): ApiClient {
    return new ApiClient("", this.fetcher);
  }

  commandCount(): number {
    return this.requests.filter((r) => r.method !== "GET").length;
  }
}
