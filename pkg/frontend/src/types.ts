/** Wire-format types for the notebook service API. */

export type CellKind = "code" | "markdown";
export type CellStatus = "unrun" | "executed" | "stale" | "errored";
export type Classification = "linear" | "lastCell" | "nonlinear";

export interface OutputData {
  channel: "stream" | "display" | "error";
  text: string;
  mime: string;
}

export interface SummaryData {
  digest: string;
  lines: string[];
}

export interface CellData {
  id: string;
  kind: CellKind;
  source: string;
  outputs: OutputData[];
  status: CellStatus;
  pinned: boolean;
  folded: boolean;
  summary: SummaryData | null;
}

export interface SectionData {
  id: string;
  anchor: string; // "START" or a main cell id
  rank: number;
  cells: CellData[];
}

export interface NotebookData {
  mainCells: CellData[];
  sections: SectionData[];
  scratchpadVisible: boolean;
  kernelSpec: string;
}

export interface SnapshotResponse {
  revision: number;
  notebook: NotebookData;
}

export interface RunResultData {
  cellId: string;
  outputs: OutputData[];
  classification: Classification;
  staled: string[];
  duration: number;
}

export interface LayoutChange {
  op: "layout";
  main: string[];
  sections: { id: string; anchor: string; rank: number; cells: string[] }[];
}

export type Change =
  | { op: "visibilityChanged"; value: boolean }
  | { op: "kernelSpecChanged"; value: string }
  | { op: "cellRemoved"; cellId: string }
  | { op: "cellAdded"; cell: CellData; container: string; index: number }
  | { op: "cellMoved"; cellId: string; container: string; index: number }
  | { op: "sectionAdded"; section: SectionData }
  | { op: "sectionRemoved"; sectionId: string }
  | { op: "sectionChanged"; sectionId: string; anchor: string; rank: number }
  | { op: "sourceChanged"; cellId: string; source: string }
  | { op: "outputsChanged"; cellId: string; outputs: OutputData[] }
  | { op: "statusChanged"; cellId: string; status: CellStatus }
  | { op: "flagsChanged"; cellId: string; pinned: boolean; folded: boolean }
  | { op: "summaryChanged"; cellId: string; summary: SummaryData | null }
  | LayoutChange;

export interface Patch {
  revision: number;
  changes: Change[];
}

export const START = "START";
