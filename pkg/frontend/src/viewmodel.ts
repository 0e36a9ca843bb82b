/**
 * Mirrored document state plus gesture dispatch.
 *
 * The view model holds the last snapshot and applies the server's patch
 * stream in revision order; a gap means the view is stale and triggers a
 * snapshot re-sync. Each user gesture issues exactly one API command.
 * Pure flags (pin/fold/scratchpad toggle) update optimistically since
 * the server cannot reject them for a live cell; structural and run
 * gestures wait for their patch.
 */

import { ApiClient } from "./api";
import { applyPatch } from "./patches";
import type { CellData, NotebookData, Patch, SectionData } from "./types";

export type Listener = () => void;

const EMPTY: NotebookData = {
  mainCells: [],
  sections: [],
  scratchpadVisible: false,
  kernelSpec: "calc",
};

export class NotebookViewModel {
  snapshot: NotebookData = EMPTY;
  revision = -1;
  connected = false;
  lastError: string | null = null;
  private listeners: Listener[] = [];

  constructor(public api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  async sync(): Promise<void> {
    const response = await this.api.getNotebook();
    this.snapshot = response.notebook;
    this.revision = response.revision;
    this.notify();
  }

  /** Apply one patch; on a revision gap, fall back to a full re-sync. */
  async applyPatch(patch: Patch): Promise<void> {
    if (patch.revision <= this.revision) return; // already incorporated
    if (patch.revision !== this.revision + 1) {
      await this.sync();
      return;
    }
    this.snapshot = applyPatch(this.snapshot, patch);
    this.revision = patch.revision;
    this.notify();
  }

  setConnected(connected: boolean): void {
    this.connected = connected;
    this.notify();
  }

  // -- lookups ---------------------------------------------------------------

  findCell(cellId: string): { cell: CellData; section: SectionData | null } | null {
    for (const cell of this.snapshot.mainCells) {
      if (cell.id === cellId) return { cell, section: null };
    }
    for (const section of this.snapshot.sections) {
      for (const cell of section.cells) {
        if (cell.id === cellId) return { cell, section };
      }
    }
    return null;
  }

  pinnedCells(): CellData[] {
    const pinned: CellData[] = [];
    for (const cell of this.snapshot.mainCells) if (cell.pinned) pinned.push(cell);
    for (const section of this.snapshot.sections) {
      for (const cell of section.cells) if (cell.pinned) pinned.push(cell);
    }
    return pinned;
  }

  // -- gestures: one API command each ------------------------------------------

  private guard<T>(promise: Promise<T>): Promise<T | undefined> {
    return promise.catch((error: unknown) => {
      this.lastError = error instanceof Error ? error.message : String(error);
      this.notify();
      return undefined;
    });
  }

  run(cellId: string) {
    return this.guard(this.api.runCell(cellId));
  }

  runAll() {
    return this.guard(this.api.runAll());
  }

  save() {
    return this.guard(this.api.save());
  }

  createBelow(container: string, after: string) {
    return this.guard(this.api.createCell(container, after));
  }

  deleteCell(cellId: string) {
    return this.guard(this.api.deleteCell(cellId));
  }

  editSource(cellId: string, source: string) {
    return this.guard(this.api.updateCell(cellId, { source }));
  }

  moveToScratch(cellId: string) {
    return this.guard(this.api.moveCell(cellId, "scratch"));
  }

  moveToMain(cellId: string) {
    return this.guard(this.api.moveCell(cellId, "main"));
  }

  moveSection(sectionId: string) {
    return this.guard(this.api.moveSection(sectionId));
  }

  togglePin(cellId: string) {
    const found = this.findCell(cellId);
    if (!found) return Promise.resolve(undefined);
    const value = !found.cell.pinned;
    found.cell.pinned = value; // optimistic: pure flag
    this.notify();
    return this.guard(this.api.updateCell(cellId, { pinned: value }));
  }

  toggleFold(cellId: string) {
    const found = this.findCell(cellId);
    if (!found) return Promise.resolve(undefined);
    const value = !found.cell.folded;
    found.cell.folded = value; // optimistic: pure flag
    this.notify();
    return this.guard(this.api.updateCell(cellId, { folded: value }));
  }

  toggleScratchpad() {
    const value = !this.snapshot.scratchpadVisible;
    this.snapshot.scratchpadVisible = value; // optimistic: pure flag
    this.notify();
    return this.guard(this.api.setScratchpadVisible(value));
  }
}
