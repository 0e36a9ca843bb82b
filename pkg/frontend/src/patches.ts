/**
 * Patch application: the client-side mirror of the server's differ.
 *
 * Field changes are keyed by cell id; whenever placement changed at all
 * the patch carries a trailing `layout` record with the authoritative
 * ordering, so application never reasons about indices.
 */

import type { CellData, Change, NotebookData, Patch, SectionData } from "./types";

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export function applyPatch(snapshot: NotebookData, patch: Patch): NotebookData {
  const snap = clone(snapshot);
  const pool = new Map<string, CellData>();
  for (const cell of snap.mainCells) pool.set(cell.id, cell);
  for (const section of snap.sections) {
    for (const cell of section.cells) pool.set(cell.id, cell);
  }
  const sections = new Map<string, SectionData>(snap.sections.map((s) => [s.id, s]));
  let layout: Change | null = null;

  for (const change of patch.changes) {
    switch (change.op) {
      case "visibilityChanged":
        snap.scratchpadVisible = change.value;
        break;
      case "kernelSpecChanged":
        snap.kernelSpec = change.value;
        break;
      case "cellRemoved":
        pool.delete(change.cellId);
        break;
      case "cellAdded":
        pool.set(change.cell.id, clone(change.cell));
        break;
      case "sectionAdded": {
        const section = clone(change.section);
        for (const cell of section.cells) pool.set(cell.id, cell);
        sections.set(section.id, section);
        break;
      }
      case "sectionRemoved":
        sections.delete(change.sectionId);
        break;
      case "sectionChanged": {
        const section = sections.get(change.sectionId);
        if (section) {
          section.anchor = change.anchor;
          section.rank = change.rank;
        }
        break;
      }
      case "cellMoved":
        break; // placement settled by the layout record
      case "sourceChanged":
        pool.get(change.cellId)!.source = change.source;
        break;
      case "outputsChanged":
        pool.get(change.cellId)!.outputs = clone(change.outputs);
        break;
      case "statusChanged":
        pool.get(change.cellId)!.status = change.status;
        break;
      case "flagsChanged": {
        const cell = pool.get(change.cellId)!;
        cell.pinned = change.pinned;
        cell.folded = change.folded;
        break;
      }
      case "summaryChanged":
        pool.get(change.cellId)!.summary = clone(change.summary);
        break;
      case "layout":
        layout = change;
        break;
    }
  }

  if (layout && layout.op === "layout") {
    snap.mainCells = layout.main.map((id) => pool.get(id)!);
    snap.sections = layout.sections.map((entry) => ({
      id: entry.id,
      anchor: entry.anchor,
      rank: entry.rank,
      cells: entry.cells.map((id) => pool.get(id)!),
    }));
  } else {
    snap.mainCells = snap.mainCells.filter((c) => pool.has(c.id)).map((c) => pool.get(c.id)!);
    for (const section of snap.sections) {
      section.cells = section.cells.filter((c) => pool.has(c.id)).map((c) => pool.get(c.id)!);
    }
    snap.sections = snap.sections.filter((s) => sections.has(s.id));
  }
  return snap;
}
