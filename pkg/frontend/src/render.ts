/**
 * DOM renderer: two panes, gestures wired to the view model.
 *
 * Left pane holds the main narrative; the right pane holds scratch
 * sections, each absolutely positioned so its top edge meets its anchor
 * cell's bottom edge (later sections push down when space runs out).
 * Stale cells carry the `grayed` class, folded code cells collapse to
 * exactly their two summary lines, and pinned cells float in overlays
 * when their home position scrolls out of the viewport.
 */

import { layoutSections, SectionExtent } from "./layout";
import type { NotebookViewModel } from "./viewmodel";
import type { CellData, SectionData } from "./types";
import { START } from "./types";

export interface Geometry {
  /** pane-relative top/height of an element */
  extent(el: HTMLElement): { top: number; height: number };
  /** viewport-relative rect, for pin overlays */
  viewportRect(el: HTMLElement): { top: number; bottom: number };
  viewportHeight(): number;
}

const defaultGeometry: Geometry = {
  extent: (el) => ({ top: el.offsetTop, height: el.offsetHeight }),
  viewportRect: (el) => {
    const rect = el.getBoundingClientRect();
    return { top: rect.top, bottom: rect.bottom };
  },
  viewportHeight: () => window.innerHeight || 0,
};

function button(label: string, action: string, onClick: () => void): HTMLButtonElement {
  const el = document.createElement("button");
  el.textContent = label;
  el.dataset.action = action;
  el.addEventListener("click", onClick);
  return el;
}

export class NotebookView {
  private geometry: Geometry;

  constructor(
    private vm: NotebookViewModel,
    private root: HTMLElement,
    geometry: Geometry = defaultGeometry,
  ) {
    this.geometry = geometry;
  }

  mount(): void {
    this.vm.subscribe(() => this.render());
    window.addEventListener("scroll", () => this.updatePinOverlays(), { passive: true });
    this.render();
  }

  render(): void {
    const vm = this.vm;
    this.root.innerHTML = "";
    this.root.classList.add("app");

    if (!vm.connected) {
      const banner = document.createElement("div");
      banner.className = "banner";
      banner.textContent = "connection lost; re-syncing…";
      this.root.appendChild(banner);
    }
    if (vm.lastError) {
      const toast = document.createElement("div");
      toast.className = "toast";
      toast.textContent = vm.lastError;
      this.root.appendChild(toast);
    }

    const toolbar = document.createElement("div");
    toolbar.className = "toolbar";
    toolbar.appendChild(button("run all", "run-all", () => void vm.runAll()));
    toolbar.appendChild(button("save", "save", () => void vm.save()));
    toolbar.appendChild(
      button(
        vm.snapshot.scratchpadVisible ? "hide scratchpad" : "show scratchpad",
        "toggle-scratchpad",
        () => void vm.toggleScratchpad(),
      ),
    );
    this.root.appendChild(toolbar);

    const panes = document.createElement("div");
    panes.className = "panes";
    const mainPane = document.createElement("div");
    mainPane.className = "pane main-pane";
    for (const cell of vm.snapshot.mainCells) {
      mainPane.appendChild(this.renderCell(cell, "main"));
    }
    mainPane.appendChild(
      button("+ cell", "append-cell", () => {
        const cells = vm.snapshot.mainCells;
        void vm.createBelow("main", cells.length ? cells[cells.length - 1].id : START);
      }),
    );
    panes.appendChild(mainPane);

    const scratchPane = document.createElement("div");
    scratchPane.className = "pane scratch-pane";
    if (!vm.snapshot.scratchpadVisible) scratchPane.classList.add("hidden");
    for (const section of vm.snapshot.sections) {
      scratchPane.appendChild(this.renderSection(section));
    }
    panes.appendChild(scratchPane);
    this.root.appendChild(panes);

    const overlayTop = document.createElement("div");
    overlayTop.className = "pinned-overlay pinned-top";
    const overlayBottom = document.createElement("div");
    overlayBottom.className = "pinned-overlay pinned-bottom";
    this.root.appendChild(overlayTop);
    this.root.appendChild(overlayBottom);

    this.positionSections(mainPane, scratchPane);
    this.updatePinOverlays();
  }

  private renderCell(cell: CellData, container: string): HTMLElement {
    const vm = this.vm;
    const el = document.createElement("div");
    el.className = `cell kind-${cell.kind} status-${cell.status}`;
    el.dataset.cellId = cell.id;
    if (cell.status === "stale") el.classList.add("grayed");
    if (cell.folded) el.classList.add("folded");
    if (cell.pinned) el.classList.add("pinned");

    const bar = document.createElement("div");
    bar.className = "cell-toolbar";
    if (container === "main") {
      bar.appendChild(button("→", "move-to-scratch", () => void vm.moveToScratch(cell.id)));
    } else {
      bar.appendChild(button("←", "move-to-main", () => void vm.moveToMain(cell.id)));
    }
    bar.appendChild(button(cell.pinned ? "unpin" : "pin", "pin", () => void vm.togglePin(cell.id)));
    bar.appendChild(button(cell.folded ? "unfold" : "fold", "fold", () => void vm.toggleFold(cell.id)));
    if (cell.kind === "code") {
      bar.appendChild(button("run", "run", () => void vm.run(cell.id)));
    }
    bar.appendChild(button("✕", "delete", () => void vm.deleteCell(cell.id)));
    bar.appendChild(button("+", "add-below", () => void vm.createBelow(container, cell.id)));
    el.appendChild(bar);

    if (cell.folded && cell.kind === "code") {
      // collapsed to exactly two lines: the generated summary when the
      // server has produced one, the first two source lines otherwise
      const summary = document.createElement("div");
      summary.className = "summary";
      const lines = cell.summary ? cell.summary.lines : cell.source.split("\n").slice(0, 2);
      for (const line of lines.slice(0, 2)) {
        const lineEl = document.createElement("div");
        lineEl.className = "summary-line";
        lineEl.textContent = line;
        summary.appendChild(lineEl);
      }
      el.appendChild(summary);
      return el;
    }

    const source = document.createElement("textarea");
    source.className = "source";
    source.value = cell.source;
    source.rows = Math.max(1, cell.source.split("\n").length);
    source.addEventListener("change", () => void vm.editSource(cell.id, source.value));
    el.appendChild(source);

    if (cell.kind === "code" && cell.outputs.length) {
      const outputs = document.createElement("div");
      outputs.className = "outputs";
      for (const output of cell.outputs) {
        const outEl = document.createElement("pre");
        outEl.className = `output channel-${output.channel}`;
        outEl.textContent = output.text;
        outputs.appendChild(outEl);
      }
      el.appendChild(outputs);
    }
    return el;
  }

  private renderSection(section: SectionData): HTMLElement {
    const el = document.createElement("div");
    el.className = "section";
    el.dataset.sectionId = section.id;
    el.dataset.anchor = section.anchor;
    const bar = document.createElement("div");
    bar.className = "section-toolbar";
    bar.appendChild(
      button("⇤ move section", "move-section", () => void this.vm.moveSection(section.id)),
    );
    el.appendChild(bar);
    const connector = document.createElement("div");
    connector.className = "connector";
    el.appendChild(connector);
    for (const cell of section.cells) {
      el.appendChild(this.renderCell(cell, section.id));
    }
    return el;
  }

  /** Place each section so its top meets its anchor's bottom, stacking down. */
  private positionSections(mainPane: HTMLElement, scratchPane: HTMLElement): void {
    const anchorBottom = new Map<string, number>();
    anchorBottom.set(START, 0);
    for (const cellEl of Array.from(mainPane.querySelectorAll<HTMLElement>(":scope > .cell"))) {
      const extent = this.geometry.extent(cellEl);
      anchorBottom.set(cellEl.dataset.cellId!, extent.top + extent.height);
    }
    const extents: SectionExtent[] = [];
    for (const sectionEl of Array.from(
      scratchPane.querySelectorAll<HTMLElement>(":scope > .section"),
    )) {
      extents.push({
        id: sectionEl.dataset.sectionId!,
        desiredTop: anchorBottom.get(sectionEl.dataset.anchor!) ?? 0,
        height: this.geometry.extent(sectionEl).height,
      });
    }
    for (const placed of layoutSections(extents)) {
      const el = scratchPane.querySelector<HTMLElement>(`[data-section-id="${placed.id}"]`);
      if (el) {
        el.style.top = `${placed.top}px`;
        el.classList.toggle("misaligned", !placed.aligned);
      }
    }
  }

  /** Float pinned cells at the viewport edge they scrolled past. */
  private updatePinOverlays(): void {
    const overlayTop = this.root.querySelector<HTMLElement>(".pinned-top");
    const overlayBottom = this.root.querySelector<HTMLElement>(".pinned-bottom");
    if (!overlayTop || !overlayBottom) return;
    overlayTop.innerHTML = "";
    overlayBottom.innerHTML = "";
    const viewport = this.geometry.viewportHeight();
    for (const cell of this.vm.pinnedCells()) {
      const home = this.root.querySelector<HTMLElement>(`[data-cell-id="${cell.id}"]`);
      if (!home) continue;
      const rect = this.geometry.viewportRect(home);
      const clone = document.createElement("div");
      clone.className = "pinned-clone";
      clone.textContent = cell.source.split("\n").slice(0, 2).join("\n");
      if (rect.bottom < 0) overlayTop.appendChild(clone);
      else if (rect.top > viewport) overlayBottom.appendChild(clone);
    }
  }
}
