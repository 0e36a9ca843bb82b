"""Document model: the main narrative plus a scratchpad of anchored sections.

A :class:`Notebook` owns an ordered list of main cells and a list of
:class:`ScratchSection` objects. Each section is anchored either to a main
cell (by id) or to :data:`START`, the position before the first main cell.
All structural mutations live here; execution is layered on top in
:mod:`scratchbook.execution` and never changes placement.

Staleness bookkeeping is part of the structural contract: whenever an
operation changes the code that would be replayed before a previously-run
cell, that cell is flagged ``stale`` so its recorded outputs are rendered
as outdated until it is re-run.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field

from .errors import StructuralError

#: Anchor value for "before the first main cell". Cell ids are hex strings,
#: so this sentinel can never collide with a real id.
START = "START"

CELL_KINDS = ("code", "markdown")
STATUSES = ("unrun", "executed", "stale", "errored")
OUTPUT_CHANNELS = ("stream", "display", "error")

#: Statuses meaning "ran successfully at some point"; only these cells are
#: replayed as part of a prefix.
PREVIOUSLY_RUN = ("executed", "stale")


def new_cell_id() -> str:
    return uuid.uuid4().hex[:12]


def new_section_id() -> str:
    return "s" + uuid.uuid4().hex[:11]


@dataclass
class Output:
    """One unit of execution output.

    ``stream`` and ``error`` carry plain text; ``display`` carries a
    mime-tagged payload (text/plain for the built-in calculator kernel).
    """

    channel: str
    text: str
    mime: str = "text/plain"

    def __post_init__(self):
        if self.channel not in OUTPUT_CHANNELS:
            raise ValueError(f"unknown output channel: {self.channel!r}")
        if self.channel == "error" and not self.text:
            raise ValueError("error outputs must carry a message")

    def to_dict(self) -> dict:
        return {"channel": self.channel, "text": self.text, "mime": self.mime}

    @classmethod
    def from_dict(cls, d: dict) -> "Output":
        return cls(d["channel"], d["text"], d.get("mime", "text/plain"))


@dataclass
class SummaryCache:
    """Two generated comment lines plus the digest of the code they describe."""

    digest: str
    lines: tuple[str, str]

    def to_dict(self) -> dict:
        return {"digest": self.digest, "lines": list(self.lines)}

    @classmethod
    def from_dict(cls, d: dict) -> "SummaryCache":
        lines = d["lines"]
        return cls(d["digest"], (lines[0], lines[1]))


@dataclass
class Cell:
    id: str
    kind: str = "code"
    source: str = ""
    outputs: list[Output] = field(default_factory=list)
    status: str = "unrun"
    pinned: bool = False
    folded: bool = False
    summary: SummaryCache | None = None
    # Transient marker: id of the section this cell was last re-inserted
    # from, used to keep back-to-back moves in section order. Never
    # persisted and never part of equality.
    origin_section: str | None = field(default=None, compare=False, repr=False)

    @property
    def is_code(self) -> bool:
        return self.kind == "code"

    @property
    def ran_before(self) -> bool:
        """True if this cell has any run history (successful or not)."""
        return self.status != "unrun"

    @property
    def in_prefix(self) -> bool:
        """True if this cell's code participates in downstream prefixes."""
        return self.kind == "code" and self.status in PREVIOUSLY_RUN

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "source": self.source,
            "outputs": [o.to_dict() for o in self.outputs],
            "status": self.status,
            "pinned": self.pinned,
            "folded": self.folded,
            "summary": self.summary.to_dict() if self.summary else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Cell":
        summary = d.get("summary")
        return cls(
            id=d["id"],
            kind=d["kind"],
            source=d["source"],
            outputs=[Output.from_dict(o) for o in d.get("outputs", [])],
            status=d["status"],
            pinned=d.get("pinned", False),
            folded=d.get("folded", False),
            summary=SummaryCache.from_dict(summary) if summary else None,
        )


@dataclass
class ScratchSection:
    """An ordered group of scratch cells attached to a main-notebook position."""

    id: str
    anchor: str  # START or a main cell id
    cells: list[Cell] = field(default_factory=list)
    rank: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "anchor": self.anchor,
            "rank": self.rank,
            "cells": [c.to_dict() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScratchSection":
        return cls(
            id=d["id"],
            anchor=d["anchor"],
            cells=[Cell.from_dict(c) for c in d["cells"]],
            rank=d["rank"],
        )


@dataclass
class Notebook:
    """The authoritative document: main cells, scratch sections, settings.

    Mutation methods return the set of cell ids newly flagged stale, so
    callers (the execution engine, the API layer) can report exactly what
    an action invalidated.
    """

    main_cells: list[Cell] = field(default_factory=list)
    sections: list[ScratchSection] = field(default_factory=list)
    scratchpad_visible: bool = False
    kernel_spec: str = "calc"

    # -- lookups ----------------------------------------------------------

    def find_cell(self, cell_id: str) -> tuple[Cell, ScratchSection | None]:
        """Return (cell, section) where section is None for main cells."""
        for cell in self.main_cells:
            if cell.id == cell_id:
                return cell, None
        for section in self.sections:
            for cell in section.cells:
                if cell.id == cell_id:
                    return cell, section
        raise StructuralError(f"no such cell: {cell_id}")

    def get_cell(self, cell_id: str) -> Cell:
        return self.find_cell(cell_id)[0]

    def get_section(self, section_id: str) -> ScratchSection:
        for section in self.sections:
            if section.id == section_id:
                return section
        raise StructuralError(f"no such section: {section_id}")

    def main_index(self, cell_id: str) -> int:
        for i, cell in enumerate(self.main_cells):
            if cell.id == cell_id:
                return i
        raise StructuralError(f"not a main-notebook cell: {cell_id}")

    def anchor_position(self, anchor: str) -> int:
        """Index of the anchor cell in the main notebook; START is -1."""
        if anchor == START:
            return -1
        return self.main_index(anchor)

    def all_cells(self):
        yield from self.main_cells
        for section in self.sections:
            yield from section.cells

    def container_of(self, cell_id: str) -> str:
        """'main' or the owning section id."""
        _, section = self.find_cell(cell_id)
        return "main" if section is None else section.id

    # -- staleness helpers -------------------------------------------------

    def _stale_downstream(self, after_main_pos: int, anchor_from_pos: int) -> set[str]:
        """Flag executed cells whose replayed code just changed.

        Marks executed main code cells at index > ``after_main_pos`` and
        every executed cell in sections anchored at index >=
        ``anchor_from_pos``. Cells that never ran are left alone.
        """
        staled: set[str] = set()
        for cell in self.main_cells[after_main_pos + 1:]:
            if cell.status == "executed":
                cell.status = "stale"
                staled.add(cell.id)
        for section in self.sections:
            if self.anchor_position(section.anchor) >= anchor_from_pos:
                for cell in section.cells:
                    if cell.status == "executed":
                        cell.status = "stale"
                        staled.add(cell.id)
        return staled

    def _stale_below_in_section(self, section: ScratchSection, index: int) -> set[str]:
        """Flag executed cells below ``index`` within one section only."""
        staled: set[str] = set()
        for cell in section.cells[index + 1:]:
            if cell.status == "executed":
                cell.status = "stale"
                staled.add(cell.id)
        return staled

    def stale_after_cell(self, cell_id: str) -> set[str]:
        """Flag everything downstream of a cell, per its container rules.

        Main cell: all executed main cells after it plus all executed cells
        in sections anchored at it or later. Scratch cell: executed cells
        below it in its own section; other sections and the main notebook
        are never touched.
        """
        cell, section = self.find_cell(cell_id)
        if section is None:
            pos = self.main_index(cell_id)
            return self._stale_downstream(pos, pos)
        return self._stale_below_in_section(section, section.cells.index(cell))

    # -- structural operations ----------------------------------------------

    def create_cell(
        self,
        container: str,
        after: str,
        kind: str = "code",
        *,
        cell_id: str | None = None,
        source: str = "",
    ) -> str:
        """Insert a new unrun cell immediately after ``after`` in ``container``.

        ``container`` is ``"main"`` or a section id; ``after`` is a cell id
        within that container or :data:`START` for its first position.
        """
        if kind not in CELL_KINDS:
            raise StructuralError(f"unknown cell kind: {kind!r}")
        if container == "main":
            cells = self.main_cells
        else:
            cells = self.get_section(container).cells
        if after == START:
            index = 0
        else:
            ids = [c.id for c in cells]
            if after not in ids:
                raise StructuralError(f"cell {after} is not in container {container}")
            index = ids.index(after) + 1
        cid = cell_id or new_cell_id()
        if any(c.id == cid for c in self.all_cells()):
            raise StructuralError(f"duplicate cell id: {cid}")
        cells.insert(index, Cell(id=cid, kind=kind, source=source))
        return cid

    def delete_cell(self, cell_id: str) -> set[str]:
        """Remove a cell; re-anchor orphaned sections; flag downstream stale.

        Downstream cells are flagged only when the removed cell actually
        participated in their prefixes (it was a successfully-run code
        cell). Deleting a section's last cell removes the section.
        """
        cell, section = self.find_cell(cell_id)
        staled: set[str] = set()
        if section is None:
            pos = self.main_index(cell_id)
            if cell.in_prefix:
                staled = self._stale_downstream(pos, pos)
            new_anchor = self.main_cells[pos - 1].id if pos > 0 else START
            self._reanchor_sections(cell_id, new_anchor)
            del self.main_cells[pos]
        else:
            idx = section.cells.index(cell)
            if cell.in_prefix:
                staled = self._stale_below_in_section(section, idx)
            del section.cells[idx]
            if not section.cells:
                self.sections.remove(section)
        self._normalize_sections()
        return staled

    def move_to_scratchpad(self, cell_id: str, *, section_id: str | None = None) -> tuple[str, set[str]]:
        """Move a main cell into a brand-new scratch section.

        The section is anchored at the preceding main cell (START for the
        first cell) and ranked after any sections already at that anchor.
        The moved cell keeps its outputs and status: its prefix boundary is
        exactly the set of cells that preceded it, so nothing it recorded
        has been invalidated. Downstream main cells lose it from their
        prefixes and are flagged stale when it had run. The scratchpad is
        revealed so the move is visible.
        """
        cell, section = self.find_cell(cell_id)
        if section is not None:
            raise StructuralError(f"cell {cell_id} is not in the main notebook")
        pos = self.main_index(cell_id)
        staled: set[str] = set()
        if cell.in_prefix:
            staled = self._stale_downstream(pos, pos)
        anchor = self.main_cells[pos - 1].id if pos > 0 else START
        self._reanchor_sections(cell_id, anchor)
        del self.main_cells[pos]
        sid = section_id or new_section_id()
        if any(s.id == sid for s in self.sections):
            raise StructuralError(f"duplicate section id: {sid}")
        rank = 1 + max(
            (s.rank for s in self.sections if s.anchor == anchor), default=-1
        )
        self.sections.append(ScratchSection(id=sid, anchor=anchor, cells=[cell], rank=rank))
        self.scratchpad_visible = True
        self._normalize_sections()
        return sid, staled

    def move_to_notebook(self, cell_id: str) -> set[str]:
        """Move a scratch cell back into the main notebook (structural part).

        The cell lands immediately after its section's anchor, behind any
        cells previously re-inserted from the same section so that
        back-to-back moves keep their order. Code cells are reset to unrun
        with cleared outputs; the execution layer re-runs them in place.
        Downstream cells are flagged stale because a re-executed cell joins
        their prefixes.
        """
        cell, section = self.find_cell(cell_id)
        if section is None:
            raise StructuralError(f"cell {cell_id} is not in a scratch section")
        anchor = section.anchor
        section.cells.remove(cell)
        if not section.cells:
            self.sections.remove(section)
        pos = self._insert_position(anchor, section.id)
        self.main_cells.insert(pos, cell)
        cell.origin_section = section.id
        staled: set[str] = set()
        if cell.is_code:
            cell.outputs = []
            cell.status = "unrun"
            staled = self._stale_downstream(pos, pos + 1)
        self._normalize_sections()
        return staled

    def move_section_to_notebook(self, section_id: str) -> tuple[set[str], list[str]]:
        """Move a whole section back into the main notebook.

        Returns (staled ids, ids of the moved code cells in order); the
        execution layer re-runs the latter top to bottom.
        """
        section = self.get_section(section_id)
        anchor = section.anchor
        cells = list(section.cells)
        self.sections.remove(section)
        pos = self._insert_position(anchor, section_id)
        for offset, cell in enumerate(cells):
            self.main_cells.insert(pos + offset, cell)
            cell.origin_section = section_id
        code_ids = []
        for cell in cells:
            if cell.is_code:
                cell.outputs = []
                cell.status = "unrun"
                code_ids.append(cell.id)
        staled: set[str] = set()
        if code_ids:
            last = pos + len(cells) - 1
            staled = self._stale_downstream(last, last + 1)
        self._normalize_sections()
        return staled, code_ids

    def set_source(self, cell_id: str, source: str) -> set[str]:
        """Replace a cell's code; flag the cell and its dependents stale.

        Editing a successfully-run code cell changes both its own recorded
        outputs' meaning and the prefix of everything downstream, so the
        cell goes stale along with its dependents. Unrun, errored, and
        markdown cells edit freely.
        """
        cell, section = self.find_cell(cell_id)
        was_in_prefix = cell.in_prefix
        cell.source = source
        staled: set[str] = set()
        if was_in_prefix:
            if section is None:
                pos = self.main_index(cell_id)
                staled = self._stale_downstream(pos, pos)
            else:
                staled = self._stale_below_in_section(section, section.cells.index(cell))
            if cell.status == "executed":
                cell.status = "stale"
                staled.add(cell.id)
        return staled

    def set_pinned(self, cell_id: str, flag: bool) -> None:
        self.get_cell(cell_id).pinned = bool(flag)

    def set_folded(self, cell_id: str, flag: bool) -> None:
        self.get_cell(cell_id).folded = bool(flag)

    def set_scratchpad_visible(self, flag: bool) -> None:
        self.scratchpad_visible = bool(flag)

    # -- internals ----------------------------------------------------------

    def _reanchor_sections(self, old_anchor_cell: str, new_anchor: str) -> None:
        """Re-anchor sections of a departing main cell; keep their order."""
        moving = [s for s in self.sections if s.anchor == old_anchor_cell]
        if not moving:
            return
        base = 1 + max(
            (s.rank for s in self.sections if s.anchor == new_anchor), default=-1
        )
        for i, section in enumerate(moving):
            section.anchor = new_anchor
            section.rank = base + i

    def _insert_position(self, anchor: str, section_id: str) -> int:
        """Main index after the anchor, skipping this section's earlier moves."""
        pos = self.anchor_position(anchor) + 1
        while pos < len(self.main_cells) and self.main_cells[pos].origin_section == section_id:
            pos += 1
        return pos

    def _normalize_sections(self) -> None:
        """Keep sections sorted by (anchor position, rank) with dense ranks."""
        self.sections.sort(key=lambda s: (self.anchor_position(s.anchor), s.rank))
        counters: dict[str, int] = {}
        for section in self.sections:
            section.rank = counters.get(section.anchor, 0)
            counters[section.anchor] = section.rank + 1

    # -- snapshots ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "mainCells": [c.to_dict() for c in self.main_cells],
            "sections": [s.to_dict() for s in self.sections],
            "scratchpadVisible": self.scratchpad_visible,
            "kernelSpec": self.kernel_spec,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Notebook":
        return cls(
            main_cells=[Cell.from_dict(c) for c in d["mainCells"]],
            sections=[ScratchSection.from_dict(s) for s in d["sections"]],
            scratchpad_visible=d["scratchpadVisible"],
            kernel_spec=d["kernelSpec"],
        )
