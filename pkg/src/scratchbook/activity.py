"""Append-only log of user actions, with reporting and replay.

Every structural and execution action is recorded with its container and,
for runs, its classification, which is enough to rebuild the run-action
histograms and container-time breakdowns the engine is instrumented for,
and to deterministically replay a session from its initial document.

The log persists as a newline-delimited sidecar next to the notebook file
(same basename, ``.actions`` suffix).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .execution import Executor
from .model import Notebook
from .summaries import HeuristicSummarizer, ensure_summary

KINDS = frozenset(
    {
        "run",
        "create",
        "delete",
        "edit",
        "moveToScratch",
        "moveToNotebook",
        "moveSection",
        "pin",
        "fold",
        "toggle",
        "save",
        "load",
        "runAll",
    }
)

CLASSIFICATIONS = ("linear", "lastCell", "nonlinear")


@dataclass
class ActionEvent:
    seq: int
    timestamp: float
    kind: str
    cell_id: str | None = None
    section_id: str | None = None
    container: str | None = None  # "main" or "scratch", where applicable
    classification: str | None = None  # run events only
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        record = {"seq": self.seq, "ts": self.timestamp, "kind": self.kind}
        if self.cell_id is not None:
            record["cellId"] = self.cell_id
        if self.section_id is not None:
            record["sectionId"] = self.section_id
        if self.container is not None:
            record["container"] = self.container
        if self.classification is not None:
            record["classification"] = self.classification
        if self.details:
            record["details"] = self.details
        return record

    @classmethod
    def from_dict(cls, record: dict) -> "ActionEvent":
        return cls(
            seq=record["seq"],
            timestamp=record["ts"],
            kind=record["kind"],
            cell_id=record.get("cellId"),
            section_id=record.get("sectionId"),
            container=record.get("container"),
            classification=record.get("classification"),
            details=record.get("details", {}),
        )


class ActionLog:
    def __init__(self, events: list[ActionEvent] | None = None):
        self.events: list[ActionEvent] = list(events or [])

    def record(
        self,
        kind: str,
        *,
        timestamp: float | None = None,
        cell_id: str | None = None,
        section_id: str | None = None,
        container: str | None = None,
        classification: str | None = None,
        details: dict | None = None,
    ) -> ActionEvent:
        if kind not in KINDS:
            raise ValueError(f"unknown action kind: {kind!r}")
        if kind == "run" and classification not in CLASSIFICATIONS:
            raise ValueError("run events must carry a classification")
        if kind != "run" and classification is not None:
            raise ValueError("only run events carry a classification")
        event = ActionEvent(
            seq=len(self.events) + 1,
            timestamp=time.time() if timestamp is None else timestamp,
            kind=kind,
            cell_id=cell_id,
            section_id=section_id,
            container=container,
            classification=classification,
            details=details or {},
        )
        self.events.append(event)
        return event

    def to_lines(self) -> str:
        return "".join(json.dumps(e.to_dict(), sort_keys=True) + "\n" for e in self.events)

    def write(self, path) -> None:
        Path(path).write_text(self.to_lines(), encoding="utf-8")

    @classmethod
    def read(cls, path) -> "ActionLog":
        events = [
            ActionEvent.from_dict(json.loads(line))
            for line in Path(path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        return cls(events)


def sidecar_path(notebook_path) -> Path:
    return Path(notebook_path).with_suffix(".actions")


@dataclass
class ActivityReport:
    """Run-action histogram and active-time spans by container."""

    run_counts: dict[str, dict[str, int]]
    spans: list[tuple[str, float, float]]
    time_by_container: dict[str, float]

    @property
    def total_time(self) -> float:
        return sum(self.time_by_container.values())


def report(log: ActionLog, session_end: float | None = None) -> ActivityReport:
    """Aggregate run counts and container-switch time spans.

    The interval between consecutive actions is attributed to the first
    action's container; a switch happens whenever that container differs
    from the previous one. The final span closes at ``session_end``
    (default: the last event's timestamp).
    """
    counts = {
        "main": {c: 0 for c in CLASSIFICATIONS},
        "scratch": {c: 0 for c in CLASSIFICATIONS},
    }
    for event in log.events:
        if event.kind == "run" and event.container in counts:
            counts[event.container][event.classification] += 1

    located = [e for e in log.events if e.container in ("main", "scratch")]
    spans: list[tuple[str, float, float]] = []
    if located:
        end_time = located[-1].timestamp if session_end is None else session_end
        for i, event in enumerate(located):
            span_end = located[i + 1].timestamp if i + 1 < len(located) else end_time
            if spans and spans[-1][0] == event.container:
                spans[-1] = (event.container, spans[-1][1], span_end)
            else:
                spans.append((event.container, event.timestamp, span_end))
    time_by = {"main": 0.0, "scratch": 0.0}
    for container, start, end in spans:
        time_by[container] += max(0.0, end - start)
    return ActivityReport(run_counts=counts, spans=spans, time_by_container=time_by)


def replay(
    events,
    *,
    notebook: Notebook | None = None,
    session_factory=None,
    sanitizer=None,
    summarizer=None,
) -> Notebook:
    """Re-apply logged actions to an initial document.

    With the deterministic built-in kernel this reproduces the final
    document state exactly; created cells and sections reuse their logged
    ids so references stay valid.
    """
    from .kernels import CALC_SANITIZER, CalcSession

    nb = notebook if notebook is not None else Notebook()
    executor = Executor(
        nb,
        session_factory or CalcSession,
        CALC_SANITIZER if sanitizer is None else sanitizer,
    )
    summarizer = summarizer or HeuristicSummarizer()
    for event in events:
        kind = event.kind
        if kind == "create":
            nb.create_cell(
                event.details["container"],
                event.details["after"],
                event.details.get("cellKind", "code"),
                cell_id=event.cell_id,
            )
        elif kind == "edit":
            nb.set_source(event.cell_id, event.details["source"])
            cell = nb.get_cell(event.cell_id)
            if cell.folded and cell.is_code:
                ensure_summary(nb, event.cell_id, summarizer)
        elif kind == "delete":
            nb.delete_cell(event.cell_id)
        elif kind == "moveToScratch":
            nb.move_to_scratchpad(event.cell_id, section_id=event.section_id)
        elif kind == "moveToNotebook":
            executor.move_to_notebook(event.cell_id)
        elif kind == "moveSection":
            executor.move_section_to_notebook(event.section_id)
        elif kind == "pin":
            nb.set_pinned(event.cell_id, event.details["value"])
        elif kind == "fold":
            nb.set_folded(event.cell_id, event.details["value"])
            if event.details["value"]:
                ensure_summary(nb, event.cell_id, summarizer)
        elif kind == "toggle":
            nb.set_scratchpad_visible(event.details["value"])
        elif kind == "run":
            executor.run_cell(event.cell_id)
        elif kind == "runAll":
            executor.restart_and_run_all()
        # save/load change no document state
    executor.close()
    return nb
