"""Single-writer command layer over one open document.

Every mutation funnels through :class:`DocumentSession`: it applies the
operation, logs the action, diffs the document against the last committed
snapshot, bumps the revision, and hands the patch to all subscribers.
Reads take immutable snapshots. Run commands additionally emit an interim
patch the moment outputs land on a cell, before the final commit.
"""

from __future__ import annotations

import threading
import time
from pathlib import Path

from . import ipynb
from .activity import ActionLog, sidecar_path
from .execution import Executor, RunResult
from .kernels import create_session, sanitizer_for
from .model import Notebook
from .summaries import HeuristicSummarizer, ensure_summary


class DocumentSession:
    def __init__(
        self,
        notebook: Notebook | None = None,
        *,
        path=None,
        kernel: str | None = None,
        execution_timeout: float | None = None,
        summarizer=None,
        log: ActionLog | None = None,
        clock=time.time,
        session_factory=None,
        sanitizer=None,
    ):
        self.notebook = notebook if notebook is not None else Notebook()
        self.path = Path(path) if path else None
        kernel_name = kernel or self.notebook.kernel_spec
        self.executor = Executor(
            self.notebook,
            session_factory or (lambda: create_session(kernel_name, timeout=execution_timeout)),
            sanitizer if sanitizer is not None else sanitizer_for(kernel_name),
        )
        self.summarizer = summarizer or HeuristicSummarizer()
        self.log = log or ActionLog()
        self.clock = clock
        self.revision = 0
        self._lock = threading.RLock()
        self._listeners: list = []
        self._snapshot = self.notebook.to_dict()

    @classmethod
    def open(cls, path, *, kernel=None, execution_timeout=None, summarizer=None) -> "DocumentSession":
        """Load a notebook file (creating an empty one if absent)."""
        path = Path(path)
        notebook = ipynb.load_file(path) if path.exists() else Notebook()
        log = ActionLog()
        sidecar = sidecar_path(path)
        if sidecar.exists():
            log = ActionLog.read(sidecar)
        session = cls(
            notebook,
            path=path,
            kernel=kernel,
            execution_timeout=execution_timeout,
            summarizer=summarizer,
            log=log,
        )
        session.log.record("load", timestamp=session.clock())
        return session

    # -- reads ----------------------------------------------------------------

    def snapshot(self) -> dict:
        with self._lock:
            return {"revision": self.revision, "notebook": self.notebook.to_dict()}

    def subscribe(self, listener):
        """Register a patch callback; returns an unsubscribe function."""
        with self._lock:
            self._listeners.append(listener)

        def unsubscribe():
            with self._lock:
                if listener in self._listeners:
                    self._listeners.remove(listener)

        return unsubscribe

    # -- commit plumbing --------------------------------------------------------

    def _commit(self) -> dict | None:
        """Diff against the last committed snapshot and broadcast."""
        from .patches import diff_snapshots

        current = self.notebook.to_dict()
        changes = diff_snapshots(self._snapshot, current)
        if not changes:
            return None
        self.revision += 1
        self._snapshot = current
        patch = {"revision": self.revision, "changes": changes}
        for listener in list(self._listeners):
            listener(patch)
        return patch

    def _container_of(self, cell_id: str) -> str:
        return "main" if self.notebook.container_of(cell_id) == "main" else "scratch"

    # -- commands ----------------------------------------------------------------

    def create_cell(self, container: str, after: str, kind: str = "code") -> str:
        with self._lock:
            cell_id = self.notebook.create_cell(container, after, kind)
            self.log.record(
                "create",
                timestamp=self.clock(),
                cell_id=cell_id,
                section_id=None if container == "main" else container,
                container="main" if container == "main" else "scratch",
                details={"container": container, "after": after, "cellKind": kind},
            )
            self._commit()
            return cell_id

    def delete_cell(self, cell_id: str) -> set[str]:
        with self._lock:
            container = self._container_of(cell_id)
            staled = self.notebook.delete_cell(cell_id)
            self.log.record("delete", timestamp=self.clock(), cell_id=cell_id, container=container)
            self._commit()
            return staled

    def set_source(self, cell_id: str, source: str) -> set[str]:
        with self._lock:
            container = self._container_of(cell_id)
            staled = self.notebook.set_source(cell_id, source)
            cell = self.notebook.get_cell(cell_id)
            if cell.folded and cell.is_code:
                ensure_summary(self.notebook, cell_id, self.summarizer)
            self.log.record(
                "edit",
                timestamp=self.clock(),
                cell_id=cell_id,
                container=container,
                details={"source": source},
            )
            self._commit()
            return staled

    def set_pinned(self, cell_id: str, flag: bool) -> None:
        with self._lock:
            container = self._container_of(cell_id)
            self.notebook.set_pinned(cell_id, flag)
            self.log.record(
                "pin",
                timestamp=self.clock(),
                cell_id=cell_id,
                container=container,
                details={"value": bool(flag)},
            )
            self._commit()

    def set_folded(self, cell_id: str, flag: bool) -> None:
        with self._lock:
            container = self._container_of(cell_id)
            self.notebook.set_folded(cell_id, flag)
            cell = self.notebook.get_cell(cell_id)
            if flag and cell.is_code:
                ensure_summary(self.notebook, cell_id, self.summarizer)
            self.log.record(
                "fold",
                timestamp=self.clock(),
                cell_id=cell_id,
                container=container,
                details={"value": bool(flag)},
            )
            self._commit()

    def set_scratchpad_visible(self, flag: bool) -> None:
        with self._lock:
            self.notebook.set_scratchpad_visible(flag)
            self.log.record("toggle", timestamp=self.clock(), details={"value": bool(flag)})
            self._commit()

    def run_cell(self, cell_id: str) -> RunResult:
        with self._lock:
            container = self._container_of(cell_id)
            previous = self.executor.on_outputs
            self.executor.on_outputs = lambda cell: self._commit()
            try:
                result = self.executor.run_cell(cell_id)
            finally:
                self.executor.on_outputs = previous
            self.log.record(
                "run",
                timestamp=self.clock(),
                cell_id=cell_id,
                container=container,
                classification=result.classification,
            )
            self._commit()
            return result

    def run_all(self) -> list[RunResult]:
        with self._lock:
            results = self.executor.restart_and_run_all()
            self.log.record("runAll", timestamp=self.clock())
            self._commit()
            return results

    def move_to_scratchpad(self, cell_id: str) -> str:
        with self._lock:
            section_id, _ = self.notebook.move_to_scratchpad(cell_id)
            self.log.record(
                "moveToScratch",
                timestamp=self.clock(),
                cell_id=cell_id,
                section_id=section_id,
                container="main",
            )
            self._commit()
            return section_id

    def move_to_notebook(self, cell_id: str) -> set[str]:
        with self._lock:
            staled, _ = self.executor.move_to_notebook(cell_id)
            self.log.record(
                "moveToNotebook", timestamp=self.clock(), cell_id=cell_id, container="scratch"
            )
            self._commit()
            return staled

    def move_section_to_notebook(self, section_id: str) -> set[str]:
        with self._lock:
            staled, _ = self.executor.move_section_to_notebook(section_id)
            self.log.record(
                "moveSection", timestamp=self.clock(), section_id=section_id, container="scratch"
            )
            self._commit()
            return staled

    def save(self) -> bytes:
        with self._lock:
            if self.path is None:
                data = ipynb.save(self.notebook)
            else:
                data = ipynb.save_file(self.notebook, self.path)
            self.log.record("save", timestamp=self.clock())
            if self.path is not None:
                self.log.write(sidecar_path(self.path))
            return data

    def export(self, include_scratch: bool = False) -> bytes:
        with self._lock:
            return ipynb.export_plain(self.notebook, include_scratch)

    def close(self) -> None:
        self.executor.close()
