"""Linear execution over the document model.

Running a cell never depends on what the user happened to run before:
the kernel namespace is wiped, the cell's *prefix* (all previously-run
code above it, by its container's rules) is replayed silently, and only
then does the cell itself run with outputs captured. Scratch sections see
the main notebook up to their anchor and nothing of each other, which is
what makes them sandboxes.

Run classification follows the three-way taxonomy: ``linear`` (first run
of the cell at the end of its container, everything above run in order),
``lastCell`` (re-run of that same end cell), and ``nonlinear`` (anything
else). Nonlinear runs invalidate downstream work.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .errors import KernelUnavailableError, NotExecutableError, StructuralError
from .kernels.base import KernelSession, SanitizerRule
from .model import Cell, Notebook, Output

LINEAR = "linear"
LAST_CELL = "lastCell"
NONLINEAR = "nonlinear"


@dataclass
class RunResult:
    cell_id: str
    outputs: list[Output]
    classification: str
    staled: set[str] = field(default_factory=set)
    duration: float = 0.0


def _chain_above(nb: Notebook, cell_id: str) -> tuple[list[Cell], list[Cell]]:
    """(cells above in prefix order, cells after within the container)."""
    cell, section = nb.find_cell(cell_id)
    if section is None:
        pos = nb.main_index(cell_id)
        return list(nb.main_cells[:pos]), list(nb.main_cells[pos + 1:])
    idx = section.cells.index(cell)
    anchor_pos = nb.anchor_position(section.anchor)
    above = list(nb.main_cells[: anchor_pos + 1]) + list(section.cells[:idx])
    return above, list(section.cells[idx + 1:])


def compute_prefix(nb: Notebook, cell_id: str) -> list[tuple[str, str]]:
    """Previously-run code cells replayed before ``cell_id``, in order.

    Main cells see the previously-run main code cells above them (unrun
    cells may be skipped); scratch cells see the main notebook through
    their section's anchor plus the previously-run cells above them in the
    same section. Markdown and errored cells never contribute.
    """
    cell = nb.get_cell(cell_id)
    if not cell.is_code:
        raise NotExecutableError(f"cell {cell_id} is not a code cell")
    above, _ = _chain_above(nb, cell_id)
    return [(c.id, c.source) for c in above if c.in_prefix]


def classify_execution(nb: Notebook, cell_id: str, run_order: dict[str, int]) -> str:
    """Classify a run before any state changes.

    ``run_order`` maps cell ids to the sequence number of their latest run;
    "run in sequence" means every code cell above has run and the latest
    runs happened in position order.
    """
    cell, _ = nb.find_cell(cell_id)
    if not cell.is_code:
        raise NotExecutableError(f"cell {cell_id} is not executable")
    above, below = _chain_above(nb, cell_id)
    is_last = not any(c.is_code for c in below)
    code_above = [c for c in above if c.is_code]
    in_sequence = all(c.ran_before for c in code_above)
    if in_sequence:
        seqs = [run_order.get(c.id, 0) for c in code_above]
        in_sequence = all(a < b for a, b in zip(seqs, seqs[1:]))
    if not (is_last and in_sequence):
        return NONLINEAR
    return LINEAR if not cell.ran_before else LAST_CELL


def mark_stale_after(nb: Notebook, cell_id: str) -> set[str]:
    """Flag everything downstream of a code cell as stale.

    Delegates to the model's container rules: a main cell invalidates
    later main cells and every section anchored at or after it; a scratch
    cell invalidates only the cells below it in its own section.
    """
    cell = nb.get_cell(cell_id)
    if not cell.is_code:
        raise NotExecutableError(f"cell {cell_id} is not a code cell")
    return nb.stale_after_cell(cell_id)


class Executor:
    """Drives one kernel session for one notebook.

    Owns the per-cell run-order bookkeeping that classification needs. On
    construction the order is seeded from document positions, the only
    sensible assumption for a freshly loaded notebook.
    """

    def __init__(
        self,
        nb: Notebook,
        session_factory,
        sanitizer: SanitizerRule,
        on_outputs=None,
    ):
        self.nb = nb
        self._session_factory = session_factory
        self.sanitizer = sanitizer
        self.on_outputs = on_outputs
        self._session: KernelSession | None = None
        self._run_order: dict[str, int] = {}
        self._counter = 0
        for cell in nb.all_cells():
            if cell.is_code and cell.ran_before:
                self._mark_ran(cell.id)

    # -- session plumbing --------------------------------------------------

    def session(self) -> KernelSession:
        if self._session is None:
            self._session = self._session_factory()
            if self._session is None:
                raise KernelUnavailableError("no kernel session available")
        return self._session

    def close(self) -> None:
        if self._session is not None:
            self._session.close()
            self._session = None

    def _reset(self, session: KernelSession) -> None:
        if session.supports_reset:
            session.reset()
        else:
            session.restart()

    def _mark_ran(self, cell_id: str) -> None:
        self._counter += 1
        self._run_order[cell_id] = self._counter

    # -- public operations ---------------------------------------------------

    def classify(self, cell_id: str) -> str:
        return classify_execution(self.nb, cell_id, self._run_order)

    def run_cell(self, cell_id: str) -> RunResult:
        """Execute one cell under linear semantics.

        Nonlinear runs first clear the cell's own outputs and flag
        downstream cells stale. The kernel is reset, the sanitized prefix
        replayed silently, then the cell itself runs with outputs captured
        and attributed to it. A failing prefix cell turns into an error
        output naming that cell.
        """
        cell, section = self.nb.find_cell(cell_id)
        if not cell.is_code:
            raise NotExecutableError(f"cell {cell_id} is not executable")
        session = self.session()
        classification = self.classify(cell_id)
        was_in_prefix = cell.in_prefix
        staled: set[str] = set()
        if classification == NONLINEAR:
            staled = mark_stale_after(self.nb, cell_id)
            cell.outputs = []
        prefix = compute_prefix(self.nb, cell_id)
        start = time.perf_counter()
        self._reset(session)
        if self.sanitizer.preamble:
            session.execute(self.sanitizer.preamble, capture=False)
        for prefix_id, code in prefix:
            silenced = self.sanitizer.filter_code(code)
            if not silenced.strip():
                continue
            outcome = session.execute(silenced, capture=False)
            if not outcome.ok:
                message = outcome.error_text or "unknown kernel error"
                cell.outputs = [Output("error", f"prefix cell {prefix_id} failed: {message}")]
                cell.status = "errored"
                self._mark_ran(cell_id)
                self._emit(cell)
                duration = time.perf_counter() - start
                return RunResult(cell_id, list(cell.outputs), classification, staled, duration)
        outcome = session.execute(cell.source, capture=True)
        cell.outputs = list(outcome.outputs)
        self._emit(cell)
        cell.status = "executed" if outcome.ok else "errored"
        self._mark_ran(cell_id)
        if outcome.ok and not was_in_prefix and section is None and classification != NONLINEAR:
            # The cell just joined downstream prefixes for the first time,
            # so sections anchored at or after it forked from a state that
            # no longer exists; their recorded results are outdated even
            # though this run was linear.
            staled |= self.nb.stale_after_cell(cell_id)
        duration = time.perf_counter() - start
        return RunResult(cell_id, list(cell.outputs), classification, staled, duration)

    def restart_and_run_all(self) -> list[RunResult]:
        """Fresh session; main cells top-to-bottom in one pass, then sections.

        The single main pass is equivalent to per-cell prefix replay for a
        deterministic kernel, without the quadratic cost. A failing main
        cell stops the pass and leaves everything after it stale. Sections
        are then re-run independently: each previously-run cell goes back
        through :meth:`run_cell`, keeping the sandbox rules intact.
        """
        session = self.session()
        self._reset(session)
        results: list[RunResult] = []
        newcomers: list[int] = []  # positions of cells newly joining prefixes
        for position, cell in enumerate(list(self.nb.main_cells)):
            if not cell.is_code:
                continue
            was_in_prefix = cell.in_prefix
            start = time.perf_counter()
            outcome = session.execute(cell.source, capture=True)
            cell.outputs = list(outcome.outputs)
            self._emit(cell)
            cell.status = "executed" if outcome.ok else "errored"
            self._mark_ran(cell.id)
            if outcome.ok and not was_in_prefix:
                newcomers.append(position)
            duration = time.perf_counter() - start
            result = RunResult(cell.id, list(cell.outputs), LINEAR, set(), duration)
            results.append(result)
            if not outcome.ok:
                result.staled = mark_stale_after(self.nb, cell.id)
                if newcomers:
                    # Sections are not re-run on a failed pass, yet any
                    # section anchored at or after a first-time-successful
                    # cell forked from a narrower prefix than now exists.
                    for sec in self.nb.sections:
                        if self.nb.anchor_position(sec.anchor) >= newcomers[0]:
                            for scratch_cell in sec.cells:
                                if scratch_cell.status == "executed":
                                    scratch_cell.status = "stale"
                                    result.staled.add(scratch_cell.id)
                return results
        for section in list(self.nb.sections):
            rerun_ids = [c.id for c in section.cells if c.is_code and c.ran_before]
            for cid in rerun_ids:
                results.append(self.run_cell(cid))
        return results

    def move_to_notebook(self, cell_id: str) -> tuple[set[str], list[RunResult]]:
        """Move a scratch cell into the main notebook and re-execute it.

        Moving into the narrative is a nonlinear event: the cell's outputs
        are regenerated in its new position and downstream work goes stale.
        """
        cell, section = self.nb.find_cell(cell_id)
        if section is None:
            raise StructuralError(f"cell {cell_id} is not in a scratch section")
        if cell.is_code:
            self.session()  # fail before mutating if no kernel is available
        staled = self.nb.move_to_notebook(cell_id)
        runs: list[RunResult] = []
        if cell.is_code:
            run = self.run_cell(cell_id)
            staled |= run.staled
            runs.append(run)
        return staled, runs

    def move_section_to_notebook(self, section_id: str) -> tuple[set[str], list[RunResult]]:
        """Move a whole section into the main notebook, re-running its code cells."""
        section = self.nb.get_section(section_id)
        if any(c.is_code for c in section.cells):
            self.session()
        staled, code_ids = self.nb.move_section_to_notebook(section_id)
        runs: list[RunResult] = []
        for cid in code_ids:
            run = self.run_cell(cid)
            staled |= run.staled
            runs.append(run)
        return staled, runs

    def _emit(self, cell: Cell) -> None:
        if self.on_outputs is not None:
            self.on_outputs(cell)


def audit_staleness(nb: Notebook, session_factory, include_errored: bool = False) -> list[dict]:
    """Check every executed cell's outputs against a fresh replay.

    For each cell with status ``executed``, replay its unsanitized prefix
    in a brand-new session and run the cell; report any divergence between
    recorded and replayed outputs. An empty report means the document's
    non-stale outputs are trustworthy.
    """
    mismatches = []
    for cell in nb.all_cells():
        if not cell.is_code or cell.status != "executed":
            continue
        session = session_factory()
        try:
            session.reset()
            expected: list[Output] | None = None
            for prefix_id, code in compute_prefix(nb, cell.id):
                outcome = session.execute(code, capture=False)
                if not outcome.ok:
                    message = outcome.error_text or "unknown kernel error"
                    expected = [Output("error", f"prefix cell {prefix_id} failed: {message}")]
                    break
            if expected is None:
                expected = list(session.execute(cell.source, capture=True).outputs)
        finally:
            session.close()
        if expected != cell.outputs:
            mismatches.append(
                {
                    "cellId": cell.id,
                    "recorded": [o.to_dict() for o in cell.outputs],
                    "replayed": [o.to_dict() for o in expected],
                }
            )
    return mismatches
