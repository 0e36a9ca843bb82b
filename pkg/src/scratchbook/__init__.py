"""Notebook engine with a scratchpad sidebar and linear execution.

The main narrative and a set of anchored, state-forked scratch sections
live in one document. Running any cell replays its prefix in a reset
kernel, so results always reflect the visible top-to-bottom order, and
anything a nonlinear action invalidates is flagged stale. Documents
persist as standard notebook files that other tools can open.
"""

from .errors import (
    KernelUnavailableError,
    NotExecutableError,
    PersistenceError,
    ScratchbookError,
    StructuralError,
)
from .execution import Executor, RunResult, classify_execution, compute_prefix, mark_stale_after
from .model import START, Cell, Notebook, Output, ScratchSection, SummaryCache
from .session import DocumentSession

__version__ = "0.1.0"

__all__ = [
    "Cell",
    "DocumentSession",
    "Executor",
    "KernelUnavailableError",
    "Notebook",
    "NotExecutableError",
    "Output",
    "PersistenceError",
    "RunResult",
    "START",
    "ScratchbookError",
    "ScratchSection",
    "StructuralError",
    "SummaryCache",
    "classify_execution",
    "compute_prefix",
    "mark_stale_after",
    "__version__",
]
