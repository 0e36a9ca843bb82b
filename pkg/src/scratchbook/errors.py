"""Exception types shared across the package."""


class ScratchbookError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(ScratchbookError):
    """A document operation referenced an unknown cell, section, or position."""


class NotExecutableError(StructuralError):
    """An execution was requested for a cell that cannot run (markdown)."""


class KernelUnavailableError(ScratchbookError):
    """No kernel session could be started; the document was left unchanged."""


class PersistenceError(ScratchbookError):
    """A notebook file could not be parsed or validated."""
