"""Kernel contract: sessions that execute code, plus prefix sanitization.

A kernel session holds one mutable namespace. The execution engine drives
it with two operations: ``reset`` (empty the namespace) and ``execute``
(run code, optionally capturing outputs). Sanitization rewrites prefix
code so that silently replaying it does not waste effort on display-only
work; it is configuration, not code, because no pattern list is complete.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..model import Output


@dataclass
class ExecOutcome:
    """Result of one execute call."""

    outputs: list[Output] = field(default_factory=list)
    ok: bool = True

    def __post_init__(self):
        if not self.ok and not any(o.channel == "error" for o in self.outputs):
            raise ValueError("failed outcomes must carry an error output")

    @property
    def error_text(self) -> str | None:
        for out in self.outputs:
            if out.channel == "error":
                return out.text
        return None


class KernelSession:
    """Interface every kernel session implements.

    ``execute`` with ``capture=False`` runs prefix code silently: stream
    and display outputs are discarded but errors still surface.
    """

    language = "unknown"
    supports_reset = True

    def execute(self, code: str, capture: bool = True) -> ExecOutcome:
        raise NotImplementedError

    def reset(self) -> None:
        raise NotImplementedError

    def restart(self) -> None:
        """Fallback reset for kernels that cannot clear their namespace."""
        self.reset()

    def close(self) -> None:
        pass


@dataclass(frozen=True)
class SanitizerRule:
    """Line-level suppression patterns plus a per-session preamble.

    A line is dropped when any pattern matches it. ``drop_trailing_expression``
    additionally removes a bare expression sitting on the last line of a
    cell (the usual implicit-display idiom). The preamble is prepended once
    per prefix, e.g. to force non-interactive plotting.
    """

    patterns: tuple[str, ...] = ()
    preamble: str = ""
    drop_trailing_expression: bool = False

    def _compiled(self):
        return [re.compile(p) for p in self.patterns]

    def filter_code(self, code: str) -> str:
        compiled = self._compiled()
        kept = [
            line
            for line in code.splitlines()
            if not any(rx.search(line) for rx in compiled)
        ]
        if self.drop_trailing_expression:
            for i in range(len(kept) - 1, -1, -1):
                if not kept[i].strip():
                    continue
                if _is_bare_expression(kept[i]):
                    del kept[i]
                break
        return "\n".join(kept)


_STATEMENT_KEYWORDS = (
    "import", "from", "def", "class", "if", "elif", "else", "for", "while",
    "with", "try", "except", "finally", "return", "yield", "raise", "pass",
    "break", "continue", "del", "assert", "global", "nonlocal",
)


def _is_bare_expression(line: str) -> bool:
    """Heuristic: a top-level line that only evaluates something."""
    if line[:1].isspace():
        return False
    stripped = line.strip()
    if not stripped or stripped.startswith("#"):
        return False
    first = re.match(r"[A-Za-z_]\w*", stripped)
    if first and first.group(0) in _STATEMENT_KEYWORDS:
        return False
    # Assignments (including augmented) are kept.
    if re.search(r"(?<![=!<>+\-*/%&|^])=(?!=)", stripped) or re.search(r"[+\-*/%&|^]=", stripped):
        return False
    return True


def sanitize_prefix(rules: SanitizerRule, code: str) -> str:
    """Rewrite prefix code for silent replay: drop display lines, add preamble."""
    filtered = rules.filter_code(code)
    if rules.preamble:
        return rules.preamble.rstrip("\n") + "\n" + filtered
    return filtered


#: Calculator-language rules: assignments are the only statements with a
#: namespace effect, so everything else (print statements, bare expression
#: displays, comments) is dropped.
CALC_SANITIZER = SanitizerRule(
    patterns=(
        r"^\s*print\b",
        r"^\s*(?![A-Za-z_]\w*\s*=(?!=))\S",
    ),
)

#: Default rules for the external Python kernel. Deliberately incomplete;
#: extend via configuration for codebases with other display idioms.
PYTHON_SANITIZER = SanitizerRule(
    patterns=(
        r"^\s*print\s*\(",
        r"^\s*[\w.\[\]'\"]+\.show\s*\(\s*\)",
        r"^\s*[\w.\[\]'\"]+\.info\s*\(",
        r"^\s*[\w.\[\]'\"]+\.head\s*\(",
        r"^\s*[\w.\[\]'\"]+\.describe\s*\(",
        r"^\s*display\s*\(",
    ),
    preamble=(
        "try:\n"
        "    import matplotlib\n"
        "    matplotlib.use('Agg', force=True)\n"
        "    import matplotlib.pyplot as _plt\n"
        "    _plt.ioff()\n"
        "except Exception:\n"
        "    pass"
    ),
    drop_trailing_expression=True,
)
