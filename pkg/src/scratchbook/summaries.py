"""Two-line fold summaries for code cells.

A folded code cell shows two generated comment lines: what the cell does,
and which names it newly defines. The deterministic heuristic provider is
always available; an external language-model endpoint can be configured
and falls back to the heuristic on any deviation. Summaries are cached
against a digest of the cell's code with comments and whitespace removed,
so cosmetic edits never trigger regeneration.
"""

from __future__ import annotations

import hashlib
import logging
import os
import re
from dataclasses import dataclass

import requests

from .execution import compute_prefix
from .model import Notebook, SummaryCache

logger = logging.getLogger(__name__)

COMMENT_MARKER = "#"
DEFAULT_TIMEOUT = 10.0
TOKEN_ENV_VAR = "SCRATCHBOOK_SUMMARIZER_TOKEN"


def strip_comments(source: str) -> str:
    return "\n".join(line.split(COMMENT_MARKER, 1)[0] for line in source.splitlines())


def normalize_code(source: str) -> str:
    """Digest of the source with comments and all whitespace removed."""
    residue = re.sub(r"\s+", "", strip_comments(source))
    return hashlib.sha256(residue.encode("utf-8")).hexdigest()


@dataclass
class SummaryRequest:
    cell_code: str
    prior_code: str = ""


_ASSIGN = re.compile(r"^\s*([A-Za-z_]\w*)\s*=(?!=)")
_DEF = re.compile(r"^\s*(?:def|class)\s+([A-Za-z_]\w*)")
_IMPORT = re.compile(r"^\s*import\s+([A-Za-z_]\w*)")
_FROM_IMPORT = re.compile(r"^\s*from\s+[\w.]+\s+import\s+(.+)")
_CALL = re.compile(r"([A-Za-z_]\w*)\s*\(")
_PRINT_STMT = re.compile(r"^\s*print\b")

_NOT_CALLEES = {"if", "while", "for", "elif", "return", "yield", "assert", "del", "not", "and", "or", "lambda"}


def _defined_names(code: str) -> list[str]:
    names: list[str] = []

    def add(name: str):
        if name and name not in names:
            names.append(name)

    for line in strip_comments(code).splitlines():
        m = _ASSIGN.match(line) or _DEF.match(line) or _IMPORT.match(line)
        if m:
            add(m.group(1))
            continue
        m = _FROM_IMPORT.match(line)
        if m:
            for part in m.group(1).split(","):
                token = part.strip().split(" as ")
                add(re.sub(r"\W.*", "", token[-1].strip()))
    return names


class HeuristicSummarizer:
    """Deterministic summary: statement count, callees, new definitions."""

    def summarize(self, request: SummaryRequest) -> tuple[str, str]:
        lines = [
            stripped
            for stripped in (l.strip() for l in strip_comments(request.cell_code).splitlines())
            if stripped
        ]
        count = len(lines)
        noun = "statement" if count == 1 else "statements"
        callees: set[str] = set()
        for line in lines:
            if _PRINT_STMT.match(line):
                callees.add("print")
            for m in _CALL.finditer(line):
                if m.group(1) not in _NOT_CALLEES:
                    callees.add(m.group(1))
        calls = ", ".join(sorted(callees)) if callees else "(none)"
        prior = set(_defined_names(request.prior_code))
        fresh = [name for name in _defined_names(request.cell_code) if name not in prior]
        defines = ", ".join(fresh) if fresh else "(none)"
        return (
            f"{COMMENT_MARKER} {count} {noun}; calls: {calls}",
            f"{COMMENT_MARKER} Defines: {defines}",
        )


def build_prompt(request: SummaryRequest) -> str:
    """Exact prompt sent to the external provider."""
    if request.prior_code:
        prior_block = (
            "The code prior to this cell that has been executed is:\n\n"
            f"```\n{request.prior_code}```\n\n"
        )
    else:
        prior_block = ""
    return (
        "I am writing code in this notebook cell:\n"
        "\n"
        "```\n"
        f"{request.cell_code}\n"
        "```\n"
        "\n"
        f"{prior_block}"
        "\n"
        "\n"
        "Summarize the code in this cell in a comment with no more than ten words.\n"
        "\n"
        "Summarize the variables newly defined in this cell in another comment "
        "with no more than ten words.\n"
        "\n"
        "Return only the two comments starting with #, separated by a newline."
    )


class ExternalSummarizer:
    """Client for a single-endpoint completion service.

    Sends ``{"prompt": ...}``, expects ``{"completion": ...}``. Any
    transport error, timeout, or malformed response falls back to the
    heuristic so folding always yields a summary.
    """

    def __init__(
        self,
        endpoint: str,
        token: str | None = None,
        timeout: float = DEFAULT_TIMEOUT,
        post=requests.post,
        fallback: HeuristicSummarizer | None = None,
    ):
        self.endpoint = endpoint
        self.token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)
        self.timeout = timeout
        self._post = post
        self._fallback = fallback or HeuristicSummarizer()

    def summarize(self, request: SummaryRequest) -> tuple[str, str]:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        try:
            response = self._post(
                self.endpoint,
                json={"prompt": build_prompt(request)},
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            completion = response.json()["completion"]
            lines = [line.rstrip() for line in completion.strip().splitlines() if line.strip()]
            if len(lines) == 2 and all(line.lstrip().startswith(COMMENT_MARKER) for line in lines):
                return lines[0], lines[1]
            logger.warning("summarizer returned %d usable lines; using heuristic", len(lines))
        except Exception as exc:
            logger.warning("summarizer request failed (%s); using heuristic", exc)
        return self._fallback.summarize(request)


def prior_code_for(nb: Notebook, cell_id: str) -> str:
    """Concatenated previously-run code above the cell, one cell per line group."""
    return "".join(code + "\n" for _, code in compute_prefix(nb, cell_id))


def ensure_summary(nb: Notebook, cell_id: str, provider) -> bool:
    """Regenerate the cached summary if the cell's effective code changed.

    Returns True when the provider was invoked. Cells whose
    comment/whitespace-stripped code digests match their cache are left
    alone; markdown cells never get summaries.
    """
    cell = nb.get_cell(cell_id)
    if not cell.is_code:
        return False
    digest = normalize_code(cell.source)
    if cell.summary is not None and cell.summary.digest == digest:
        return False
    request = SummaryRequest(cell_code=cell.source, prior_code=prior_code_for(nb, cell_id))
    lines = provider.summarize(request)
    cell.summary = SummaryCache(digest=digest, lines=(lines[0], lines[1]))
    return True
