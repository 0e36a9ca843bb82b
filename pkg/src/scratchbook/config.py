"""Runtime configuration from environment variables or a JSON file.

Environment keys:

    SCRATCHBOOK_KERNEL            kernel name override ("calc", "python")
    SCRATCHBOOK_SUMMARIZER_URL    external summarizer endpoint
    SCRATCHBOOK_SUMMARIZER_TOKEN  bearer token for that endpoint
    SCRATCHBOOK_CONFIG            path to a JSON config file

The file accepts the same settings under ``kernel``, ``summarizerUrl``,
``summarizerToken``, ``executionTimeout``, and ``summarizerTimeout``.
Environment variables win over the file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .summaries import DEFAULT_TIMEOUT as SUMMARIZER_TIMEOUT
from .summaries import ExternalSummarizer, HeuristicSummarizer


@dataclass
class Config:
    kernel: str | None = None
    summarizer_url: str | None = None
    summarizer_token: str | None = None
    execution_timeout: float = 30.0
    summarizer_timeout: float = SUMMARIZER_TIMEOUT

    def make_summarizer(self):
        if self.summarizer_url:
            return ExternalSummarizer(
                self.summarizer_url,
                token=self.summarizer_token,
                timeout=self.summarizer_timeout,
            )
        return HeuristicSummarizer()


def load_config(path: str | None = None, env: dict | None = None) -> Config:
    env = os.environ if env is None else env
    settings: dict = {}
    file_path = path or env.get("SCRATCHBOOK_CONFIG")
    if file_path and os.path.exists(file_path):
        with open(file_path, encoding="utf-8") as fh:
            settings = json.load(fh)
    config = Config(
        kernel=env.get("SCRATCHBOOK_KERNEL") or settings.get("kernel"),
        summarizer_url=env.get("SCRATCHBOOK_SUMMARIZER_URL") or settings.get("summarizerUrl"),
        summarizer_token=env.get("SCRATCHBOOK_SUMMARIZER_TOKEN") or settings.get("summarizerToken"),
    )
    if "executionTimeout" in settings:
        config.execution_timeout = float(settings["executionTimeout"])
    if "summarizerTimeout" in settings:
        config.summarizer_timeout = float(settings["summarizerTimeout"])
    return config
