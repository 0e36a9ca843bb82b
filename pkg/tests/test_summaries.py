"""Fold summaries: digests, heuristic lines, provider fallback, caching."""

from __future__ import annotations

from scratchbook.execution import Executor
from scratchbook.kernels import CALC_SANITIZER, CalcSession
from scratchbook.model import START, Notebook
from scratchbook.summaries import (
    ExternalSummarizer,
    HeuristicSummarizer,
    SummaryRequest,
    build_prompt,
    ensure_summary,
    normalize_code,
)


# -- normalization -----------------------------------------------------------


def test_comments_and_whitespace_do_not_change_digest():
    assert normalize_code("a = 1  # note") == normalize_code("a=1")


def test_code_changes_change_digest():
    assert normalize_code("a = 1") != normalize_code("a = 2")


def test_comment_only_cell_digests_like_empty():
    assert normalize_code("# only a comment\n   \n") == normalize_code("")


# -- heuristic provider --------------------------------------------------------


def test_heuristic_counts_statements_and_defines():
    lines = HeuristicSummarizer().summarize(SummaryRequest("a = 1\nb = a + 1", ""))
    assert lines == ("# 2 statements; calls: (none)", "# Defines: a, b")


def test_heuristic_detects_print_call_and_no_new_names():
    lines = HeuristicSummarizer().summarize(SummaryRequest("print a", "a = 1"))
    assert lines == ("# 1 statement; calls: print", "# Defines: (none)")


def test_heuristic_excludes_names_already_defined_before():
    lines = HeuristicSummarizer().summarize(SummaryRequest("a = 2\nc = 3", "a = 1\nb = 2"))
    assert lines[1] == "# Defines: c"


def test_heuristic_sees_python_style_calls():
    lines = HeuristicSummarizer().summarize(
        SummaryRequest("df = load('x.csv')\nplot(df)", "")
    )
    assert lines[0] == "# 2 statements; calls: load, plot"


def test_heuristic_is_deterministic():
    request = SummaryRequest("x = f(1)\ny = g(x)", "q = 2")
    assert HeuristicSummarizer().summarize(request) == HeuristicSummarizer().summarize(request)


# -- prompt -----------------------------------------------------------------------


def test_prompt_without_prior_code():
    prompt = build_prompt(SummaryRequest("a = 1", ""))
    assert prompt == (
        "I am writing code in this notebook cell:\n"
        "\n"
        "```\n"
        "a = 1\n"
        "```\n"
        "\n"
        "\n"
        "\n"
        "Summarize the code in this cell in a comment with no more than ten words.\n"
        "\n"
        "Summarize the variables newly defined in this cell in another comment "
        "with no more than ten words.\n"
        "\n"
        "Return only the two comments starting with #, separated by a newline."
    )


def test_prompt_with_prior_code_block():
    prompt = build_prompt(SummaryRequest("b = a + 1", "a = 1\n"))
    assert "The code prior to this cell that has been executed is:\n\n```\na = 1\n```\n\n" in prompt
    assert prompt.startswith("I am writing code in this notebook cell:\n\n```\nb = a + 1\n```\n\n")


# -- external provider -------------------------------------------------------------


class FakeResponse:
    def __init__(self, payload, status=200):
        self._payload = payload
        self.status_code = status

    def raise_for_status(self):
        if self.status_code >= 400:
            raise RuntimeError(f"HTTP {self.status_code}")

    def json(self):
        return self._payload


def test_external_provider_uses_valid_two_line_response():
    calls = []

    def post(url, json=None, headers=None, timeout=None):
        calls.append((url, json, headers, timeout))
        return FakeResponse({"completion": "# Loads the data\n# Defines: df"})

    provider = ExternalSummarizer("http://summaries.test/v1", token="tok", post=post)
    lines = provider.summarize(SummaryRequest("df = load()", ""))
    assert lines == ("# Loads the data", "# Defines: df")
    url, body, headers, timeout = calls[0]
    assert url == "http://summaries.test/v1"
    assert body["prompt"].startswith("I am writing code in this notebook cell:")
    assert headers["Authorization"] == "Bearer tok"
    assert timeout == 10.0


def test_external_provider_falls_back_on_three_lines():
    def post(url, **kwargs):
        return FakeResponse({"completion": "# a\n# b\n# c"})

    provider = ExternalSummarizer("http://summaries.test", post=post)
    lines = provider.summarize(SummaryRequest("a = 1", ""))
    assert lines == ("# 1 statement; calls: (none)", "# Defines: a")


def test_external_provider_falls_back_on_missing_hash_prefix():
    def post(url, **kwargs):
        return FakeResponse({"completion": "Loads data\nDefines df"})

    provider = ExternalSummarizer("http://summaries.test", post=post)
    assert provider.summarize(SummaryRequest("a = 1", ""))[0].startswith("#")


def test_external_provider_falls_back_on_transport_error():
    def post(url, **kwargs):
        raise OSError("connection refused")

    provider = ExternalSummarizer("http://summaries.test", post=post)
    assert provider.summarize(SummaryRequest("a = 1", ""))[1] == "# Defines: a"


def test_external_provider_falls_back_on_http_error():
    def post(url, **kwargs):
        return FakeResponse({}, status=500)

    provider = ExternalSummarizer("http://summaries.test", post=post)
    lines = provider.summarize(SummaryRequest("a = 1", ""))
    assert lines[0].startswith("#") and lines[1].startswith("#")


# -- cache rule ---------------------------------------------------------------------


class CountingProvider:
    def __init__(self):
        self.calls = 0
        self._inner = HeuristicSummarizer()

    def summarize(self, request):
        self.calls += 1
        return self._inner.summarize(request)


def test_summary_regenerated_only_when_digest_changes():
    nb = Notebook()
    nb.create_cell("main", START, cell_id="c1", source="a = 1")
    provider = CountingProvider()
    assert ensure_summary(nb, "c1", provider) is True
    assert provider.calls == 1
    assert ensure_summary(nb, "c1", provider) is False  # unchanged
    nb.set_source("c1", "a = 1   # cosmetic")
    assert ensure_summary(nb, "c1", provider) is False  # same digest
    nb.set_source("c1", "a = 2")
    assert ensure_summary(nb, "c1", provider) is True
    assert provider.calls == 2


def test_summary_lines_shape():
    nb = Notebook()
    nb.create_cell("main", START, cell_id="c1", source="a = 1\nprint a")
    ensure_summary(nb, "c1", HeuristicSummarizer())
    summary = nb.get_cell("c1").summary
    assert len(summary.lines) == 2
    assert all(line.startswith("#") for line in summary.lines)


def test_prior_code_is_the_executed_prefix():
    nb = Notebook()
    nb.create_cell("main", START, cell_id="c1", source="a = 1")
    nb.create_cell("main", "c1", cell_id="c2", source="b = 2")
    nb.create_cell("main", "c2", cell_id="c3", source="a = a + b")
    executor = Executor(nb, CalcSession, CALC_SANITIZER)
    executor.run_cell("c1")  # c2 left unrun: not part of the prior code
    seen = {}

    class Spy:
        def summarize(self, request):
            seen["request"] = request
            return ("# x", "# Defines: (none)")

    ensure_summary(nb, "c3", Spy())
    assert seen["request"].prior_code == "a = 1\n"
    # names already assigned upstream are not "new" in the summarized cell
    lines = HeuristicSummarizer().summarize(seen["request"])
    assert lines[1] == "# Defines: (none)"


def test_markdown_cells_are_never_summarized():
    nb = Notebook()
    nb.create_cell("main", START, cell_id="m1", kind="markdown", source="# heading")
    provider = CountingProvider()
    assert ensure_summary(nb, "m1", provider) is False
    assert provider.calls == 0
