"""Fold summaries: two generated comment lines per folded code cell.

A folded cell collapses to what it does plus what it defines. Summaries
are cached against a digest of the code with comments and whitespace
stripped, so cosmetic edits cost nothing; only meaningful changes reach
the provider. An external completion endpoint can be plugged in, with the
deterministic heuristic as the always-available fallback.
"""

from scratchbook import Executor, Notebook, START
from scratchbook.kernels import CALC_SANITIZER, CalcSession
from scratchbook.summaries import (
    HeuristicSummarizer,
    SummaryRequest,
    build_prompt,
    ensure_summary,
    normalize_code,
)

nb = Notebook()
ex = Executor(nb, CalcSession, CALC_SANITIZER)
setup = nb.create_cell("main", START, source="base = 100\nrate = 3")
report = nb.create_cell("main", setup, source="total = base + rate * 12\nprint total")
ex.run_cell(setup)
ex.run_cell(report)

provider = HeuristicSummarizer()
for cell_id in (setup, report):
    ensure_summary(nb, cell_id, provider)
    cell = nb.get_cell(cell_id)
    print(f"{cell.source!r}")
    for line in cell.summary.lines:
        print(f"   {line}")

# The digest ignores comments and whitespace...
print("\ndigest('a = 1  # hi') == digest('a=1'):", normalize_code("a = 1  # hi") == normalize_code("a=1"))

# ...which is exactly the re-summarization rule: cosmetic edits keep the
# cached lines, code edits regenerate them.
nb.set_source(report, "total = base + rate * 12  # annualized\nprint total")
print("cosmetic edit regenerates:", ensure_summary(nb, report, provider))
nb.set_source(report, "total = base * 2\nprint total")
print("code edit regenerates:", ensure_summary(nb, report, provider))

# The external provider receives this exact prompt (heuristic used here,
# so no network is involved in the demo):
print("\nprompt sent to an external provider:\n")
print(build_prompt(SummaryRequest(cell_code="total = base * 2", prior_code="base = 100\n")))

ex.close()
