"""Linear execution: results always reflect the visible top-to-bottom order.

Every run resets the kernel, silently replays the previously-run cells
above the target (its *prefix*), then runs the target itself. Running out
of order therefore cannot leave hidden state behind, and anything a
nonlinear action invalidates is flagged stale.
"""

from scratchbook import Executor, Notebook, START
from scratchbook.kernels import CALC_SANITIZER, CalcSession


def show(nb, title):
    print(f"\n== {title}")
    for cell in nb.main_cells:
        outputs = ", ".join(o.text for o in cell.outputs) or "-"
        print(f"  [{cell.status:8}] {cell.source!r:28} -> {outputs}")


nb = Notebook()
ex = Executor(nb, CalcSession, CALC_SANITIZER)

top = nb.create_cell("main", START, source="price = 120")
middle = nb.create_cell("main", top, source="tax = price / 10")
bottom = nb.create_cell("main", middle, source="price + tax")

for cell_id in (top, middle, bottom):
    result = ex.run_cell(cell_id)
    print(f"ran {nb.get_cell(cell_id).source!r}: {result.classification}")
show(nb, "after a clean top-to-bottom pass")

# Rerunning the middle cell is nonlinear: the engine grays out everything
# below it, because those results no longer reflect the narrative order.
result = ex.run_cell(middle)
print(f"\nrerun of the middle cell is {result.classification}; staled={sorted(result.staled)}")
show(nb, "after the nonlinear rerun")

# The stale cell still shows its old output; re-running it replays
# 'price = 120' and 'tax = ...' in a fresh kernel first.
ex.run_cell(bottom)
show(nb, "after refreshing the stale cell")

# Skipping is allowed: a brand-new cell can run even though the cell
# above it never has. Unrun cells simply stay out of the prefix.
nb.create_cell("main", bottom, cell_id="skipped", source="never_run = 1")
tail = nb.create_cell("main", "skipped", source="price * 2")
print(f"\nrun with a skipped cell above: {ex.run_cell(tail).classification}")
show(nb, "skipped cells stay unrun and contribute nothing")

ex.close()
