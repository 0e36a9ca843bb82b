"""Scratch sections: state-forked sandboxes anchored to the narrative.

Moving a cell to the scratchpad opens a new section anchored at the cell
above its old position. Each section sees the main notebook up to its
anchor and nothing from any other section; whatever it does to its
variables never leaks back.
"""

from scratchbook import Executor, Notebook, START
from scratchbook.kernels import CALC_SANITIZER, CalcSession


def show(nb):
    print("  main:")
    for cell in nb.main_cells:
        outputs = ", ".join(o.text for o in cell.outputs) or "-"
        print(f"    [{cell.status:8}] {cell.source!r:26} -> {outputs}")
    for section in nb.sections:
        print(f"  section {section.id} (anchor {section.anchor}, rank {section.rank}):")
        for cell in section.cells:
            outputs = ", ".join(o.text for o in cell.outputs) or "-"
            print(f"    [{cell.status:8}] {cell.source!r:26} -> {outputs}")


nb = Notebook()
ex = Executor(nb, CalcSession, CALC_SANITIZER)

data = nb.create_cell("main", START, source="rows = 8807")
count = nb.create_cell("main", data, source="total = rows\ntotal")
probe = nb.create_cell("main", count, source="rows / 365")
for cid in (data, count, probe):
    ex.run_cell(cid)

# The probe was a one-off: move it aside. A new section opens, anchored
# at the cell that used to precede it, and its recorded output survives.
section_id, _ = nb.move_to_scratchpad(probe)
print("after moving the probe out:")
show(nb)

# Fork the state inside the section: overwriting `rows` here is invisible
# to the main notebook.
mutate = nb.create_cell(section_id, probe, source="rows = 1\nrows")
print(f"\nscratch mutation shows {ex.run_cell(mutate).outputs[-1].text}")
check = nb.create_cell("main", count, source="rows")
print(f"main still sees rows = {ex.run_cell(check).outputs[-1].text}")

# A second section forked from the same anchor is equally isolated.
other = nb.create_cell("main", count, source="rows")
nb.move_to_scratchpad(other)
print(f"second section still sees rows = {ex.run_cell(other).outputs[-1].text}")

# Promote the probe back into the narrative: it is re-executed in place
# and downstream work is flagged stale.
staled, _ = ex.move_to_notebook(probe)
print(f"\nmoved the probe back; staled: {sorted(staled)}")
show(nb)

ex.close()
