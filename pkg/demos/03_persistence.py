"""Persistence: standard notebook files, placement in metadata.

Documents save as ordinary `.ipynb` (format 4) files: main cells first,
then scratch cells grouped by section. Placement, flags, status, and
summaries ride in per-cell metadata under the "tidynote" key that other
tools simply ignore, so the same file opens anywhere.
"""

import json
import tempfile
from pathlib import Path

from scratchbook import Notebook, START
from scratchbook.ipynb import METADATA_KEY, export_plain, load, save

nb = Notebook(scratchpad_visible=True)
intro = nb.create_cell("main", START, kind="markdown", source="# Quarterly numbers")
data = nb.create_cell("main", intro, source="rows = 8807")
probe = nb.create_cell("main", data, source="rows / 12")
nb.move_to_scratchpad(probe)

data_bytes = save(nb)
doc = json.loads(data_bytes)
print("flat cell order and placement in the saved file:")
for cell in doc["cells"]:
    meta = cell["metadata"][METADATA_KEY]
    where = meta["container"]
    if where == "scratch":
        where += f" (anchor {meta['anchorCellId']}, rank {meta['rank']})"
    print(f"  {cell['id']}: {where}")

# Round trip is the identity on the model, and the bytes are canonical.
assert load(data_bytes) == nb
assert save(load(data_bytes)) == data_bytes
print("\nround trip: identical model, identical bytes")

# The plain export is the presentable artifact: extension metadata gone,
# scratch work dropped (or appended behind markdown separators).
plain = json.loads(export_plain(nb))
print(f"plain export keeps {len(plain['cells'])} cells (scratch hidden)")
full = json.loads(export_plain(nb, include_scratch=True))
print(f"with scratch: {[c['cell_type'] for c in full['cells']]}")

with tempfile.TemporaryDirectory() as tmp:
    target = Path(tmp) / "report.ipynb"
    target.write_bytes(data_bytes)
    print(f"\nreloaded from disk: {len(load(target.read_bytes()).main_cells)} main cells")
