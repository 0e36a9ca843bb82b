"""Random document-model instances for persistence round-trip checks."""

from __future__ import annotations

import random

from scratchbook.model import START, Notebook, Output, SummaryCache


def random_document(rng: random.Random) -> Notebook:
    nb = Notebook(
        scratchpad_visible=rng.random() < 0.5,
        kernel_spec=rng.choice(["calc", "python"]),
    )
    n_main = rng.randint(0, 6)
    for i in range(n_main):
        after = nb.main_cells[-1].id if nb.main_cells else START
        kind = "markdown" if rng.random() < 0.2 else "code"
        nb.create_cell("main", after, kind, cell_id=f"c{i}", source=f"v{i} = {i} # note {i}\nv{i}")
    candidates = [c.id for c in nb.main_cells]
    rng.shuffle(candidates)
    for cid in candidates[: rng.randint(0, min(3, len(candidates)))]:
        nb.move_to_scratchpad(cid)
    for section in list(nb.sections):
        for j in range(rng.randint(0, 2)):
            nb.create_cell(section.id, section.cells[-1].id, cell_id=f"{section.cells[0].id}s{j}")
    for cell in nb.all_cells():
        if cell.kind == "markdown":
            continue
        cell.status = rng.choice(["unrun", "executed", "stale", "errored"])
        if cell.status == "unrun":
            cell.outputs = []
        elif cell.status == "errored":
            cell.outputs = [Output("error", "undefined variable: q")]
        else:
            cell.outputs = [
                Output(rng.choice(["display", "stream"]), str(rng.randint(-999, 999)))
                for _ in range(rng.randint(0, 2))
            ]
        cell.pinned = rng.random() < 0.2
        cell.folded = rng.random() < 0.2
        if rng.random() < 0.3:
            cell.summary = SummaryCache(f"digest{rng.randint(0, 99)}", ("# one", "# Defines: (none)"))
    return nb
