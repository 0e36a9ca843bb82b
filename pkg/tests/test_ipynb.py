"""Notebook-file persistence: round trips, canonical bytes, compatibility."""

from __future__ import annotations

import json
import random

import pytest

from scratchbook.errors import PersistenceError
from scratchbook.ipynb import METADATA_KEY, export_plain, load, save
from scratchbook.model import START, Notebook, Output, SummaryCache


def build_doc():
    nb = Notebook(scratchpad_visible=True)
    nb.create_cell("main", START, cell_id="c1", source="a = 1")
    nb.create_cell("main", "c1", cell_id="c2", kind="markdown", source="# Title\n\nBody")
    nb.create_cell("main", "c2", cell_id="c3", source="a + 1\nprint a")
    c1, c3 = nb.get_cell("c1"), nb.get_cell("c3")
    c1.status = "executed"
    c3.status = "stale"
    c3.outputs = [Output("display", "2"), Output("stream", "1")]
    c3.pinned = True
    c1.summary = SummaryCache("abc123", ("# 1 statement; calls: (none)", "# Defines: a"))
    nb.create_cell("main", "c3", cell_id="x1", source="a * 10")
    sid, _ = nb.move_to_scratchpad("x1")
    nb.get_cell("x1").status = "errored"
    nb.get_cell("x1").outputs = [Output("error", "division by zero")]
    nb.create_cell(sid, "x1", cell_id="x2", source="a")
    nb.get_cell("x2").folded = True
    return nb


def test_round_trip_identity():
    nb = build_doc()
    assert load(save(nb)) == nb


def test_save_is_canonical_and_stable():
    nb = build_doc()
    first = save(nb)
    second = save(nb)
    assert first == second
    assert save(load(first)) == first


def test_main_cells_precede_scratch_cells():
    nb = build_doc()
    doc = json.loads(save(nb))
    containers = [c["metadata"][METADATA_KEY]["container"] for c in doc["cells"]]
    assert containers == sorted(containers, key=lambda c: c != "main")
    assert "scratch" in containers


def test_two_sections_at_same_anchor_serialize_by_rank():
    nb = Notebook()
    nb.create_cell("main", START, cell_id="c1", source="a = 1")
    nb.create_cell("main", "c1", cell_id="x", source="x")
    nb.move_to_scratchpad("x")
    nb.create_cell("main", "c1", cell_id="y", source="y")
    nb.move_to_scratchpad("y")
    doc = json.loads(save(nb))
    assert [c["id"] for c in doc["cells"]] == ["c1", "x", "y"]
    ranks = [c["metadata"][METADATA_KEY]["rank"] for c in doc["cells"][1:]]
    assert ranks == [0, 1]


def test_empty_scratchpad_matches_plain_cell_order():
    nb = Notebook()
    nb.create_cell("main", START, cell_id="c1", source="a = 1")
    doc = json.loads(save(nb))
    assert [c["id"] for c in doc["cells"]] == ["c1"]


def test_plain_notebook_loads_as_main_unrun_with_outputs():
    doc = {
        "cells": [
            {
                "cell_type": "code",
                "execution_count": 3,
                "id": "abc",
                "metadata": {},
                "outputs": [
                    {"name": "stdout", "output_type": "stream", "text": ["hi\n"]},
                ],
                "source": ["print('hi')\n"],
            },
            {"cell_type": "markdown", "id": "md", "metadata": {}, "source": ["# t"]},
            {"cell_type": "code", "id": "def", "metadata": {}, "outputs": [], "source": []},
        ],
        "metadata": {"kernelspec": {"display_name": "Python 3", "language": "python", "name": "python3"}},
        "nbformat": 4,
        "nbformat_minor": 5,
    }
    nb = load(json.dumps(doc))
    assert [c.id for c in nb.main_cells] == ["abc", "md", "def"]
    assert nb.sections == []
    first = nb.get_cell("abc")
    assert first.status == "unrun"
    assert [(o.channel, o.text) for o in first.outputs] == [("stream", "hi\n")]
    assert nb.kernel_spec == "python3"


def test_dangling_anchor_repairs_to_start(caplog):
    nb = Notebook()
    nb.create_cell("main", START, cell_id="c1", source="a = 1")
    nb.create_cell("main", "c1", cell_id="x", source="x")
    nb.move_to_scratchpad("x")
    doc = json.loads(save(nb))
    doc["cells"] = [c for c in doc["cells"] if c["id"] != "c1"]  # delete the anchor externally
    with caplog.at_level("WARNING"):
        repaired = load(json.dumps(doc))
    assert repaired.sections[0].anchor == START
    assert any("repaired to START" in r.message for r in caplog.records)


def test_malformed_json_reports_location():
    with pytest.raises(PersistenceError) as err:
        load(b'{"cells": [,]}')
    assert "line 1" in str(err.value)


def test_not_a_notebook_is_rejected():
    with pytest.raises(PersistenceError):
        load(b'{"kind": "something"}')


def test_duplicate_ids_rejected():
    nb = Notebook()
    nb.create_cell("main", START, cell_id="c1")
    doc = json.loads(save(nb))
    doc["cells"].append(json.loads(json.dumps(doc["cells"][0])))
    with pytest.raises(PersistenceError):
        load(json.dumps(doc))


def test_export_plain_drops_scratch_by_default():
    nb = build_doc()
    doc = json.loads(export_plain(nb))
    assert [c["id"] for c in doc["cells"]] == ["c1", "c2", "c3"]
    assert all(METADATA_KEY not in c["metadata"] for c in doc["cells"])
    assert METADATA_KEY not in doc["metadata"]


def test_export_plain_with_scratch_adds_separators():
    nb = build_doc()
    doc = json.loads(export_plain(nb, include_scratch=True))
    kinds = [(c["cell_type"], c["id"]) for c in doc["cells"]]
    assert kinds[3][0] == "markdown"  # generated separator
    assert [cid for _, cid in kinds[:3]] == ["c1", "c2", "c3"]
    assert [cid for _, cid in kinds[4:]] == ["x1", "x2"]


def test_export_empty_notebook_is_valid():
    doc = json.loads(export_plain(Notebook()))
    assert doc["cells"] == [] and doc["nbformat"] == 4


from docgen import random_document


def test_round_trip_identity_on_random_documents():
    rng = random.Random(20240811)
    for _ in range(60):
        nb = random_document(rng)
        data = save(nb)
        assert load(data) == nb
        assert save(load(data)) == data
