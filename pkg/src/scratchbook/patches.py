"""State patches: diffs between document snapshots, and their application.

The service broadcasts one patch per committed revision; a client holding
any snapshot can apply the stream in revision order and stay equal to the
server's document. Change records are semantic (cell added/removed/moved,
field changes, section changes); whenever placement changed at all, a
trailing ``layout`` record carries the authoritative ordering so appliers
never have to reason about index arithmetic.
"""

from __future__ import annotations

import copy


def _index_cells(snapshot: dict) -> dict[str, tuple[dict, str, int]]:
    """id -> (cell dict, container, index). Container is 'main' or a section id."""
    table: dict[str, tuple[dict, str, int]] = {}
    for i, cell in enumerate(snapshot["mainCells"]):
        table[cell["id"]] = (cell, "main", i)
    for section in snapshot["sections"]:
        for i, cell in enumerate(section["cells"]):
            table[cell["id"]] = (cell, section["id"], i)
    return table


def _layout(snapshot: dict) -> dict:
    return {
        "main": [c["id"] for c in snapshot["mainCells"]],
        "sections": [
            {
                "id": s["id"],
                "anchor": s["anchor"],
                "rank": s["rank"],
                "cells": [c["id"] for c in s["cells"]],
            }
            for s in snapshot["sections"]
        ],
    }


def diff_snapshots(old: dict, new: dict) -> list[dict]:
    changes: list[dict] = []
    if old["scratchpadVisible"] != new["scratchpadVisible"]:
        changes.append({"op": "visibilityChanged", "value": new["scratchpadVisible"]})
    if old["kernelSpec"] != new["kernelSpec"]:
        changes.append({"op": "kernelSpecChanged", "value": new["kernelSpec"]})

    old_sections = {s["id"]: s for s in old["sections"]}
    new_sections = {s["id"]: s for s in new["sections"]}
    added_section_ids = [sid for sid in new_sections if sid not in old_sections]
    old_cells = _index_cells(old)
    new_cells = _index_cells(new)

    # Removals first: a cell that leaves its container for a brand-new
    # section is reported as removed; the sectionAdded payload carries it.
    for cid, (cell, container, index) in old_cells.items():
        if cid not in new_cells:
            changes.append({"op": "cellRemoved", "cellId": cid})
        elif new_cells[cid][1] in added_section_ids and new_cells[cid][1] != container:
            changes.append({"op": "cellRemoved", "cellId": cid})
    for sid, section in old_sections.items():
        if sid not in new_sections:
            changes.append({"op": "sectionRemoved", "sectionId": sid})
    for sid in added_section_ids:
        changes.append({"op": "sectionAdded", "section": copy.deepcopy(new_sections[sid])})
    for sid, section in new_sections.items():
        if sid in old_sections:
            before = old_sections[sid]
            if before["anchor"] != section["anchor"] or before["rank"] != section["rank"]:
                changes.append(
                    {
                        "op": "sectionChanged",
                        "sectionId": sid,
                        "anchor": section["anchor"],
                        "rank": section["rank"],
                    }
                )

    for cid, (cell, container, index) in new_cells.items():
        if cid not in old_cells:
            if container in added_section_ids:
                continue  # carried inside the sectionAdded payload
            changes.append(
                {
                    "op": "cellAdded",
                    "cell": copy.deepcopy(cell),
                    "container": container,
                    "index": index,
                }
            )
            continue
        if container in added_section_ids:
            continue  # reported as cellRemoved + sectionAdded above
        old_cell, old_container, _ = old_cells[cid]
        if container != old_container:
            changes.append(
                {"op": "cellMoved", "cellId": cid, "container": container, "index": index}
            )
        if old_cell["source"] != cell["source"]:
            changes.append({"op": "sourceChanged", "cellId": cid, "source": cell["source"]})
        if old_cell["outputs"] != cell["outputs"]:
            changes.append(
                {"op": "outputsChanged", "cellId": cid, "outputs": copy.deepcopy(cell["outputs"])}
            )
        if old_cell["status"] != cell["status"]:
            changes.append({"op": "statusChanged", "cellId": cid, "status": cell["status"]})
        if old_cell["pinned"] != cell["pinned"] or old_cell["folded"] != cell["folded"]:
            changes.append(
                {
                    "op": "flagsChanged",
                    "cellId": cid,
                    "pinned": cell["pinned"],
                    "folded": cell["folded"],
                }
            )
        if old_cell["summary"] != cell["summary"]:
            changes.append(
                {"op": "summaryChanged", "cellId": cid, "summary": copy.deepcopy(cell["summary"])}
            )

    if _layout(old) != _layout(new):
        changes.append({"op": "layout", **_layout(new)})
    return changes


def apply_patch(snapshot: dict, patch: dict) -> dict:
    """Apply one patch to a snapshot, returning the new snapshot."""
    snap = copy.deepcopy(snapshot)
    pool: dict[str, dict] = {}
    for cell in snap["mainCells"]:
        pool[cell["id"]] = cell
    for section in snap["sections"]:
        for cell in section["cells"]:
            pool[cell["id"]] = cell
    sections = {s["id"]: s for s in snap["sections"]}
    layout = None

    for change in patch["changes"]:
        op = change["op"]
        if op == "visibilityChanged":
            snap["scratchpadVisible"] = change["value"]
        elif op == "kernelSpecChanged":
            snap["kernelSpec"] = change["value"]
        elif op == "cellRemoved":
            pool.pop(change["cellId"], None)
        elif op == "cellAdded":
            cell = copy.deepcopy(change["cell"])
            pool[cell["id"]] = cell
        elif op == "sectionAdded":
            section = copy.deepcopy(change["section"])
            for cell in section["cells"]:
                pool[cell["id"]] = cell
            section["cells"] = [c["id"] for c in section["cells"]]  # resolved via layout below
            sections[section["id"]] = section
        elif op == "sectionRemoved":
            sections.pop(change["sectionId"], None)
        elif op == "sectionChanged":
            section = sections.get(change["sectionId"])
            if section is not None:
                section["anchor"] = change["anchor"]
                section["rank"] = change["rank"]
        elif op == "cellMoved":
            pass  # placement is settled by the layout record
        elif op == "sourceChanged":
            pool[change["cellId"]]["source"] = change["source"]
        elif op == "outputsChanged":
            pool[change["cellId"]]["outputs"] = copy.deepcopy(change["outputs"])
        elif op == "statusChanged":
            pool[change["cellId"]]["status"] = change["status"]
        elif op == "flagsChanged":
            pool[change["cellId"]]["pinned"] = change["pinned"]
            pool[change["cellId"]]["folded"] = change["folded"]
        elif op == "summaryChanged":
            pool[change["cellId"]]["summary"] = copy.deepcopy(change["summary"])
        elif op == "layout":
            layout = change

    if layout is not None:
        snap["mainCells"] = [pool[cid] for cid in layout["main"]]
        snap["sections"] = [
            {
                "id": entry["id"],
                "anchor": entry["anchor"],
                "rank": entry["rank"],
                "cells": [pool[cid] for cid in entry["cells"]],
            }
            for entry in layout["sections"]
        ]
    else:
        snap["mainCells"] = [pool[c["id"]] for c in snap["mainCells"] if c["id"] in pool]
        for section in snap["sections"]:
            section["cells"] = [pool[c["id"]] for c in section["cells"] if c["id"] in pool]
    return snap
