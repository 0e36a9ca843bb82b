"""Read and write the document as a standard notebook file (format 4.x).

Placement, flags, status, and summaries travel in per-cell metadata under
the ``"tidynote"`` key, with the scratchpad toggle and kernel name in the
notebook-level key of the same name; standard tools ignore both. The flat
cell order is always main cells first, then scratch cells grouped by
section, so the file reads sensibly anywhere.

Serialization is canonical: stable key order and deterministic bytes, so
saving an unchanged document twice produces identical files.
"""

from __future__ import annotations

import json
import logging
import uuid

from .errors import PersistenceError
from .model import Cell, Notebook, Output, ScratchSection, START, SummaryCache

logger = logging.getLogger(__name__)

METADATA_KEY = "tidynote"
NBFORMAT = 4
NBFORMAT_MINOR = 5

_KERNELSPECS = {
    "calc": {"display_name": "Calc", "language": "calc", "name": "calc"},
    "python": {"display_name": "Python 3", "language": "python", "name": "python"},
}


def _split_lines(text: str) -> list[str]:
    return text.splitlines(keepends=True) if text else []


def _join_lines(lines) -> str:
    if isinstance(lines, str):
        return lines
    return "".join(lines)


def _output_to_json(output: Output) -> dict:
    if output.channel == "stream":
        return {"name": "stdout", "output_type": "stream", "text": _split_lines(output.text)}
    if output.channel == "error":
        return {
            "ename": "Error",
            "evalue": output.text,
            "output_type": "error",
            "traceback": _split_lines(output.text),
        }
    return {
        "data": {output.mime: _split_lines(output.text)},
        "execution_count": None,
        "metadata": {},
        "output_type": "execute_result",
    }


def _output_from_json(obj: dict, where: str) -> Output | None:
    kind = obj.get("output_type")
    if kind == "stream":
        return Output("stream", _join_lines(obj.get("text", [])))
    if kind == "error":
        return Output("error", obj.get("evalue") or "unknown error")
    if kind in ("execute_result", "display_data"):
        data = obj.get("data", {})
        if not data:
            return Output("display", "")
        mime = sorted(data)[0]
        return Output("display", _join_lines(data[mime]), mime)
    logger.warning("%s: dropping unknown output type %r", where, kind)
    return None


def _cell_to_json(cell: Cell, placement: dict) -> dict:
    meta = {
        "container": placement["container"],
        "folded": cell.folded,
        "pinned": cell.pinned,
        "status": cell.status,
    }
    if placement["container"] == "scratch":
        meta["anchorCellId"] = placement["anchor"]
        meta["rank"] = placement["rank"]
        meta["sectionId"] = placement["sectionId"]
    if cell.summary is not None:
        meta["summary"] = {"digest": cell.summary.digest, "lines": list(cell.summary.lines)}
    record = {
        "cell_type": cell.kind,
        "id": cell.id,
        "metadata": {METADATA_KEY: meta},
        "source": _split_lines(cell.source),
    }
    if cell.kind == "code":
        record["execution_count"] = None
        record["outputs"] = [_output_to_json(o) for o in cell.outputs]
    return record


def _cell_from_json(obj: dict, index: int) -> tuple[Cell, dict | None]:
    where = f"cells[{index}]"
    if not isinstance(obj, dict) or "cell_type" not in obj:
        raise PersistenceError(f"{where}: not a notebook cell object")
    kind = obj["cell_type"]
    if kind not in ("code", "markdown"):
        # Foreign cell types (raw, etc.) are carried as markdown so nothing is lost.
        logger.warning("%s: treating cell type %r as markdown", where, kind)
        kind = "markdown"
    meta = obj.get("metadata", {}).get(METADATA_KEY)
    cell = Cell(
        id=obj.get("id") or uuid.uuid4().hex[:12],
        kind=kind,
        source=_join_lines(obj.get("source", [])),
    )
    if kind == "code":
        outputs = []
        for out in obj.get("outputs", []):
            parsed = _output_from_json(out, where)
            if parsed is not None:
                outputs.append(parsed)
        cell.outputs = outputs
    if meta is None:
        return cell, None
    status = meta.get("status", "unrun")
    if kind == "markdown":
        status = "unrun"
    if status not in ("unrun", "executed", "stale", "errored"):
        raise PersistenceError(f"{where}: unknown status {status!r}")
    cell.status = status
    cell.pinned = bool(meta.get("pinned", False))
    cell.folded = bool(meta.get("folded", False))
    summary = meta.get("summary")
    if summary:
        try:
            cell.summary = SummaryCache(summary["digest"], tuple(summary["lines"][:2]))
        except (KeyError, IndexError, TypeError):
            raise PersistenceError(f"{where}: malformed summary cache") from None
    return cell, meta


def save(nb: Notebook) -> bytes:
    """Serialize to canonical notebook-file bytes, main before scratch."""
    cells_json = []
    for cell in nb.main_cells:
        cells_json.append(_cell_to_json(cell, {"container": "main"}))
    for section in nb.sections:
        for cell in section.cells:
            cells_json.append(
                _cell_to_json(
                    cell,
                    {
                        "container": "scratch",
                        "sectionId": section.id,
                        "anchor": section.anchor,
                        "rank": section.rank,
                    },
                )
            )
    kernelspec = _KERNELSPECS.get(
        nb.kernel_spec,
        {"display_name": nb.kernel_spec, "language": nb.kernel_spec, "name": nb.kernel_spec},
    )
    doc = {
        "cells": cells_json,
        "metadata": {
            "kernelspec": kernelspec,
            METADATA_KEY: {
                "kernelSpec": nb.kernel_spec,
                "scratchpadVisible": nb.scratchpad_visible,
            },
        },
        "nbformat": NBFORMAT,
        "nbformat_minor": NBFORMAT_MINOR,
    }
    text = json.dumps(doc, indent=1, sort_keys=True, separators=(",", ": "))
    return (text + "\n").encode("utf-8")


def load(data: bytes | str) -> Notebook:
    """Reconstruct the document model from notebook-file bytes.

    Cells without placement metadata (a plain notebook, or cells added by
    other tools) become main cells in file order, unrun but with their
    outputs preserved. A scratch cell whose anchor no longer exists is
    repaired to START with a warning rather than dropped.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise PersistenceError(
            f"invalid notebook JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("cells"), list):
        raise PersistenceError("not a notebook file: missing cell list")
    meta = doc.get("metadata", {})
    extension = meta.get(METADATA_KEY, {})
    kernel = (
        extension.get("kernelSpec")
        or meta.get("kernelspec", {}).get("name")
        or "calc"
    )
    nb = Notebook(
        scratchpad_visible=bool(extension.get("scratchpadVisible", False)),
        kernel_spec=kernel,
    )
    groups: dict[str, dict] = {}
    for index, obj in enumerate(doc["cells"]):
        cell, placement = _cell_from_json(obj, index)
        if placement and placement.get("container") == "scratch":
            section_id = placement.get("sectionId")
            if not section_id:
                raise PersistenceError(f"cells[{index}]: scratch cell without sectionId")
            group = groups.setdefault(
                section_id,
                {
                    "anchor": placement.get("anchorCellId", START),
                    "rank": placement.get("rank", 0),
                    "cells": [],
                },
            )
            group["cells"].append(cell)
        else:
            nb.main_cells.append(cell)
    main_ids = {c.id for c in nb.main_cells}
    for section_id, group in groups.items():
        anchor = group["anchor"]
        if anchor != START and anchor not in main_ids:
            logger.warning(
                "section %s anchored at missing cell %s; repaired to START", section_id, anchor
            )
            anchor = START
        try:
            rank = int(group["rank"])
        except (TypeError, ValueError):
            raise PersistenceError(f"section {section_id}: rank is not an integer") from None
        nb.sections.append(
            ScratchSection(id=section_id, anchor=anchor, cells=group["cells"], rank=rank)
        )
    nb._normalize_sections()
    seen: set[str] = set()
    for cell in nb.all_cells():
        if cell.id in seen:
            raise PersistenceError(f"duplicate cell id in file: {cell.id}")
        seen.add(cell.id)
    return nb


def export_plain(nb: Notebook, include_scratch: bool = False) -> bytes:
    """Emit a plain notebook with all extension metadata stripped.

    Without scratch this is the presentable artifact: main cells only.
    With scratch, each section follows the main cells behind a generated
    markdown separator.
    """
    cells_json = []

    def plain(cell: Cell) -> dict:
        record = {
            "cell_type": cell.kind,
            "id": cell.id,
            "metadata": {},
            "source": _split_lines(cell.source),
        }
        if cell.kind == "code":
            record["execution_count"] = None
            record["outputs"] = [_output_to_json(o) for o in cell.outputs]
        return record

    for cell in nb.main_cells:
        cells_json.append(plain(cell))
    if include_scratch:
        for number, section in enumerate(nb.sections, start=1):
            cells_json.append(
                {
                    "cell_type": "markdown",
                    "id": f"scratch-separator-{section.id}",
                    "metadata": {},
                    "source": _split_lines(f"## Scratch section {number}"),
                }
            )
            for cell in section.cells:
                cells_json.append(plain(cell))
    kernelspec = _KERNELSPECS.get(
        nb.kernel_spec,
        {"display_name": nb.kernel_spec, "language": nb.kernel_spec, "name": nb.kernel_spec},
    )
    doc = {
        "cells": cells_json,
        "metadata": {"kernelspec": kernelspec},
        "nbformat": NBFORMAT,
        "nbformat_minor": NBFORMAT_MINOR,
    }
    text = json.dumps(doc, indent=1, sort_keys=True, separators=(",", ": "))
    return (text + "\n").encode("utf-8")


def load_file(path) -> Notebook:
    with open(path, "rb") as fh:
        return load(fh.read())


def save_file(nb: Notebook, path) -> bytes:
    data = save(nb)
    with open(path, "wb") as fh:
        fh.write(data)
    return data
