"""HTTP + WebSocket surface over one document session.

One server process hosts one notebook. All writes go through a
single-worker executor so commands are applied strictly in order; patch
broadcast fans out to every connected ``/api/events`` socket after each
commit. Validation failures return 4xx responses and broadcast nothing.
"""

from __future__ import annotations

import asyncio
from concurrent.futures import ThreadPoolExecutor
from contextlib import asynccontextmanager

from fastapi import FastAPI, HTTPException, Response, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .errors import KernelUnavailableError, NotExecutableError, StructuralError
from .session import DocumentSession


class CreateCellBody(BaseModel):
    container: str = "main"
    after: str = "START"
    kind: str = "code"


class PatchCellBody(BaseModel):
    source: str | None = None
    pinned: bool | None = None
    folded: bool | None = None


class MoveCellBody(BaseModel):
    target: str  # "scratch" | "main"


class ExportBody(BaseModel):
    includeScratch: bool = False


class PatchNotebookBody(BaseModel):
    scratchpadVisible: bool


def _run_result_json(result) -> dict:
    return {
        "cellId": result.cell_id,
        "outputs": [o.to_dict() for o in result.outputs],
        "classification": result.classification,
        "staled": sorted(result.staled),
        "duration": result.duration,
    }


def create_app(session: DocumentSession) -> FastAPI:
    writer = ThreadPoolExecutor(max_workers=1)  # the command queue
    subscribers: set[asyncio.Queue] = set()

    def broadcast(patch: dict) -> None:
        loop = app.state.loop
        for queue in list(subscribers):
            loop.call_soon_threadsafe(queue.put_nowait, patch)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        app.state.loop = asyncio.get_running_loop()
        unsubscribe = session.subscribe(broadcast)
        yield
        unsubscribe()
        writer.shutdown(wait=False)
        session.close()

    app = FastAPI(title="scratchbook", lifespan=lifespan)
    app.state.session = session

    async def run_command(fn, *args):
        loop = asyncio.get_running_loop()
        try:
            return await loop.run_in_executor(writer, fn, *args)
        except NotExecutableError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except StructuralError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except KernelUnavailableError as exc:
            raise HTTPException(status_code=503, detail=str(exc))

    @app.get("/api/notebook")
    async def get_notebook():
        return session.snapshot()

    @app.patch("/api/notebook")
    async def patch_notebook(body: PatchNotebookBody):
        await run_command(session.set_scratchpad_visible, body.scratchpadVisible)
        return {"revision": session.revision}

    @app.post("/api/cells")
    async def create_cell(body: CreateCellBody):
        cell_id = await run_command(session.create_cell, body.container, body.after, body.kind)
        return {"cellId": cell_id, "revision": session.revision}

    @app.delete("/api/cells/{cell_id}")
    async def delete_cell(cell_id: str):
        staled = await run_command(session.delete_cell, cell_id)
        return {"staled": sorted(staled), "revision": session.revision}

    @app.patch("/api/cells/{cell_id}")
    async def patch_cell(cell_id: str, body: PatchCellBody):
        staled: set[str] = set()

        def apply():
            result: set[str] = set()
            if body.source is not None:
                result |= session.set_source(cell_id, body.source)
            if body.pinned is not None:
                session.set_pinned(cell_id, body.pinned)
            if body.folded is not None:
                session.set_folded(cell_id, body.folded)
            return result

        staled = await run_command(apply)
        return {"staled": sorted(staled), "revision": session.revision}

    @app.post("/api/cells/{cell_id}/run")
    async def run_cell(cell_id: str):
        result = await run_command(session.run_cell, cell_id)
        return _run_result_json(result)

    @app.post("/api/cells/{cell_id}/move")
    async def move_cell(cell_id: str, body: MoveCellBody):
        if body.target == "scratch":
            section_id = await run_command(session.move_to_scratchpad, cell_id)
            return {"sectionId": section_id, "revision": session.revision}
        if body.target == "main":
            staled = await run_command(session.move_to_notebook, cell_id)
            return {"staled": sorted(staled), "revision": session.revision}
        raise HTTPException(status_code=422, detail=f"unknown move target: {body.target!r}")

    @app.post("/api/sections/{section_id}/move")
    async def move_section(section_id: str):
        staled = await run_command(session.move_section_to_notebook, section_id)
        return {"staled": sorted(staled), "revision": session.revision}

    @app.post("/api/notebook/run-all")
    async def run_all():
        results = await run_command(session.run_all)
        return {"results": [_run_result_json(r) for r in results]}

    @app.post("/api/notebook/save")
    async def save():
        await run_command(session.save)
        return {"revision": session.revision}

    @app.post("/api/notebook/export")
    async def export(body: ExportBody):
        data = await run_command(session.export, body.includeScratch)
        return Response(content=data, media_type="application/x-ipynb+json")

    @app.websocket("/api/events")
    async def events(socket: WebSocket):
        await socket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        subscribers.add(queue)

        async def forward():
            while True:
                await socket.send_json(await queue.get())

        async def watch_disconnect():
            while True:
                await socket.receive_text()  # raises on client close

        forward_task = asyncio.create_task(forward())
        watch_task = asyncio.create_task(watch_disconnect())
        try:
            done, pending = await asyncio.wait(
                {forward_task, watch_task}, return_when=asyncio.FIRST_COMPLETED
            )
            for task in pending:
                task.cancel()
            for task in done:
                exc = task.exception()
                if exc is not None and not isinstance(exc, WebSocketDisconnect):
                    raise exc
        except WebSocketDisconnect:
            pass
        finally:
            forward_task.cancel()
            watch_task.cancel()
            subscribers.discard(queue)

    return app
