"""Command-line entry points: serve, run-all, validate, export, summarize."""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import ipynb
from .config import load_config
from .execution import Executor, audit_staleness
from .kernels import create_session, sanitizer_for
from .session import DocumentSession
from .summaries import ensure_summary


def _kernel_name(nb, config) -> str:
    return config.kernel or nb.kernel_spec


@click.group()
def main():
    """Notebook engine with a scratchpad and linear execution."""


@main.command()
@click.argument("file", type=click.Path(path_type=Path))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--ui", "ui_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="directory with the built browser client to serve at /")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def serve(file: Path, port: int, host: str, ui_dir, config_path):
    """Serve FILE over the HTTP/WebSocket API."""
    import uvicorn

    from .service import create_app

    config = load_config(config_path)
    session = DocumentSession.open(
        file,
        kernel=config.kernel,
        execution_timeout=config.execution_timeout,
        summarizer=config.make_summarizer(),
    )
    app = create_app(session)
    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
    uvicorn.run(app, host=host, port=port)


@main.command("run-all")
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def run_all(file: Path, config_path):
    """Restart and run FILE top to bottom; exit nonzero if any cell errors."""
    config = load_config(config_path)
    nb = ipynb.load_file(file)
    kernel = _kernel_name(nb, config)
    executor = Executor(
        nb,
        lambda: create_session(kernel, timeout=config.execution_timeout),
        sanitizer_for(kernel),
    )
    try:
        results = executor.restart_and_run_all()
    finally:
        executor.close()
    ipynb.save_file(nb, file)
    failures = [r for r in results if any(o.channel == "error" for o in r.outputs)]
    click.echo(f"ran {len(results)} cells, {len(failures)} failed")
    if failures:
        for result in failures:
            click.echo(f"  {result.cell_id}: {result.outputs[-1].text.strip()}", err=True)
        sys.exit(1)


@main.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def validate(file: Path, config_path):
    """Audit FILE: every executed cell's outputs must match a fresh replay."""
    config = load_config(config_path)
    nb = ipynb.load_file(file)
    kernel = _kernel_name(nb, config)
    mismatches = audit_staleness(nb, lambda: create_session(kernel))
    if mismatches:
        for entry in mismatches:
            click.echo(f"stale-but-not-flagged cell {entry['cellId']}", err=True)
        sys.exit(1)
    click.echo("ok: all executed cells match their replayed outputs")


@main.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--plain", is_flag=True, required=True, help="strip extension metadata")
@click.option("--include-scratch", is_flag=True, default=False)
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None)
def export(file: Path, plain: bool, include_scratch: bool, output: Path | None):
    """Write a plain copy of FILE (presentable artifact by default)."""
    nb = ipynb.load_file(file)
    data = ipynb.export_plain(nb, include_scratch=include_scratch)
    target = output or file.with_suffix("").with_suffix(".plain.ipynb")
    target.write_bytes(data)
    click.echo(f"wrote {target}")


@main.command()
@click.argument("file", type=click.Path(exists=True, path_type=Path))
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def summarize(file: Path, config_path):
    """Fill the fold-summary cache for every code cell in FILE."""
    config = load_config(config_path)
    nb = ipynb.load_file(file)
    provider = config.make_summarizer()
    refreshed = sum(
        1 for cell in list(nb.all_cells()) if cell.is_code and ensure_summary(nb, cell.id, provider)
    )
    ipynb.save_file(nb, file)
    click.echo(f"summarized {refreshed} cells")


if __name__ == "__main__":
    main()
