"""External-process kernel: a spawned interpreter behind a framed protocol.

Each session owns one child process (by default the bundled Python shim)
and exchanges newline-delimited JSON frames with it. Reset is delegated to
the shim when it supports a namespace clear; a hung execution is recovered
by killing and respawning the child, which also serves as the reset
fallback for interpreters without one.
"""

from __future__ import annotations

import json
import logging
import queue
import subprocess
import sys
import threading

from ..errors import KernelUnavailableError
from ..model import Output
from .base import ExecOutcome, KernelSession

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0


def default_shim_command() -> list[str]:
    return [sys.executable, "-u", "-m", "scratchbook.kernels.shim"]


class ExternalSession(KernelSession):
    language = "python"
    supports_reset = True

    def __init__(self, command: list[str] | None = None, timeout: float = DEFAULT_TIMEOUT):
        self.command = command or default_shim_command()
        self.timeout = timeout
        self._proc: subprocess.Popen | None = None
        self._responses: queue.Queue | None = None
        self._spawn()

    def _spawn(self) -> None:
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
            )
        except OSError as exc:
            raise KernelUnavailableError(f"cannot spawn kernel process: {exc}") from exc
        self._responses = queue.Queue()
        thread = threading.Thread(
            target=self._pump, args=(self._proc.stdout, self._responses), daemon=True
        )
        thread.start()

    @staticmethod
    def _pump(stream, responses: queue.Queue) -> None:
        for line in stream:
            responses.put(line)
        responses.put(None)

    def _request(self, frame: dict, timeout: float | None = None) -> dict:
        if self._proc is None or self._proc.poll() is not None:
            self.restart()
        assert self._proc and self._proc.stdin and self._responses is not None
        self._proc.stdin.write(json.dumps(frame) + "\n")
        self._proc.stdin.flush()
        try:
            line = self._responses.get(timeout=timeout or self.timeout)
        except queue.Empty:
            logger.warning("kernel timed out; restarting process")
            self.restart()
            return {"ok": False, "outputs": [{"channel": "error", "text": "execution timeout"}]}
        if line is None:
            self.restart()
            return {"ok": False, "outputs": [{"channel": "error", "text": "kernel process exited"}]}
        return json.loads(line)

    def execute(self, code: str, capture: bool = True) -> ExecOutcome:
        response = self._request({"op": "exec", "code": code, "capture": capture})
        outputs = [
            Output(o["channel"], o["text"], o.get("mime", "text/plain"))
            for o in response.get("outputs", [])
        ]
        ok = bool(response.get("ok"))
        if not ok and not any(o.channel == "error" for o in outputs):
            outputs.append(Output("error", "kernel reported failure without detail"))
        return ExecOutcome(outputs, ok=ok)

    def reset(self) -> None:
        if not self.supports_reset:
            self.restart()
            return
        response = self._request({"op": "reset"})
        if not response.get("ok"):
            self.restart()

    def restart(self) -> None:
        self.close()
        self._spawn()

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.kill()
                self._proc.wait(timeout=5)
            except Exception:
                pass
            self._proc = None
