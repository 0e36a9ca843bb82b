"""Child-process interpreter behind the external kernel.

Speaks a newline-delimited JSON protocol on stdio. One request, one
response, flushed after every frame:

    {"op": "exec", "code": "...", "capture": true}
        -> {"ok": bool, "outputs": [{"channel": ..., "text": ...}]}
    {"op": "reset"}
        -> {"ok": true, "outputs": []}

Code runs in a single module-level namespace. When the last statement of a
submission is a bare expression, its non-None value is emitted as a
display output, mirroring notebook semantics. User prints are captured
(stdout is redirected during exec), so frames on the real stdout stay
well-formed.
"""

from __future__ import annotations

import ast
import io
import json
import sys
import traceback


def _exec_code(namespace: dict, code: str, capture: bool) -> dict:
    outputs = []
    ok = True
    stdout = io.StringIO()
    stderr = io.StringIO()
    real_out, real_err = sys.stdout, sys.stderr
    sys.stdout, sys.stderr = stdout, stderr
    try:
        tree = ast.parse(code, mode="exec")
        trailing = None
        if tree.body and isinstance(tree.body[-1], ast.Expr):
            trailing = ast.Expression(tree.body.pop().value)
        exec(compile(tree, "<cell>", "exec"), namespace)
        if trailing is not None:
            value = eval(compile(trailing, "<cell>", "eval"), namespace)
            if value is not None and capture:
                outputs.append({"channel": "display", "text": repr(value), "mime": "text/plain"})
    except Exception:
        ok = False
        outputs.append({"channel": "error", "text": traceback.format_exc(limit=8)})
    finally:
        sys.stdout, sys.stderr = real_out, real_err
    if capture:
        text = stdout.getvalue()
        if text:
            outputs.insert(0, {"channel": "stream", "text": text})
    return {"ok": ok, "outputs": outputs}


def main() -> None:
    namespace: dict = {"__name__": "__main__"}
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            if request.get("op") == "reset":
                namespace.clear()
                namespace["__name__"] = "__main__"
                response = {"ok": True, "outputs": []}
            elif request.get("op") == "exec":
                response = _exec_code(
                    namespace, request.get("code", ""), bool(request.get("capture", True))
                )
            else:
                response = {
                    "ok": False,
                    "outputs": [{"channel": "error", "text": f"unknown op: {request.get('op')!r}"}],
                }
        except Exception as exc:
            response = {"ok": False, "outputs": [{"channel": "error", "text": str(exc)}]}
        sys.stdout.write(json.dumps(response) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
