"""Built-in deterministic calculator kernel, the test substrate.

One statement per line:

    NAME = expr          assignment
    print expr           emit a stream output
    expr                 emit a display output of the value

Expressions are integer arithmetic over ``+ - * /`` with parentheses,
unary minus, and variables; all values are arbitrary-precision integers
and division truncates toward zero. ``#`` starts a comment running to the
end of the line. Evaluation stops at the first error; undefined variables,
division by zero, and parse errors each produce a distinct error output.
"""

from __future__ import annotations

import re
from functools import lru_cache

from ..model import Output
from .base import ExecOutcome, KernelSession


class CalcError(Exception):
    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_]\w*)|(?P<op>[()+\-*/=])|(?P<bad>\S))"
)


def _tokenize(line: str, lineno: int) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m or m.end() == pos:
            break
        if m.group("bad"):
            raise CalcError(f"parse error: unexpected {m.group('bad')!r} (line {lineno})")
        for kind in ("num", "name", "op"):
            if m.group(kind):
                tokens.append((kind, m.group(kind)))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive descent over one statement's tokens."""

    def __init__(self, tokens: list[tuple[str, str]], lineno: int):
        self.tokens = tokens
        self.pos = 0
        self.lineno = lineno

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def fail(self, what: str):
        kind, text = self.peek()
        found = repr(text) if kind else "end of line"
        raise CalcError(f"parse error: expected {what}, found {found} (line {self.lineno})")

    def statement(self):
        kind, text = self.peek()
        if kind == "name" and text == "print":
            self.take()
            expr = self.expr()
            self.end()
            return ("print", expr)
        if kind == "name" and self.pos + 1 < len(self.tokens) and self.tokens[self.pos + 1] == ("op", "="):
            self.take()
            self.take()
            expr = self.expr()
            self.end()
            return ("assign", text, expr)
        expr = self.expr()
        self.end()
        return ("expr", expr)

    def end(self):
        if self.pos != len(self.tokens):
            self.fail("end of statement")

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.take()[1]
            node = ("bin", op, node, self.factor())
        return node

    def factor(self):
        kind, text = self.peek()
        if kind == "op" and text == "-":
            self.take()
            return ("neg", self.factor())
        if kind == "op" and text == "+":
            self.take()
            return self.factor()
        if kind == "num":
            self.take()
            return ("num", int(text))
        if kind == "name":
            self.take()
            return ("var", text)
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            if self.peek() != ("op", ")"):
                self.fail("')'")
            self.take()
            return node
        self.fail("an expression")


@lru_cache(maxsize=4096)
def parse(program: str) -> tuple:
    """Parse a whole program into statements; cached by source text."""
    statements = []
    for lineno, raw in enumerate(program.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens = _tokenize(line, lineno)
        statements.append((lineno, _Parser(tokens, lineno).statement()))
    return tuple(statements)


def _eval(node, namespace: dict) -> int:
    tag = node[0]
    if tag == "num":
        return node[1]
    if tag == "var":
        name = node[1]
        if name not in namespace:
            raise CalcError(f"undefined variable: {name}")
        return namespace[name]
    if tag == "neg":
        return -_eval(node[1], namespace)
    op = node[1]
    left = _eval(node[2], namespace)
    right = _eval(node[3], namespace)
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if right == 0:
        raise CalcError("division by zero")
    quotient = abs(left) // abs(right)
    return -quotient if (left < 0) != (right < 0) else quotient


def calc_eval(program: str, namespace: dict) -> ExecOutcome:
    """Run a program against a namespace, mutating it in place."""
    outputs: list[Output] = []
    try:
        statements = parse(program)
    except CalcError as exc:
        return ExecOutcome([Output("error", exc.message)], ok=False)
    for _, stmt in statements:
        try:
            if stmt[0] == "assign":
                namespace[stmt[1]] = _eval(stmt[2], namespace)
            elif stmt[0] == "print":
                outputs.append(Output("stream", str(_eval(stmt[1], namespace))))
            else:
                outputs.append(Output("display", str(_eval(stmt[1], namespace))))
        except CalcError as exc:
            outputs.append(Output("error", exc.message))
            return ExecOutcome(outputs, ok=False)
    return ExecOutcome(outputs, ok=True)


class CalcSession(KernelSession):
    """In-process session over the calculator language."""

    language = "calc"
    supports_reset = True

    def __init__(self):
        self.namespace: dict[str, int] = {}

    def execute(self, code: str, capture: bool = True) -> ExecOutcome:
        outcome = calc_eval(code, self.namespace)
        if not capture:
            outcome = ExecOutcome(
                [o for o in outcome.outputs if o.channel == "error"], ok=outcome.ok
            )
        return outcome

    def reset(self) -> None:
        self.namespace.clear()
