"""Kernel registry: map a kernel name to a session factory and sanitizer."""

from __future__ import annotations

from ..errors import KernelUnavailableError
from .base import (
    CALC_SANITIZER,
    PYTHON_SANITIZER,
    ExecOutcome,
    KernelSession,
    SanitizerRule,
    sanitize_prefix,
)
from .calc import CalcSession, calc_eval
from .external import ExternalSession

__all__ = [
    "CALC_SANITIZER",
    "PYTHON_SANITIZER",
    "ExecOutcome",
    "KernelSession",
    "SanitizerRule",
    "sanitize_prefix",
    "CalcSession",
    "calc_eval",
    "ExternalSession",
    "create_session",
    "sanitizer_for",
]

_KERNELS = {
    "calc": (CalcSession, CALC_SANITIZER),
    "python": (ExternalSession, PYTHON_SANITIZER),
}


def create_session(name: str, *, timeout: float | None = None, **kwargs) -> KernelSession:
    try:
        factory, _ = _KERNELS[name]
    except KeyError:
        raise KernelUnavailableError(f"unknown kernel: {name!r}") from None
    if timeout is not None and name == "python":
        kwargs["timeout"] = timeout
    return factory(**kwargs)


def sanitizer_for(name: str) -> SanitizerRule:
    try:
        return _KERNELS[name][1]
    except KeyError:
        raise KernelUnavailableError(f"unknown kernel: {name!r}") from None
