"""Line-oriented trace files.

Line 1 is a JSON header object with keys ``model`` (``online2``,
``fully_dynamic2`` or ``delta``), ``n``, ``k``, ``w``, ``c0``, ``B`` and
``eps`` (a rational written as a string such as ``"1/2"``).  Every following
line is one request: two vertex ids separated by a single space.  Files are
written with sorted header keys, compact separators and a trailing newline so
that writing a parsed trace reproduces it byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..core import Instance, InvalidInstance, Request

MODELS = ("online2", "fully_dynamic2", "delta")


class TraceError(ValueError):
    """Malformed trace; ``line`` is 1-based."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Trace:
    model: str
    instance: Instance
    requests: list[Request] = field(default_factory=list)

    def header(self) -> dict:
        inst = self.instance
        return {
            "model": self.model,
            "n": inst.n,
            "k": inst.k,
            "w": list(inst.w),
            "c0": list(inst.c0),
            "B": inst.B,
            "eps": str(inst.eps),
        }


def dumps(trace: Trace) -> str:
    lines = [json.dumps(trace.header(), sort_keys=True, separators=(",", ":"))]
    lines += [f"{r.u} {r.v}" for r in trace.requests]
    return "\n".join(lines) + "\n"


def loads(text: str) -> Trace:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise TraceError(1, "missing header")
    try:
        head = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise TraceError(1, f"header is not JSON: {exc.msg}") from exc
    if not isinstance(head, dict):
        raise TraceError(1, "header must be a JSON object")
    missing = {"model", "n", "k", "w", "c0", "B", "eps"} - set(head)
    if missing:
        raise TraceError(1, f"header lacks {sorted(missing)}")
    if head["model"] not in MODELS:
        raise TraceError(1, f"unknown model {head['model']!r}")
    try:
        eps = Fraction(str(head["eps"]))
        inst = Instance(
            n=int(head["n"]),
            k=int(head["k"]),
            w=tuple(head["w"]),
            c0=tuple(head["c0"]),
            B=int(head["B"]),
            eps=eps,
        )
    except (InvalidInstance, ValueError, TypeError, ZeroDivisionError) as exc:
        raise TraceError(1, str(exc)) from exc
    if (head["model"] == "delta") != (inst.k != 2):
        raise TraceError(1, "model tag disagrees with the number of colors")
    reqs = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(" ")
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise TraceError(i, f"expected two vertex ids, got {line!r}")
        u, v = int(parts[0]), int(parts[1])
        if u >= inst.n or v >= inst.n:
            raise TraceError(i, f"vertex id out of range 0..{inst.n - 1}")
        if u == v:
            raise TraceError(i, "request endpoints must differ")
        reqs.append(Request(u, v, len(reqs) + 1))
    return Trace(head["model"], inst, reqs)


def read(path) -> Trace:
    return loads(Path(path).read_text())


def write(trace: Trace, path) -> None:
    Path(path).write_text(dumps(trace))
