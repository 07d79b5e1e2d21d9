"""Deterministic text output helpers.

Every float written by the toolkit carries 17 significant decimal digits,
which is enough to reconstruct the exact binary value on parse, so all
round trips are bit-exact.  Emission order is the insertion order of the
dictionaries, which the callers keep fixed, so identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import json
import math


def format_float(x: float) -> str:
    """Render a finite float with 17 significant digits."""
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be serialized")
    return format(float(x), ".17g")


def _emit(value, pieces, indent, level):
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    end = "" if indent is None else "\n" + " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            pieces.append("{}")
            return
        pieces.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                pieces.append(",")
            pieces.append(pad)
            pieces.append(json.dumps(str(key)))
            pieces.append(": ")
            _emit(item, pieces, indent, level + 1)
        pieces.append(end + "}")
    elif isinstance(value, (list, tuple)):
        if not value:
            pieces.append("[]")
            return
        pieces.append("[")
        for i, item in enumerate(value):
            if i:
                pieces.append(",")
            pieces.append(pad)
            _emit(item, pieces, indent, level + 1)
        pieces.append(end + "]")
    elif isinstance(value, bool) or value is None:
        pieces.append(json.dumps(value))
    elif isinstance(value, int):
        pieces.append(str(value))
    elif isinstance(value, float):
        pieces.append(format_float(value))
    elif isinstance(value, str):
        pieces.append(json.dumps(value))
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value, indent: int | None = 2) -> str:
    """JSON text with full-precision floats and stable key order."""
    pieces: list[str] = []
    _emit(value, pieces, indent, 0)
    return "".join(pieces)


def loads(text: str):
    return json.loads(text)


def csv_line(fields) -> str:
    out = []
    for f in fields:
        if isinstance(f, float):
            out.append(format_float(f))
        else:
            out.append(str(f))
    return ",".join(out)
