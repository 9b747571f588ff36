"""JSON/CSV helpers with fixed 17-significant-digit floats."""
from __future__ import annotations

import json
import math
import sys

import numpy as np

__all__ = ["dumps", "load_json"]


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def _emit(obj, out: list, indent: int | None, level: int) -> None:
    pad = "" if indent is None else "\n" + " " * (indent * (level + 1))
    close = "" if indent is None else "\n" + " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (key, val) in enumerate(obj.items()):
            if i:
                out.append(",")
            out.append(pad + json.dumps(str(key)) + ": ")
            _emit(val, out, indent, level + 1)
        out.append(close + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        # short numeric rows stay on one line
        flat = all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in items)
        out.append("[")
        for i, val in enumerate(items):
            if i:
                out.append(", " if flat or indent is None else ",")
            if not flat:
                out.append(pad)
            _emit(val, out, None if flat else indent, level + 1)
        out.append("]" if flat else close + "]")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_fmt_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        out.append(f"[{_fmt_float(obj.real)}, {_fmt_float(obj.imag)}]")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int | None = 2) -> str:
    """Serialize with every float written as ``%.17g`` (round-trip exact).

    NaN becomes ``null`` and infinities the strings ``"inf"``/``"-inf"``.
    """
    out: list[str] = []
    _emit(obj, out, indent, 0)
    return "".join(out)


def load_json(path: str):
    """Read JSON from a file path, or from standard input for ``-``."""
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
