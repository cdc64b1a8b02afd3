"""JSON documents for matrices, points and results.

Complex matrices are ``{"rows": r, "cols": c, "data": [[re, im], ...]}`` in
row-major order. Floats are written with 17 significant digits, which
round-trips IEEE-754 doubles exactly.
"""

from __future__ import annotations

import json
import math
from typing import Any, Dict

import numpy as np

from .config import ValidationError
from .coords import ParameterPoint


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValidationError(f"cannot serialize non-finite value {x!r}")
    return format(x, ".17g")


def dumps(obj: Any, indent: int | None = 1) -> str:
    """JSON text with every float rendered at 17 significant digits."""
    pad = "" if indent is None else "\n"

    def emit(o, level):
        sp = "" if indent is None else " " * (indent * (level + 1))
        close = "" if indent is None else " " * (indent * level)
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{sp}{json.dumps(str(k))}: {emit(v, level + 1)}" for k, v in o.items()]
            return "{" + pad + ("," + pad).join(items) + pad + close + "}"
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            if all(not isinstance(v, (dict, list, tuple)) for v in o):
                return "[" + ", ".join(emit(v, level + 1) for v in o) + "]"
            items = [sp + emit(v, level + 1) for v in o]
            return "[" + pad + ("," + pad).join(items) + pad + close + "]"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if o is None:
            return "null"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            return _fmt_float(float(o))
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, np.ndarray):
            return emit(matrix_to_doc(o), level)
        if isinstance(o, complex):
            return emit([o.real, o.imag], level)
        raise ValidationError(f"cannot serialize object of type {type(o).__name__}")

    return emit(obj, 0)


def matrix_to_doc(m: np.ndarray) -> Dict[str, Any]:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValidationError("only two-dimensional matrices are serializable")
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def matrix_from_doc(doc: Dict[str, Any]) -> np.ndarray:
    try:
        rows, cols, data = int(doc["rows"]), int(doc["cols"]), doc["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix document: {exc}") from None
    if len(data) != rows * cols:
        raise ValidationError(f"matrix document has {len(data)} entries, expected {rows * cols}")
    arr = np.array([parse_complex(z) for z in data], dtype=complex)
    return arr.reshape(rows, cols)


def parse_complex(value: Any) -> complex:
    """A complex number from ``[re, im]``, a real number, or a string like ``"0.1-0.2j"``."""
    try:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ValidationError(f"complex pair must have two entries, got {value!r}")
            z = complex(float(value[0]), float(value[1]))
        elif isinstance(value, str):
            z = complex(value.replace(" ", "").replace("i", "j"))
        else:
            z = complex(value)
    except (TypeError, ValueError):
        raise ValidationError(f"cannot read complex number from {value!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValidationError(f"complex value {value!r} is not finite")
    return z


def point_to_doc(p: ParameterPoint) -> Dict[str, Any]:
    return {"xi": [[z.real, z.imag] for z in p.xi], "zeta": [[z.real, z.imag] for z in p.zeta]}


def parse_point(doc: Any) -> ParameterPoint:
    if not isinstance(doc, dict) or "xi" not in doc or "zeta" not in doc:
        raise ValidationError("point document needs 'xi' and 'zeta' lists")
    xi, zeta = doc["xi"], doc["zeta"]
    if not isinstance(xi, list) or not isinstance(zeta, list):
        raise ValidationError("point 'xi' and 'zeta' must be lists")
    return ParameterPoint(tuple(parse_complex(z) for z in xi), tuple(parse_complex(z) for z in zeta))


def parse_point_text(text: str) -> ParameterPoint:
    """Point from inline JSON, from ``"xi1,xi2|zeta1,zeta2"`` shorthand, or from a file path."""
    text = text.strip()
    if text.startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"malformed point JSON: {exc}") from None
        return parse_point(doc)
    if "|" in text:
        left, right = text.split("|", 1)
        xi = [parse_complex(v) for v in left.split(",") if v.strip()]
        zeta = [parse_complex(v) for v in right.split(",") if v.strip()]
        return ParameterPoint(tuple(xi), tuple(zeta))
    return parse_point(load_json(text))


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON in {path}: {exc}") from None
