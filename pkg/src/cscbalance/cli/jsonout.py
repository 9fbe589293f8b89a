import enum
import json
import math
from typing import Any, List
import numpy as np


def _float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x, ".17g")


def _scalar(v: Any) -> str:
    return _float(float(v)) if isinstance(v, (float, np.floating)) else str(int(v))


def _emit(obj: Any, indent: int, out: List[str]) -> None:
    pad = "  " * (indent + 1)
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_float(float(obj)))
    elif isinstance(obj, enum.Enum):
        _emit(obj.value, indent, out)
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, np.ndarray):
        _emit(obj.tolist(), indent, out)
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (key, val) in enumerate(obj.items()):
            out.append(pad + json.dumps(str(key)) + ": ")
            _emit(val, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append("  " * indent + "}")
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        # flat numeric rows stay on one line
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            out.append("[" + ", ".join(_scalar(v) for v in obj) + "]")
            return
        out.append("[\n")
        for i, val in enumerate(obj):
            out.append(pad)
            _emit(val, indent + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append("  " * indent + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Deterministic JSON, floats with 17 significant digits, NaN and inf as null"""
    out: List[str] = []
    _emit(obj, 0, out)
    out.append("\n")
    return "".join(out)
