"""Shared numerics helpers: deterministic reductions and 2D rotations."""
from __future__ import annotations

import numpy as np


def pairwise_sum(values) -> float:
    """Sum an array with a fixed pairwise reduction tree.

    The reduction order depends only on the length of the input, so repeated
    runs on identical data give bit-identical results (required for
    reproducible reports), and the error growth is O(log n) like numpy's own
    pairwise sum.
    """
    a = np.asarray(values, dtype=np.float64).ravel()
    if a.size == 0:
        return 0.0
    while a.size > 1:
        if a.size % 2:
            a = np.concatenate([a, [0.0]])
        a = a[0::2] + a[1::2]
    return float(a[0])


def rotate_quarter(v: np.ndarray) -> np.ndarray:
    """Rotate 2-vectors by +90 degrees: (x, y) -> (-y, x).

    Works on any array whose last axis has length 2.
    """
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def rotate_pairs(field: np.ndarray) -> np.ndarray:
    """Map (g1, g2, g3, g4, ...) -> (g2, -g1, g4, -g3, ...) on the last axis.

    For a planar field this is the clockwise quarter turn whose divergence
    equals the scalar curl of the original field.
    """
    d = field.shape[-1]
    if d % 2:
        raise ValueError("rotate_pairs needs an even number of components")
    out = np.empty_like(field)
    out[..., 0::2] = field[..., 1::2]
    out[..., 1::2] = -field[..., 0::2]
    return out


def g17(x: float) -> str:
    """Format a float with 17 significant digits (round-trip exact)."""
    return format(float(x), ".17g")


def to_json(obj, indent: int = 0) -> str:
    """Serialize to JSON with 17-significant-digit floats, sorted keys.

    The output depends only on the values, never on dict construction
    order or run-to-run state, so identical reports serialize to identical
    bytes.  Non-finite floats become null (JSON has no representation).
    """
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            return "null"
        return g17(x)
    if isinstance(obj, str):
        out = ['"']
        for ch in obj:
            if ch == '"':
                out.append('\\"')
            elif ch == "\\":
                out.append("\\\\")
            elif ord(ch) < 0x20:
                out.append(f"\\u{ord(ch):04x}")
            else:
                out.append(ch)
        out.append('"')
        return "".join(out)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            items.append(f"{pad_in}{to_json(key)}: {to_json(obj[key], indent + 1)}")
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad_in}{to_json(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")
