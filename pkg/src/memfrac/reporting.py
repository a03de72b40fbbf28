"""JSON helpers shared by solver and probe reports.

Floats are written with Python's shortest round-trip repr, so a report
re-parses to bit-identical doubles.  Non-finite floats become null.
"""

from __future__ import annotations

import json
import math

import numpy as np


def to_jsonable(v):
    """Convert numpy containers and scalars into plain JSON-ready objects."""
    if isinstance(v, np.ndarray):
        return to_jsonable(v.tolist())
    if isinstance(v, (list, tuple)):
        return [to_jsonable(u) for u in v]
    if isinstance(v, dict):
        return {str(k): to_jsonable(u) for k, u in v.items()}
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": to_jsonable(v.real), "im": to_jsonable(v.imag)}
    return v


def dumps(obj, indent: int | None = 2) -> str:
    return json.dumps(to_jsonable(obj), indent=indent, allow_nan=False)
