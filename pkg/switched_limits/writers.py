"""
Deterministic JSON and CSV output.

Floats are written with 17 significant digits so that golden files round-trip exactly; non-finite floats
become ``null``.
"""
import csv
import json
import math
import os
import tempfile
from enum import Enum
from typing import Any, TextIO

import numpy as np

from switched_limits.simulator import FlowRecord


def format_float(value: float) -> str:
    value = float(value)
    if not math.isfinite(value):
        return "null"
    text = format(value, ".17g")
    if "." not in text and "e" not in text:
        text += ".0"
    return text


def _encode(value: Any, indent: int, level: int) -> str:
    if hasattr(value, "to_json"):
        value = value.to_json()
    if isinstance(value, Enum):
        value = value.value
    if value is None or isinstance(value, (bool, np.bool_)):
        return json.dumps(None if value is None else bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (set, frozenset)):
        value = sorted(value)
    padding = "\n" + " " * (indent * (level + 1))
    closing = "\n" + " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{json.dumps(str(key))}: {_encode(item, indent, level + 1)}" for key, item in value.items()]
        return "{" + padding + ("," + padding).join(items) + closing + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [_encode(item, indent, level + 1) for item in value]
        if all(isinstance(item, (int, float, np.number)) and not isinstance(item, bool) for item in value):
            return "[" + ", ".join(items) + "]"
        return "[" + padding + ("," + padding).join(items) + closing + "]"
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def dumps(value: Any, indent: int = 2) -> str:
    """
    Serializes plain data, numpy values and objects exposing ``to_json()``.

        Example:

        >>> dumps({"rank": 1, "residual": 0.1})
        '{\\n  "rank": 1,\\n  "residual": 0.10000000000000001\\n}\\n'
    """
    return _encode(value, indent, 0) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Writes ``text`` to a temporary file next to ``path`` and renames it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    handle, temporary = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
        os.replace(temporary, path)
    except BaseException:
        if os.path.exists(temporary):
            os.unlink(temporary)
        raise


def trajectory_header(dim: int):
    return ["t", "norm_x"] + [f"gram_eig_{k}" for k in range(1, dim + 1)] + ["active_index"]


def write_trajectory_csv(stream: TextIO, record: FlowRecord, trajectory: int = 0) -> None:
    """
    One row per grid time: ``t, norm_x, gram_eig_1..gram_eig_d, active_index`` with Gram eigenvalues in
    descending order.

    :param trajectory: row of ``record.initial_conditions`` whose norm is written.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(trajectory_header(record.flows.shape[1]))
    eigenvalues = record.gram_eigenvalues()
    for j, t in enumerate(record.times):
        writer.writerow(
            [format_float(t), format_float(record.norms[trajectory, j])]
            + [format_float(value) for value in eigenvalues[j]]
            + [int(record.active_indices[j])]
        )
