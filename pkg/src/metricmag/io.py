"""JSON space files.

Format::

    {"mode": "distance" | "similarity", "n": 4,
     "matrix": [[...], ...], "labels": ["a", "b", ...]}

Similarity entries are rationals written as ``"p/q"`` strings (plain JSON
numbers are read as floats). Distance entries are decimal numbers, or
``"p/q"`` strings for exact rational distances. ``labels`` is optional.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .core import FiniteMetricSpace, SimilaritySpace
from .errors import ValidationError
from .scalar import format_scalar, parse_scalar

Space = Union[FiniteMetricSpace, SimilaritySpace]


class SpaceFileError(ValidationError):
    """Malformed space file; ``location`` names the offending part."""

    def __init__(self, message, location=None):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def space_from_dict(doc: dict) -> Space:
    if not isinstance(doc, dict):
        raise SpaceFileError("top level must be an object")
    mode = doc.get("mode")
    if mode not in ("distance", "similarity"):
        raise SpaceFileError(f"mode must be 'distance' or 'similarity', got {mode!r}", "mode")
    matrix = doc.get("matrix")
    if not isinstance(matrix, list) or not all(isinstance(r, list) for r in matrix):
        raise SpaceFileError("matrix must be a list of rows", "matrix")
    n = doc.get("n", len(matrix))
    if n != len(matrix):
        raise SpaceFileError(f"n = {n} but matrix has {len(matrix)} rows", "n")
    rows = []
    for i, row in enumerate(matrix):
        if len(row) != n:
            raise SpaceFileError(f"expected {n} entries, got {len(row)}", f"matrix[{i}]")
        parsed = []
        for j, token in enumerate(row):
            try:
                parsed.append(parse_scalar(token))
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise SpaceFileError(f"bad entry {token!r} ({exc})", f"matrix[{i}][{j}]") from None
        rows.append(parsed)
    labels = doc.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != n):
        raise SpaceFileError(f"labels must be a list of {n} names", "labels")
    try:
        if mode == "distance":
            return FiniteMetricSpace(rows, labels)
        return SimilaritySpace(rows, labels)
    except ValidationError as exc:
        loc = None
        if exc.triple is not None:
            loc = "matrix[{}][{}]".format(*exc.triple[:2])
        raise SpaceFileError(str(exc), loc) from None


def space_to_dict(space: Space) -> dict:
    if isinstance(space, FiniteMetricSpace):
        mode, M = "distance", space.d
    else:
        mode, M = "similarity", space.Z
    doc = {"mode": mode, "n": space.n,
           "matrix": [[format_scalar(x) for x in row] for row in M]}
    if space.labels:
        doc["labels"] = list(space.labels)
    return doc


def load_space(path: Union[str, Path]) -> Space:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpaceFileError(f"cannot read file ({exc.strerror})", str(path)) from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpaceFileError(exc.msg, f"{path}:{exc.lineno}:{exc.colno}") from None
    return space_from_dict(doc)


def dump_space(space: Space, path: Union[str, Path, None] = None) -> str:
    text = json.dumps(space_to_dict(space), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text
