"""Polytope files and JSON reports.

A polytope file is JSON text::

    {
      "dim": 2,
      "facets": [{"normal": ["7/5", 0], "offset": "-7/5"}, ...],
      "vertices": [[1, 0], ...],              (optional, cross-checked)
      "reference_labels": [[1, 0], ...]       (optional, one normal per facet)
    }

Integers and "p/q" strings are read as exact rationals; JSON floats stay floats.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import ParseError
from .polytope import LabelledPolytope, from_halfspaces

REPORT_SCHEMA = "abreu-lab/report"
REPORT_VERSION = 1

_RATIONAL = re.compile(r"^\s*[+-]?\d+\s*(/\s*\d+\s*)?$")


@dataclass(frozen=True)
class PolytopeFile:
    polytope: LabelledPolytope
    reference_labels: tuple | None = None
    vertices: tuple | None = None  # as listed in the file, if any

    @property
    def has_floats(self) -> bool:
        vals = [v for h in self.polytope.halfspaces for v in (*h.normal, h.offset)]
        return any(isinstance(v, float) for v in vals)


def _line_of(text: str, needle: str) -> int | None:
    idx = text.find(needle)
    return text.count("\n", 0, idx) + 1 if idx >= 0 else None


def parse_number(value, field: str, text: str = ""):
    if isinstance(value, bool):
        raise ParseError(f"expected a number, got {value!r}", field, None)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not np.isfinite(value):
            raise ParseError("non-finite number", field, None)
        return value
    if isinstance(value, str) and _RATIONAL.match(value):
        try:
            return Fraction(value.replace(" ", ""))
        except ZeroDivisionError:
            raise ParseError(f"zero denominator in {value!r}", field, _line_of(text, value)) from None
    raise ParseError(f"expected an integer, float or 'p/q' string, got {value!r}", field,
                     _line_of(text, json.dumps(value)) if text else None)


def _vector(value, n, field, text):
    if not isinstance(value, list) or len(value) != n:
        raise ParseError(f"expected a list of {n} numbers", field, None)
    return tuple(parse_number(v, f"{field}[{i}]", text) for i, v in enumerate(value))


def loads(text: str) -> PolytopeFile:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", None, exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", None, 1)
    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError("'dim' must be a positive integer", "dim", _line_of(text, '"dim"'))
    facets = data.get("facets")
    if not isinstance(facets, list) or not facets:
        raise ParseError("'facets' must be a non-empty list", "facets", _line_of(text, '"facets"'))
    hs = []
    for k, f in enumerate(facets):
        field = f"facets[{k}]"
        if not isinstance(f, dict) or "normal" not in f or "offset" not in f:
            raise ParseError("each facet needs 'normal' and 'offset'", field, None)
        hs.append((_vector(f["normal"], dim, f"{field}.normal", text),
                   parse_number(f["offset"], f"{field}.offset", text)))
    poly = from_halfspaces(dim, hs)
    ref = None
    if data.get("reference_labels") is not None:
        raw = data["reference_labels"]
        if not isinstance(raw, list) or len(raw) != len(hs):
            raise ParseError("need one reference label per facet", "reference_labels",
                             _line_of(text, '"reference_labels"'))
        ref = tuple(_vector(v, dim, f"reference_labels[{i}]", text) for i, v in enumerate(raw))
    if data.get("vertices") is not None:
        raw = data["vertices"]
        if not isinstance(raw, list):
            raise ParseError("'vertices' must be a list", "vertices", _line_of(text, '"vertices"'))
        listed = tuple(_vector(v, dim, f"vertices[{i}]", text) for i, v in enumerate(raw))
        given = np.array([[float(t) for t in v] for v in listed])
        ok = len(given) == len(poly.vertices) and all(
            np.min(np.linalg.norm(poly.vertices - g, axis=1)) <= 1e-9 * max(poly.diameter, 1.0) for g in given)
        if not ok:
            raise ParseError("listed vertices do not match the facets", "vertices", _line_of(text, '"vertices"'))
        return PolytopeFile(poly, ref, listed)
    return PolytopeFile(poly, ref)


def parse(path) -> PolytopeFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", None, None) from None
    return loads(text)


# -- emitting ----------------------------------------------------------------------

def number(v):
    """JSON form of a scalar: int, 'p/q' string or float."""
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def to_dict(pf: PolytopeFile | LabelledPolytope, reference_labels=None, vertices: bool | None = None) -> dict:
    """``vertices=None`` writes the vertex list only if the file listed one."""
    if isinstance(pf, LabelledPolytope):
        pf = PolytopeFile(pf, reference_labels)
    poly = pf.polytope
    out = {
        "dim": poly.dim,
        "facets": [{"normal": [number(v) for v in h.normal], "offset": number(h.offset)} for h in poly.halfspaces],
    }
    if vertices is None and pf.vertices is not None:
        out["vertices"] = [[number(t) for t in v] for v in pf.vertices]
    elif vertices:
        src = poly.exact_vertices if poly.is_exact else poly.vertices
        out["vertices"] = [[number(t) for t in v] for v in src]
    if pf.reference_labels is not None:
        out["reference_labels"] = [[number(t) for t in nu] for nu in pf.reference_labels]
    return out


def dumps(pf, reference_labels=None, vertices: bool | None = None) -> str:
    """Canonical text: two-space indent, short numeric lists on one line."""
    d = to_dict(pf, reference_labels, vertices)
    lines = ["{", f'  "dim": {d["dim"]},', '  "facets": [']
    fl = [f'    {{"normal": {json.dumps(f["normal"])}, "offset": {json.dumps(f["offset"])}}}' for f in d["facets"]]
    lines.append(",\n".join(fl))
    tail = ["  ]"]
    for key in ("vertices", "reference_labels"):
        if key in d:
            tail[-1] += ","
            tail.append(f'  "{key}": [')
            tail.append(",\n".join(f"    {json.dumps(v)}" for v in d[key]))
            tail.append("  ]")
    lines.extend(tail)
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit(pf, path, reference_labels=None, vertices: bool | None = None):
    Path(path).write_text(dumps(pf, reference_labels, vertices))


# -- reports -----------------------------------------------------------------------

def jsonable(x):
    """Recursively convert numpy / Fraction / dataclass-free containers to JSON values."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, Fraction):
        return number(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        return v if np.isfinite(v) else str(v)
    return x


def _has_fraction(x) -> bool:
    if isinstance(x, Fraction):
        return True
    if isinstance(x, dict):
        return any(_has_fraction(v) for v in x.values())
    if isinstance(x, (list, tuple)):
        return any(_has_fraction(v) for v in x)
    return False


def _floats(x):
    if isinstance(x, Fraction):
        return float(x)
    if isinstance(x, dict):
        return {k: _floats(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_floats(v) for v in x]
    return x


def report(command: str, result: dict, tolerances: dict) -> dict:
    """Versioned report; numbers are JSON floats, and every result field that was
    computed exactly is repeated under "exact" with rationals as "p/q" strings."""
    exact = {k: jsonable(v) for k, v in result.items() if _has_fraction(v)}
    return {
        "schema": REPORT_SCHEMA,
        "version": REPORT_VERSION,
        "command": command,
        "tolerances": jsonable(tolerances),
        "result": jsonable(_floats(result)),
        "exact": exact,
    }


def dump_report(rep: dict) -> str:
    return json.dumps(rep, indent=2, sort_keys=True) + "\n"
