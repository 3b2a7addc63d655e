"""Problem-file (JSON) loading and saving.

Schema (UTF-8 JSON):

    {"sense": "min" | "max",
     "n": 2,
     "terms": [{"A0": [[...], ...] | null,   # row-major; null/absent -> zero
                "q0": [...], "r0": 0.0,
                "c": [...], "d": 0.0}, ...],
     "region": {"lin_A": [[...], ...], "lin_b": [...],
                "box_lo": [...], "box_hi": [...]}}

Box entries may be null, "inf", or "-inf" for one-sided bounds; serialization
writes null.  Only quad-affine terms are file-representable; the builtin ids
(paper-1, paper-2) bypass parsing.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .benchmarks import BUILTINS
from .errors import DimensionMismatch, ParseError
from .problem import MAX, MIN, FeasibleRegion, Problem, QuadAffineTerm


def _bound(entry, side, where):
    if entry is None:
        return -np.inf if side == "lo" else np.inf
    if isinstance(entry, str):
        s = entry.strip().lower()
        if s in ("inf", "+inf", "infinity"):
            return np.inf
        if s == "-inf" or s == "-infinity":
            return -np.inf
        raise ParseError(f"{where}: unrecognized bound {entry!r}")
    return float(entry)


def _vector(obj, n, where):
    try:
        v = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{where}: not a numeric array ({exc})") from None
    if v.ndim != 1:
        raise ParseError(f"{where}: expected a flat list, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"{where}: length {v.shape[0]} != n={n}")
    return v


def problem_from_dict(data):
    """Build a Problem from the documented JSON schema (dict form)."""
    if not isinstance(data, dict):
        raise ParseError("top level: expected a JSON object")
    sense = data.get("sense")
    if sense not in (MIN, MAX):
        raise ParseError(f"sense: expected '{MIN}' or '{MAX}', got {sense!r}")
    try:
        n = int(data["n"])
    except (KeyError, TypeError, ValueError):
        raise ParseError("n: missing or not an integer") from None
    raw_terms = data.get("terms")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise ParseError("terms: expected a non-empty list")
    terms = []
    for i, td in enumerate(raw_terms):
        where = f"terms[{i}]"
        if not isinstance(td, dict):
            raise ParseError(f"{where}: expected an object")
        q0 = _vector(td.get("q0", np.zeros(n)), n, f"{where}.q0")
        c = _vector(td.get("c"), n, f"{where}.c") if td.get("c") is not None else None
        if c is None:
            raise ParseError(f"{where}.c: missing denominator coefficients")
        A0 = td.get("A0")
        if A0 is not None:
            A0 = np.asarray(A0, dtype=float)
            if A0.shape != (n, n):
                raise DimensionMismatch(f"{where}.A0: shape {A0.shape} != ({n}, {n})")
        terms.append(QuadAffineTerm(A0, q0, float(td.get("r0", 0.0)),
                                    c, float(td.get("d", 0.0))))
    rd = data.get("region")
    if not isinstance(rd, dict):
        raise ParseError("region: expected an object")
    lin_A = np.asarray(rd.get("lin_A", []), dtype=float).reshape(-1, n)
    lin_b = _vector(rd.get("lin_b", []), lin_A.shape[0], "region.lin_b")
    lo_raw = rd.get("box_lo", [None] * n)
    hi_raw = rd.get("box_hi", [None] * n)
    if len(lo_raw) != n or len(hi_raw) != n:
        raise DimensionMismatch(
            f"region box: lengths ({len(lo_raw)}, {len(hi_raw)}) != n={n}")
    lo = np.array([_bound(e, "lo", f"region.box_lo[{i}]") for i, e in enumerate(lo_raw)])
    hi = np.array([_bound(e, "hi", f"region.box_hi[{i}]") for i, e in enumerate(hi_raw)])
    region = FeasibleRegion(lin_A, lin_b, lo, hi)
    return Problem(sense, terms, region, n)


def parse_problem_file(source):
    """Load a problem from a JSON file path, or a builtin id (paper-1, paper-2)."""
    key = str(source)
    if key in BUILTINS:
        return BUILTINS[key]()
    if not os.path.exists(key):
        raise ParseError(f"{key}: no such file and not a builtin id "
                         f"(builtins: {', '.join(sorted(set(BUILTINS)))})")
    with open(key, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{key}: line {exc.lineno}, column {exc.colno}: "
                             f"{exc.msg}") from None
    return problem_from_dict(data)


def problem_to_dict(problem):
    """Schema dict for a quad-affine problem (callback terms have no file form)."""
    terms = []
    for i, t in enumerate(problem.terms):
        if not isinstance(t, QuadAffineTerm):
            raise ParseError(f"terms[{i}]: callback terms are not file-representable")
        terms.append({
            "A0": [[float(v) for v in row] for row in t.A0],
            "q0": [float(v) for v in t.q0],
            "r0": float(t.r0),
            "c": [float(v) for v in t.c],
            "d": float(t.d),
        })
    region = problem.region

    def _encode(vals):
        return [float(v) if np.isfinite(v) else None for v in vals]

    return {
        "sense": problem.sense,
        "n": problem.n,
        "terms": terms,
        "region": {
            "lin_A": [[float(v) for v in row] for row in region.lin_A],
            "lin_b": [float(v) for v in region.lin_b],
            "box_lo": _encode(region.box_lo),
            "box_hi": _encode(region.box_hi),
        },
    }


def save_problem(problem, path):
    """Write the JSON form; floats round-trip exactly (shortest repr)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(problem_to_dict(problem), fh, indent=2)
        fh.write("\n")
