"""
Process-spec JSON: schema validation with line positions, parsing into
:class:`ProcessSpec`, and deterministic serialisation.

Floats are written with the shortest decimal that round-trips exactly;
non-finite numbers are written as the strings ``"inf"``, ``"-inf"``, ``"nan"``.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass

import jsonschema
import numpy as np

from .measure import Atoms, IsotropicStable, LevyMeasure, LineDensity, PowerTerm, RadialDensity
from .triplet import ASSERTION_FLAGS, LevyTriplet, ProcessSpec, validate_triplet

__all__ = [
    "SPEC_SCHEMA",
    "SpecError",
    "SpecErrors",
    "parse_spec",
    "load_spec",
    "triplet_to_dict",
    "spec_to_dict",
    "serialize",
    "dumps",
    "write_atomic",
]

_num = {"type": "number"}
_vec = {"type": "array", "items": _num, "minItems": 1}
_term = {
    "type": "object",
    "additionalProperties": False,
    "required": ["coef", "alpha"],
    "properties": {
        "coef": _num,
        "alpha": _num,
        "lo": {"type": "number", "minimum": 0},
        "hi": {"type": ["number", "null"]},
        "damping": {"type": "number", "minimum": 0},
    },
}
SPEC_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["dim", "a"],
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "a": _vec,
        "Q": {"type": "array", "items": {"type": "array", "items": _num}},
        "mu": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["kind"],
                "properties": {"kind": {"enum": ["atoms", "lineDensity", "isotropicStable"]}},
                "oneOf": [
                    {
                        "additionalProperties": False,
                        "required": ["kind", "locations", "weights"],
                        "properties": {
                            "kind": {"const": "atoms"},
                            "locations": {"type": "array", "items": _vec},
                            "weights": {"type": "array", "items": _num},
                        },
                    },
                    {
                        "additionalProperties": False,
                        "required": ["kind", "direction"],
                        "properties": {
                            "kind": {"const": "lineDensity"},
                            "direction": _vec,
                            "positive": {"type": "array", "items": _term},
                            "negative": {"type": "array", "items": _term},
                        },
                    },
                    {
                        "additionalProperties": False,
                        "required": ["kind", "alpha", "intensity"],
                        "properties": {
                            "kind": {"const": "isotropicStable"},
                            "alpha": _num,
                            "intensity": _num,
                            "basis": {"type": "array", "items": _vec, "minItems": 1},
                            "rmin": {"type": "number", "minimum": 0},
                            "rmax": {"type": ["number", "null"]},
                        },
                    },
                ],
            },
        },
        "assertions": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "boolean"} for k in ASSERTION_FLAGS},
        },
    },
}


@dataclass
class SpecError:
    path: str
    message: str
    line: int | None = None
    column: int | None = None

    def __str__(self) -> str:
        where = f"line {self.line}, column {self.column}: " if self.line is not None else ""
        return f"{where}{self.path or '<root>'}: {self.message}"


class SpecErrors(ValueError):
    """One or more problems with a process-spec document."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


# ------------------------------------------------------------ position index


def _locate(text: str) -> dict:
    """Map JSON paths (tuples) to the (line, column) where each value starts."""
    decoder = json.JSONDecoder()
    positions = {}
    ws = " \t\n\r"

    def skip(i):
        while i < len(text) and text[i] in ws:
            i += 1
        return i

    def value(i, path):
        i = skip(i)
        positions[path] = i
        ch = text[i]
        if ch == "{":
            i = skip(i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                i = skip(i)
                key, i = decoder.raw_decode(text, i)
                i = skip(i)
                i = value(i + 1, path + (key,))  # past ':'
                i = skip(i)
                if text[i] == "}":
                    return i + 1
                i += 1  # ','
        if ch == "[":
            i = skip(i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = value(i, path + (k,))
                i = skip(i)
                k += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = decoder.raw_decode(text, i)
        return end

    try:
        value(0, ())
    except (IndexError, ValueError):
        return positions
    out = {}
    for path, off in positions.items():
        line = text.count("\n", 0, off) + 1
        col = off - (text.rfind("\n", 0, off) + 1) + 1
        out[path] = (line, col)
    return out


def _path_str(path) -> str:
    s = ""
    for p in path:
        s += f"[{p}]" if isinstance(p, int) else (f".{p}" if s else str(p))
    return s


def _err(path, msg, pos) -> SpecError:
    path = tuple(path)
    probe = path
    while probe and probe not in pos:
        probe = probe[:-1]
    line, col = pos.get(probe, (None, None))
    return SpecError(_path_str(path), msg, line, col)


# ------------------------------------------------------------------- parsing


def _decode_number(x):
    if isinstance(x, str):
        return float(x)
    return x


def _inf_or(x):
    return math.inf if x is None else float(_decode_number(x))


def _density(terms) -> RadialDensity:
    return RadialDensity(
        PowerTerm(
            float(t["coef"]),
            float(t["alpha"]),
            float(t.get("lo", 0.0)),
            _inf_or(t.get("hi")),
            float(t.get("damping", 0.0)),
        )
        for t in terms
    )


def _component(d: dict, dim: int):
    kind = d["kind"]
    if kind == "atoms":
        locs = d["locations"]
        return Atoms(np.asarray(locs, dtype=float).reshape(len(locs), dim), d["weights"])
    if kind == "lineDensity":
        return LineDensity(d["direction"], _density(d.get("positive", [])), _density(d.get("negative", [])))
    basis = d.get("basis")
    if basis is not None:
        basis = np.asarray(basis, dtype=float).T
    return IsotropicStable(d["alpha"], d["intensity"], dim, basis, d.get("rmin", 0.0), _inf_or(d.get("rmax")))


def _shape_errors(doc: dict, pos: dict) -> list:
    errs = []
    n = doc["dim"]
    if len(doc["a"]) != n:
        errs.append(_err(("a",), f"expected {n} entries, got {len(doc['a'])}", pos))
    Q = doc.get("Q")
    if Q is not None:
        if len(Q) != n or any(len(row) != n for row in Q):
            errs.append(_err(("Q",), f"expected a {n}x{n} matrix", pos))
        else:
            scale = 1.0 + max(abs(x) for row in Q for x in row)
            for i in range(n):
                for j in range(i + 1, n):
                    if abs(Q[i][j] - Q[j][i]) > 1e-9 * scale:
                        errs.append(
                            _err(("Q", i, j), f"Q is not symmetric: Q[{i}][{j}]={Q[i][j]!r} but Q[{j}][{i}]={Q[j][i]!r}", pos)
                        )
    for k, c in enumerate(doc.get("mu", [])):
        kind = c["kind"]
        if kind == "atoms":
            if len(c["locations"]) != len(c["weights"]):
                errs.append(_err(("mu", k), "locations and weights differ in length", pos))
            for i, x in enumerate(c["locations"]):
                if len(x) != n:
                    errs.append(_err(("mu", k, "locations", i), f"expected {n} coordinates", pos))
        elif kind == "lineDensity":
            if len(c["direction"]) != n:
                errs.append(_err(("mu", k, "direction"), f"expected {n} coordinates", pos))
        elif "basis" in c:
            for i, v in enumerate(c["basis"]):
                if len(v) != n:
                    errs.append(_err(("mu", k, "basis", i), f"expected {n} coordinates", pos))
    return errs


def parse_spec(text: str) -> ProcessSpec:
    """Parse and validate a process-spec JSON document.

    Raises :class:`SpecErrors` listing every schema, shape and invariant
    problem with its JSON path and source position.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecErrors([SpecError("", f"invalid JSON: {e.msg}", e.lineno, e.colno)]) from None
    pos = _locate(text)
    validator = jsonschema.Draft202012Validator(SPEC_SCHEMA)
    errs = []
    for e in sorted(validator.iter_errors(doc), key=lambda e: list(map(str, e.absolute_path))):
        msg = e.message
        if e.validator == "oneOf" and isinstance(e.instance, dict):
            kind = e.instance.get("kind")
            sub = [s for s in e.context if s.validator in ("additionalProperties", "required", "type", "minItems")]
            sub = [s for s in sub if kind is None or not any(
                x.validator == "const" for x in e.context if list(x.schema_path)[:1] == list(s.schema_path)[:1]
            )]
            if sub:
                msg = "; ".join(dict.fromkeys(s.message for s in sub))
        errs.append(_err(e.absolute_path, msg, pos))
    if errs:
        raise SpecErrors(errs)
    errs = _shape_errors(doc, pos)
    if errs:
        raise SpecErrors(errs)
    n = doc["dim"]
    try:
        mu = LevyMeasure([_component(c, n) for c in doc.get("mu", [])])
    except ValueError as e:
        raise SpecErrors([SpecError("mu", str(e))]) from None
    t = LevyTriplet(doc["a"], doc.get("Q"), mu)
    report = validate_triplet(t)
    if not report.ok:
        raise SpecErrors(
            [_err(_check_path(c.name), f"{c.name} failed (measured {c.measured!r})", pos) for c in report.failures()]
        )
    return ProcessSpec(t, dict(doc.get("assertions", {})))


def _check_path(name: str):
    if name.startswith("mu["):
        return ("mu", int(name[3 : name.index("]")]))
    if name.startswith("Q"):
        return ("Q",)
    return ()


def load_spec(path) -> ProcessSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_spec(fh.read())


# ------------------------------------------------------------- serialisation


def triplet_to_dict(t: LevyTriplet) -> dict:
    return {
        "dim": t.dim,
        "a": t.a.tolist(),
        "Q": t.Q.tolist(),
        "mu": t.mu.to_list(),
    }


def spec_to_dict(spec: ProcessSpec) -> dict:
    d = triplet_to_dict(spec.triplet)
    d["assertions"] = dict(spec.assertions)
    return d


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def _finite(o):
    if isinstance(o, dict):
        return {k: _finite(v) for k, v in o.items()}
    if isinstance(o, list):
        return [_finite(v) for v in o]
    if isinstance(o, float) and not math.isfinite(o):
        return "nan" if math.isnan(o) else ("inf" if o > 0 else "-inf")
    return o


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON text; floats use the shortest repr that round-trips exactly."""
    return json.dumps(_finite(_jsonable(obj)), indent=indent, allow_nan=False) + "\n"


def serialize(spec: ProcessSpec | LevyTriplet) -> str:
    d = spec_to_dict(spec) if isinstance(spec, ProcessSpec) else triplet_to_dict(spec)
    return dumps(d)


def write_atomic(path, text: str | bytes) -> None:
    """Write via a temporary file in the target directory and rename it into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    mode = "wb" if isinstance(text, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": "\n"})) as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
