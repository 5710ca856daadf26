"""Model-spec JSON files: parsing, schema validation and canonical serialization.

Two document shapes are accepted::

    {"m": 2, "F": {"A0": [[...]], "delayed": [{"tau": 1.0, "A": [[...]]}]}, "V": {...}}
    {"tick": {"b": ..., "r": [4], "d": [4], "tau": [2], "N_cap": ..., "h": ...}}

Canonical output has sorted keys, two-space indentation, numeric rows on a
single line and every float written with ``%.17g``.
"""
import json
import math
from dataclasses import dataclass

import jsonschema
import numpy as np

from .delay_op import DelayLinearOperator
from .errors import SpecError
from .r0_engine import NextGenModel
from .tick import TickParams, linearize

_matrix = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": {"type": "number"}}}
_operator = {
    "type": "object",
    "required": ["A0"],
    "additionalProperties": False,
    "properties": {
        "A0": _matrix,
        "delayed": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["tau", "A"],
                "additionalProperties": False,
                "properties": {"tau": {"type": "number", "exclusiveMinimum": 0}, "A": _matrix},
            },
        },
    },
}
_positive = {"type": "number", "exclusiveMinimum": 0}
_quad = {"type": "array", "minItems": 4, "maxItems": 4, "items": _positive}

SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "required": ["m", "F", "V"],
            "additionalProperties": False,
            "properties": {"m": {"type": "integer", "minimum": 1}, "F": _operator, "V": _operator},
        },
        {
            "type": "object",
            "required": ["tick"],
            "additionalProperties": False,
            "properties": {
                "tick": {
                    "type": "object",
                    "required": ["b", "r", "d", "tau", "N_cap", "h"],
                    "additionalProperties": False,
                    "properties": {
                        "b": _positive,
                        "r": _quad,
                        "d": _quad,
                        "tau": {"type": "array", "minItems": 2, "maxItems": 2, "items": _positive},
                        "N_cap": _positive,
                        "h": _positive,
                    },
                }
            },
        },
    ]
}


@dataclass
class ModelSpec:
    model: NextGenModel
    tick: TickParams = None

    @property
    def kind(self):
        return "tick" if self.tick is not None else "linear"


def _where(path):
    return "/".join(str(p) for p in path) or "<root>"


def _best_error(err):
    # oneOf failures: report the branch that got furthest
    if err.context:
        return max(err.context, key=lambda e: (len(e.absolute_path), -len(e.context)))
    return err


def parse_spec(text, source="<spec>"):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{source}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None
    return spec_from_dict(doc, source)


def load_spec(path):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise SpecError(f"{path}: cannot read spec ({exc.strerror})") from None
    return parse_spec(text, str(path))


def _operator_from(doc, m, where):
    if _shape(doc["A0"]) != (m, m):
        raise SpecError(f"{where}/A0: expected a {m}x{m} matrix, got shape {_shape(doc['A0'])}")
    A0 = np.array(doc["A0"], dtype=float)
    if not np.all(np.isfinite(A0)):
        raise SpecError(f"{where}/A0: non-finite entry")
    terms = []
    for k, term in enumerate(doc.get("delayed", [])):
        A = term["A"]
        if _shape(A) != (m, m):
            raise SpecError(f"{where}/delayed/{k}/A: expected a {m}x{m} matrix, got shape {_shape(A)}")
        A = np.array(A, dtype=float)
        if not np.all(np.isfinite(A)) or not math.isfinite(term["tau"]):
            raise SpecError(f"{where}/delayed/{k}: non-finite entry")
        terms.append((term["tau"], A))
    taus = [t for t, _ in terms]
    if len(set(taus)) != len(taus):
        raise SpecError(f"{where}/delayed: repeated delay values {sorted(taus)}")
    return DelayLinearOperator(A0, terms)


def _shape(rows):
    lens = {len(r) for r in rows}
    return (len(rows), lens.pop()) if len(lens) == 1 else (len(rows), "ragged")


def spec_from_dict(doc, source="<spec>"):
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        lines = []
        for err in errors:
            best = _best_error(err)
            lines.append(f"{source}: field {_where(best.absolute_path)}: {best.message}")
        raise SpecError("\n".join(lines))
    if "tick" in doc:
        t = doc["tick"]
        try:
            params = TickParams(t["b"], t["r"], t["d"], t["tau"][0], t["tau"][1], t["N_cap"], t["h"])
        except ValueError as exc:
            raise SpecError(f"{source}: field tick: {exc}") from None
        return ModelSpec(linearize(params), params)
    m = doc["m"]
    F = _operator_from(doc["F"], m, f"{source}: field F")
    V = _operator_from(doc["V"], m, f"{source}: field V")
    return ModelSpec(NextGenModel(F, V))


def _operator_dict(L):
    out = {"A0": L.A0.tolist()}
    if L.terms:
        out["delayed"] = [{"A": A.tolist(), "tau": tau} for tau, A in L.terms]
    return out


def spec_to_dict(spec):
    if spec.tick is not None:
        p = spec.tick
        return {"tick": {"N_cap": p.N_cap, "b": p.b, "d": list(p.d), "h": p.h,
                         "r": list(p.r), "tau": [p.tau1, p.tau2]}}
    return {"F": _operator_dict(spec.model.F), "V": _operator_dict(spec.model.V), "m": spec.model.dim}


def _fmt_scalar(v):
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if not math.isfinite(v):
            raise ValueError("cannot serialize non-finite float")
        return "%.17g" % (v + 0.0)  # drops the sign of -0.0
    return json.dumps(v)


def dumps_canonical(obj, indent=0):
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps_canonical(obj[k], indent + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(_fmt_scalar(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps_canonical(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, np.generic):
        return _fmt_scalar(obj.item())
    return _fmt_scalar(obj)


def serialize_spec(spec):
    return dumps_canonical(spec_to_dict(spec)) + "\n"
