"""JSON problem and point files."""
from __future__ import annotations

import json

import jsonschema
import numpy as np

from .errors import InvalidInput
from .objectives import MatrixDistance, Quadratic
from .sets import SetSpec

MATRIX = {
    "type": "object",
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "data": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["rows", "cols", "data"],
    "additionalProperties": False,
}

PROBLEM_SCHEMA = {
    "type": "object",
    "properties": {
        "set": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["ball", "density", "correlation"]},
                "norm": {"enum": ["frobenius", "spectral", "nuclear", "inf"]},
                "gamma": {"type": "number", "exclusiveMinimum": 0},
                "n": {"type": "integer", "minimum": 1},
                "rows": {"type": "integer", "minimum": 1},
                "cols": {"type": "integer", "minimum": 1},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "kappa": {"type": "integer", "minimum": 1},
        "objective": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["matrix_distance", "quadratic"]},
                "M": MATRIX,
                "A": MATRIX,
                "b": MATRIX,
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "constants": {
            "type": "object",
            "properties": {
                "theta": {"type": ["number", "null"], "exclusiveMinimum": 0},
                "M_grad": {"type": ["number", "null"], "minimum": 0},
                "L": {"type": ["number", "null"], "minimum": 0},
                "L_grad": {"type": ["number", "null"], "minimum": 0},
            },
            "additionalProperties": False,
        },
        "solver": {
            "type": "object",
            "properties": {
                "rho0": {"oneOf": [{"type": "number", "exclusiveMinimum": 0}, {"const": "auto"}]},
                "tau": {"oneOf": [{"type": "number", "minimum": 1}, {"const": "geometric"}]},
                "max_stages": {"type": "integer", "minimum": 0},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "seed": {"type": "integer"},
                "x0": {"enum": ["auto", "random"]},
            },
            "additionalProperties": False,
        },
    },
    "required": ["set", "kappa", "objective"],
    "additionalProperties": False,
}


class Problem:
    def __init__(self, set_spec, kappa, objective, solver):
        self.set = set_spec
        self.kappa = kappa
        self.objective = objective
        self.solver = solver


def read_matrix(obj) -> np.ndarray:
    jsonschema.validate(obj, MATRIX)
    data = np.asarray(obj["data"], dtype=float)
    if data.size != obj["rows"] * obj["cols"]:
        raise InvalidInput(f"matrix data has {data.size} entries, expected "
                           f"{obj['rows']}x{obj['cols']}")
    return data.reshape(obj["rows"], obj["cols"])


def parse_problem(doc: dict) -> Problem:
    """Validate a problem document and build the set and objective."""
    try:
        jsonschema.validate(doc, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as e:
        raise InvalidInput(f"problem file: {e.message}") from None
    sd = doc["set"]
    if sd["kind"] == "ball":
        missing = [k for k in ("norm", "gamma", "rows", "cols") if k not in sd]
        if missing or "n" in sd:
            raise InvalidInput(f"ball set needs norm, gamma, rows, cols (missing {missing})")
        s = SetSpec.ball(sd["norm"], sd["gamma"], (sd["rows"], sd["cols"]))
    else:
        if "n" not in sd or set(sd) - {"kind", "n"}:
            raise InvalidInput(f"{sd['kind']} set takes exactly 'kind' and 'n'")
        s = SetSpec(sd["kind"], (sd["n"], sd["n"]))

    const = doc.get("constants", {})
    kw = dict(rsc_theta=const.get("theta"), grad_bound_M=const.get("M_grad"),
              lipschitz_f=const.get("L"), lipschitz_grad=const.get("L_grad"))
    od = doc["objective"]
    if od["kind"] == "matrix_distance":
        if "M" not in od or set(od) - {"kind", "M"}:
            raise InvalidInput("matrix_distance objective takes exactly 'M'")
        M = read_matrix(od["M"])
        if M.shape != s.shape:
            raise InvalidInput(f"M has shape {M.shape}, set has {s.shape}")
        m = MatrixDistance(M, **kw)
    else:
        if "A" not in od or "b" not in od or "M" in od:
            raise InvalidInput("quadratic objective takes exactly 'A' and 'b'")
        m = Quadratic(read_matrix(od["A"]), read_matrix(od["b"]), s.shape, **kw)
    if not 1 <= doc["kappa"] <= s.n:
        raise InvalidInput(f"kappa must lie in [1, {s.n}]")
    return Problem(s, doc["kappa"], m, doc.get("solver", {}))


def load_problem(path) -> Problem:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"{path}: malformed JSON ({e})") from None
    return parse_problem(doc)


def load_point(path) -> np.ndarray:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise InvalidInput(f"{path}: malformed JSON ({e})") from None
    try:
        return read_matrix(doc)
    except jsonschema.ValidationError as e:
        raise InvalidInput(f"point file: {e.message}") from None
