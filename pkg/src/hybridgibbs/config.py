"""Model configuration files: schema, parsing, canonicalization, fingerprints.

Configs are JSON documents validated against CONFIG_SCHEMA (a published JSON
Schema, draft 2020-12) and then semantically checked (weight vector lengths,
override coordinates, ...).  Canonicalization fills in the documented
defaults; the canonical form is a fixed point of parse -> canonicalize ->
serialize -> parse, and its hash is the model fingerprint stamped on every
report.
"""

import json
from dataclasses import dataclass

import jsonschema
import numpy as np

from .approximators import (
    ApproximatorSpec,
    Exact,
    ExplicitMatrix,
    Lazy,
    MetropolisIndep,
    MetropolisRW,
)
from .errors import ParseError, SchemaError
from .randomgen import random_joint
from .report import fingerprint_json
from .slicemodel import SliceModel
from .space import joint_from_weights, product_joint

SUITES = ("random-scan", "da", "block", "slice", "selection", "supplement")

_RULE_SCHEMA = {
    "type": "object",
    "properties": {
        "rule": {"enum": ["exact", "lazy", "metropolis_rw", "metropolis_indep", "explicit"]},
        "epsilon": {"type": "number", "minimum": 0, "maximum": 1},
        "radius": {"type": "integer", "minimum": 1},
        "proposal": {
            "anyOf": [
                {"const": "uniform"},
                {"type": "array", "items": {"type": "number", "minimum": 0}},
            ]
        },
        "tables": {
            "type": "object",
            "additionalProperties": {
                "type": "array",
                "items": {"type": "array", "items": {"type": "number"}},
            },
        },
    },
    "required": ["rule"],
    "additionalProperties": False,
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "hybridgibbs model configuration",
    "type": "object",
    "properties": {
        "model": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["explicit", "product", "slice", "random"]},
                "sizes": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1},
                    "minItems": 1,
                },
                "weights": {
                    "type": "array",
                    "items": {"type": "number", "minimum": 0},
                    "minItems": 1,
                },
                "factors": {
                    "type": "array",
                    "items": {
                        "type": "array",
                        "items": {"type": "number", "minimum": 0},
                        "minItems": 1,
                    },
                    "minItems": 1,
                },
                "density": {
                    "type": "array",
                    "items": {"type": "number", "exclusiveMinimum": 0},
                    "minItems": 1,
                },
                "level_kernels": {"type": "array", "items": _RULE_SCHEMA},
                "seed": {"type": "integer"},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "selection_probs": {
            "type": ["array", "null"],
            "items": {"type": "number", "minimum": 0},
        },
        "selection_probs_alt": {
            "type": ["array", "null"],
            "items": {"type": "number", "minimum": 0},
        },
        "approximator": {
            "type": "object",
            "properties": {
                "default": _RULE_SCHEMA,
                "overrides": {"type": "object", "additionalProperties": _RULE_SCHEMA},
            },
            "additionalProperties": False,
        },
        "suite": {
            "anyOf": [
                {"const": "all"},
                {"type": "array", "items": {"enum": list(SUITES)}},
            ]
        },
        "t": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1},
        "tol": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
        "trials": {"type": "integer", "minimum": 1},
    },
    "required": ["model"],
    "additionalProperties": False,
}

_DEFAULTS = {
    "selection_probs": None,
    "selection_probs_alt": None,
    "approximator": {"default": {"rule": "exact"}, "overrides": {}},
    "suite": "all",
    "t": [2, 4],
    "tol": 1e-9,
    "seed": 0,
    "trials": 64,
}


@dataclass(frozen=True, eq=False)
class ModelConfig:
    """Canonicalized configuration plus its fingerprint."""

    data: dict
    fingerprint: str

    @property
    def is_slice(self):
        return self.data["model"]["kind"] == "slice"

    @property
    def tol(self):
        return float(self.data["tol"])

    @property
    def t_values(self):
        return [int(t) for t in self.data["t"]]

    @property
    def seed(self):
        return int(self.data["seed"])

    @property
    def trials(self):
        return int(self.data["trials"])

    def suites(self):
        s = self.data["suite"]
        return list(SUITES) if s == "all" else list(s)

    def build_joint(self):
        m = self.data["model"]
        kind = m["kind"]
        if kind == "explicit":
            return joint_from_weights(m["sizes"], m["weights"])
        if kind == "product":
            return product_joint(m["factors"])
        if kind == "random":
            return random_joint(m["seed"], sizes=tuple(m["sizes"]))
        raise SchemaError(f"model kind {kind!r} does not define a joint distribution")

    def build_slice_model(self):
        m = self.data["model"]
        if m["kind"] != "slice":
            raise SchemaError("model is not a slice model")
        kernels = None
        if "level_kernels" in m:
            kernels = tuple(rule_from_json(r) for r in m["level_kernels"])
        return SliceModel(density=np.asarray(m["density"], float), level_kernels=kernels)

    def selection(self):
        return self.data["selection_probs"]

    def selection_alt(self):
        return self.data["selection_probs_alt"]

    def approximator_spec(self):
        a = self.data["approximator"]
        default = rule_from_json(a["default"])
        overrides = {int(k): rule_from_json(v) for k, v in a["overrides"].items()}
        return ApproximatorSpec(default=default, overrides=overrides)


def rule_from_json(obj):
    kind = obj["rule"]
    if kind == "exact":
        return Exact()
    if kind == "lazy":
        return Lazy(float(obj.get("epsilon", 0.0)))
    if kind == "metropolis_rw":
        return MetropolisRW(int(obj.get("radius", 1)))
    if kind == "metropolis_indep":
        prop = obj.get("proposal", "uniform")
        return MetropolisIndep(prop if isinstance(prop, str) else tuple(prop))
    if kind == "explicit":
        tables = {}
        for key, matrix in obj.get("tables", {}).items():
            i_str, y_str = key.split(";")
            y = tuple(int(v) for v in y_str.split(",")) if y_str else ()
            tables[(int(i_str), y)] = np.asarray(matrix, dtype=float)
        return ExplicitMatrix(tables)
    raise SchemaError(f"unknown approximator rule {kind!r}")


def rule_to_json(rule):
    return rule.describe() if not isinstance(rule, ExplicitMatrix) else _explicit_to_json(rule)


def _explicit_to_json(rule):
    tables = {}
    for (i, y), matrix in sorted(rule.tables.items()):
        key = f"{i};{','.join(str(v) for v in y)}"
        tables[key] = np.asarray(matrix, dtype=float).tolist()
    return {"rule": "explicit", "tables": tables}


def parse_config(path):
    """Load, validate and canonicalize a configuration file."""
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    return parse_config_text(raw)


def parse_config_text(raw):
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return canonicalize(data)


def canonicalize(data):
    """Validate against the schema, apply defaults, run semantic checks."""
    try:
        jsonschema.validate(data, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise SchemaError(f"at {path}: {exc.message}") from exc
    out = dict(_DEFAULTS)
    out.update(data)
    out["model"] = dict(data["model"])
    _semantic_checks(out)
    canon = json.loads(json.dumps(out, sort_keys=True))
    return ModelConfig(data=canon, fingerprint=fingerprint_json(canon))


def _semantic_checks(out):
    m = out["model"]
    kind = m["kind"]
    if kind == "explicit":
        _require(m, "sizes", "explicit models")
        _require(m, "weights", "explicit models")
        expected = int(np.prod(m["sizes"]))
        if len(m["weights"]) != expected:
            raise SchemaError(
                f"expected {expected} weights for sizes {m['sizes']}, "
                f"got {len(m['weights'])}"
            )
        if sum(m["weights"]) <= 0:
            raise SchemaError("joint weights must have positive total mass")
    elif kind == "product":
        _require(m, "factors", "product models")
        for k, f in enumerate(m["factors"]):
            if sum(f) <= 0:
                raise SchemaError(f"factor {k} has zero total mass")
    elif kind == "slice":
        _require(m, "density", "slice models")
        if "level_kernels" in m:
            nlevels = len(set(m["density"]))
            if len(m["level_kernels"]) != nlevels:
                raise SchemaError(
                    f"expected {nlevels} level kernels (one per distinct density "
                    f"value), got {len(m['level_kernels'])}"
                )
    elif kind == "random":
        _require(m, "sizes", "random models")
        _require(m, "seed", "random models")
    ncoords = _ncoords(m)
    for field in ("selection_probs", "selection_probs_alt"):
        sel = out.get(field)
        if sel is not None:
            if kind == "slice":
                raise SchemaError(f"{field} does not apply to slice models")
            if len(sel) != ncoords:
                raise SchemaError(
                    f"{field} has length {len(sel)}, expected {ncoords}"
                )
            if sum(sel) <= 0:
                raise SchemaError(f"{field} must have positive total mass")
    for c in out["approximator"].get("overrides", {}):
        try:
            ci = int(c)
        except ValueError:
            raise SchemaError(f"override coordinate {c!r} is not an integer")
        if ncoords is not None and not 0 <= ci < ncoords:
            raise SchemaError(f"override coordinate {ci} out of range for {ncoords} coordinates")


def _ncoords(model):
    kind = model["kind"]
    if kind in ("explicit", "random"):
        return len(model["sizes"])
    if kind == "product":
        return len(model["factors"])
    return None


def _require(obj, key, label):
    if key not in obj:
        raise SchemaError(f"{label} require {key!r}")


def serialize(config):
    """Canonical JSON text of a config; a fixed point of parse -> serialize."""
    return json.dumps(config.data, sort_keys=True, indent=2) + "\n"
