"""
marshmallow schemas for the JSON files read by the command line: system files, signal files and the
run configuration assembled from flags.

``load_*`` helpers turn marshmallow ``ValidationError`` into
:attr:`FileValidationError <switched_limits.exceptions.FileValidationError>`.
"""
import json
from typing import Any, Dict, Optional

import numpy as np
from marshmallow import Schema, ValidationError, fields, post_load, validate, validates_schema

from switched_limits.config import DEFAULT_TOLERANCES, RunConfig
from switched_limits.exceptions import FileValidationError, InvalidArgumentError, InvalidParamError
from switched_limits.signals import SwitchingSignal, signal_from_spec
from switched_limits.systems import SwitchedSystem

Positive = validate.Range(min=0, min_inclusive=False)
UnitInterval = validate.Range(min=0, max=1, min_inclusive=False, max_inclusive=False)


def _matrix_field(**kwargs) -> fields.List:
    return fields.List(fields.List(fields.Float(allow_nan=False)), **kwargs)


def _check_square(matrix, dim: int, name: str, field_name: str) -> None:
    rows = len(matrix)
    columns = {len(row) for row in matrix}
    if rows != dim or columns != {dim}:
        shape = f"{rows}x{'/'.join(str(c) for c in sorted(columns)) or 0}"
        raise ValidationError(f"{name} has shape {shape}, expected {dim}x{dim}.", field_name)


class SystemFileSchema(Schema):
    """
    ``{"dimension": d, "matrices": [[[...]]], "lyapunov": [[...]] | null, "labels": [...] | null}``

    Loads into a :class:`SwitchedSystem <switched_limits.systems.SwitchedSystem>`.
    """

    dimension = fields.Integer(required=True, strict=True, validate=validate.Range(min=1))
    matrices = fields.List(_matrix_field(), required=True, validate=validate.Length(min=1))
    lyapunov = _matrix_field(missing=None, allow_none=True)
    labels = fields.List(fields.String(), missing=None, allow_none=True)

    @validates_schema
    def validate_shapes(self, data, **kwargs):
        dim = data["dimension"]
        for index, matrix in enumerate(data["matrices"]):
            _check_square(matrix, dim, f"Matrix {index}", "matrices")
        if data.get("lyapunov") is not None:
            _check_square(data["lyapunov"], dim, "Lyapunov matrix", "lyapunov")
        labels = data.get("labels")
        if labels is not None and len(labels) != len(data["matrices"]):
            raise ValidationError(f"Got {len(labels)} labels for {len(data['matrices'])} matrices.", "labels")

    @post_load
    def make_system(self, data, **kwargs) -> SwitchedSystem:
        try:
            return SwitchedSystem(
                matrices=tuple(np.array(matrix, dtype=float) for matrix in data["matrices"]),
                lyapunov=None if data.get("lyapunov") is None else np.array(data["lyapunov"], dtype=float),
                labels=data.get("labels"),
            )
        except InvalidArgumentError as exc:
            raise ValidationError(str(exc), "lyapunov" if data.get("lyapunov") is not None else "matrices")


class BaseSignalSchema(Schema):
    """
    Signal files carry a ``"type"`` naming a registered generator. ``p`` and ``seed`` may come from the
    schema context (the system being simulated, ``--seed``); a context seed overrides the file.
    """

    kind: str = ""

    type = fields.String(required=True)
    p = fields.Integer(strict=True, validate=validate.Range(min=1), missing=None, allow_none=True)

    @validates_schema
    def validate_type(self, data, **kwargs):
        if data["type"] != self.kind:
            raise ValidationError(f"Expected type {self.kind!r}.", "type")

    def resolve_p(self, data) -> Optional[int]:
        p = self.context.get("p")
        if data.get("p") is not None and p is not None and data["p"] != p:
            raise ValidationError(f"Signal declares p = {data['p']} but the system has {p} matrices.", "p")
        return p if p is not None else data.get("p")

    def resolve_seed(self, data) -> int:
        seed = self.context.get("seed")
        return data.get("seed", 0) if seed is None else seed

    def build(self, data) -> Dict[str, Any]:
        raise NotImplementedError()

    @post_load
    def make_signal(self, data, **kwargs) -> SwitchingSignal:
        params = self.build(data)
        try:
            return signal_from_spec(self.kind, **params)
        except InvalidParamError as exc:
            raise ValidationError(str(exc), "_schema")


class ExplicitSignalSchema(BaseSignalSchema):
    kind = "explicit"

    times = fields.List(fields.Float(allow_nan=False), required=True, validate=validate.Length(min=1))
    values = fields.List(fields.Integer(strict=True, validate=validate.Range(min=0)), required=True)
    horizon = fields.Float(allow_nan=False, missing=None, allow_none=True)

    @validates_schema
    def validate_lengths(self, data, **kwargs):
        if len(data["times"]) != len(data["values"]):
            raise ValidationError("times and values must have the same length.", "values")

    def build(self, data):
        self.resolve_p(data)
        return {"times": data["times"], "values": data["values"], "horizon": data.get("horizon")}


class PatternEntrySchema(Schema):
    index = fields.Integer(required=True, strict=True, validate=validate.Range(min=0))
    duration = fields.Float(required=True, allow_nan=False, validate=Positive)


class PeriodicSignalSchema(BaseSignalSchema):
    kind = "periodic"

    pattern = fields.List(fields.Nested(PatternEntrySchema), required=True, validate=validate.Length(min=1))

    def build(self, data):
        self.resolve_p(data)
        return {"pattern": [(entry["index"], entry["duration"]) for entry in data["pattern"]]}

    @post_load
    def make_signal(self, data, **kwargs) -> SwitchingSignal:
        pattern = data["pattern"]
        if len(pattern) == 1 and self.resolve_p(data) == 1:
            return signal_from_spec("explicit", times=[0.0], values=[pattern[0]["index"]])
        return super().make_signal(data, **kwargs)


class DwellRandomSignalSchema(BaseSignalSchema):
    kind = "dwell_random"

    min_dwell = fields.Float(required=True, allow_nan=False, validate=Positive)
    max_dwell = fields.Float(required=True, allow_nan=False, validate=Positive)
    weights = fields.List(fields.Float(allow_nan=False, validate=validate.Range(min=0)), required=True)
    seed = fields.Integer(strict=True, validate=validate.Range(min=0), missing=0)

    def build(self, data):
        p = self.resolve_p(data)
        if p is not None and len(data["weights"]) > p:
            raise ValidationError(f"Got {len(data['weights'])} weights for {p} indices.", "weights")
        return {
            "min_dwell": data["min_dwell"],
            "max_dwell": data["max_dwell"],
            "weights": data["weights"],
            "seed": self.resolve_seed(data),
        }


class AverageDwellSignalSchema(BaseSignalSchema):
    kind = "average_dwell"

    n0 = fields.Integer(required=True, strict=True, validate=validate.Range(min=1))
    tau_a = fields.Float(required=True, allow_nan=False, validate=Positive)
    seed = fields.Integer(strict=True, validate=validate.Range(min=0), missing=0)

    def build(self, data):
        p = self.resolve_p(data)
        if p is None:
            raise ValidationError("p is required when no system is given.", "p")
        return {"n0": data["n0"], "tau_a": data["tau_a"], "p": p, "seed": self.resolve_seed(data)}


class ChaoticSignalSchema(BaseSignalSchema):
    kind = "chaotic"

    tau = fields.Float(required=True, allow_nan=False, validate=Positive)
    seed = fields.Integer(strict=True, validate=validate.Range(min=0), missing=0)

    def build(self, data):
        p = self.resolve_p(data)
        if p is None:
            raise ValidationError("p is required when no system is given.", "p")
        return {"tau": data["tau"], "p": p, "seed": self.resolve_seed(data)}


SIGNAL_SCHEMAS = {
    schema.kind: schema
    for schema in (
        ExplicitSignalSchema,
        PeriodicSignalSchema,
        DwellRandomSignalSchema,
        AverageDwellSignalSchema,
        ChaoticSignalSchema,
    )
}


class RunConfigSchema(Schema):
    """Validates the settings gathered from command-line flags."""

    tol_rank = fields.Float(missing=DEFAULT_TOLERANCES.rank, validate=UnitInterval)
    tol_conv = fields.Float(missing=DEFAULT_TOLERANCES.convergence, validate=UnitInterval)
    tol_symmetry = fields.Float(missing=DEFAULT_TOLERANCES.symmetry, validate=UnitInterval)
    horizon = fields.Float(allow_nan=False, missing=100.0, validate=validate.Range(min=0))
    grid_density = fields.Float(allow_nan=False, missing=10.0, validate=Positive)
    seed = fields.Integer(strict=True, validate=validate.Range(min=0), missing=None, allow_none=True)
    out = fields.String(missing=None, allow_none=True)

    @post_load
    def make_config(self, data, **kwargs) -> RunConfig:
        tolerances = DEFAULT_TOLERANCES.replace(
            rank=data["tol_rank"], convergence=data["tol_conv"], symmetry=data["tol_symmetry"]
        )
        return RunConfig(
            tolerances=tolerances,
            horizon=data["horizon"],
            grid_density=data["grid_density"],
            seed=data["seed"],
            out=data["out"],
        )


def load_system(data: Any, source: Optional[str] = None) -> SwitchedSystem:
    try:
        return SystemFileSchema().load(data)
    except ValidationError as exc:
        raise FileValidationError(exc.messages, source)


def load_signal(data: Any, p: Optional[int] = None, seed: Optional[int] = None,
                source: Optional[str] = None) -> SwitchingSignal:
    """
    Builds a signal from a signal-file mapping, dispatching on its ``"type"``.

    :param p: number of matrices of the system the signal drives, when known.
    :param seed: overrides the seed stored in the file.
    """
    if not isinstance(data, dict):
        raise FileValidationError({"_schema": ["Expected a JSON object."]}, source)
    schema_class = SIGNAL_SCHEMAS.get(data.get("type"))
    if schema_class is None:
        raise FileValidationError(
            {"type": [f"Unknown signal type {data.get('type')!r}; expected one of {sorted(SIGNAL_SCHEMAS)}."]},
            source,
        )
    try:
        return schema_class(context={"p": p, "seed": seed}).load(data)
    except ValidationError as exc:
        raise FileValidationError(exc.messages, source)


def load_run_config(data: Dict[str, Any]) -> RunConfig:
    try:
        return RunConfigSchema().load({key: value for key, value in data.items() if value is not None})
    except ValidationError as exc:
        raise FileValidationError(exc.messages, "command line")


def read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as stream:
            return json.load(stream)
    except OSError as exc:
        raise FileValidationError({"_schema": [f"Cannot read file: {exc.strerror}."]}, path)
    except json.JSONDecodeError as exc:
        raise FileValidationError({"_schema": [f"Malformed JSON: {exc}."]}, path)


def load_system_file(path: str) -> SwitchedSystem:
    return load_system(read_json(path), source=path)


def load_signal_file(path: str, p: Optional[int] = None, seed: Optional[int] = None) -> SwitchingSignal:
    return load_signal(read_json(path), p=p, seed=seed, source=path)
