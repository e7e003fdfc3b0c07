"""JSON solution files.

A solution file stores the structured configuration (not the flat solver
vector) with every real written as a 17-significant-digit decimal string,
so that decoding reproduces the binary values exactly. The certified
objective and its 5-decimal reported value sit alongside solver metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .models import CircleConfig, HexConfig, PointConfig
from .validator import report_value

SCHEMA_VERSION = 1
SENSES = {"minmax": "min", "circles": "max", "hexagons": "min"}

__all__ = ["SCHEMA_VERSION", "SchemaError", "SolutionFile", "config_family", "fmt"]


class SchemaError(ValueError):
    pass


def fmt(v: float) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(v), ".17g")


def _nested(a) -> list:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return fmt(a)
    return [_nested(row) for row in a]


def _array(v, what: str, shape=None) -> np.ndarray:
    try:
        a = np.vectorize(float, otypes=[float])(np.asarray(v, dtype=object))
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{what}: expected decimal strings") from exc
    if shape is not None and a.shape != shape:
        raise SchemaError(f"{what}: expected shape {shape}, got {a.shape}")
    return a


def _real(v, what: str) -> float:
    if not isinstance(v, (str, int, float)) or isinstance(v, bool):
        raise SchemaError(f"{what}: expected a decimal string")
    try:
        return float(v)
    except ValueError as exc:
        raise SchemaError(f"{what}: not a number: {v!r}") from exc


def config_family(config) -> str:
    if isinstance(config, PointConfig):
        return "minmax"
    if isinstance(config, CircleConfig):
        return "circles"
    if isinstance(config, HexConfig):
        return "hexagons"
    raise TypeError(f"not a configuration: {type(config).__name__}")


def _params(config) -> dict:
    fam = config_family(config)
    if fam == "minmax":
        return {"n": config.n, "d": config.d}
    if fam == "circles":
        return {"n": config.n, "variant": config.variant}
    return {"n": config.n}


def _encode_vars(config) -> dict:
    if isinstance(config, PointConfig):
        return {"points": _nested(config.points), "t_min": fmt(config.t_min),
                "t_max": fmt(config.t_max)}
    if isinstance(config, CircleConfig):
        return {"alpha": fmt(config.alpha), "centers": _nested(config.centers),
                "radii": _nested(config.radii)}
    return {"R": fmt(config.R), "centers": _nested(config.centers),
            "thetas": _nested(config.thetas), "farkas": _nested(config.farkas)}


def _decode_vars(family: str, params: dict, v: dict):
    if not isinstance(v, dict):
        raise SchemaError("variables must be an object")
    n = params["n"]
    try:
        if family == "minmax":
            d = params.get("d")
            if not isinstance(d, int):
                raise SchemaError("params.d must be an integer")
            return PointConfig(_array(v["points"], "points", (n, d)),
                               _real(v["t_min"], "t_min"), _real(v["t_max"], "t_max"))
        if family == "circles":
            variant = params.get("variant")
            if variant not in ("square", "rectangle"):
                raise SchemaError("params.variant must be 'square' or 'rectangle'")
            return CircleConfig(_array(v["centers"], "centers", (n, 2)),
                                _array(v["radii"], "radii", (n,)),
                                _real(v["alpha"], "alpha"), variant)
        P = n * (n - 1) // 2
        return HexConfig(_real(v["R"], "R"), _array(v["centers"], "centers", (n, 2)),
                         _array(v["thetas"], "thetas", (n,)),
                         _array(v["farkas"], "farkas", (P, 12)) if P else None)
    except KeyError as exc:
        raise SchemaError(f"variables: missing field {exc.args[0]!r}") from exc
    except ValueError as exc:
        if isinstance(exc, SchemaError):
            raise
        raise SchemaError(f"variables: {exc}") from exc


@dataclass
class SolutionFile:
    family: str
    params: dict
    config: object
    certified_objective: float
    reported_value: str
    solver: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def sense(self) -> str:
        return SENSES[self.family]

    @classmethod
    def from_verdict(cls, verdict, solver: dict | None = None) -> "SolutionFile":
        if not verdict.feasible:
            raise SchemaError("only feasible verdicts are written as solutions")
        cfg = verdict.config
        meta = {"version": __version__}
        meta.update(solver or {})
        return cls(config_family(cfg), _params(cfg), cfg, verdict.certified_objective,
                   verdict.reported_value, meta)

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "family": self.family,
            "params": dict(self.params),
            "sense": self.sense,
            "variables": _encode_vars(self.config),
            "certified_objective": fmt(self.certified_objective),
            "reported_value": self.reported_value,
            "solver": dict(self.solver),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data) -> "SolutionFile":
        if not isinstance(data, dict):
            raise SchemaError("solution must be a JSON object")
        if data.get("schema_version") != SCHEMA_VERSION:
            raise SchemaError(f"unsupported schema_version {data.get('schema_version')!r}")
        family = data.get("family")
        if family not in SENSES:
            raise SchemaError(f"unknown family {family!r}")
        params = data.get("params")
        if not isinstance(params, dict) or not isinstance(params.get("n"), int) \
                or params["n"] < 1:
            raise SchemaError("params.n must be a positive integer")
        if data.get("sense", SENSES[family]) != SENSES[family]:
            raise SchemaError(f"sense does not match family {family}")
        config = _decode_vars(family, params, data.get("variables"))
        certified = _real(data.get("certified_objective"), "certified_objective")
        reported = data.get("reported_value")
        if not isinstance(reported, str):
            raise SchemaError("reported_value must be a decimal string")
        if reported != report_value(SENSES[family], certified):
            raise SchemaError(f"reported_value {reported} does not match "
                              f"certified_objective {fmt(certified)}")
        solver = data.get("solver", {})
        if not isinstance(solver, dict):
            raise SchemaError("solver metadata must be an object")
        return cls(family, params, config, certified, reported, solver)

    @classmethod
    def loads(cls, text: str) -> "SolutionFile":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
        return cls.from_dict(data)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "SolutionFile":
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise SchemaError(f"cannot read {path}: {exc}") from exc
        return cls.loads(text)
