"""Instance and report files: schema-validated JSON with exact floats.

Floats are serialized as decimal strings with 17 significant digits, so
parse -> serialize -> parse is the identity and replay files diff
cleanly.  Unknown fields are rejected at every nesting level; validation
errors name the offending field path.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .bodies import AnyBody, Box, Knapsack, Polytope
from .driver import SolveReport
from .errors import InstanceFormatError, ParameterError
from .fwg import FwgConfig
from .lattice import Point
from .objectives import (
    Objective,
    QuadraticObjective,
    SeparableExponential,
    estimate_gamma,
)

SCHEMA_VERSION = 1

# Named objectives usable from instance files without spelling out matrices.
BUILTIN_OBJECTIVES = {
    # F(x) = 2x - x^2 on one coordinate: the standard concave fixture.
    "parabola_1d": lambda: QuadraticObjective(H=[[-2.0]], h=[2.0], c=0.0),
}


def format_float(x: float) -> str:
    return format(float(x), ".17g")


def _parse_float(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise InstanceFormatError(where, f"expected a number or numeric string, got {value!r}")
    try:
        return float(value)
    except ValueError as exc:
        raise InstanceFormatError(where, f"not a number: {value!r}") from exc


def _parse_vector(value: Any, where: str, length: Optional[int] = None) -> list[float]:
    if not isinstance(value, list):
        raise InstanceFormatError(where, f"expected a list, got {type(value).__name__}")
    out = [_parse_float(v, f"{where}[{i}]") for i, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise InstanceFormatError(where, f"expected length {length}, got {len(out)}")
    return out


def _parse_matrix(value: Any, where: str, rows: Optional[int], cols: int) -> list[list[float]]:
    if not isinstance(value, list) or (rows is not None and len(value) != rows):
        raise InstanceFormatError(where, f"expected a {rows}x{cols} row-major matrix")
    return [_parse_vector(row, f"{where}[{i}]", cols) for i, row in enumerate(value)]


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise InstanceFormatError(where, f"unknown fields: {sorted(unknown)}")


def _require(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        raise InstanceFormatError(f"{where}.{key}" if where else key, "missing required field")
    return obj[key]


@dataclass(frozen=True)
class InstanceSpec:
    """Validated, serializable mirror of an instance file."""

    dimension: int
    objective: dict
    body: dict
    parameters: dict
    seed: int
    gamma: Optional[float] = None
    smoothness: Optional[float] = None

    def canonical_json(self) -> str:
        doc: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "dimension": self.dimension,
            "objective": _floats_to_strings(self.objective),
            "body": _floats_to_strings(self.body),
            "parameters": _floats_to_strings(self.parameters),
            "seed": self.seed,
        }
        if self.gamma is not None:
            doc["gamma"] = format_float(self.gamma)
        if self.smoothness is not None:
            doc["smoothness"] = format_float(self.smoothness)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def build_objective(self) -> Objective:
        """Instantiate the oracle.  When no gamma is pinned and the family
        does not carry an exact one, a placeholder of 1.0 is set; call
        :meth:`resolve_gamma` to certify it empirically."""
        kind = self.objective["type"]
        if kind == "quadratic":
            gamma = self.gamma
            if gamma is None and np.any(np.asarray(self.objective["H"]) > 0):
                gamma = 1.0  # placeholder until resolve_gamma certifies one
            f = QuadraticObjective(
                H=self.objective["H"], h=self.objective["h"], c=self.objective["c"], gamma=gamma
            )
        elif kind == "separable_exponential":
            f = SeparableExponential(a=self.objective["a"], b=self.objective["b"])
        else:
            f = BUILTIN_OBJECTIVES[self.objective["name"]]()
        if self.gamma is not None:
            f = f.with_gamma(self.gamma)
        if self.smoothness is not None:
            f = f.with_smoothness(self.smoothness)
        return f

    def build_body(self) -> AnyBody:
        kind = self.body["type"]
        if kind == "box":
            return Box(self.body["u"])
        if kind == "knapsack":
            return Knapsack(self.body["a"], self.body["b"])
        return Polytope(self.body["A"], self.body["b"])

    def build_config(self, gamma: float) -> FwgConfig:
        p = self.parameters
        return FwgConfig(t_s=p["t_s"], epsilon=p["epsilon"], delta=p["delta"], gamma=gamma)

    def needs_gamma_estimate(self) -> bool:
        return (
            self.gamma is None
            and self.objective["type"] == "quadratic"
            and bool(np.any(np.asarray(self.objective["H"]) > 0))
        )

    def resolve_gamma(self, f: Objective, samples: int = 1000) -> float:
        """Pinned gamma, the family's exact one, or a fresh estimate
        driven by the instance seed."""
        if self.gamma is not None:
            return self.gamma
        if self.needs_gamma_estimate():
            return estimate_gamma(f, samples=samples, seed=self.seed)
        return f.gamma


def _floats_to_strings(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {k: _floats_to_strings(v) for k, v in sorted(obj.items())}
    if isinstance(obj, list):
        return [_floats_to_strings(v) for v in obj]
    if isinstance(obj, float):
        return format_float(obj)
    return obj


def _read_source(source: Union[str, Path]) -> str:
    if isinstance(source, Path):
        return source.read_text()
    if "\n" not in source and "{" not in source:  # a path, not inline JSON
        return Path(source).read_text()
    return source


def parse_instance(source: Union[str, Path, dict]) -> InstanceSpec:
    """Parse and validate an instance file, path, or already-loaded dict."""
    if isinstance(source, dict):
        doc = source
    else:
        try:
            doc = json.loads(_read_source(source))
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(
                "<document>", f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("<document>", "top level must be an object")

    _reject_unknown(
        doc,
        {"schema_version", "dimension", "objective", "body", "parameters", "seed", "gamma", "smoothness"},
        "<document>",
    )
    version = _require(doc, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise InstanceFormatError("schema_version", f"unsupported version {version!r}")
    n = _require(doc, "dimension", "")
    if not isinstance(n, int) or n < 1:
        raise InstanceFormatError("dimension", f"must be a positive integer, got {n!r}")

    objective = _parse_objective(_require(doc, "objective", ""), n)
    body = _parse_body(_require(doc, "body", ""), n)
    parameters = _parse_parameters(_require(doc, "parameters", ""))
    seed = _require(doc, "seed", "")
    if not isinstance(seed, int):
        raise InstanceFormatError("seed", f"must be an integer, got {seed!r}")

    gamma = _parse_float(doc["gamma"], "gamma") if "gamma" in doc else None
    if gamma is not None and not 0.0 < gamma <= 1.0:
        raise InstanceFormatError("gamma", f"must be in (0,1], got {gamma}")
    smoothness = _parse_float(doc["smoothness"], "smoothness") if "smoothness" in doc else None
    if smoothness is not None and smoothness < 0:
        raise InstanceFormatError("smoothness", f"must be >= 0, got {smoothness}")

    spec = InstanceSpec(n, objective, body, parameters, seed, gamma, smoothness)
    _validate_buildable(spec)
    return spec


def _validate_buildable(spec: InstanceSpec) -> None:
    try:
        spec.build_body()
        f = spec.build_objective()
        spec.build_config(gamma=spec.gamma if spec.gamma is not None else f.gamma)
    except InstanceFormatError:
        raise
    except ParameterError as exc:
        raise InstanceFormatError("<document>", str(exc)) from exc


def _parse_objective(obj: Any, n: int) -> dict:
    where = "objective"
    if not isinstance(obj, dict):
        raise InstanceFormatError(where, "must be an object")
    kind = _require(obj, "type", where)
    if kind == "quadratic":
        _reject_unknown(obj, {"type", "H", "h", "c"}, where)
        return {
            "type": kind,
            "H": _parse_matrix(_require(obj, "H", where), f"{where}.H", n, n),
            "h": _parse_vector(_require(obj, "h", where), f"{where}.h", n),
            "c": _parse_float(_require(obj, "c", where), f"{where}.c"),
        }
    if kind == "separable_exponential":
        _reject_unknown(obj, {"type", "a", "b"}, where)
        return {
            "type": kind,
            "a": _parse_vector(_require(obj, "a", where), f"{where}.a", n),
            "b": _parse_vector(_require(obj, "b", where), f"{where}.b", n),
        }
    if kind == "builtin":
        _reject_unknown(obj, {"type", "name"}, where)
        name = _require(obj, "name", where)
        if name not in BUILTIN_OBJECTIVES:
            raise InstanceFormatError(f"{where}.name", f"unknown builtin {name!r}")
        return {"type": kind, "name": name}
    raise InstanceFormatError(f"{where}.type", f"unknown objective type {kind!r}")


def _parse_body(obj: Any, n: int) -> dict:
    where = "body"
    if not isinstance(obj, dict):
        raise InstanceFormatError(where, "must be an object")
    kind = _require(obj, "type", where)
    if kind == "box":
        _reject_unknown(obj, {"type", "u"}, where)
        return {"type": kind, "u": _parse_vector(_require(obj, "u", where), f"{where}.u", n)}
    if kind == "knapsack":
        _reject_unknown(obj, {"type", "a", "b"}, where)
        return {
            "type": kind,
            "a": _parse_vector(_require(obj, "a", where), f"{where}.a", n),
            "b": _parse_float(_require(obj, "b", where), f"{where}.b"),
        }
    if kind == "polytope":
        _reject_unknown(obj, {"type", "A", "b"}, where)
        A = _parse_matrix(_require(obj, "A", where), f"{where}.A", None, n)
        return {
            "type": kind,
            "A": A,
            "b": _parse_vector(_require(obj, "b", where), f"{where}.b", len(A)),
        }
    raise InstanceFormatError(f"{where}.type", f"unknown body type {kind!r}")


def _parse_parameters(obj: Any) -> dict:
    where = "parameters"
    if not isinstance(obj, dict):
        raise InstanceFormatError(where, "must be an object")
    _reject_unknown(obj, {"epsilon", "delta", "t_s"}, where)
    return {
        "epsilon": _parse_float(_require(obj, "epsilon", where), f"{where}.epsilon"),
        "delta": _parse_float(_require(obj, "delta", where), f"{where}.delta"),
        "t_s": _parse_float(_require(obj, "t_s", where), f"{where}.t_s"),
    }


def write_instance(spec: InstanceSpec, path: Union[str, Path]) -> None:
    Path(path).write_text(spec.canonical_json())


REPORT_FIELDS = {
    "schema_version",
    "library_version",
    "instance_sha256",
    "best",
    "best_value",
    "branch",
    "levels_expanded",
    "calls_used",
    "partial",
    "heir_trace",
    "seed",
    "gamma_used",
    "smoothness_used",
    "wall_time_s",
    "created_at",
}


def report_document(
    report: SolveReport,
    instance: InstanceSpec,
    gamma_used: float,
    smoothness_used: float,
    library_version: str,
    wall_time_s: Optional[float] = None,
    created_at: Optional[str] = None,
) -> dict:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "library_version": library_version,
        "instance_sha256": instance.sha256(),
        "best": [format_float(v) for v in report.best],
        "best_value": format_float(report.best_value),
        "branch": report.branch,
        "levels_expanded": report.levels_expanded,
        "calls_used": report.calls_used,
        "partial": report.partial,
        "heir_trace": [
            {"level": h.level, "seed_hash": h.seed_hash, "q_empty_at": h.q_empty_at}
            for h in report.heir_trace
        ],
        "seed": report.seed,
        "gamma_used": format_float(gamma_used),
        "smoothness_used": format_float(smoothness_used),
    }
    if wall_time_s is not None:
        doc["wall_time_s"] = format_float(wall_time_s)
    if created_at is not None:
        doc["created_at"] = created_at
    return doc


def dump_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_report(source: Union[str, Path]) -> dict:
    """Load and validate a report file; unknown fields are rejected."""
    try:
        doc = json.loads(_read_source(source))
    except json.JSONDecodeError as exc:
        raise InstanceFormatError("<report>", f"invalid JSON: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InstanceFormatError("<report>", "top level must be an object")
    _reject_unknown(doc, REPORT_FIELDS, "<report>")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InstanceFormatError("schema_version", f"unsupported version {doc.get('schema_version')!r}")
    for key in ("best", "best_value", "branch", "calls_used"):
        _require(doc, key, "")
    doc["best_value"] = _parse_float(doc["best_value"], "best_value")
    doc["best"] = [_parse_float(v, f"best[{i}]") for i, v in enumerate(doc["best"])]
    return doc


def best_point(doc: dict) -> Point:
    return Point(doc["best"])
