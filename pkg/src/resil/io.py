"""JSON model files and report serialization."""

from __future__ import annotations

import json
import math
import os
from typing import Any

from . import __version__
from .empirical import EmpiricalReport
from .errors import ValidationError
from .model import (
    AtTime,
    ConstantRestore,
    EventModel,
    ExponentialRestore,
    LognormalRestore,
    MetricsReport,
    NadirResult,
    OutageModel,
)
from .numerics import Tolerance

_RESTORE_FIELDS = {
    "constant": (ConstantRestore, ("r_a", "r_b")),
    "lognormal": (LognormalRestore, ("r_a", "mu", "sigma")),
    "exponential": (ExponentialRestore, ("r_a", "tau")),
}


def _number(obj: dict, key: str, where: str) -> float:
    if key not in obj:
        raise ValidationError(f"{where}{key} is required")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}{key} must be a number, got {v!r}")
    return float(v)


def _exact_keys(obj: Any, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ValidationError(f"{where or 'model'} must be a JSON object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ValidationError(f"unknown key(s) in {where or 'model'}: {', '.join(unknown)}")
    return obj


def model_from_dict(doc: Any) -> EventModel:
    """Parse and validate a model document.

    Error messages name the offending field as ``restore.sigma`` etc.
    """
    doc = _exact_keys(doc, {"n_c", "outage", "restore"}, "")
    n_c = _number(doc, "n_c", "")
    if "outage" not in doc:
        raise ValidationError("outage is required")
    if "restore" not in doc:
        raise ValidationError("restore is required")

    out = _exact_keys(doc["outage"], {"type", "o_b"}, "outage")
    if out.get("type") != "constant":
        raise ValidationError(f"outage.type must be 'constant', got {out.get('type')!r}")
    o_b = _number(out, "o_b", "outage.")

    rest = doc["restore"]
    if not isinstance(rest, dict):
        raise ValidationError("restore must be a JSON object")
    kind = rest.get("type")
    if kind not in _RESTORE_FIELDS:
        raise ValidationError(
            f"restore.type must be one of {', '.join(_RESTORE_FIELDS)}, got {kind!r}"
        )
    cls, fields = _RESTORE_FIELDS[kind]
    _exact_keys(rest, {"type", *fields}, "restore")
    params = {f: _number(rest, f, "restore.") for f in fields}

    try:
        outage = OutageModel(o_b)
    except ValidationError as exc:
        raise ValidationError(f"outage.{exc}") from None
    try:
        restore = cls(**params)
    except ValidationError as exc:
        raise ValidationError(f"restore.{exc}") from None
    return EventModel(n_c, outage, restore)


def model_to_dict(m: EventModel) -> dict:
    kind = m.restore.kind
    _, fields = _RESTORE_FIELDS[kind]
    return {
        "n_c": m.n_c,
        "outage": {"type": "constant", "o_b": m.outage.o_b},
        "restore": {"type": kind, **{f: getattr(m.restore, f) for f in fields}},
    }


def load_model(path: str | os.PathLike) -> EventModel:
    """Read a model file. ``OSError`` for I/O problems, ``ValidationError`` otherwise."""
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    return model_from_dict(doc)


def _num(x: float):
    # JSON has no NaN/inf
    x = float(x)
    return x if math.isfinite(x) else None


def nadir_to_dict(n: NadirResult) -> dict:
    if isinstance(n.location, AtTime):
        loc = {"type": "at_time", "t": n.location.t}
    else:
        loc = {"type": "on_interval", "t_lo": n.location.t_lo, "t_hi": n.location.t_hi}
    return {
        "value": n.value,
        "location": loc,
        "candidates": [[t, p] for t, p in n.candidates],
    }


def metrics_report_to_dict(report: MetricsReport, m: EventModel, tol: Tolerance) -> dict:
    return {
        "tool": "resil",
        "version": __version__,
        "input": model_to_dict(m),
        "tolerance": {
            "abs_tol": tol.abs_tol,
            "rel_tol": tol.rel_tol,
            "max_subdivisions": tol.max_subdivisions,
        },
        "metrics": {
            "area": report.area,
            "area_numeric": report.area_numeric,
            "area_discrepancy": report.area_discrepancy,
            "nadir": nadir_to_dict(report.nadir),
            "mean_outage_time": report.mean_outage_time,
            "mean_restore_time": report.mean_restore_time,
            "durations": dict(report.durations),
            "truncation_time": report.truncation_time,
        },
    }


def empirical_report_to_dict(report: EmpiricalReport, source: str) -> dict:
    return {
        "tool": "resil",
        "version": __version__,
        "input": {"data": source},
        "metrics": {k: _num(v) if isinstance(v, float) else v for k, v in vars(report).items()},
    }


def dumps(doc: dict) -> str:
    # float repr is the shortest string that round-trips (up to 17 digits)
    return json.dumps(doc, indent=2, allow_nan=False)
