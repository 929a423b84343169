"""JSON configuration schema for systems and service laws."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import AoifError, ConfigError
from .model import SourceSpec, SystemSpec, preset_preemption
from .phase_type import (PHDistribution, erlang, exponential, hyperexp_balanced,
                         ph_fit_two_moments)


def _require(obj, key, path):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    if key not in obj:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required key")
    return obj[key]


def _number(obj, key, path):
    val = _require(obj, key, path)
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {val!r}")
    return float(val)


def parse_service(obj, path: str = "service") -> PHDistribution:
    kind = _require(obj, "type", path)
    try:
        if kind == "erlang":
            order = _require(obj, "order", path)
            if isinstance(order, bool) or not isinstance(order, int):
                raise ConfigError(f"{path}.order", "expected an integer")
            return erlang(_number(obj, "mean", path), order)
        if kind == "exponential":
            return exponential(_number(obj, "rate", path))
        if kind == "hyperexp_balanced":
            return hyperexp_balanced(_number(obj, "mean", path), _number(obj, "scv", path))
        if kind == "fit":
            return ph_fit_two_moments(_number(obj, "mean", path), _number(obj, "scv", path))
        if kind == "ph":
            sigma = np.asarray(_require(obj, "sigma", path), dtype=float)
            S = np.asarray(_require(obj, "S", path), dtype=float)
            return PHDistribution(sigma, S)
    except ConfigError as exc:
        if exc.path.startswith(path):
            raise
        raise ConfigError(f"{path}.{exc.path}" if exc.path else path, str(exc).split(": ", 1)[-1]) from exc
    except (AoifError, ValueError, TypeError) as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(f"{path}.type", f"unknown service type {kind!r}")


def service_to_dict(dist: PHDistribution) -> dict:
    return {"type": "ph", "sigma": dist.sigma.tolist(), "S": dist.S.tolist()}


def parse_system(obj) -> SystemSpec:
    sources_obj = _require(obj, "sources", "")
    if not isinstance(sources_obj, list) or not sources_obj:
        raise ConfigError("sources", "expected a non-empty list")
    sources = []
    for i, s in enumerate(sources_obj):
        path = f"sources[{i}]"
        service = parse_service(_require(s, "service", path), f"{path}.service")
        sources.append(SourceSpec(
            lam=_number(s, "lambda", path),
            service=service,
            error_prob=_number(s, "error_prob", path) if "error_prob" in s else 0.0,
            retx_prob=_number(s, "retx_prob", path) if "retx_prob" in s else 0.0,
        ))
    N = len(sources)
    pre = obj.get("preemption", {"preset": "non_preemptive"})
    if isinstance(pre, dict):
        P = preset_preemption(_require(pre, "preset", "preemption"), N)
    else:
        try:
            P = np.asarray(pre, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ConfigError("preemption", "expected a numeric matrix or a preset object") from exc
    tagged = obj.get("tagged", 1)
    if isinstance(tagged, bool) or not isinstance(tagged, int):
        raise ConfigError("tagged", "expected an integer source index")
    return SystemSpec(tuple(sources), P, tagged)


def load_system(path) -> SystemSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read config {path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON in {path}: {exc}") from exc
    return parse_system(obj)


def system_to_dict(system: SystemSpec) -> dict:
    return {
        "sources": [{"lambda": s.lam, "service": service_to_dict(s.service),
                     "error_prob": s.error_prob, "retx_prob": s.retx_prob} for s in system.sources],
        "preemption": system.preemption.tolist(),
        "tagged": system.tagged,
    }
