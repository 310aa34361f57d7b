"""Run configuration: typed parameter schemas, presets and config files.

A config file is flat ``key = value`` text; values are Python literals
(``1e-4``, ``[0, 0, 0.1, 0.1]``, ``"total"``, ``true``) and ``#`` starts a
comment.  Values are coerced to the schema type of their key; unknown keys
are rejected.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from .errors import ValidationError

DEFAULT_SEED = 1


def _to_bool(v) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, str) and v.strip().lower() in ("true", "yes", "1", "on"):
        return True
    if isinstance(v, str) and v.strip().lower() in ("false", "no", "0", "off"):
        return False
    if isinstance(v, int) and v in (0, 1):
        return bool(v)
    raise ValueError(f"not a boolean: {v!r}")


def _to_int(v) -> int:
    if isinstance(v, bool):
        raise ValueError("boolean given for integer")
    if isinstance(v, float):
        if not v.is_integer():
            raise ValueError(f"not an integer: {v!r}")
        return int(v)
    if isinstance(v, str):
        v = _literal(v)
        if isinstance(v, str):
            raise ValueError(f"not an integer: {v!r}")
        return _to_int(v)
    return int(v)


def _to_float(v) -> float:
    if isinstance(v, bool):
        raise ValueError("boolean given for float")
    if isinstance(v, str):
        v = _literal(v)
        if isinstance(v, str):
            raise ValueError(f"not a number: {v!r}")
    return float(v)


def _to_floats(v) -> tuple:
    if isinstance(v, str):
        v = v.strip()
        if not v:
            return ()
        parsed = _literal(v)
        v = parsed if not isinstance(parsed, str) else [p for p in v.split(",") if p.strip()]
    if isinstance(v, (int, float)):
        v = [v]
    return tuple(_to_float(x) for x in v)


def _to_str(v) -> str:
    return v if isinstance(v, str) else str(v)


def _literal(text: str):
    text = text.strip()
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        return text


COERCE: dict[str, Callable[[Any], Any]] = {
    "int": _to_int, "float": _to_float, "bool": _to_bool, "str": _to_str, "floats": _to_floats,
}


@dataclass(frozen=True)
class Param:
    kind: str
    default: Any
    help: str = ""
    choices: tuple | None = None


SCHEMAS: dict[str, dict[str, Param]] = {
    "decay": {
        "N": Param("int", 100, "number of band levels"),
        "recurrence": Param("float", 300.0, "recurrence time 2*pi/spacing of the band"),
        "zeno": Param("float", 7.0, "Zeno time fixing the constant coupling"),
        "omega": Param("float", 0.0, "energy of the excited level"),
        "t_max": Param("float", 600.0, "last time point"),
        "n_times": Param("int", 6001, "number of time points"),
    },
    "special": {
        "n": Param("int", 10, "number of excited levels"),
        "N": Param("int", 100, "number of band levels"),
        "t0": Param("float", 16.0, "time at which special states are selected"),
        "recurrence": Param("float", 300.0, "band recurrence time 2*pi/spacing"),
        "coupling": Param("float", 0.0456, "coupling strength"),
        "channels": Param("int", 5, "number of distinct coupling rows"),
        "random_phases": Param("bool", False, "multiply couplings by random phases"),
        "epsilon": Param("float", 0.1, "distance from 0/1 counted as clustered"),
        "t_max": Param("float", 40.0, "last time point"),
        "n_times": Param("int", 401, "number of time points"),
    },
    "catmap": {
        "n_points": Param("int", 250, "number of gas particles"),
        "grains": Param("int", 100, "number of coarse grains"),
        "T": Param("int", 19, "steps between the two boundary times"),
        "horizon": Param("int", 19, "last time of the entropy traces"),
        "initial_box": Param("floats", (0.0, 0.0, 0.1, 0.1), "x0,y0,x1,y1 of the initial box"),
        "final_box": Param("floats", (0.0, 0.0, 0.1, 0.1), "x0,y0,x1,y1 of the final box"),
        "snapshot_times": Param("floats", (0, 1, 2, 4, 5, 8, 11, 14, 15, 17, 18, 19),
                                "times written to snapshots.csv"),
        "budget": Param("int", 10_000_000, "candidate budget"),
    },
    "kicks": {
        "task": Param("str", "probs", "what to compute",
                      ("probs", "expectation", "selfavg", "optimize")),
        "a": Param("float", 1e-4, "Cauchy scale"),
        "theta_min": Param("float", 0.0, "first entry angle (rad)"),
        "theta_max": Param("float", math.pi, "last entry angle (rad)"),
        "n_theta": Param("int", 181, "number of entry angles"),
        "method": Param("str", "closed", "expectation method", ("closed", "series")),
        "n_max": Param("int", 1_000_000, "series cutoff"),
        "batch": Param("int", 100, "draws averaged per mean"),
        "repeats": Param("int", 10_000, "number of means"),
        "distribution": Param("str", "cauchy", "kick law for selfavg", ("cauchy", "gaussian")),
        "mode": Param("str", "sorted", "angle objective", ("sorted", "total")),
        "grid_points": Param("int", 1801, "angle grid for optimisation"),
    },
    "fields": {
        "s": Param("float", 1.5e-3, "half separation of the wires (m)"),
        "L": Param("float", 0.035, "length of the straight wires (m)"),
        "I": Param("float", 10.0, "current (A)"),
        "z": Param("float", 2e-3, "trajectory height (m)"),
        "x": Param("float", 0.0, "transverse offset (m)"),
        "y_min": Param("float", -0.04, "first y sample (m)"),
        "y_max": Param("float", 0.0, "last y sample (m)"),
        "n_y": Param("int", 161, "number of y samples"),
        "n_nodes": Param("int", 10_000, "quadrature intervals per contour piece"),
        "delta_t": Param("float", 1e-6, "kick duration for the field estimate (s)"),
        "photon_delta_t": Param("float", 1e-16, "kick duration for the photon estimate (s)"),
        "length": Param("float", 0.1, "spatial scale for the electric field (m)"),
        "velocity": Param("float", 1e3, "atom speed (m/s)"),
    },
}

PRESETS: dict[str, tuple[str, dict]] = {
    "fig1": ("decay", {}),
    "fig2": ("special", {}),
    "fig3-5": ("catmap", {}),
    "fig6": ("catmap", {"snapshot_times": (), "horizon": 40}),
    "angle-scan": ("kicks", {"task": "probs"}),
    "field-profile": ("fields", {}),
}


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)
    seed: int = DEFAULT_SEED
    out: Path = Path("out")

    def manifest(self) -> dict:
        return {"subcommand": self.subcommand, "seed": self.seed,
                "params": {k: _jsonable(v) for k, v in sorted(self.params.items())}}


def _jsonable(v):
    return list(v) if isinstance(v, tuple) else v


def coerce(subcommand: str, key: str, value):
    schema = SCHEMAS[subcommand]
    if key not in schema:
        raise ValidationError(f"unknown parameter {key!r} for {subcommand!r}")
    p = schema[key]
    try:
        v = COERCE[p.kind](value)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad value for {key!r}: {exc}") from exc
    if p.choices and v not in p.choices:
        raise ValidationError(f"{key!r} must be one of {p.choices}, got {v!r}")
    return v


def defaults(subcommand: str) -> dict:
    if subcommand not in SCHEMAS:
        raise ValidationError(f"unknown subcommand {subcommand!r}")
    return {k: p.default for k, p in SCHEMAS[subcommand].items()}


def preset(name: str, *, seed: int = DEFAULT_SEED, out: Path | str = "out") -> RunConfig:
    """Parameter set reproducing one of the figures (``fig1``, ``fig2``, ...)."""
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; known: {', '.join(PRESETS)}")
    sub, overrides = PRESETS[name]
    params = defaults(sub)
    params.update({k: coerce(sub, k, v) for k, v in overrides.items()})
    return RunConfig(sub, params, seed, Path(out))


def read_config_file(path: str | Path) -> dict:
    """Parse ``key = value`` lines into a dict of raw (uncoerced) values."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key] = _literal(value)
    return out


def resolve(subcommand: str, *, preset_name: str | None = None, config_file=None,
            overrides: dict | None = None, seed: int | None = None,
            out: Path | str = "out") -> RunConfig:
    """Merge defaults < preset < config file < overrides into a :class:`RunConfig`."""
    if preset_name is not None:
        cfg = preset(preset_name, out=out)
        if cfg.subcommand != subcommand:
            raise ValidationError(f"preset {preset_name!r} belongs to {cfg.subcommand!r}")
        params = cfg.params
    else:
        params = defaults(subcommand)
    layered = dict(read_config_file(config_file)) if config_file else {}
    file_seed = layered.pop("seed", None)
    layered.update(overrides or {})
    for k, v in layered.items():
        params[k] = coerce(subcommand, k, v)
    if seed is None:
        seed = DEFAULT_SEED if file_seed is None else file_seed
    try:
        seed = _to_int(seed)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad seed: {exc}") from exc
    if not 0 <= seed < 2**64:
        raise ValidationError("seed must be a 64-bit unsigned integer")
    return RunConfig(subcommand, params, seed, Path(out))
