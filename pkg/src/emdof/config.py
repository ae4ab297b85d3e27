"""Declarative experiment configuration.

A config file (YAML or JSON) may be written flat::

    {L: 10, N: 20, D: 7, mode: scalar}

or in blocks::

    preset: fig5
    geometry: {L: 5, N: 11, D: {start: 1, stop: 13, step: 1}, grid: cell}
    mode: [one-transverse, two-transverse, full]
    sweep: {snr_db: "0:30:1", workers: 1}
    analysis: {threshold: 0.01, bandwidth: 1, normalization: trace, spectrum: full}

Ranges accept a number, a list, ``{start, stop, step}`` or ``"start:stop:step"``
(stop inclusive).  Keys given alongside a preset override the preset values.
"""

from __future__ import annotations

import copy
from pathlib import Path
from typing import Any, Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from .channel import NAMED_MODES, PolarizationMode
from .errors import ConfigError, EmdofError

PRESETS = ("fig2", "fig3a", "fig3b", "fig4", "fig5", "custom")

BLOCKS = {
    "geometry": ("L", "N", "D", "grid"),
    "mode": None,
    "sweep": ("snr_db", "workers", "saturation_N", "saturation_tolerance"),
    "analysis": ("threshold", "bandwidth", "normalization", "n_override", "spectrum"),
    "output": ("out", "format"),
}
FIELD_BLOCK = {f: b for b, fs in BLOCKS.items() if fs for f in fs}
FIELD_BLOCK["modes"] = "mode"


def parse_range(value, integer=False):
    """Expand a range spec into a list of numbers (stop inclusive)."""
    if isinstance(value, str) and ":" in value:
        parts = value.split(":")
        if len(parts) != 3:
            raise ValueError(f"range string must be 'start:stop:step', got {value!r}")
        value = dict(zip(("start", "stop", "step"), (float(p) for p in parts)))
    if isinstance(value, dict):
        extra = set(value) - {"start", "stop", "step"}
        if extra:
            raise ValueError(f"unexpected range keys {sorted(extra)}")
        start, stop = float(value["start"]), float(value["stop"])
        step = float(value.get("step", 1))
        if step <= 0:
            raise ValueError("range step must be positive")
        if stop < start:
            raise ValueError("range stop precedes start")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        out = [round(start + i * step, 12) for i in range(count)]
    elif isinstance(value, (list, tuple)):
        out = list(value)
    else:
        out = [value]
    if integer:
        conv = []
        for v in out:
            if isinstance(v, bool) or float(v) != int(float(v)):
                raise ValueError(f"expected an integer, got {v!r}")
            conv.append(int(float(v)))
        return conv
    return [float(v) for v in out]


def _check_increasing(values, name):
    if not values:
        raise ValueError(f"{name} range is empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} range must be strictly increasing")
    return values


def resolve_mode(spec) -> PolarizationMode:
    if isinstance(spec, PolarizationMode):
        return spec
    if isinstance(spec, str):
        try:
            return NAMED_MODES[spec]()
        except KeyError:
            raise ValueError(f"unknown mode {spec!r}; expected one of {sorted(NAMED_MODES)}") from None
    if isinstance(spec, dict):
        extra = set(spec) - {"kind", "source", "receiver"}
        if extra:
            raise ValueError(f"unexpected mode keys {sorted(extra)}")
        return PolarizationMode(
            spec.get("source", ("x", "y", "z")),
            spec.get("receiver", ("x", "y", "z")),
            spec.get("kind", "dyadic"),
        )
    raise ValueError(f"cannot interpret mode {spec!r}")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    preset: Literal["fig2", "fig3a", "fig3b", "fig4", "fig5", "custom"] = "custom"
    L: list[float]
    N: list[int]
    D: list[float]
    grid: Literal["cell", "edge"] = "cell"
    modes: list[Union[str, dict]] = ["scalar"]
    snr_db: Optional[list[float]] = None
    bandwidth: float = 1.0
    threshold: float = 1e-2
    normalization: Literal["trace", "none"] = "trace"
    n_override: Optional[int] = None
    spectrum: Literal["full", "edof"] = "full"
    workers: int = 1
    saturation_N: Optional[list[int]] = None
    saturation_tolerance: float = 0.05
    out: Optional[str] = None
    format: Literal["csv", "json"] = "csv"

    @field_validator("L", "D", "snr_db", mode="before")
    @classmethod
    def _float_range(cls, v):
        return None if v is None else parse_range(v)

    @field_validator("N", "saturation_N", mode="before")
    @classmethod
    def _int_range(cls, v):
        return None if v is None else parse_range(v, integer=True)

    @field_validator("modes", mode="before")
    @classmethod
    def _modes(cls, v):
        v = v if isinstance(v, list) else [v]
        for m in v:
            resolve_mode(m)
        return v

    @field_validator("L", "D")
    @classmethod
    def _positive_increasing(cls, v, info):
        _check_increasing(v, info.field_name)
        if any(not np.isfinite(x) or x <= 0 for x in v):
            raise ValueError("values must be positive")
        return v

    @field_validator("N", "saturation_N")
    @classmethod
    def _counts(cls, v, info):
        if v is None:
            return v
        _check_increasing(v, info.field_name)
        if any(x < 1 for x in v):
            raise ValueError("element counts must be >= 1")
        return v

    @field_validator("snr_db")
    @classmethod
    def _snr(cls, v):
        return v if v is None else _check_increasing(v, "snr_db")

    @field_validator("bandwidth")
    @classmethod
    def _bw(cls, v):
        if not v > 0:
            raise ValueError("bandwidth must be positive")
        return v

    @field_validator("threshold", "saturation_tolerance")
    @classmethod
    def _unit_interval(cls, v):
        if not 0 < v < 1:
            raise ValueError("must lie strictly between 0 and 1")
        return v

    @field_validator("n_override", "workers")
    @classmethod
    def _pos_int(cls, v):
        if v is not None and v < 1:
            raise ValueError("must be >= 1")
        return v

    @model_validator(mode="after")
    def _preset_shape(self):
        if self.preset == "fig2" and (len(self.L), len(self.N), len(self.D)) != (1, 1, 1):
            raise ValueError("fig2 takes a single geometry point (one L, N and D)")
        if self.preset == "fig2" and not self.snr_db:
            raise ValueError("fig2 needs an snr_db range")
        return self

    @property
    def polarization_modes(self) -> list[PolarizationMode]:
        return [resolve_mode(m) for m in self.modes]

    def to_dict(self) -> dict:
        """Block-structured form; ``parse_mapping(cfg.to_dict()) == cfg``."""
        d = self.model_dump()
        out = {"preset": d.pop("preset")}
        out["mode"] = d.pop("modes")
        for block, fields in BLOCKS.items():
            if fields:
                out[block] = {f: d.pop(f) for f in fields}
        assert not d, d
        return out


PRESET_DEFAULTS = {
    "fig2": dict(L=[10.0], N=[20], D=[7.0], modes=["scalar"],
                 snr_db=parse_range("0:30:1")),
    "fig3a": dict(L=[10.0], N=parse_range("2:30:1", True), D=[1.0, 4.0, 7.0, 10.0, 13.0],
                  modes=["scalar"], spectrum="edof"),
    "fig3b": dict(L=[10.0], N=parse_range("2:30:1", True), D=[1.0, 4.0, 7.0, 10.0, 13.0],
                  modes=["full"], spectrum="edof"),
    # L = 5 is an equally plausible side length for this comparison; L stays overridable
    "fig4": dict(L=[10.0], N=[20], D=parse_range("1:13:1"), modes=["scalar"],
                 saturation_N=parse_range("2:20:1", True)),
    "fig5": dict(L=[5.0], N=[11], D=parse_range("1:13:1"),
                 modes=["one-transverse", "two-transverse", "full"]),
}


def _flatten(raw: dict) -> tuple[dict, list]:
    """Merge block-structured keys into flat model fields."""
    problems = []
    flat = {}
    for key, val in raw.items():
        if key == "mode" or key == "modes":
            flat["modes"] = val
        elif key in BLOCKS and BLOCKS[key]:
            if not isinstance(val, dict):
                problems.append((key, "expected a mapping"))
                continue
            for sub, v in val.items():
                if sub not in BLOCKS[key]:
                    problems.append((f"{key}.{sub}", "unknown field"))
                else:
                    flat[sub] = v
        else:
            flat[key] = val
    return flat, problems


def _field_path(loc) -> str:
    parts = [str(p) for p in loc]
    if parts and parts[0] in FIELD_BLOCK:
        parts[0] = f"{FIELD_BLOCK[parts[0]]}.{parts[0]}"
    return ".".join(parts)


def parse_mapping(raw: dict) -> tuple[ExperimentConfig, dict]:
    """Validate a config mapping; returns the config and merge metadata."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping")
    if "config" in raw and isinstance(raw["config"], dict) and "conventions" in raw:
        raw = raw["config"]  # metadata sidecar written by a previous run
    flat, problems = _flatten(raw)
    if problems:
        raise ConfigError(problems)
    preset = flat.get("preset", "custom")
    merged = {}
    if preset in PRESET_DEFAULTS:
        merged.update(copy.deepcopy(PRESET_DEFAULTS[preset]))
    overridden = sorted(k for k in flat if k != "preset" and k in merged)
    merged.update(flat)
    try:
        cfg = ExperimentConfig(**merged)
    except ValidationError as exc:
        raise ConfigError(
            [(_field_path(e["loc"]), e["msg"]) for e in exc.errors()]
        ) from None
    return cfg, {"preset": preset, "overridden": overridden}


def load_mapping(path) -> dict:
    path = Path(path)
    with open(path) as fh:
        try:
            raw = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError([(str(path), f"not valid YAML/JSON: {exc}")]) from None
    return raw if raw is not None else {}


def parse_config(path) -> ExperimentConfig:
    cfg, _ = parse_mapping(load_mapping(path))
    return cfg


def apply_overrides(raw: dict, overrides: list[str]) -> dict:
    """Apply ``key=value`` overrides; dotted keys address blocks (``geometry.D=1:5:1``)."""
    raw = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ConfigError([(item, "override must look like key=value")])
        key, text = item.split("=", 1)
        value: Any = text if ":" in text and not text.strip().startswith(("{", "[")) else yaml.safe_load(text)
        target = raw
        parts = key.strip().split(".")
        for p in parts[:-1]:
            target = target.setdefault(p, {})
            if not isinstance(target, dict):
                raise ConfigError([(key, "cannot override inside a non-mapping")])
        target[parts[-1]] = value
    return raw


__all__ = [
    "ExperimentConfig", "parse_config", "parse_mapping", "load_mapping", "apply_overrides",
    "parse_range", "resolve_mode", "PRESETS", "PRESET_DEFAULTS", "ConfigError", "EmdofError",
]
