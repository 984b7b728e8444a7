"""Run configuration: defaults < key=value file < GHOSTFOCK_* environment < flags."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .errors import BadParams
from .fock import FockConfig

ENV_PREFIX = "GHOSTFOCK_"


def parse_values(text: str) -> list[float]:
    """``"0.1,0.2,0.5"`` or ``"lo:hi:n"`` (n evenly spaced points, inclusive)."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, n = text.split(":")
            return [float(v) for v in np.linspace(float(lo), float(hi), int(n))]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise BadParams(f"cannot parse value list {text!r}") from exc


@dataclass(frozen=True)
class RunConfig:
    cutoff: int = 40
    buffer: int = 10
    leak_tolerance: float = 1e-10
    s_range: str = "0.01,0.05,0.09,0.2,0.35,0.5,0.75"
    r_range: str = "0,0.01,0.1,0.5,0.9,1"
    frames: int = 1_000_000
    seed: int = 7
    snr_variant: str = "shared_bucket_difference"
    output_dir: str = "ghostfock-out"

    def __post_init__(self):
        if self.cutoff < 1 or self.buffer < 0 or self.leak_tolerance <= 0:
            raise BadParams("cutoff >= 1, buffer >= 0 and leak_tolerance > 0 are required")
        if not parse_values(self.s_range) or not parse_values(self.r_range):
            raise BadParams("s_range and r_range must be nonempty")
        if self.frames < 1:
            raise BadParams("frames must be >= 1")

    @property
    def fock(self) -> FockConfig:
        return FockConfig(self.cutoff, self.buffer, self.leak_tolerance)

    @property
    def s_values(self) -> list[float]:
        return parse_values(self.s_range)

    @property
    def r_values(self) -> list[float]:
        return parse_values(self.r_range)

    @property
    def out(self) -> Path:
        path = Path(self.output_dir)
        path.mkdir(parents=True, exist_ok=True)
        return path

    def updated(self, values: dict) -> "RunConfig":
        """Return a copy with string or typed ``values`` coerced to field types."""
        types = {f.name: type(f.default) for f in fields(self)}
        clean = {}
        for key, val in values.items():
            if val is None:
                continue
            if key not in types:
                raise BadParams(f"unknown config key {key!r}")
            try:
                clean[key] = types[key](val)
            except ValueError as exc:
                raise BadParams(f"bad value for {key}: {val!r}") from exc
        return replace(self, **clean)


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise BadParams(f"{path}:{lineno}: expected key=value")
        key, val = line.split("=", 1)
        values[key.strip()] = val.strip()
    return values


def env_overrides(environ=os.environ) -> dict[str, str]:
    names = {f.name for f in fields(RunConfig)}
    out = {}
    for key, val in environ.items():
        if key.startswith(ENV_PREFIX):
            name = key[len(ENV_PREFIX):].lower()
            if name in names:
                out[name] = val
    return out


def load_config(path: str | None = None, flags: dict | None = None, environ=os.environ) -> RunConfig:
    cfg = RunConfig()
    if path:
        cfg = cfg.updated(read_config_file(path))
    cfg = cfg.updated(env_overrides(environ))
    return cfg.updated(flags or {})
