"""Run configuration: nested dataclasses loaded from JSON.

Every section rejects unknown keys, every field is type-checked, and
``to_dict`` / ``from_dict`` round-trip exactly. Complex matrices are written as
``{"re": [[...]], "im": [[...]]}`` (``im`` may be omitted for real input).
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .master import WindowSpec
from .models import SCHEDULE_KINDS, Schedule
from .noise import NOISE_KINDS

OUTPUT_DIR_ENV = "LEVELGAS_OUTPUT_DIR"
SEED_MAX = 2**64


@dataclass
class ModelConfig:
    type: str = "ising"
    # ising: J is used when j_mode == "fixed", otherwise J ~ N(j_mean, j_std)
    j_mode: str = "fixed"
    J: float = 1.0
    j_mean: float = 0.0
    j_std: float = 1.0
    h1: float = 0.1
    h2: float = 0.2
    Z: float = 10.0
    # matrix: explicit H0 and Hb
    H0: dict | None = None
    Hb: dict | None = None

    def validate(self):
        if self.type not in ("ising", "matrix"):
            raise ConfigError(f"model.type must be 'ising' or 'matrix', got {self.type!r}")
        if self.j_mode not in ("fixed", "gaussian"):
            raise ConfigError(f"model.j_mode must be 'fixed' or 'gaussian', got {self.j_mode!r}")
        if self.j_std < 0:
            raise ConfigError("model.j_std must be >= 0")
        if self.type == "matrix":
            if self.H0 is None or self.Hb is None:
                raise ConfigError("model.type 'matrix' needs both H0 and Hb")
            h0, hb = matrix_from_json(self.H0, "model.H0"), matrix_from_json(self.Hb, "model.Hb")
            if h0.shape != hb.shape:
                raise ConfigError(f"model.H0 {h0.shape} and model.Hb {hb.shape} differ in shape")
        for name in ("J", "j_mean", "j_std", "h1", "h2", "Z"):
            _finite(getattr(self, name), f"model.{name}")


@dataclass
class ScheduleConfig:
    kind: str = "log"
    A: float = 1e-3
    B: float = 0.1
    t0: float = 10.1
    t1: float = 100.0
    log_base: str = "e"

    def validate(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigError(f"schedule.kind must be one of {SCHEDULE_KINDS}, got {self.kind!r}")
        try:
            self.build()
        except ValueError as exc:
            raise ConfigError(f"schedule: {exc}") from exc

    def build(self) -> Schedule:
        return Schedule(self.kind, self.A, self.B, self.t0, self.t1, self.log_base)


@dataclass
class NoiseConfig:
    kind: str = "none"
    sigma: float = 0.0
    gamma: float = 0.0

    def validate(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"noise.kind must be one of {NOISE_KINDS}, got {self.kind!r}")
        if self.sigma < 0 or self.gamma < 0:
            raise ConfigError("noise.sigma and noise.gamma must be >= 0")


@dataclass
class IntegratorConfig:
    method: str = "rk4"
    dt: float = 1e-3
    stride: int = 100
    max_rotation: float = 0.02
    floor: float = 1e-12
    strict: bool = True
    sign: float = 1.0

    def validate(self):
        if self.method not in ("rk4", "euler"):
            raise ConfigError(f"integrator.method must be 'rk4' or 'euler', got {self.method!r}")
        if not self.dt > 0:
            raise ConfigError("integrator.dt must be > 0")
        if self.stride < 1:
            raise ConfigError("integrator.stride must be >= 1")
        if self.max_rotation < 0 or self.floor <= 0:
            raise ConfigError("integrator.max_rotation must be >= 0 and integrator.floor > 0")
        if self.sign not in (1.0, -1.0):
            raise ConfigError("integrator.sign must be +1 or -1")


@dataclass
class Rho0Config:
    kind: str = "uniform"
    matrix: dict | None = None

    def validate(self):
        if self.kind not in ("uniform", "explicit"):
            raise ConfigError(f"rho0.kind must be 'uniform' or 'explicit', got {self.kind!r}")
        if self.kind == "explicit":
            if self.matrix is None:
                raise ConfigError("rho0.kind 'explicit' needs rho0.matrix")
            rho = matrix_from_json(self.matrix, "rho0.matrix")
            if abs(np.trace(rho) - 1) > 1e-9 or np.max(np.abs(rho - rho.conj().T)) > 1e-9:
                raise ConfigError("rho0.matrix must be Hermitian with unit trace")
            if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0] < -1e-9:
                raise ConfigError("rho0.matrix must be positive semidefinite")


@dataclass
class WindowConfig:
    epsilon: float | None = None
    mode: str = "index"
    drop_far_coherences: bool = False

    def validate(self):
        try:
            self.build()
        except ValueError as exc:
            raise ConfigError(f"window: {exc}") from exc

    def build(self) -> WindowSpec:
        return WindowSpec(self.epsilon, self.mode, self.drop_far_coherences)


@dataclass
class OracleConfig:
    entry_tol: float = 1e-4
    level_tol: float = 1e-5
    crossing_gap: float = 0.0

    def validate(self):
        if self.entry_tol < 0 or self.level_tol < 0 or self.crossing_gap < 0:
            raise ConfigError("oracle tolerances must be >= 0")


@dataclass
class OutputConfig:
    csv: str | None = None
    svg_dir: str | None = None
    report: str | None = None

    def validate(self):
        pass


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    schedule: ScheduleConfig = field(default_factory=ScheduleConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    rho0: Rho0Config = field(default_factory=Rho0Config)
    window: WindowConfig = field(default_factory=WindowConfig)
    oracle: OracleConfig = field(default_factory=OracleConfig)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0

    def validate(self) -> "RunConfig":
        if not 0 <= self.seed < SEED_MAX:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        for f in dataclasses.fields(self):
            section = getattr(self, f.name)
            if hasattr(section, "validate"):
                section.validate()
        if self.rho0.kind == "explicit":
            n = matrix_from_json(self.rho0.matrix, "rho0.matrix").shape[0]
            if n != self.dim:
                raise ConfigError(f"rho0.matrix is {n}x{n} but the model has dimension {self.dim}")
        return self

    @property
    def dim(self) -> int:
        if self.model.type == "ising":
            return 4
        return matrix_from_json(self.model.H0, "model.H0").shape[0]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def hash(self) -> str:
        """sha256 of the canonical JSON form (outputs excluded)."""
        d = self.to_dict()
        d.pop("outputs")
        canon = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        return _build(cls, data, "config").validate()


def _finite(value, name):
    if not math.isfinite(value):
        raise ConfigError(f"{name} must be finite")


def matrix_from_json(obj, name: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict) or "re" not in obj or set(obj) - {"re", "im"}:
        raise ConfigError(f"{name} must be an object with 're' and optional 'im'")
    try:
        re = np.array(obj["re"], dtype=float)
        im = np.array(obj.get("im", np.zeros_like(re)), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc
    if re.ndim != 2 or re.shape[0] != re.shape[1] or im.shape != re.shape:
        raise ConfigError(f"{name} must be square, got {re.shape} / {im.shape}")
    return re + 1j * im


def matrix_to_json(m) -> dict:
    m = np.asarray(m, dtype=complex)
    return {"re": m.real.tolist(), "im": m.imag.tolist()}


def _check_type(value, tp, path):
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin in (typing.Union, types.UnionType):
        if value is None and type(None) in args:
            return None
        inner = [a for a in args if a is not type(None)]
        return _check_type(value, inner[0], path)
    if tp is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{path} must be a boolean, got {value!r}")
        return value
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path} must be an integer, got {value!r}")
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path} must be a number, got {value!r}")
        return float(value)
    if tp is str:
        if not isinstance(value, str):
            raise ConfigError(f"{path} must be a string, got {value!r}")
        return value
    if tp is dict or origin is dict:
        if not isinstance(value, dict):
            raise ConfigError(f"{path} must be an object, got {value!r}")
        return value
    raise ConfigError(f"{path}: unsupported field type {tp}")


def _build(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must be an object, got {type(data).__name__}")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"unknown key(s) in {path}: {', '.join(unknown)}")
    kwargs = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        tp = hints[f.name]
        sub = f"{path}.{f.name}"
        if dataclasses.is_dataclass(tp):
            kwargs[f.name] = _build(tp, data[f.name], sub)
        else:
            kwargs[f.name] = _check_type(data[f.name], tp, sub)
    return cls(**kwargs)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data)


def save_config(cfg: RunConfig, path) -> None:
    Path(path).write_text(cfg.to_json() + "\n")


def _parse_value(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(cfg: RunConfig, overrides) -> RunConfig:
    """Return a new config with ``section.key=value`` overrides applied.

    Values are parsed as JSON when possible (``1e-3``, ``true``, ``null``),
    otherwise taken as strings.
    """
    data = cfg.to_dict()
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        parts = key.strip().split(".")
        node = data
        for p in parts[:-1]:
            if not isinstance(node.get(p), dict):
                raise ConfigError(f"override {key!r}: no section {p!r}")
            node = node[p]
        if parts[-1] not in node:
            raise ConfigError(f"override {key!r}: unknown key")
        node[parts[-1]] = _parse_value(text)
    return RunConfig.from_dict(data)


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "outputs"))


def resolve_output(path: str | None, default_name: str) -> Path:
    """Config paths are used as given; missing ones land in the default
    output directory."""
    if path:
        return Path(path)
    return default_output_dir() / default_name
