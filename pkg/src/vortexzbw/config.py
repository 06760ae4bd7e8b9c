"""Run configuration: a small `key [unit] value` text format.

Every key carries its unit string explicitly and the parser insists on
an exact match, so a config file documents its own unit conventions and
cannot silently mix them.  Momentum-space keys are in inverse reduced
Compton wavelengths, lengths in reduced Compton wavelengths, times in
hbar/(m c^2).  Example:

    # packet
    ell       [1]         2
    k_r       [1/compton] 0.04
    w0        [compton]   40
    t_max     [hbar/mc2]  11.0

Unknown keys, duplicate keys, malformed lines, and wrong unit strings
all raise ConfigError.  Keys not present fall back to defaults.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass, fields

from .errors import ConfigError
from .packet import BGParams

__all__ = ["RunConfig", "parse_config", "load_config", "render_config"]

_LINE = re.compile(r"^(?P<key>[A-Za-z_][A-Za-z0-9_]*)\s+\[(?P<unit>[^\]]*)\]\s+(?P<value>\S.*)$")

# key -> (unit string, parser id)
_SCHEMA = {
    "ell": ("1", "int"),
    "k_r": ("1/compton", "float"),
    "w0": ("compton", "float"),
    "sigma_z": ("compton", "float"),
    "k0z": ("1/compton", "float"),
    "z0": ("compton", "float"),
    "t_max": ("hbar/mc2", "float"),
    "n_samples": ("1", "int"),
    "eps_trunc": ("1", "float"),
    "eps_conv": ("1", "float"),
    "fit_tol": ("1", "float"),
    "sweep_ell": ("1", "int_list"),
    "units": ("name", "str"),
    "out_dir": ("path", "str"),
}

_UNIT_NAMES = ("natural", "electron_si")


@dataclass(frozen=True)
class RunConfig:
    ell: int = 1
    k_r: float = 0.04
    w0: float = 40.0
    sigma_z: float = 40.0
    k0z: float = 0.05
    z0: float = 0.0
    t_max: float = 11.0
    n_samples: int = 168
    eps_trunc: float = 1e-10
    eps_conv: float = 1e-8
    fit_tol: float = 1e-10
    sweep_ell: tuple = (0, 16, 32, 64, 128, 256)
    units: str = "natural"
    out_dir: str = "out"

    def to_params(self) -> BGParams:
        return BGParams(
            ell=self.ell,
            k_r=self.k_r,
            w0=self.w0,
            sigma_z=self.sigma_z,
            k0z=self.k0z,
            z0=self.z0,
        )

    def content_hash(self) -> str:
        """sha256 of the canonical key=value rendering (sorted keys)."""
        parts = []
        for f in sorted(fields(self), key=lambda f: f.name):
            parts.append(f"{f.name}={getattr(self, f.name)!r}")
        return hashlib.sha256(";".join(parts).encode("utf-8")).hexdigest()


def _parse_int(key: str, raw: str) -> int:
    try:
        return int(raw, 10)
    except ValueError:
        raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None


def _parse_float(key: str, raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite, got {raw!r}")
    return value


def _parse_value(key: str, kind: str, raw: str):
    if kind == "int":
        return _parse_int(key, raw)
    if kind == "float":
        return _parse_float(key, raw)
    if kind == "int_list":
        items = [s.strip() for s in raw.split(",") if s.strip()]
        if not items:
            raise ConfigError(f"{key}: expected a comma-separated integer list")
        return tuple(_parse_int(key, s) for s in items)
    return raw.strip()


def _validate(cfg: RunConfig) -> RunConfig:
    if cfg.ell < 0:
        raise ConfigError("ell must be >= 0")
    if cfg.k_r < 0:
        raise ConfigError("k_r must be >= 0")
    for name in ("w0", "sigma_z"):
        if getattr(cfg, name) <= 0:
            raise ConfigError(f"{name} must be positive")
    if cfg.t_max <= 0:
        raise ConfigError("t_max must be positive")
    for name in ("eps_trunc", "eps_conv", "fit_tol"):
        v = getattr(cfg, name)
        if not (0.0 < v <= 1e-2):
            raise ConfigError(f"{name} must lie in (0, 1e-2]")
    min_samples = int(math.ceil(32.0 * cfg.t_max / math.pi))
    if cfg.n_samples < min_samples:
        raise ConfigError(
            f"n_samples={cfg.n_samples} undersamples the trembling period; "
            f"need at least {min_samples} for t_max={cfg.t_max:g}"
        )
    if any(l < 0 for l in cfg.sweep_ell):
        raise ConfigError("sweep_ell entries must be >= 0")
    if cfg.units not in _UNIT_NAMES:
        raise ConfigError(f"units must be one of {_UNIT_NAMES}, got {cfg.units!r}")
    if not cfg.out_dir:
        raise ConfigError("out_dir must be nonempty")
    return cfg


def parse_config(text: str) -> RunConfig:
    """Parse config text; missing keys take their defaults."""
    values = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if m is None:
            raise ConfigError(f"line {lineno}: expected 'key [unit] value', got {rawline!r}")
        key, unit, raw = m.group("key"), m.group("unit"), m.group("value")
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        want_unit, kind = _SCHEMA[key]
        if unit != want_unit:
            raise ConfigError(
                f"line {lineno}: key {key!r} must carry unit [{want_unit}], got [{unit}]"
            )
        values[key] = _parse_value(key, kind, raw)
    return _validate(RunConfig(**values))


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config(text)


def render_config(cfg: RunConfig) -> str:
    """Render a config back to its text form (defaults included)."""
    lines = []
    for key, (unit, kind) in _SCHEMA.items():
        value = getattr(cfg, key)
        if kind == "int_list":
            value = ",".join(str(v) for v in value)
        lines.append(f"{key} [{unit}] {value}")
    return "\n".join(lines) + "\n"
