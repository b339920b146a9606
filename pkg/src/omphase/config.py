"""Plain-text config files: ``key = value`` lines with unit suffixes.

``#`` starts a comment.  Keys match dataclass field names.  Dimensional
values carry a mandatory unit suffix: frequencies and rates take one of
``hz``, ``khz``, ``mhz``, ``ghz`` (converted to angular rad/s) or
``rad_s`` (passed through); durations take ``s``, ``ms``, ``us``, or
``ns``.  Dimensionless values are bare numbers.  Example::

    omega_m = 10 mhz
    kappa   = 1 mhz          # converted to 2*pi*1e6 rad/s
    g0      = 100 hz
    photon_number = 1e10
    kind    = parametric
    gamma_L = 1 khz
    gamma_c = 0.5 mhz
"""

from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataFormatError
from .params import NoiseModel, SystemParams

__all__ = [
    "parse_config",
    "load_config",
    "build_system",
    "build_noise",
    "load_noise_table",
]

_TWO_PI = 2.0 * math.pi

FREQ_SUFFIXES = {
    "hz": _TWO_PI,
    "khz": _TWO_PI * 1e3,
    "mhz": _TWO_PI * 1e6,
    "ghz": _TWO_PI * 1e9,
    "rad_s": 1.0,
}

TIME_SUFFIXES = {
    "s": 1.0,
    "ms": 1e-3,
    "us": 1e-6,
    "ns": 1e-9,
}

# keys holding angular frequencies / rates (rad/s after parsing)
RATE_KEYS = frozenset(
    {
        "omega_m",
        "kappa",
        "g0",
        "delta",
        "gamma_m",
        "gamma_L",
        "gamma_c",
        "drive_amplitude",
        "omega_min",
        "omega_max",
        "band_lo",
        "band_hi",
    }
)

# keys holding durations (seconds after parsing)
TIME_KEYS = frozenset({"dt", "t_end", "t_start", "max_lag", "burn_in"})

_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _parse_value(key: str, rhs: str, lineno: int):
    parts = rhs.split()
    if not parts:
        raise ConfigError(f"{key!r} has no value", line=lineno)
    if key in RATE_KEYS or key in TIME_KEYS:
        table = FREQ_SUFFIXES if key in RATE_KEYS else TIME_SUFFIXES
        if key == "delta" and len(parts) == 1 and parts[0].lower() == "op":
            return None  # optimal-detuning default
        if key == "gamma_c" and len(parts) == 1 and parts[0].lower() in ("inf", "white"):
            return math.inf
        if len(parts) != 2:
            raise ConfigError(
                f"{key!r} is dimensional and needs '<number> <unit>' with unit in "
                f"{sorted(table)}",
                line=lineno,
            )
        num, suffix = parts
        scale = table.get(suffix.lower())
        if scale is None:
            raise ConfigError(
                f"unknown unit {suffix!r} for {key!r}; expected one of {sorted(table)}",
                line=lineno,
            )
        try:
            value = float(num)
        except ValueError:
            raise ConfigError(f"bad number {num!r} for {key!r}", line=lineno)
        if math.isinf(value):
            return value
        return value * scale
    if len(parts) != 1:
        raise ConfigError(f"{key!r} takes a single value, got {rhs!r}", line=lineno)
    token = parts[0]
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    if token.lower() in ("true", "false"):
        return token.lower() == "true"
    return token


def parse_config(text: str) -> dict:
    """Parse config text into a {key: value} dict with units resolved."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=lineno)
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        if not _KEY_RE.fullmatch(key):
            raise ConfigError(f"bad key {key!r}", line=lineno)
        if key in out:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        out[key] = _parse_value(key, rhs, lineno)
    return out


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())


def build_system(cfg: dict) -> SystemParams:
    """SystemParams from a parsed config dict."""
    missing = [k for k in ("omega_m", "kappa", "g0") if cfg.get(k) is None]
    if missing:
        raise ConfigError(f"missing required keys: {', '.join(missing)}")
    kwargs = {}
    for k in (
        "omega_m",
        "kappa",
        "g0",
        "delta",
        "drive_amplitude",
        "photon_number",
        "gamma_m",
    ):
        if cfg.get(k) is not None:
            kwargs[k] = cfg[k]
    return SystemParams(**kwargs)


def build_noise(cfg: dict, base_dir=None) -> NoiseModel:
    """NoiseModel from a parsed config dict.

    `kind` is one of parametric, white, tabulated (default parametric;
    an infinite gamma_c also selects white).  Tabulated models name a
    CSV file in `table`, resolved against `base_dir` when relative.
    """
    kind = cfg.get("kind", "parametric")
    if kind == "white":
        return NoiseModel.white(cfg.get("gamma_L", 0.0))
    if kind == "parametric":
        gamma_L = cfg.get("gamma_L", 0.0)
        gamma_c = cfg.get("gamma_c", math.inf)
        if math.isinf(gamma_c):
            return NoiseModel.white(gamma_L)
        return NoiseModel.parametric(gamma_L, gamma_c)
    if kind == "tabulated":
        path = cfg.get("table")
        if path is None:
            raise ConfigError("tabulated noise requires 'table = <csv path>'")
        p = Path(path)
        if base_dir is not None and not p.is_absolute():
            p = Path(base_dir) / p
        omegas, values = load_noise_table(p)
        return NoiseModel.tabulated(omegas, values)
    raise ConfigError(f"unknown noise kind {kind!r}")


def load_noise_table(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a tabulated spectrum CSV with columns (omega_rad_s, s_phidot)."""
    try:
        arr = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except OSError:
        raise
    except ValueError as exc:
        raise DataFormatError(f"{path}: {exc}")
    if arr.shape[1] != 2:
        raise DataFormatError(
            f"{path}: expected 2 columns (omega_rad_s, s_phidot), got {arr.shape[1]}"
        )
    return arr[:, 0], arr[:, 1]
