"""Physical parameters and noise models shared by every other module.

All frequencies and rates are angular (rad/s) throughout the package.
The CLI converts from Hz at the boundary; nothing below it multiplies
by 2*pi.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousParameterError,
    InvalidParameterError,
    RegimeError,
    StabilityError,
)

__all__ = [
    "NoiseModel",
    "SystemParams",
    "ValidationReport",
    "validate",
    "check_regime",
]

PARAMETRIC = "parametric"
TABULATED = "tabulated"


def _positive_finite(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InvalidParameterError(f"{name} must be a number, got {value!r}")
    if not math.isfinite(v) or v <= 0:
        raise InvalidParameterError(f"{name} must be positive and finite, got {v!r}")
    return v


@dataclass(frozen=True, eq=False)
class NoiseModel:
    """Two-sided spectrum of the laser frequency noise, S_phidot(Omega).

    The parametric model is the Lorentzian

        S_phidot(Omega) = 2 * gamma_L * gamma_c**2 / (gamma_c**2 + Omega**2)

    with zero-frequency value 2*gamma_L and equal-time variance
    {phidot^2} = gamma_L * gamma_c.  ``gamma_c = math.inf`` is the
    white-noise sentinel, S_phidot = 2*gamma_L at every frequency;
    analytic code branches on `is_white` instead of evaluating the
    Lorentzian at infinity.

    Tabulated models store (Omega, S) pairs for Omega >= 0, interpolate
    linearly in between, and return 0 outside the tabulated range.
    """

    kind: str
    gamma_L: float = 0.0
    gamma_c: float = math.inf
    table_omega: np.ndarray | None = None
    table_value: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in (PARAMETRIC, TABULATED):
            raise InvalidParameterError(f"unknown noise kind {self.kind!r}")
        if self.kind == PARAMETRIC:
            gl = float(self.gamma_L)
            gc = float(self.gamma_c)
            if not math.isfinite(gl) or gl < 0:
                raise InvalidParameterError(f"gamma_L must be >= 0, got {gl!r}")
            if math.isnan(gc) or gc <= 0:
                raise InvalidParameterError(
                    f"gamma_c must be > 0 (math.inf for white noise), got {gc!r}"
                )
            object.__setattr__(self, "gamma_L", gl)
            object.__setattr__(self, "gamma_c", gc)
        else:
            om = np.array(self.table_omega, dtype=float, copy=True)
            sv = np.array(self.table_value, dtype=float, copy=True)
            if om.ndim != 1 or om.shape != sv.shape or om.size < 2:
                raise InvalidParameterError(
                    "tabulated model needs two matching 1-d arrays of length >= 2"
                )
            if om[0] < 0 or np.any(np.diff(om) <= 0):
                raise InvalidParameterError(
                    "table grid must be nonnegative and strictly increasing"
                )
            if not np.all(np.isfinite(om)) or not np.all(np.isfinite(sv)):
                raise InvalidParameterError("table entries must be finite")
            if np.any(sv < 0):
                raise InvalidParameterError("spectral densities must be nonnegative")
            om.flags.writeable = False
            sv.flags.writeable = False
            object.__setattr__(self, "table_omega", om)
            object.__setattr__(self, "table_value", sv)
            object.__setattr__(self, "gamma_L", 0.0)
            object.__setattr__(self, "gamma_c", math.inf)

    @classmethod
    def parametric(cls, gamma_L: float, gamma_c: float) -> "NoiseModel":
        return cls(kind=PARAMETRIC, gamma_L=gamma_L, gamma_c=gamma_c)

    @classmethod
    def white(cls, gamma_L: float) -> "NoiseModel":
        return cls(kind=PARAMETRIC, gamma_L=gamma_L, gamma_c=math.inf)

    @classmethod
    def tabulated(cls, omegas, values) -> "NoiseModel":
        return cls(kind=TABULATED, table_omega=omegas, table_value=values)

    @property
    def is_white(self) -> bool:
        return self.kind == PARAMETRIC and math.isinf(self.gamma_c)

    @property
    def is_zero(self) -> bool:
        """True when the spectrum vanishes identically."""
        if self.kind == PARAMETRIC:
            return self.gamma_L == 0.0
        return bool(np.all(self.table_value == 0.0))

    def spectrum_at(self, omega):
        """S_phidot at angular frequency `omega`; even in omega.

        Accepts scalars or arrays and returns a matching shape.
        """
        w = np.abs(np.asarray(omega, dtype=float))
        if self.kind == PARAMETRIC:
            if math.isinf(self.gamma_c):
                out = np.full_like(w, 2.0 * self.gamma_L)
            else:
                gc2 = self.gamma_c * self.gamma_c
                out = 2.0 * self.gamma_L * gc2 / (gc2 + w * w)
        else:
            out = np.interp(w, self.table_omega, self.table_value, left=0.0, right=0.0)
        if np.ndim(omega) == 0:
            return float(out)
        return out

    def variance(self) -> float:
        """Equal-time variance {phidot^2} = integral of S over dOmega/2pi.

        Infinite for the white-noise sentinel.
        """
        if self.kind == PARAMETRIC:
            if math.isinf(self.gamma_c):
                return math.inf
            return self.gamma_L * self.gamma_c
        # two-sided integral of an even tabulated spectrum
        return float(np.trapezoid(self.table_value, self.table_omega)) / math.pi

    def effective_linewidth(self) -> float:
        """Scale used for small-phase regime checks, S_max / 2."""
        if self.kind == PARAMETRIC:
            return self.gamma_L
        return 0.5 * float(self.table_value.max())

    def digest(self) -> str:
        """Short content hash for manifests and caching."""
        h = hashlib.sha256()
        if self.kind == PARAMETRIC:
            h.update(f"parametric {self.gamma_L!r} {self.gamma_c!r}".encode())
        else:
            h.update(b"tabulated")
            h.update(self.table_omega.tobytes())
            h.update(self.table_value.tobytes())
        return h.hexdigest()[:16]

    def as_dict(self, include_table: bool = False) -> dict:
        d = {"kind": self.kind, "digest": self.digest()}
        if self.kind == PARAMETRIC:
            d["gamma_L"] = self.gamma_L
            d["gamma_c"] = "inf" if math.isinf(self.gamma_c) else self.gamma_c
        else:
            d["table_span"] = [float(self.table_omega[0]), float(self.table_omega[-1])]
            d["table_points"] = int(self.table_omega.size)
            if include_table:
                d["table_omega"] = self.table_omega.tolist()
                d["table_value"] = self.table_value.tolist()
        return d


@dataclass(frozen=True)
class SystemParams:
    """Optomechanical system rates, all angular (rad/s).

    Exactly one of `drive_amplitude` (E0) and `photon_number` (|alpha0|^2)
    must be given; the other is derived through the noiseless steady state
    |alpha0|^2 = E0^2 / (kappa^2 + Delta^2).  `delta` left as None selects
    the optimal cooling detuning -sqrt(kappa^2 + omega_m^2).
    """

    omega_m: float
    kappa: float
    g0: float
    delta: float | None = None
    drive_amplitude: float | None = None
    photon_number: float | None = None
    gamma_m: float = 0.0

    def __post_init__(self):
        for name in ("omega_m", "kappa", "g0"):
            object.__setattr__(self, name, _positive_finite(name, getattr(self, name)))
        gm = float(self.gamma_m)
        if not math.isfinite(gm) or gm < 0:
            raise InvalidParameterError(f"gamma_m must be >= 0, got {gm!r}")
        object.__setattr__(self, "gamma_m", gm)
        if self.delta is not None:
            d = float(self.delta)
            if not math.isfinite(d):
                raise InvalidParameterError(f"delta must be finite, got {d!r}")
            object.__setattr__(self, "delta", d)
        if self.drive_amplitude is not None and self.photon_number is not None:
            raise AmbiguousParameterError(
                "drive_amplitude and photon_number are alternatives; give exactly one"
            )
        if self.drive_amplitude is None and self.photon_number is None:
            raise InvalidParameterError("one of drive_amplitude or photon_number is required")
        if self.drive_amplitude is not None:
            e0 = float(self.drive_amplitude)
            if not math.isfinite(e0) or e0 < 0:
                raise InvalidParameterError(f"drive_amplitude must be >= 0, got {e0!r}")
            object.__setattr__(self, "drive_amplitude", e0)
        if self.photon_number is not None:
            n = float(self.photon_number)
            if not math.isfinite(n) or n < 0:
                raise InvalidParameterError(f"photon_number must be >= 0, got {n!r}")
            object.__setattr__(self, "photon_number", n)

    @property
    def delta_op(self) -> float:
        """Optimal cooling detuning, -sqrt(kappa^2 + omega_m^2)."""
        return -math.hypot(self.kappa, self.omega_m)

    @property
    def detuning(self) -> float:
        """Effective detuning actually in force (delta, or delta_op default)."""
        return self.delta if self.delta is not None else self.delta_op

    @property
    def n_photon(self) -> float:
        """Mean intracavity photon number |alpha0|^2."""
        if self.photon_number is not None:
            return self.photon_number
        d = self.detuning
        return self.drive_amplitude**2 / (self.kappa**2 + d * d)

    @property
    def e0(self) -> float:
        """Drive amplitude E0 consistent with n_photon at this detuning."""
        if self.drive_amplitude is not None:
            return self.drive_amplitude
        d = self.detuning
        return math.sqrt(self.photon_number * (self.kappa**2 + d * d))

    @property
    def alpha0(self) -> complex:
        """Noiseless steady-state field E0 / (kappa - i Delta)."""
        return self.e0 / (self.kappa - 1j * self.detuning)

    @property
    def G(self) -> float:
        """Enhanced coupling g0 * |alpha0|."""
        return self.g0 * math.sqrt(self.n_photon)

    @property
    def stability_ok(self) -> bool:
        return self.G < self.omega_m / 2

    def with_changes(self, **kwargs) -> "SystemParams":
        """Copy with some fields replaced.

        Passing one of `drive_amplitude` / `photon_number` clears the other
        so the pair stays exclusive.
        """
        fields = {
            "omega_m": self.omega_m,
            "kappa": self.kappa,
            "g0": self.g0,
            "delta": self.delta,
            "drive_amplitude": self.drive_amplitude,
            "photon_number": self.photon_number,
            "gamma_m": self.gamma_m,
        }
        if "drive_amplitude" in kwargs and "photon_number" not in kwargs:
            fields["photon_number"] = None
        if "photon_number" in kwargs and "drive_amplitude" not in kwargs:
            fields["drive_amplitude"] = None
        fields.update(kwargs)
        return SystemParams(**fields)

    def as_dict(self) -> dict:
        return {
            "omega_m": self.omega_m,
            "kappa": self.kappa,
            "g0": self.g0,
            "delta": self.delta,
            "detuning_resolved": self.detuning,
            "drive_amplitude": self.drive_amplitude,
            "photon_number": self.photon_number,
            "n_photon_resolved": self.n_photon,
            "gamma_m": self.gamma_m,
            "G": self.G,
        }


@dataclass(frozen=True)
class ValidationReport:
    """Which regime assumptions hold for a (params, noise) pair.

    Operations consult these flags and refuse to run outside their
    regime unless forced.
    """

    weak_coupling: bool
    sideband_resolved: bool
    small_phase: bool
    strong_coupling: bool
    stability: bool
    warnings: tuple[str, ...] = ()

    def flags(self) -> dict[str, bool]:
        return {
            "weak_coupling": self.weak_coupling,
            "sideband_resolved": self.sideband_resolved,
            "small_phase": self.small_phase,
            "strong_coupling": self.strong_coupling,
            "stability": self.stability,
        }


def validate(params: SystemParams, noise: NoiseModel) -> ValidationReport:
    """Regime report for a parameter set; raises on instability.

    Thresholds (boundaries count as inside the regime):
    weak coupling G <= kappa/10, sideband-resolved kappa <= omega_m/10,
    small phase noise effective linewidth <= kappa/10, strong coupling
    G >= 10*kappa.  Stability requires G < omega_m/2 strictly; its
    violation raises StabilityError because no linearized result is
    meaningful there.
    """
    g = params.G
    warnings: list[str] = []
    if noise.kind == TABULATED:
        lo = float(noise.table_omega[0])
        hi = float(noise.table_omega[-1])
        warnings.append(
            f"tabulated spectrum treated as zero outside [{lo:.6g}, {hi:.6g}] rad/s"
        )
    report = ValidationReport(
        weak_coupling=g <= params.kappa / 10.0,
        sideband_resolved=params.kappa <= params.omega_m / 10.0,
        small_phase=noise.effective_linewidth() <= params.kappa / 10.0,
        strong_coupling=g >= 10.0 * params.kappa,
        stability=params.stability_ok,
        warnings=tuple(warnings),
    )
    if not report.stability:
        raise StabilityError(
            f"G = {g:.6g} rad/s exceeds the stability bound omega_m/2 = "
            f"{params.omega_m / 2:.6g} rad/s"
        )
    return report


def check_regime(
    params: SystemParams,
    noise: NoiseModel,
    *regimes: str,
    force: bool = False,
) -> ValidationReport:
    """Validate and require the named regime flags, unless forced."""
    report = validate(params, noise)
    flags = report.flags()
    unknown = [r for r in regimes if r not in flags]
    if unknown:
        raise ValueError(f"unknown regime names: {unknown}")
    missing = [r for r in regimes if not flags[r]]
    if missing and not force:
        raise RegimeError(
            "outside regime of validity: " + ", ".join(missing)
            + " (pass force=True to run anyway)"
        )
    return report
