"""Result containers shared by the analytic, oracle, and ingest paths."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

ANALYTIC = "analytic"
MONTECARLO = "montecarlo"


@dataclass
class SpectrumResult:
    """Sampled spectral density with provenance and per-point errors.

    Parameters
    ----------
    omegas : array
        Angular frequency grid (rad/s).
    values : array
        Spectral density at each grid point (rad/s).
    method : str
        Either ``"analytic"`` or ``"montecarlo"``.
    errors : array, optional
        One standard error per point; zeros for analytic results.
    label : str
        Which spectrum this is, e.g. ``"S_A"``, ``"S_N"``, ``"S_phidot"``.
    """

    omegas: np.ndarray
    values: np.ndarray
    method: str
    errors: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        self.omegas = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        self.values = np.atleast_1d(np.asarray(self.values, dtype=float))
        if self.errors is None:
            self.errors = np.zeros_like(self.values)
        else:
            self.errors = np.atleast_1d(np.asarray(self.errors, dtype=float))
        if not (self.omegas.shape == self.values.shape == self.errors.shape):
            raise ValueError("omegas, values, and errors must share one shape")
        if self.method not in (ANALYTIC, MONTECARLO):
            raise ValueError(f"method must be {ANALYTIC!r} or {MONTECARLO!r}")

    def at(self, omega: float) -> float:
        """Value at `omega` by linear interpolation on the stored grid."""
        return float(np.interp(omega, self.omegas, self.values))

    def error_at(self, omega: float) -> float:
        return float(np.interp(omega, self.omegas, self.errors))


@dataclass
class CoolingResult:
    """Steady-state cooling summary.

    `breakdown` is the exact decomposition of n0 into
    thermal = Gamma_m / W, stokes = S_A(-omega_m) / W and
    phase_noise = S_N(-omega_m) / W; the three recombine to n0 exactly.
    `displayed` holds the simpler sideband-resolved approximations of the
    same three terms for comparison.
    """

    W: float
    n0: float
    breakdown: dict[str, float]
    displayed: dict[str, float] = field(default_factory=dict)
    optimal_photon_number: float | None = None
    n0_min: float | None = None
    ground_state_ok: bool | None = None
    notes: tuple[str, ...] = ()


@dataclass
class StrongCoolingResult:
    """Strong-coupling steady occupancies of the two normal modes."""

    n_plus: float
    n_minus: float
    n_tot: float
    decay_rate: float
    bound_total: float
    quadrature: dict[str, float] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()


@dataclass
class ErrorBudget:
    """Two-term state-transfer error for one full oscillation."""

    epsilon_loss: float
    epsilon_noise: float
    epsilon_total: float
    alpha_opt: float | None
    epsilon_opt: float | None
    coherence_ok: bool
    notes: tuple[str, ...] = ()


@dataclass
class FidelityResult:
    """Transfer fidelity curve with its decomposition.

    `caa_abs2` and `ca_abs2` are the ensemble means of |c_aa(t) + 1|^2
    and |c_a(t)|^2; the fidelity is exp(-caa_abs2) * exp(-ca_abs2).
    Decomposition curves D, W, R are analytic and optional.
    """

    times: np.ndarray
    fidelity: np.ndarray
    fidelity_err: np.ndarray
    fidelity_noiseless: np.ndarray
    caa_abs2: np.ndarray
    ca_abs2: np.ndarray
    caa_abs2_err: np.ndarray
    ca_abs2_err: np.ndarray
    D: np.ndarray | None = None
    W: np.ndarray | None = None
    R: np.ndarray | None = None
    method: str = MONTECARLO

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.fidelity = np.asarray(self.fidelity, dtype=float)
        if np.any(self.fidelity < -1e-12) or np.any(self.fidelity > 1 + 1e-12):
            raise ValueError("fidelity must lie in [0, 1]")
