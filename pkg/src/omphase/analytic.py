"""First-order spectra, cooling limits, and transfer-fidelity estimates.

Pure functions of (SystemParams, NoiseModel), valid to first order in
the phase-noise strength Gamma_L/kappa.  Every quoted closed form has a
numerical-quadrature partner evaluated from the same first-order kernel,
so the approximations can be judged instead of trusted:

* s_a evaluates the amplitude-correlation spectrum by adaptive
  quadrature at any frequency; sideband_summary reports the simple
  red/blue sideband ratios next to it.
* s_n is the intensity-fluctuation spectrum in closed form;
  s_n_complex pairs the strong-coupling two-resonance formula with the
  finite-linewidth quadrature it approximates.
* cooling_limits / strong_cooling_limit / fidelity_error_budget /
  low_frequency_dephasing combine these into occupancy and error
  estimates, each carrying the textbook display values alongside the
  exact first-order numbers.
"""

from __future__ import annotations

import cmath
import math
import warnings as _warnings

import numpy as np
from scipy import integrate

from .errors import InvalidParameterError, RegimeError
from .params import PARAMETRIC, NoiseModel, SystemParams, check_regime
from .results import (
    ANALYTIC,
    CoolingResult,
    ErrorBudget,
    SpectrumResult,
    StrongCoolingResult,
)

__all__ = [
    "s_a",
    "s_a_noiseless",
    "s_n",
    "s_total",
    "spectrum_curve",
    "cooling_rate_noiseless",
    "phase_suppression_integral",
    "sideband_summary",
    "s_n_complex",
    "cooling_limits",
    "strong_cooling_limit",
    "fidelity_noiseless",
    "recurrence_fidelity",
    "fidelity_error_budget",
    "displacement_error",
    "low_frequency_dephasing",
]

_RTOL = 1e-9
_LIMIT = 200


def _spectrum_fn(noise: NoiseModel):
    """Fast scalar S_phidot(Omega) evaluator for quadrature inner loops."""
    if noise.kind == PARAMETRIC:
        if math.isinf(noise.gamma_c):
            level = 2.0 * noise.gamma_L
            return lambda w: level
        num = 2.0 * noise.gamma_L * noise.gamma_c**2
        gc2 = noise.gamma_c**2
        return lambda w: num / (gc2 + w * w)
    tw, tv = noise.table_omega, noise.table_value
    return lambda w: float(np.interp(abs(w), tw, tv, left=0.0, right=0.0))


def _noise_features(noise: NoiseModel) -> list:
    if noise.kind == PARAMETRIC:
        return [] if math.isinf(noise.gamma_c) else [noise.gamma_c]
    return [float(noise.table_omega[0]), float(noise.table_omega[-1])]


def _noise_upper(noise: NoiseModel) -> float:
    """Frequency beyond which an integrand proportional to S vanishes."""
    if noise.kind == PARAMETRIC:
        return math.inf
    return float(noise.table_omega[-1])


def _halfline_quad(f, features, upper=math.inf, rtol=_RTOL) -> float:
    """Integrate f over (0, upper) with panel splits at the given scales.

    Each feature c > 0 contributes panel edges around c so that a peak
    of width much smaller than c still lands inside narrow panels.
    """
    edges = set()
    for c in features:
        if c is None:
            continue
        c = abs(float(c))
        if c == 0.0 or not math.isfinite(c):
            continue
        for m in (0.5, 0.9, 1.0, 1.1, 2.0, 8.0):
            x = c * m
            if 0.0 < x < upper:
                edges.add(x)
    grid = [0.0] + sorted(edges) + [upper]
    total = 0.0
    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for a, b in zip(grid[:-1], grid[1:]):
            if b <= a:
                continue
            val, _ = integrate.quad(
                f, a, b, epsabs=0.0, epsrel=rtol, limit=_LIMIT
            )
            total += val
    return total


# ---------------------------------------------------------------------------
# amplitude-correlation spectrum S_A


def s_a_noiseless(params: SystemParams, omega) -> float:
    """Zeroth-order amplitude spectrum, a Lorentzian at -Delta.

    S_A0(omega) = 2 g0^2 |alpha0|^2 kappa / (kappa^2 + (Delta + omega)^2)
    """
    w = np.asarray(omega, dtype=float)
    kap, d = params.kappa, params.detuning
    out = 2.0 * params.g0**2 * params.n_photon * kap / (kap**2 + (d + w) ** 2)
    return float(out) if np.ndim(omega) == 0 else out


def cooling_rate_noiseless(params: SystemParams) -> float:
    """Noiseless net cooling rate S_A0(omega_m) - S_A0(-omega_m).

    At the optimal detuning this equals the closed form
    2 g0^2 |alpha0|^2 omega_m / (kappa |Delta|) exactly.
    """
    wm = params.omega_m
    return s_a_noiseless(params, wm) - s_a_noiseless(params, -wm)


def _s_a_scalar(params: SystemParams, noise: NoiseModel, omega: float) -> float:
    base = s_a_noiseless(params, omega)
    if noise.is_zero:
        return base
    kap, d = params.kappa, params.detuning
    sfun = _spectrum_fn(noise)
    # First-order correction from the phase-diffusion deficit of the
    # drive autocorrelation.  After the cavity response integrals the
    # correction reduces to a single frequency integral of
    # S(Omega)/Omega^2 times the difference of two cavity propagator
    # products; the integrand below is that difference symmetrized over
    # +-Omega, with a finite Omega -> 0 limit.
    a_const = 2.0 / ((kap**2 + d * d) * complex(kap, -(d + omega)))

    def f(om):
        bp = 1.0 / ((kap**2 + (d + om) ** 2) * complex(kap, -(d + omega + om)))
        bm = 1.0 / ((kap**2 + (d - om) ** 2) * complex(kap, -(d + omega - om)))
        return sfun(om) * (a_const - bp - bm).real / (om * om)

    features = [kap, abs(d), abs(d + omega)] + _noise_features(noise)
    corr = _halfline_quad(f, features, upper=_noise_upper(noise)) / (2.0 * math.pi)
    return base - 2.0 * params.g0**2 * params.e0**2 * corr


def s_a(params: SystemParams, noise: NoiseModel, omega, force: bool = False):
    """Amplitude-correlation spectrum S_A(omega) to first order in noise.

    Scalar or array `omega` (rad/s).  Requires the small-phase-noise
    regime Gamma_L/kappa <= 0.1 unless `force` is set.
    """
    check_regime(params, noise, "small_phase", force=force)
    if np.ndim(omega) == 0:
        return _s_a_scalar(params, noise, float(omega))
    return np.array([_s_a_scalar(params, noise, float(w)) for w in np.asarray(omega)])


def phase_suppression_integral(noise: NoiseModel, kappa: float) -> float:
    """Cavity-filtered noise weight, integral dOmega/2pi S(Omega)/(kappa^2+Omega^2).

    Closed forms: Gamma_L/kappa for white noise and
    Gamma_L*gamma_c/(kappa*(gamma_c+kappa)) for the Lorentzian model;
    tabulated spectra are integrated numerically.
    """
    if noise.is_zero:
        return 0.0
    if noise.kind == PARAMETRIC:
        if math.isinf(noise.gamma_c):
            return noise.gamma_L / kappa
        return noise.gamma_L * noise.gamma_c / (kappa * (noise.gamma_c + kappa))
    sfun = _spectrum_fn(noise)
    val = _halfline_quad(
        lambda om: sfun(om) / (kappa**2 + om * om),
        [kappa] + _noise_features(noise),
        upper=_noise_upper(noise),
    )
    return val / math.pi


def sideband_summary(params: SystemParams, noise: NoiseModel, force: bool = False) -> dict:
    """Red and blue sideband rates, exact quadrature next to closed forms.

    Ratios are taken against the noiseless rate `w0`.  The closed red
    ratio is 1 minus the cavity-filtered noise weight.  Two closed blue
    ratios are reported: `blue_ratio_closed` keeps the cavity-amplified
    resonances at omega_m and 2*omega_m with weight kappa/(2*omega_m^2),
    which is what the quadrature reproduces; `blue_ratio_small_constant`
    is the same structure with the constant kappa/(18*omega_m^2) and is
    retained only for comparison.
    """
    check_regime(params, noise, "small_phase", "sideband_resolved", force=force)
    wm, kap = params.omega_m, params.kappa
    w0 = cooling_rate_noiseless(params)
    s_plus = _s_a_scalar(params, noise, wm)
    s_minus = _s_a_scalar(params, noise, -wm)
    s_om = noise.spectrum_at(wm)
    s_2om = noise.spectrum_at(2.0 * wm)
    blue_noise = (s_om + 0.25 * s_2om) * kap / (2.0 * wm**2)
    blue_noise_alt = (s_om + 0.25 * s_2om) * kap / (18.0 * wm**2)
    stokes = kap**2 / (4.0 * wm**2)
    return {
        "w0": w0,
        "red_ratio": s_plus / w0,
        "red_ratio_closed": 1.0 - phase_suppression_integral(noise, kap),
        "blue_ratio": s_minus / w0,
        "blue_ratio_closed": stokes + blue_noise,
        "blue_ratio_small_constant": stokes + blue_noise_alt,
    }


# ---------------------------------------------------------------------------
# intensity-fluctuation spectrum S_N


def _intensity_filter(params: SystemParams, omega):
    """Conversion factor from S_phidot to the intensity spectrum.

    4 Delta^2 / (((Delta-omega)^2+kappa^2) ((Delta+omega)^2+kappa^2));
    the denominator equals the quartic
    Delta^4 + 2 Delta^2 (kappa^2-omega^2) + (kappa^2+omega^2)^2.
    """
    w = np.asarray(omega, dtype=float)
    d, kap = params.detuning, params.kappa
    den = ((d - w) ** 2 + kap**2) * ((d + w) ** 2 + kap**2)
    return 4.0 * d * d / den


def _s_n_value(params: SystemParams, noise: NoiseModel, omega):
    w = np.asarray(omega, dtype=float)
    out = (
        params.g0**2
        * params.n_photon**2
        * _intensity_filter(params, w)
        * noise.spectrum_at(w)
    )
    return float(out) if np.ndim(omega) == 0 else out


def s_n(params: SystemParams, noise: NoiseModel, omega, force: bool = False):
    """Intensity-fluctuation spectrum S_N(omega), closed first-order form.

    Even in omega; proportional to |alpha0|^4; vanishes for Delta = 0
    because on-resonance drive converts no phase noise to intensity
    noise at first order.
    """
    check_regime(params, noise, "small_phase", force=force)
    return _s_n_value(params, noise, omega)


def s_total(params: SystemParams, noise: NoiseModel, omega, force: bool = False):
    """Total force spectrum S_A + S_N governing the cooling equation."""
    check_regime(params, noise, "small_phase", force=force)
    sa = (
        _s_a_scalar(params, noise, float(omega))
        if np.ndim(omega) == 0
        else np.array([_s_a_scalar(params, noise, float(w)) for w in np.asarray(omega)])
    )
    return sa + _s_n_value(params, noise, omega)


def spectrum_curve(
    params: SystemParams,
    noise: NoiseModel,
    omegas,
    channel: str = "total",
    force: bool = False,
) -> SpectrumResult:
    """Evaluate one of the analytic spectra on a frequency grid."""
    if channel not in ("sa", "sn", "total"):
        raise InvalidParameterError(f"unknown spectrum channel {channel!r}")
    check_regime(params, noise, "small_phase", force=force)
    w = np.atleast_1d(np.asarray(omegas, dtype=float))
    if channel == "sn":
        values = _s_n_value(params, noise, w)
        label = "S_N"
    else:
        values = np.array([_s_a_scalar(params, noise, float(x)) for x in w])
        label = "S_A"
        if channel == "total":
            values = values + _s_n_value(params, noise, w)
            label = "S_total"
    return SpectrumResult(omegas=w, values=values, method=ANALYTIC, label=label)


# ---------------------------------------------------------------------------
# strong-coupling heating of the normal modes


def _normal_mode_frequency(params: SystemParams, sign: int) -> float:
    wm, g = params.omega_m, params.G
    return wm * math.sqrt(1.0 + sign * 2.0 * g / wm)


def _flatness_warnings(noise: NoiseModel, centers, kappa: float) -> list:
    notes = []
    for c in centers:
        grid = np.linspace(c - kappa, c + kappa, 9)
        vals = np.asarray(noise.spectrum_at(np.abs(grid)))
        ref = float(noise.spectrum_at(c))
        if ref <= 0.0:
            notes.append(f"spectrum vanishes near {c:.6g} rad/s; flatness check skipped")
            continue
        span = float(vals.max() - vals.min()) / ref
        if span > 0.10:
            notes.append(
                f"spectrum varies by {span:.1%} across [{c - kappa:.6g}, {c + kappa:.6g}]"
                " rad/s; the flat-noise closed form is unreliable there"
            )
    return notes


def s_n_complex(params: SystemParams, noise: NoiseModel, xi, force: bool = False) -> dict:
    """Noise power felt by one normal mode, S_N at omega_xi + i*kappa/2.

    `xi` selects the upper ("+") or lower ("-") normal mode.  Returns
    the two-resonance closed form (valid for kappa << G << omega_m and
    a spectrum flat on scale kappa), the finite-linewidth quadrature it
    approximates, the two closed-form terms separately, and any
    flatness warnings.
    """
    sign = {"+": 1, "-": -1, 1: 1, -1: -1}.get(xi)
    if sign is None:
        raise InvalidParameterError(f"xi must be '+' or '-', got {xi!r}")
    check_regime(params, noise, "strong_coupling", "small_phase", force=force)
    wm, kap, g0 = params.omega_m, params.kappa, params.g0
    a2 = params.n_photon
    w_xi = _normal_mode_frequency(params, sign)
    s_xi = noise.spectrum_at(w_xi)
    s_m = noise.spectrum_at(wm)
    # (w_xi^2 - wm^2) is exactly +-2 wm G by construction
    term1 = g0**2 * a2**2 * 4.0 * wm**2 * s_xi / (w_xi**2 - wm**2) ** 2
    term2 = g0**2 * a2**2 * s_m / (2.0 * (w_xi - wm) ** 2)

    if noise.is_zero:
        quad_val = 0.0
    else:
        sfun = _spectrum_fn(noise)
        d = params.detuning
        kap2 = kap**2

        def weight(om):
            filt = 4.0 * d * d / (((d - om) ** 2 + kap2) * ((d + om) ** 2 + kap2))
            kern = 4.0 * kap / (kap2 + 4.0 * (om - w_xi) ** 2)
            return filt * kern

        def f(om):
            return sfun(om) * (weight(om) + weight(-om))

        features = [wm, w_xi, kap] + _noise_features(noise)
        quad_val = (
            g0**2 * a2**2 * _halfline_quad(f, features, upper=_noise_upper(noise))
            / (2.0 * math.pi)
        )

    notes = _flatness_warnings(noise, (w_xi, wm), kap) if not noise.is_zero else []
    return {
        "omega_xi": w_xi,
        "closed": term1 + term2,
        "terms": (term1, term2),
        "quadrature": quad_val,
        "flat": not notes,
        "warnings": tuple(notes),
    }


def strong_cooling_limit(params: SystemParams, noise: NoiseModel, force: bool = False) -> StrongCoolingResult:
    """Steady occupancy of the two normal modes under phase noise.

    Each mode obeys d<N>/dt = -kappa <N> + S_N(omega_xi + i kappa/2),
    so the steady occupancies are the mode noise powers divided by
    kappa and the decay rate is kappa itself.  `bound_total` is the
    closed-form floor |alpha0|^2 [S(omega_m)+S(omega_+)+S(omega_-)]/kappa.
    """
    check_regime(params, noise, "strong_coupling", "small_phase", force=force)
    res_p = s_n_complex(params, noise, "+", force=True)
    res_m = s_n_complex(params, noise, "-", force=True)
    kap = params.kappa
    n_plus = res_p["closed"] / kap
    n_minus = res_m["closed"] / kap
    a2 = params.n_photon
    bound = (
        a2
        * (
            noise.spectrum_at(params.omega_m)
            + noise.spectrum_at(res_p["omega_xi"])
            + noise.spectrum_at(res_m["omega_xi"])
        )
        / kap
    )
    notes = list(res_p["warnings"]) + list(res_m["warnings"])
    if params.G > params.omega_m / 4.0:
        notes.append(
            "G is a sizable fraction of omega_m; the G << omega_m expansion is strained"
        )
    return StrongCoolingResult(
        n_plus=n_plus,
        n_minus=n_minus,
        n_tot=n_plus + n_minus,
        decay_rate=kap,
        bound_total=bound,
        quadrature={
            "n_plus": res_p["quadrature"] / kap,
            "n_minus": res_m["quadrature"] / kap,
            "n_tot": (res_p["quadrature"] + res_m["quadrature"]) / kap,
        },
        warnings=tuple(notes),
    )


# ---------------------------------------------------------------------------
# cooling limits in the weak-coupling regime


def cooling_limits(params: SystemParams, noise: NoiseModel, force: bool = False) -> CoolingResult:
    """Steady-state cooling rate and occupancy with the full breakdown.

    W = S(omega_m) - S(-omega_m) with S = S_A + S_N; the even S_N
    cancels in W.  n0 = (S_A(-omega_m) + S_N(omega_m) + Gamma_m)/W is
    decomposed exactly into thermal, stokes, and phase_noise parts.
    `displayed` carries the sideband-resolved textbook estimates of the
    same three terms.

    The optimum photon number stored on the result is the minimizer of
    thermal + phase_noise, x_opt = 2 kappa sqrt(Gamma_m/S)/g0; the
    quoted closed form (2 kappa)^2 Gamma_m/(g0^2 S) equals x_opt^2 and
    is kept under displayed["optimal_photon_number"].  Only x_opt
    reproduces n0_min = 2 sqrt(Gamma_m S)/g0 + kappa^2/(4 omega_m^2).
    """
    check_regime(params, noise, "weak_coupling", "small_phase", force=force)
    wm, kap, g0 = params.omega_m, params.kappa, params.g0
    a2 = params.n_photon
    gm = params.gamma_m
    sa_plus = _s_a_scalar(params, noise, wm)
    sa_minus = _s_a_scalar(params, noise, -wm)
    sn_m = _s_n_value(params, noise, wm)
    W = sa_plus - sa_minus
    if W <= 0.0:
        raise RegimeError(
            "no net cooling at this detuning; the steady-state occupancy is undefined"
        )
    n0 = (sa_minus + sn_m + gm) / W
    breakdown = {
        "thermal": gm / W,
        "stokes": sa_minus / W,
        "phase_noise": sn_m / W,
    }
    s_om = noise.spectrum_at(wm)
    displayed = {
        "thermal": 2.0 * kap * gm / (g0**2 * a2),
        "stokes": kap**2 / (4.0 * wm**2),
        "phase_noise": a2 * s_om / (2.0 * kap),
        "phase_noise_at_detuning": a2 * s_om * abs(params.delta_op) / (2.0 * kap * wm),
    }
    displayed["n0"] = (
        displayed["thermal"] + displayed["stokes"] + displayed["phase_noise"]
    )

    notes = []
    x_opt = None
    n0_min = None
    if gm > 0.0 and s_om > 0.0:
        x_opt = 2.0 * kap * math.sqrt(gm / s_om) / g0
        n0_min = 2.0 * math.sqrt(gm * s_om) / g0 + kap**2 / (4.0 * wm**2)
        displayed["optimal_photon_number"] = (2.0 * kap) ** 2 * gm / (g0**2 * s_om)
        notes.append(
            "displayed optimal photon number is the square of the stored optimum;"
            " only the square root minimizes the three-term estimate"
        )
    elif gm == 0.0:
        notes.append(
            "no mechanical heating: occupancy falls monotonically with drive,"
            " so no finite optimum photon number exists"
        )
    else:
        notes.append("noiseless drive: no finite optimum photon number exists")
    if gm > 0.0:
        ground_state_ok = s_om < g0**2 / gm
    else:
        ground_state_ok = True
        notes.append("ground-state condition trivially satisfied: Gamma_m = 0")
    return CoolingResult(
        W=W,
        n0=n0,
        breakdown=breakdown,
        displayed=displayed,
        optimal_photon_number=x_opt,
        n0_min=n0_min,
        ground_state_ok=ground_state_ok,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# coherent-oscillation fidelity


def fidelity_noiseless(params: SystemParams, t):
    """Swap-and-return fidelity without noise.

    F0(t) = exp(-|1 + cos(G t) exp(-kappa t/2)|^2); equals exp(-4) at
    t = 0 and approaches 1 at t = pi/G for kappa -> 0.
    """
    tt = np.asarray(t, dtype=float)
    env = 1.0 + np.cos(params.G * tt) * np.exp(-params.kappa * tt / 2.0)
    out = np.exp(-(env * env))
    return float(out) if np.ndim(t) == 0 else out


def recurrence_fidelity(params: SystemParams) -> dict:
    """Noiseless fidelity at the full-oscillation time t_r = pi/G.

    `exact` evaluates the closed form, whose small-kappa expansion has
    exponent (pi*kappa/(2G))^2 (`quadratic`); `coarse` is the cruder
    rule of thumb exp(-(pi*kappa/G)^2).
    """
    g = params.G
    if g == 0.0:
        raise InvalidParameterError("recurrence time undefined for zero coupling")
    t_r = math.pi / g
    x = math.pi * params.kappa / g
    return {
        "t_r": t_r,
        "exact": math.exp(-((1.0 - math.exp(-x / 2.0)) ** 2)),
        "quadratic": math.exp(-((x / 2.0) ** 2)),
        "coarse": math.exp(-(x**2)),
    }


def fidelity_error_budget(params: SystemParams, noise: NoiseModel, force: bool = False) -> ErrorBudget:
    """Two-term error estimate for one full photon-phonon oscillation.

    epsilon = pi kappa/(g0 |alpha0|) + 8 |alpha0|^2 S(omega_m)/kappa.
    The optimum drive satisfies |alpha0|^3 = pi kappa^2/(16 g0 S), at
    which the error is 3 (2 pi^2)^(1/3) (kappa S/g0^2)^(1/3); the cube
    root is the usual quoted scaling, the prefactor comes from the
    exact minimization.
    """
    check_regime(params, noise, "strong_coupling", force=force)
    g = params.G
    if g == 0.0:
        raise InvalidParameterError("error budget undefined for zero coupling")
    kap, g0 = params.kappa, params.g0
    a2 = params.n_photon
    s_om = noise.spectrum_at(params.omega_m)
    eps_loss = math.pi * kap / g
    eps_noise = 8.0 * a2 * s_om / kap
    notes = []
    if s_om > 0.0:
        alpha_opt = (math.pi * kap**2 / (16.0 * g0 * s_om)) ** (1.0 / 3.0)
        eps_opt = math.pi * kap / (g0 * alpha_opt) + 8.0 * alpha_opt**2 * s_om / kap
        notes.append(
            "epsilon_opt includes the numeric prefactor 3*(2*pi^2)^(1/3);"
            " the bare cube-root scaling drops it"
        )
    else:
        alpha_opt = None
        eps_opt = None
        notes.append("noiseless drive: error falls monotonically with photon number")
    return ErrorBudget(
        epsilon_loss=eps_loss,
        epsilon_noise=eps_noise,
        epsilon_total=eps_loss + eps_noise,
        alpha_opt=alpha_opt,
        epsilon_opt=eps_opt,
        coherence_ok=s_om < g0**2 / kap,
        notes=tuple(notes),
    )


def displacement_error(params: SystemParams, noise: NoiseModel, t, force: bool = False):
    """Mean-square coherent displacement |c_a(t)|^2 from intensity noise.

    Quadrature of the intensity spectrum against the driven-mode
    response; at t = pi/G and for noise concentrated near omega_m it
    approaches 4 |alpha0|^2 S(omega_m)/kappa, half the budget display
    8 |alpha0|^2 S(omega_m)/kappa used by fidelity_error_budget.
    """
    check_regime(params, noise, "strong_coupling", force=force)
    if np.ndim(t) > 0:
        return np.array(
            [displacement_error(params, noise, float(x), force=True) for x in np.asarray(t)]
        )
    t = float(t)
    if t < 0.0:
        raise InvalidParameterError("time must be nonnegative")
    if noise.is_zero or t == 0.0:
        return 0.0
    wm, kap, g = params.omega_m, params.kappa, params.G
    d = params.detuning
    kap2 = kap**2
    sfun = _spectrum_fn(noise)
    sin_gt = math.sin(g * t)
    cos_gt = math.cos(g * t)

    def resp(om):
        p = complex(-kap / 2.0, wm - om)
        h = (cmath.exp(p * t) * (p * sin_gt - g * cos_gt) + g) / (p * p + g * g)
        return abs(h) ** 2

    def f(om):
        filt_p = 4.0 * d * d / (((d - om) ** 2 + kap2) * ((d + om) ** 2 + kap2))
        filt_m = filt_p  # the filter is even in om
        return sfun(om) * (filt_p * resp(om) + filt_m * resp(-om))

    features = [wm, abs(wm - g), wm + g, math.pi / t] + _noise_features(noise)
    val = _halfline_quad(f, features, upper=_noise_upper(noise)) / (2.0 * math.pi)
    return 2.0 * params.g0**2 * params.n_photon**2 * val


# ---------------------------------------------------------------------------
# low-frequency dephasing of the normal-mode oscillation


def _sin2_kernel(mu: float, t: float) -> float:
    """4 sin^2(mu t/2)/mu^2 with a stable small-argument branch."""
    x = mu * t
    if abs(x) < 1e-6:
        return t * t * (1.0 - x * x / 12.0)
    s = math.sin(0.5 * x)
    return 4.0 * s * s / (mu * mu)


def _shift_kernel(mu: float, t: float) -> float:
    """2 (mu t - sin(mu t))/mu^2 with a stable small-argument branch."""
    x = mu * t
    if abs(x) < 1e-4:
        return mu * t**3 / 3.0 * (1.0 - x * x / 20.0)
    return 2.0 * (x - math.sin(x)) / (mu * mu)


def _high_frequency_fraction(noise: NoiseModel, cut: float) -> float:
    """Fraction of total phase-noise power above the cut frequency."""
    if noise.is_zero:
        return 0.0
    if noise.kind == PARAMETRIC:
        if math.isinf(noise.gamma_c):
            return 1.0
        return 1.0 - (2.0 / math.pi) * math.atan(cut / noise.gamma_c)
    tw = noise.table_omega
    tv = noise.table_value
    total = np.trapezoid(tv, tw)
    if total == 0.0:
        return 0.0
    if cut >= tw[-1]:
        return 0.0
    if cut <= tw[0]:
        return 1.0
    grid = np.unique(np.concatenate([tw, [cut]]))
    vals = np.interp(grid, tw, tv)
    tail = np.trapezoid(vals[grid >= cut], grid[grid >= cut])
    return float(tail / total)


def _autocovariance_fn(noise: NoiseModel):
    """{phidot(t) phidot(0)} as a function of the lag, for the X diagnostic."""
    if noise.kind == PARAMETRIC and not math.isinf(noise.gamma_c):
        gl, gc = noise.gamma_L, noise.gamma_c
        return lambda u: gl * gc * math.exp(-gc * abs(u))
    sfun = _spectrum_fn(noise)
    hi = _noise_upper(noise)

    def cov(u):
        val = _halfline_quad(
            lambda om: sfun(om) * math.cos(om * u),
            _noise_features(noise) + [1.0 / max(abs(u), 1e-300)],
            upper=hi,
            rtol=1e-7,
        )
        return val / math.pi

    return cov


def low_frequency_dephasing(
    params: SystemParams,
    noise: NoiseModel,
    t,
    force: bool = False,
    include_diagnostics: bool = False,
) -> dict:
    """Dephasing of the coherent oscillation by slow phase noise.

    Returns the splitting-modulation term W_t, the non-adiabatic term
    R_t (computed with the adiabatic phase estimate {theta' theta'} =
    {phidot phidot}/4), the fidelity
    exp(-|1 + cos(G t) e^{-kappa t/2 - (W+R)/2}|^2), and the two linear
    upper bounds (G^2/omega_m^2) S(0) t and S(G) t / 4.  A warning is
    attached when more than 10% of the noise power lies above
    omega_m/2.  With `include_diagnostics` the oscillation-frequency
    shift I_t, the cross term X_t (from the rough adiabatic estimate
    {delta_omega theta'} = (G/omega_m) {phidot phidot}), and the
    I-shifted fidelity are added.
    """
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(tt < 0.0):
        raise InvalidParameterError("times must be nonnegative")
    wm, kap, g = params.omega_m, params.kappa, params.G
    frac = _high_frequency_fraction(noise, wm / 2.0)
    notes = []
    if frac >= 0.10:
        notes.append(
            f"{frac:.0%} of the phase-noise power lies above omega_m/2;"
            " the low-frequency treatment is marginal"
        )
    sfun = _spectrum_fn(noise)
    upper = _noise_upper(noise)
    w_vals = np.zeros_like(tt)
    r_vals = np.zeros_like(tt)
    i_vals = np.zeros_like(tt)
    x_vals = np.zeros(tt.shape, dtype=complex)
    if not noise.is_zero:
        cov = _autocovariance_fn(noise) if include_diagnostics else None
        for k, ti in enumerate(tt):
            if ti == 0.0:
                continue
            osc = 2.0 * math.pi / ti
            w_upper = min(wm, upper)
            w_vals[k] = (
                (g / wm) ** 2
                * _halfline_quad(
                    lambda om: sfun(om) * _sin2_kernel(om, ti),
                    [osc, 8.0 * osc] + _noise_features(noise),
                    upper=w_upper,
                )
                / math.pi
            )
            r_features = [g, abs(g - osc), g + osc] + _noise_features(noise)
            r_vals[k] = (
                _halfline_quad(
                    lambda om: sfun(om)
                    * (_sin2_kernel(g - om, ti) + _sin2_kernel(g + om, ti)),
                    r_features,
                    upper=upper,
                )
                / (8.0 * math.pi)
            )
            if include_diagnostics:
                i_vals[k] = (
                    _halfline_quad(
                        lambda om: sfun(om)
                        * (_shift_kernel(g - om, ti) + _shift_kernel(g + om, ti)),
                        r_features,
                        upper=upper,
                    )
                    / (8.0 * math.pi)
                )
                if noise.is_white:
                    x_vals[k] = 0.0  # delta-correlated noise has no cross term
                else:

                    def bracket(u):
                        return (
                            1.0
                            - cmath.exp(-1j * g * (ti - u))
                            - cmath.exp(-1j * g * u)
                            + cmath.exp(-1j * g * ti)
                        ) / (1j * g)

                    re, _ = integrate.quad(
                        lambda u: (cov(u) * bracket(u)).real, 0.0, ti,
                        epsabs=0.0, epsrel=1e-7, limit=_LIMIT,
                    )
                    im, _ = integrate.quad(
                        lambda u: (cov(u) * bracket(u)).imag, 0.0, ti,
                        epsabs=0.0, epsrel=1e-7, limit=_LIMIT,
                    )
                    x_vals[k] = 2.0 * (g / wm) * complex(re, im)
    env = 1.0 + np.cos(g * tt) * np.exp(-kap * tt / 2.0 - (w_vals + r_vals) / 2.0)
    fid = np.exp(-(env**2))
    s0 = noise.spectrum_at(0.0)
    s_g = noise.spectrum_at(g)
    scalar = np.ndim(t) == 0

    def _shape(a):
        return a[0] if scalar else a

    out = {
        "t": _shape(tt),
        "W_t": _shape(w_vals),
        "R_t": _shape(r_vals),
        "fidelity": _shape(fid),
        "fidelity_noiseless": fidelity_noiseless(params, t),
        "W_bound": _shape((g / wm) ** 2 * s0 * tt),
        "R_bound": _shape(0.25 * s_g * tt),
        "concentrated": frac < 0.10,
        "high_frequency_fraction": frac,
        "warnings": tuple(notes),
    }
    if include_diagnostics:
        env_s = 1.0 + np.cos(g * tt + 0.5 * i_vals) * np.exp(
            -kap * tt / 2.0 - (w_vals + r_vals) / 2.0
        )
        out["I_t"] = _shape(i_vals)
        out["X_t"] = _shape(x_vals)
        out["fidelity_shifted"] = _shape(np.exp(-(env_s**2)))
    return out
