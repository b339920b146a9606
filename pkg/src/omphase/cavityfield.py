"""Classical intracavity field alpha(t) under a noisy drive.

Integrates d(alpha)/dt = (i*Delta - kappa)*alpha + E0*exp(i*phi(t)) with
an exact exponential-integrator step (the filter pole is preserved to
machine precision, so the noiseless steady state is an exact fixed
point).  Builds reproducible ensembles and estimates the correlation
functions that the spectra S_A and S_N are transforms of.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import lfilter

from .errors import InvalidParameterError, ResolutionError
from .noise import Trajectory, generate_phidot, integrate_phase
from .params import NoiseModel, SystemParams

__all__ = [
    "FieldEnsemble",
    "CorrelationResult",
    "evolve_alpha",
    "build_field_ensemble",
    "intensity_fluctuation",
    "correlation",
]


def evolve_alpha(
    params: SystemParams,
    phi: Trajectory,
    alpha_init: complex | None = None,
) -> Trajectory:
    """Cavity field driven by E0*exp(i*phi(t)), sampled on phi's grid.

    One step maps alpha to q*alpha + c*exp(i*phi_mid) with
    q = exp((i*Delta - kappa)*dt) and c = E0*(q - 1)/(i*Delta - kappa);
    phi is held at its midpoint value across the step.  Starts from the
    noiseless steady state alpha0 unless `alpha_init` is given.
    Requires dt*(kappa + |Delta|) < 0.1.
    """
    dt = phi.dt
    kappa = params.kappa
    delta = params.detuning
    if dt * (kappa + abs(delta)) >= 0.1:
        raise ResolutionError(
            f"dt*(kappa+|Delta|) = {dt * (kappa + abs(delta)):.3g} >= 0.1; "
            "decrease dt to resolve the cavity response"
        )
    pole = 1j * delta - kappa
    q = np.exp(pole * dt)
    c = params.e0 * (q - 1.0) / pole
    a0 = params.alpha0 if alpha_init is None else complex(alpha_init)
    phi_mid = 0.5 * (phi.samples[:-1] + phi.samples[1:])
    drive = np.exp(1j * phi_mid)
    out = np.empty(phi.n, dtype=np.complex128)
    out[0] = a0
    out[1:], _ = lfilter([c], [1.0, -q], drive, zi=np.array([q * a0]))
    return Trajectory(dt=dt, samples=out, t0=phi.t0, seed_id=phi.seed_id)


@dataclass
class FieldEnsemble:
    """Ensemble of alpha(t) realizations after burn-in.

    Members are pure functions of (params, noise, dt, seed, stream), so
    they can be stored or regenerated on demand; `store=False` keeps
    memory flat for large ensembles and reproduces the same samples.
    """

    params: SystemParams
    noise: NoiseModel
    dt: float
    n_steps: int
    n_burn: int
    seed: int
    n_realizations: int
    store: bool = True
    trajectories: list[Trajectory] | None = None
    _mean_intensity: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_kept(self) -> int:
        return self.n_steps - self.n_burn

    def trajectory(self, k: int) -> Trajectory:
        if self.trajectories is not None:
            return self.trajectories[k]
        return _make_member(
            self.params, self.noise, self.dt, self.n_steps, self.n_burn, self.seed, k
        )

    def iter_trajectories(self):
        for k in range(self.n_realizations):
            yield self.trajectory(k)

    def mean_intensity(self) -> np.ndarray:
        """Ensemble mean of |alpha(t)|^2 at each kept time."""
        if self._mean_intensity is None:
            acc = np.zeros(self.n_kept)
            for traj in self.iter_trajectories():
                acc += np.abs(traj.samples) ** 2
            self._mean_intensity = acc / self.n_realizations
        return self._mean_intensity


def _make_member(params, noise, dt, n_steps, n_burn, seed, stream) -> Trajectory:
    phidot = generate_phidot(noise, dt, n_steps, seed, stream=stream)
    phi = integrate_phase(phidot)
    alpha = evolve_alpha(params, phi)
    kept = alpha.samples[n_burn:]
    return Trajectory(dt=dt, samples=kept, t0=n_burn * dt, seed_id=stream)


def build_field_ensemble(
    params: SystemParams,
    noise: NoiseModel,
    n_realizations: int,
    dt: float,
    n_steps: int,
    seed: int,
    store: bool = True,
) -> FieldEnsemble:
    """Evolve `n_realizations` independent fields, discarding 10/kappa.

    The transient of the cavity filter decays as exp(-kappa*t); ten
    decay times leave a relative residual below 1e-4.
    """
    if n_realizations < 1:
        raise InvalidParameterError("n_realizations must be >= 1")
    n_burn = int(np.ceil(10.0 / params.kappa / dt))
    if n_steps - n_burn < 2:
        raise InvalidParameterError(
            f"n_steps = {n_steps} leaves no samples after the burn-in of {n_burn}"
        )
    ens = FieldEnsemble(
        params=params,
        noise=noise,
        dt=dt,
        n_steps=n_steps,
        n_burn=n_burn,
        seed=seed,
        n_realizations=n_realizations,
        store=store,
    )
    if store:
        ens.trajectories = [
            _make_member(params, noise, dt, n_steps, n_burn, seed, k)
            for k in range(n_realizations)
        ]
    return ens


def intensity_fluctuation(ensemble: FieldEnsemble) -> list[Trajectory]:
    """N_k(t) = |alpha_k(t)|^2 - ensemble mean of |alpha(t)|^2.

    The subtraction uses the per-time ensemble mean, so the returned
    channels have zero ensemble mean by construction.  Requires at
    least 100 realizations for a usable mean.
    """
    if ensemble.n_realizations < 100:
        raise InvalidParameterError(
            "intensity fluctuations need n_realizations >= 100, got "
            f"{ensemble.n_realizations}"
        )
    mean = ensemble.mean_intensity()
    out = []
    for traj in ensemble.iter_trajectories():
        n_t = np.abs(traj.samples) ** 2 - mean
        out.append(
            Trajectory(dt=traj.dt, samples=n_t, t0=traj.t0, seed_id=traj.seed_id)
        )
    return out


@dataclass
class CorrelationResult:
    """Stationary correlation C(tau) with bootstrap standard errors."""

    taus: np.ndarray
    values: np.ndarray
    errors: np.ndarray
    channel: str
    n_realizations: int

    def at(self, tau: float) -> complex:
        idx = int(round(tau / (self.taus[1] - self.taus[0])))
        return self.values[idx]


def _single_correlation(x: np.ndarray, max_idx: int) -> np.ndarray:
    """{x*(t+tau) x(t)} averaged over time origins, tau >= 0, unbiased."""
    n = x.size
    nfft = 1
    while nfft < 2 * n:
        nfft *= 2
    spec = np.fft.fft(x, nfft)
    acf = np.fft.ifft(spec * np.conj(spec))[: max_idx + 1]
    counts = n - np.arange(max_idx + 1)
    # ifft gives sum over t of x(t+tau)*conj(x(t)); the paper's
    # {alpha*(tau) alpha(0)} is its conjugate
    return np.conj(acf) / counts


def correlation(
    ensemble: FieldEnsemble,
    channel: str,
    max_lag: float,
    n_bootstrap: int = 200,
    bootstrap_seed: int = 0,
) -> CorrelationResult:
    """Auto-correlation of the alpha or N channel over the ensemble.

    channel "alpha" estimates {alpha*(tau) alpha(0)}; channel "N"
    estimates {N(tau) N(0)} with the ensemble-mean intensity subtracted.
    `max_lag` (seconds) must not exceed a quarter of the trajectory span
    so enough time origins remain at every lag.
    """
    if channel not in ("alpha", "N"):
        raise InvalidParameterError(f"unknown channel {channel!r}")
    dt = ensemble.dt
    span = (ensemble.n_kept - 1) * dt
    if max_lag > span / 4 + 1e-12 * span:
        raise InvalidParameterError(
            f"max_lag = {max_lag:.3g} s exceeds a quarter of the span {span:.3g} s"
        )
    max_idx = int(round(max_lag / dt))
    if channel == "N" and ensemble.n_realizations < 100:
        raise InvalidParameterError("N-channel correlation needs n_realizations >= 100")
    mean = ensemble.mean_intensity() if channel == "N" else None
    rows = np.empty((ensemble.n_realizations, max_idx + 1), dtype=np.complex128)
    for k, traj in enumerate(ensemble.iter_trajectories()):
        x = traj.samples
        if channel == "N":
            x = np.abs(x) ** 2 - mean
        rows[k] = _single_correlation(x, max_idx)
    values = rows.mean(axis=0)
    rng = np.random.default_rng(bootstrap_seed)
    if ensemble.n_realizations > 1:
        boots = np.empty((n_bootstrap, max_idx + 1), dtype=np.complex128)
        for b in range(n_bootstrap):
            pick = rng.integers(0, ensemble.n_realizations, ensemble.n_realizations)
            boots[b] = rows[pick].mean(axis=0)
        errors = np.sqrt(
            boots.real.var(axis=0, ddof=1) + boots.imag.var(axis=0, ddof=1)
        )
    else:
        errors = np.zeros(max_idx + 1)
    if channel == "N":
        values = values.real
    return CorrelationResult(
        taus=dt * np.arange(max_idx + 1),
        values=values,
        errors=errors,
        channel=channel,
        n_realizations=ensemble.n_realizations,
    )
