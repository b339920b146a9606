"""Sampled realizations of the laser frequency-noise process phidot(t).

The parametric (Lorentzian) model is generated by the exact one-step
Ornstein-Uhlenbeck update, so the discrete autocovariance equals the
continuum gamma_L*gamma_c*exp(-gamma_c*|tau|) with no time-step bias.
The white-noise sentinel is sampled as i.i.d. Gaussians of variance
2*gamma_L/dt, the exact band-limited white process on the grid.
Tabulated spectra go through Fourier synthesis.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.signal import lfilter

from .errors import (
    CoverageError,
    DataFormatError,
    InvalidParameterError,
    ResolutionError,
)
from .params import PARAMETRIC, TABULATED, NoiseModel
from .results import MONTECARLO, SpectrumResult

__all__ = [
    "Trajectory",
    "stream_rng",
    "generate_phidot",
    "generate_phidot_tabulated",
    "integrate_phase",
    "estimate_psd",
]

# binary trajectory layout, little endian:
#   magic "OMPH" | u16 version | u16 flags (bit 0: complex samples)
#   f64 dt | f64 t0 | i64 seed_id | u64 n | n samples (f64 or c128)
_MAGIC = b"OMPH"
_VERSION = 1
_HEADER = struct.Struct("<4sHHddqQ")


@dataclass
class Trajectory:
    """Uniformly sampled time series, one channel.

    `samples` is real for phidot/phi/N channels and complex for the
    cavity field alpha.  `seed_id` identifies the RNG stream that made
    it (-1 when unknown, e.g. loaded from CSV without metadata).
    """

    dt: float
    samples: np.ndarray
    t0: float = 0.0
    seed_id: int = -1

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.ndim != 1 or self.samples.size < 2:
            raise InvalidParameterError("trajectory needs a 1-d array of length >= 2")
        if not (self.dt > 0):
            raise InvalidParameterError(f"dt must be > 0, got {self.dt!r}")

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def span(self) -> float:
        return self.dt * (self.samples.size - 1)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)

    # ------------------------------------------------------------------ I/O

    def to_binary(self, path) -> None:
        flags = 1 if self.is_complex else 0
        data = np.ascontiguousarray(
            self.samples, dtype=np.complex128 if flags else np.float64
        )
        with open(path, "wb") as fh:
            fh.write(
                _HEADER.pack(
                    _MAGIC, _VERSION, flags, self.dt, self.t0, self.seed_id, data.size
                )
            )
            fh.write(data.astype("<c16" if flags else "<f8", copy=False).tobytes())

    @classmethod
    def from_binary(cls, path) -> "Trajectory":
        raw = Path(path).read_bytes()
        if len(raw) < _HEADER.size:
            raise DataFormatError(f"{path}: truncated header")
        magic, version, flags, dt, t0, seed_id, n = _HEADER.unpack_from(raw)
        if magic != _MAGIC:
            raise DataFormatError(f"{path}: bad magic {magic!r}")
        if version != _VERSION:
            raise DataFormatError(f"{path}: unsupported version {version}")
        dtype = np.dtype("<c16" if flags & 1 else "<f8")
        body = raw[_HEADER.size :]
        if len(body) != n * dtype.itemsize:
            raise DataFormatError(f"{path}: expected {n} samples, file is short or long")
        samples = np.frombuffer(body, dtype=dtype).copy()
        return cls(dt=dt, samples=samples, t0=t0, seed_id=seed_id)

    def to_csv(self, path) -> None:
        t = self.times
        if self.is_complex:
            cols = np.column_stack([t, self.samples.real, self.samples.imag])
            header = "t,re,im"
        else:
            cols = np.column_stack([t, self.samples])
            header = "t,value"
        meta = f"dt={self.dt!r} t0={self.t0!r} seed_id={self.seed_id}"
        np.savetxt(path, cols, delimiter=",", fmt="%.17g", header=f"{meta}\n{header}")

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        dt = t0 = None
        seed_id = -1
        with open(path) as fh:
            first = fh.readline()
        if first.startswith("#") and "dt=" in first:
            for tok in first[1:].split():
                if "=" in tok:
                    key, _, val = tok.partition("=")
                    if key == "dt":
                        dt = float(val)
                    elif key == "t0":
                        t0 = float(val)
                    elif key == "seed_id":
                        seed_id = int(val)
        arr = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
        if arr.shape[1] == 3:
            samples = arr[:, 1] + 1j * arr[:, 2]
        elif arr.shape[1] == 2:
            samples = arr[:, 1]
        else:
            raise DataFormatError(f"{path}: expected 2 or 3 columns, got {arr.shape[1]}")
        t = arr[:, 0]
        if dt is None:
            steps = np.diff(t)
            dt = float(steps[0])
            if not np.allclose(steps, dt, rtol=1e-6, atol=0):
                raise DataFormatError(f"{path}: time grid is not uniform")
        if t0 is None:
            t0 = float(t[0])
        return cls(dt=dt, samples=samples, t0=t0, seed_id=seed_id)


def stream_rng(master_seed: int, stream: int = 0) -> np.random.Generator:
    """Independent RNG for one trajectory of an ensemble.

    Streams are derived from (master_seed, stream) via SeedSequence
    spawn keys, so ensemble members are order-independent and safe to
    generate in parallel.
    """
    entropy = int(master_seed) & 0xFFFFFFFFFFFFFFFF
    ss = np.random.SeedSequence(entropy=entropy, spawn_key=(int(stream),))
    return np.random.default_rng(ss)


def generate_phidot(
    noise: NoiseModel,
    dt: float,
    n_steps: int,
    seed: int,
    stream: int = 0,
) -> Trajectory:
    """Stationary Gaussian phidot trajectory with the model's spectrum.

    Parametric models use the exact OU update
    x[k+1] = x[k]*exp(-gamma_c*dt) + xi[k] with
    Var(xi) = gamma_L*gamma_c*(1 - exp(-2*gamma_c*dt)) and the first
    sample drawn from the stationary distribution.  Requires
    dt*gamma_c < 0.1 so the correlation time is resolved.  The white
    sentinel accepts any dt.  Tabulated models are routed to
    `generate_phidot_tabulated`.
    """
    if n_steps < 2:
        raise InvalidParameterError("n_steps must be >= 2")
    if not (dt > 0):
        raise InvalidParameterError(f"dt must be > 0, got {dt!r}")
    if noise.kind == TABULATED:
        return generate_phidot_tabulated(noise, dt, n_steps, seed, stream)
    rng = stream_rng(seed, stream)
    if noise.is_white:
        scale = np.sqrt(2.0 * noise.gamma_L / dt)
        samples = rng.normal(0.0, scale, size=n_steps)
        return Trajectory(dt=dt, samples=samples, seed_id=stream)
    if dt * noise.gamma_c >= 0.1:
        raise ResolutionError(
            f"dt*gamma_c = {dt * noise.gamma_c:.3g} >= 0.1; "
            "decrease dt to resolve the noise correlation time"
        )
    var_stat = noise.gamma_L * noise.gamma_c
    a = np.exp(-noise.gamma_c * dt)
    innov = rng.normal(0.0, np.sqrt(var_stat * (1.0 - a * a)), size=n_steps - 1)
    x0 = rng.normal(0.0, np.sqrt(var_stat))
    drive = np.concatenate(([x0], innov))
    samples = lfilter([1.0], [1.0, -a], drive)
    return Trajectory(dt=dt, samples=samples, seed_id=stream)


def generate_phidot_tabulated(
    noise: NoiseModel,
    dt: float,
    n_steps: int,
    seed: int,
    stream: int = 0,
) -> Trajectory:
    """Gaussian stationary trajectory from a tabulated spectrum.

    Fourier synthesis: independent complex Gaussian amplitudes with
    E|X_k|^2 = n*S(Omega_k)/dt on the rfft grid, Hermitian-completed by
    the inverse real transform.  The expectation of the periodogram
    dt*|FFT|^2/n then equals S exactly on every bin.  The table must
    cover [0, pi/dt].
    """
    if noise.kind != TABULATED:
        raise InvalidParameterError("tabulated generator needs a tabulated model")
    if n_steps < 2:
        raise InvalidParameterError("n_steps must be >= 2")
    nyquist = np.pi / dt
    top = float(noise.table_omega[-1])
    if top < nyquist * (1.0 - 1e-9):
        raise CoverageError(
            f"table ends at {top:.6g} rad/s but the grid needs coverage up to "
            f"pi/dt = {nyquist:.6g} rad/s"
        )
    rng = stream_rng(seed, stream)
    omegas = 2.0 * np.pi * np.fft.rfftfreq(n_steps, dt)
    s_vals = noise.spectrum_at(omegas)
    z = rng.standard_normal(omegas.size) + 1j * rng.standard_normal(omegas.size)
    amps = np.sqrt(s_vals * n_steps / (2.0 * dt)) * z
    # DC (and Nyquist for even n) are their own conjugates: real, full variance
    amps[0] = np.sqrt(s_vals[0] * n_steps / dt) * z[0].real
    if n_steps % 2 == 0:
        amps[-1] = np.sqrt(s_vals[-1] * n_steps / dt) * z[-1].real
    samples = np.fft.irfft(amps, n=n_steps)
    return Trajectory(dt=dt, samples=samples, seed_id=stream)


def integrate_phase(phidot: Trajectory) -> Trajectory:
    """Cumulative trapezoidal integral of phidot with phi(t0) = 0."""
    phi = cumulative_trapezoid(phidot.samples, dx=phidot.dt, initial=0.0)
    return Trajectory(dt=phidot.dt, samples=phi, t0=phidot.t0, seed_id=phidot.seed_id)


def estimate_psd(traj: Trajectory, n_segments: int) -> SpectrumResult:
    """Segment-averaged periodogram of a trajectory.

    Real channels return the nonnegative-frequency grid with two-sided
    density normalization, so an OU trajectory converges to
    2*gamma_L*gamma_c^2/(gamma_c^2+Omega^2) bin by bin.  Complex
    channels return the full two-sided grid.  Per-bin standard errors
    come from the scatter across segments.
    """
    if n_segments < 1:
        raise InvalidParameterError("n_segments must be >= 1")
    seg_len = traj.n // n_segments
    if seg_len < 64:
        raise InvalidParameterError(
            f"{traj.n} samples split {n_segments} ways gives segments of "
            f"{seg_len} < 64"
        )
    x = traj.samples[: n_segments * seg_len].reshape(n_segments, seg_len)
    if traj.is_complex:
        spec = np.fft.fft(x, axis=1)
        order = np.argsort(np.fft.fftfreq(seg_len, traj.dt))
        omegas = 2.0 * np.pi * np.fft.fftfreq(seg_len, traj.dt)[order]
        power = (traj.dt / seg_len) * np.abs(spec[:, order]) ** 2
        label = "two_sided"
    else:
        spec = np.fft.rfft(x, axis=1)
        omegas = 2.0 * np.pi * np.fft.rfftfreq(seg_len, traj.dt)
        power = (traj.dt / seg_len) * np.abs(spec) ** 2
        label = "S_phidot"
    values = power.mean(axis=0)
    if n_segments > 1:
        errors = power.std(axis=0, ddof=1) / np.sqrt(n_segments)
    else:
        errors = np.zeros_like(values)
    return SpectrumResult(
        omegas=omegas, values=values, method=MONTECARLO, errors=errors, label=label
    )
