"""Noise generation statistics, phase integration, PSD estimation, trajectory I/O."""

import math

import numpy as np
import pytest
from scipy.stats import kurtosis

from omphase import CoverageError, InvalidParameterError, NoiseModel, ResolutionError
from omphase.noise import (
    Trajectory,
    estimate_psd,
    generate_phidot,
    generate_phidot_tabulated,
    integrate_phase,
    stream_rng,
)

SEED = 20240917


def _autocov(x, lag):
    if lag == 0:
        return float(np.mean(x * x))
    return float(np.mean(x[:-lag] * x[lag:]))


def _batched_autocov(x, lag, n_batches=40):
    chunks = np.array_split(x, n_batches)
    vals = np.array([_autocov(c, lag) for c in chunks])
    return vals.mean(), vals.std(ddof=1) / math.sqrt(n_batches)


# ------------------------------------------------------------- OU generation


def test_zero_linewidth_gives_zero_trajectory():
    for model in (NoiseModel.parametric(0.0, 1e3), NoiseModel.white(0.0)):
        traj = generate_phidot(model, dt=1e-5, n_steps=512, seed=SEED)
        assert np.all(traj.samples == 0.0)


def test_ou_variance_and_lag1():
    gamma_L, gamma_c, dt = 2.0, 1.0, 0.05
    n = 1_000_000
    traj = generate_phidot(NoiseModel.parametric(gamma_L, gamma_c), dt, n, SEED)
    x = traj.samples

    var_target = gamma_L * gamma_c
    var_hat = np.mean(x * x)
    # variance of the variance estimator for an OU chain
    sigma_var = var_target * math.sqrt(2.0 / (n * gamma_c * dt))
    assert abs(var_hat - var_target) < 3 * sigma_var

    rho_target = math.exp(-gamma_c * dt)
    rho_hat = np.sum(x[:-1] * x[1:]) / np.sum(x[:-1] ** 2)
    sigma_rho = math.sqrt((1 - rho_target**2) / n)
    assert abs(rho_hat - rho_target) < 3 * sigma_rho

    # stationary zero mean within 5 standard errors
    se_mean = math.sqrt(2 * gamma_L / (n * dt))
    assert abs(x.mean()) < 5 * se_mean


def test_ou_initial_sample_is_stationary():
    model = NoiseModel.parametric(3.0, 2.0)
    first = np.array(
        [generate_phidot(model, 1e-2, 2, SEED, stream=k).samples[0] for k in range(4000)]
    )
    var = first.var()
    target = 6.0
    assert abs(var - target) < 4 * target * math.sqrt(2 / 4000)


def test_resolution_guard():
    with pytest.raises(ResolutionError):
        generate_phidot(NoiseModel.parametric(1.0, 1e3), dt=2e-4, n_steps=128, seed=1)


def test_dt_refinement_invariance():
    # halving dt and decimating by 2 leaves the autocovariance unchanged
    model = NoiseModel.parametric(1.0, 1.0)
    n = 200_000
    coarse = generate_phidot(model, 0.04, n, SEED, stream=1).samples
    fine = generate_phidot(model, 0.02, 2 * n, SEED, stream=2).samples[::2]
    for lag in (0, 1, 3, 10):
        c1, s1 = _batched_autocov(coarse, lag)
        c2, s2 = _batched_autocov(fine, lag)
        z = (c1 - c2) / math.hypot(s1, s2)
        assert abs(z) < 3, f"lag {lag}: z = {z:.2f}"


def test_seed_determinism_and_stream_independence():
    model = NoiseModel.parametric(1.0, 10.0)
    a = generate_phidot(model, 1e-3, 4096, SEED, stream=7)
    b = generate_phidot(model, 1e-3, 4096, SEED, stream=7)
    c = generate_phidot(model, 1e-3, 4096, SEED, stream=8)
    np.testing.assert_array_equal(a.samples, b.samples)
    assert not np.array_equal(a.samples, c.samples)
    assert a.seed_id == 7


def test_white_sentinel_statistics():
    gamma_L, dt, n = 5.0, 1e-3, 1_000_000
    traj = generate_phidot(NoiseModel.white(gamma_L), dt, n, SEED)
    x = traj.samples
    var_target = 2 * gamma_L / dt
    assert abs(x.var() - var_target) < 3 * var_target * math.sqrt(2 / n)
    # white samples are uncorrelated and Gaussian
    rho = np.mean(x[:-1] * x[1:]) / x.var()
    assert abs(rho) < 3 / math.sqrt(n)
    assert abs(kurtosis(x)) < 5 * math.sqrt(24 / n)


# ---------------------------------------------------------------- tabulated


def _lorentzian_table(gamma_L, gamma_c, top, n_pts=4000):
    om = np.linspace(0.0, top, n_pts)
    return NoiseModel.tabulated(om, 2 * gamma_L * gamma_c**2 / (gamma_c**2 + om**2))


def test_tabulated_matches_parametric_spectrum():
    gamma_L, gamma_c, dt = 0.5, 1.0, 0.05
    par = NoiseModel.parametric(gamma_L, gamma_c)
    tab = _lorentzian_table(gamma_L, gamma_c, top=math.pi / dt * 1.001)
    n_real, n_steps, n_segments = 200, 8192, 8
    acc = None
    for k in range(n_real):
        traj = generate_phidot(tab, dt, n_steps, SEED, stream=k)
        res = estimate_psd(traj, n_segments=n_segments)
        acc = res.values if acc is None else acc + res.values
    mean_psd = acc / n_real
    omegas = res.omegas
    band = (omegas > 0.3) & (omegas < 5.0)
    # smooth over 4 bins, then compare midband to the closed form
    vals = mean_psd[band]
    oms = omegas[band]
    m = len(vals) // 4
    smooth = vals[: 4 * m].reshape(m, 4).mean(axis=1)
    centers = oms[: 4 * m].reshape(m, 4).mean(axis=1)
    target = par.spectrum_at(centers)
    assert np.max(np.abs(smooth / target - 1)) < 0.05


def test_tabulated_zero_and_flat():
    dt = 0.01
    top = math.pi / dt * 1.01
    zero = NoiseModel.tabulated([0.0, top], [0.0, 0.0])
    traj = generate_phidot_tabulated(zero, dt, 4096, SEED)
    assert np.all(traj.samples == 0.0)

    gamma_L = 3.0
    flat = NoiseModel.tabulated([0.0, top], [2 * gamma_L, 2 * gamma_L])
    n = 1_000_000
    traj = generate_phidot_tabulated(flat, dt, n, SEED)
    var_target = 2 * gamma_L / dt  # 2*gamma_L * (full Nyquist band) / 2pi
    assert abs(traj.samples.var() - var_target) < 3 * var_target * math.sqrt(2 / n)


def test_tabulated_coverage_error():
    tab = NoiseModel.tabulated([0.0, 10.0], [1.0, 1.0])
    with pytest.raises(CoverageError):
        generate_phidot_tabulated(tab, dt=0.05, n_steps=1024, seed=1)


def test_tabulated_routing_through_generate_phidot():
    tab = _lorentzian_table(1.0, 1.0, top=math.pi / 0.05 * 1.01)
    a = generate_phidot(tab, 0.05, 2048, SEED, stream=3)
    b = generate_phidot_tabulated(tab, 0.05, 2048, SEED, stream=3)
    np.testing.assert_array_equal(a.samples, b.samples)


# ----------------------------------------------------------- phase integral


def test_integrate_phase_trivial_cases():
    zero = Trajectory(dt=0.1, samples=np.zeros(100))
    assert np.all(integrate_phase(zero).samples == 0.0)

    const = Trajectory(dt=0.1, samples=np.full(100, 2.5))
    phi = integrate_phase(const)
    np.testing.assert_allclose(phi.samples, 2.5 * phi.times, rtol=1e-12, atol=1e-12)


def test_phase_variance_growth():
    # Var phi(t) = 2*gamma_L*(t - (1 - exp(-gamma_c t))/gamma_c) for the OU
    # drive, which stays below the diffusion bound 2*gamma_L*t.
    gamma_L, gamma_c, dt = 0.8, 1.0, 0.02
    n, n_real = 1500, 400
    model = NoiseModel.parametric(gamma_L, gamma_c)
    phis = np.empty((n_real, n))
    for k in range(n_real):
        phis[k] = integrate_phase(generate_phidot(model, dt, n, SEED, stream=k)).samples
    times = dt * np.arange(n)
    rel_sigma = math.sqrt(2.0 / (n_real - 1))
    for t_probe in (5.0, 15.0, 25.0):
        i = int(t_probe / dt)
        var_hat = phis[:, i].var()
        target = 2 * gamma_L * (times[i] - (1 - math.exp(-gamma_c * times[i])) / gamma_c)
        assert abs(var_hat - target) < 4 * rel_sigma * target
        assert var_hat < 2 * gamma_L * times[i] * (1 + 4 * rel_sigma)


# -------------------------------------------------------------- PSD estimate


def test_psd_zero_trajectory():
    traj = Trajectory(dt=0.1, samples=np.zeros(1024))
    res = estimate_psd(traj, n_segments=4)
    assert np.all(res.values == 0.0)


def test_psd_ou_dc_bin():
    gamma_L, gamma_c, dt = 2.0, 1.0, 0.05
    traj = generate_phidot(NoiseModel.parametric(gamma_L, gamma_c), dt, 1 << 17, SEED)
    res = estimate_psd(traj, n_segments=128)
    target = 2 * gamma_L
    err = max(res.errors[0], 0.05 * target)
    assert abs(res.values[0] - target) < 3 * err


def test_psd_white_is_flat():
    gamma_L, dt = 1.0, 1e-3
    traj = generate_phidot(NoiseModel.white(gamma_L), dt, 1 << 16, SEED)
    res = estimate_psd(traj, n_segments=64)
    target = 2 * gamma_L
    z = (res.values - target) / res.errors
    assert np.mean(np.abs(z) < 3) > 0.98
    assert abs(res.values.mean() - target) < 0.02 * target


def test_psd_preconditions():
    traj = Trajectory(dt=0.1, samples=np.zeros(100))
    with pytest.raises(InvalidParameterError):
        estimate_psd(traj, n_segments=0)
    with pytest.raises(InvalidParameterError):
        estimate_psd(traj, n_segments=2)  # segments would be shorter than 64


# ------------------------------------------------------------ trajectory I/O


def test_binary_round_trip(tmp_path):
    traj = generate_phidot(NoiseModel.parametric(1.0, 5.0), 1e-3, 512, SEED, stream=2)
    path = tmp_path / "traj.bin"
    traj.to_binary(path)
    back = Trajectory.from_binary(path)
    np.testing.assert_array_equal(back.samples, traj.samples)
    assert back.dt == traj.dt and back.t0 == traj.t0 and back.seed_id == traj.seed_id


def test_binary_round_trip_complex(tmp_path):
    rng = stream_rng(SEED)
    samples = rng.normal(size=256) + 1j * rng.normal(size=256)
    traj = Trajectory(dt=2e-4, samples=samples, t0=1.0, seed_id=9)
    path = tmp_path / "alpha.bin"
    traj.to_binary(path)
    back = Trajectory.from_binary(path)
    assert back.is_complex
    np.testing.assert_array_equal(back.samples, traj.samples)


def test_csv_round_trip(tmp_path):
    traj = generate_phidot(NoiseModel.white(2.0), 1e-3, 128, SEED)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    back = Trajectory.from_csv(path)
    np.testing.assert_array_equal(back.samples, traj.samples)
    assert back.dt == traj.dt
    assert back.seed_id == traj.seed_id


def test_from_binary_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    from omphase import DataFormatError

    with pytest.raises(DataFormatError):
        Trajectory.from_binary(path)
