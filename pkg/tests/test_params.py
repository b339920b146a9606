"""Parameter containers, noise models, regime validation, config parsing."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from omphase import (
    AmbiguousParameterError,
    ConfigError,
    InvalidParameterError,
    NoiseModel,
    StabilityError,
    SystemParams,
    validate,
)
from omphase.config import build_noise, build_system, parse_config
from omphase.errors import RegimeError
from omphase.params import check_regime

TWO_PI = 2 * math.pi


def typical_params(**over):
    base = dict(
        omega_m=TWO_PI * 1e7,
        kappa=TWO_PI * 1e6,
        g0=TWO_PI * 1.0,
        photon_number=1e10,
    )
    base.update(over)
    return SystemParams(**base)


# ---------------------------------------------------------------- noise model


def test_parametric_spectrum_values():
    m = NoiseModel.parametric(gamma_L=100.0, gamma_c=5e4)
    assert m.spectrum_at(0.0) == pytest.approx(200.0)
    # half-power point at the cutoff
    assert m.spectrum_at(5e4) == pytest.approx(100.0)
    assert m.spectrum_at(-5e4) == pytest.approx(100.0)


def test_white_sentinel_is_flat():
    m = NoiseModel.white(gamma_L=123.0)
    assert m.is_white
    for omega in (0.0, 1e3, 1e9, -2e12):
        assert m.spectrum_at(omega) == pytest.approx(246.0)


@pytest.mark.parametrize(
    "model",
    [
        NoiseModel.parametric(10.0, 1e4),
        NoiseModel.white(10.0),
        NoiseModel.tabulated([0.0, 1e3, 5e3], [4.0, 2.0, 1.0]),
    ],
)
def test_spectrum_is_even(model):
    omegas = np.array([0.0, 17.0, 999.0, 4.3e3])
    np.testing.assert_allclose(model.spectrum_at(-omegas), model.spectrum_at(omegas))


def test_parametric_integral_matches_variance():
    # integral over dOmega/2pi must equal {phidot^2} = gamma_L * gamma_c
    gamma_L, gamma_c = 37.0, 2.1e4
    m = NoiseModel.parametric(gamma_L, gamma_c)
    val, _ = quad(m.spectrum_at, -np.inf, np.inf)
    assert val / TWO_PI == pytest.approx(gamma_L * gamma_c, rel=1e-3)
    assert m.variance() == pytest.approx(gamma_L * gamma_c)


def test_tabulated_interpolation_and_range():
    m = NoiseModel.tabulated([1e3, 2e3], [2.0, 4.0])
    assert m.spectrum_at(1.5e3) == pytest.approx(3.0)
    # zero outside the tabulated range, both sides
    assert m.spectrum_at(10.0) == 0.0
    assert m.spectrum_at(1e6) == 0.0


def test_tabulated_validation():
    with pytest.raises(InvalidParameterError):
        NoiseModel.tabulated([0.0, -1.0], [1.0, 1.0])
    with pytest.raises(InvalidParameterError):
        NoiseModel.tabulated([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(InvalidParameterError):
        NoiseModel.tabulated([0.0, 1.0, 1.0], [1.0, 1.0, 1.0])
    with pytest.raises(InvalidParameterError):
        NoiseModel.tabulated([0.0], [1.0])


def test_noise_model_digest_distinguishes():
    a = NoiseModel.parametric(10.0, 1e4)
    b = NoiseModel.parametric(10.0, 1e4)
    c = NoiseModel.parametric(10.0, 2e4)
    assert a.digest() == b.digest()
    assert a.digest() != c.digest()


def test_vector_spectrum_shape():
    m = NoiseModel.parametric(1.0, 1e3)
    out = m.spectrum_at(np.linspace(-1e4, 1e4, 7))
    assert out.shape == (7,)
    assert isinstance(m.spectrum_at(0.0), float)


# ------------------------------------------------------------- system params


def test_photon_number_from_drive_amplitude():
    delta = -TWO_PI * 3e6
    kappa = TWO_PI * 1e6
    e0 = TWO_PI * 5e8
    p = SystemParams(
        omega_m=TWO_PI * 1e7, kappa=kappa, g0=TWO_PI, delta=delta, drive_amplitude=e0
    )
    assert p.n_photon == pytest.approx(e0**2 / (kappa**2 + delta**2), rel=1e-12)
    # alpha0 is the steady state of the noiseless filter
    alpha0 = e0 / (kappa - 1j * delta)
    assert p.alpha0 == pytest.approx(alpha0)
    assert abs(p.alpha0) ** 2 == pytest.approx(p.n_photon)


def test_drive_amplitude_round_trip():
    p = typical_params()
    q = p.with_changes(drive_amplitude=p.e0)
    assert q.n_photon == pytest.approx(p.n_photon, rel=1e-12)


def test_default_detuning_is_optimal():
    p = typical_params()
    assert p.delta is None
    assert p.detuning == pytest.approx(-math.hypot(p.kappa, p.omega_m))
    q = p.with_changes(delta=-p.omega_m)
    assert q.detuning == -p.omega_m


def test_exactly_one_drive_spec():
    with pytest.raises(AmbiguousParameterError):
        SystemParams(
            omega_m=1.0, kappa=0.1, g0=1e-3, drive_amplitude=1.0, photon_number=1.0
        )
    with pytest.raises(InvalidParameterError):
        SystemParams(omega_m=1.0, kappa=0.1, g0=1e-3)


@pytest.mark.parametrize("field", ["omega_m", "kappa", "g0"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan, math.inf])
def test_nonpositive_rates_rejected(field, bad):
    kwargs = dict(omega_m=1.0, kappa=0.1, g0=1e-3, photon_number=10.0)
    kwargs[field] = bad
    with pytest.raises(InvalidParameterError):
        SystemParams(**kwargs)


def test_negative_gamma_m_rejected():
    with pytest.raises(InvalidParameterError):
        typical_params(gamma_m=-1.0)


# ----------------------------------------------------------------- validation


def test_typical_cooling_regime_flags():
    p = typical_params()
    report = validate(p, NoiseModel.parametric(TWO_PI * 1e3, TWO_PI * 1e5))
    assert report.sideband_resolved
    assert report.small_phase
    assert report.stability


def test_zero_noise_small_phase_trivially():
    report = validate(typical_params(), NoiseModel.white(0.0))
    assert report.small_phase


def test_stability_boundary_raises():
    p = typical_params()
    # G = omega_m / 2 exactly via photon_number
    n = (p.omega_m / 2 / p.g0) ** 2
    with pytest.raises(StabilityError):
        validate(p.with_changes(photon_number=n), NoiseModel.white(0.0))


def test_weak_and_strong_flags():
    p = typical_params()
    weak = p.with_changes(photon_number=(p.kappa / 20 / p.g0) ** 2)
    rep = validate(weak, NoiseModel.white(0.0))
    assert rep.weak_coupling and not rep.strong_coupling

    strong = p.with_changes(
        kappa=p.omega_m / 1000, photon_number=(p.omega_m / 50 / p.g0) ** 2
    )
    rep = validate(strong, NoiseModel.white(0.0))
    assert rep.strong_coupling and not rep.weak_coupling


def test_check_regime_forced():
    p = typical_params()  # G far below 10 kappa
    noise = NoiseModel.white(0.0)
    with pytest.raises(RegimeError):
        check_regime(p, noise, "strong_coupling")
    report = check_regime(p, noise, "strong_coupling", force=True)
    assert not report.strong_coupling


def test_tabulated_range_warning():
    p = typical_params()
    noise = NoiseModel.tabulated([0.0, 1e5], [1.0, 1.0])
    report = validate(p, noise)
    assert any("zero outside" in w for w in report.warnings)


# -------------------------------------------------------------------- config


def test_parse_config_units_and_comments():
    text = """
    # system
    omega_m = 10 mhz
    kappa   = 1 mhz
    g0      = 100 hz   # single-photon coupling
    photon_number = 1e10
    gamma_L = 1 khz
    gamma_c = 0.5 mhz
    seed    = 42
    label   = run_a
    """
    cfg = parse_config(text)
    assert cfg["omega_m"] == pytest.approx(TWO_PI * 1e7)
    assert cfg["kappa"] == pytest.approx(TWO_PI * 1e6)
    assert cfg["g0"] == pytest.approx(TWO_PI * 100)
    assert cfg["photon_number"] == pytest.approx(1e10)
    assert cfg["gamma_L"] == pytest.approx(TWO_PI * 1e3)
    assert cfg["seed"] == 42
    assert cfg["label"] == "run_a"


def test_parse_config_rad_s_passthrough_and_time():
    cfg = parse_config("delta = -6.28 rad_s\ndt = 10 ns\nt_end = 2 ms")
    assert cfg["delta"] == pytest.approx(-6.28)
    assert cfg["dt"] == pytest.approx(1e-8)
    assert cfg["t_end"] == pytest.approx(2e-3)


def test_parse_config_errors_carry_line_numbers():
    with pytest.raises(ConfigError) as err:
        parse_config("omega_m = 10 mhz\nkappa = 1")  # missing unit
    assert err.value.line == 2
    with pytest.raises(ConfigError) as err:
        parse_config("omega_m = 10 parsec")
    assert err.value.line == 1
    with pytest.raises(ConfigError) as err:
        parse_config("seed = 1\nseed = 2")
    assert err.value.line == 2
    with pytest.raises(ConfigError):
        parse_config("just some words")


def test_delta_op_sentinel_and_white():
    cfg = parse_config("delta = op\ngamma_c = inf")
    assert cfg["delta"] is None
    assert math.isinf(cfg["gamma_c"])


def test_build_system_and_noise(tmp_path):
    cfg = parse_config(
        "omega_m = 10 mhz\nkappa = 1 mhz\ng0 = 100 hz\nphoton_number = 1e8\n"
        "kind = parametric\ngamma_L = 1 khz\ngamma_c = 1 mhz"
    )
    p = build_system(cfg)
    assert p.omega_m == pytest.approx(TWO_PI * 1e7)
    noise = build_noise(cfg)
    assert noise.kind == "parametric"
    assert noise.gamma_c == pytest.approx(TWO_PI * 1e6)

    table = tmp_path / "spec.csv"
    table.write_text("# omega_rad_s, s_phidot\n0.0,2.0\n1e6,1.0\n")
    noise = build_noise({"kind": "tabulated", "table": str(table)})
    assert noise.kind == "tabulated"
    assert noise.spectrum_at(0.0) == pytest.approx(2.0)

    with pytest.raises(ConfigError):
        build_system(parse_config("omega_m = 1 mhz"))
    with pytest.raises(ConfigError):
        build_noise({"kind": "fractal"})


def test_build_noise_white_paths():
    assert build_noise(parse_config("kind = white\ngamma_L = 10 rad_s")).is_white
    assert build_noise(parse_config("gamma_L = 10 rad_s")).is_white  # gamma_c default inf
