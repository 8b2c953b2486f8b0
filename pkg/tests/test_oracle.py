import inspect
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from solarhyp import checks, oracle, profiles
from solarhyp.oracle import (
    QuadratureConfig,
    QuadratureError,
    half_peak_radius,
    multinomial_power,
    quad_integrate,
)
from solarhyp.profiles import ModelParams

P = ModelParams()


def test_linear_exact():
    assert quad_integrate(lambda x: 1 - x, 0.0, 1.0).value == 0.5


@pytest.mark.parametrize("f,expected,tol", [
    (lambda t: t * t, 1 / 3, 1e-14),
    (lambda t: t * t * (1 - t**3), 1 / 6, 1e-14),
    (lambda v: (1 - v) ** 10 * v**2.5,
     math.exp(math.lgamma(3.5) + math.lgamma(11) - math.lgamma(14.5)), 1e-12),
])
def test_reference_integrals(f, expected, tol):
    assert abs(quad_integrate(f, 0.0, 1.0).value - expected) <= tol * expected


def test_error_estimate_honours_tolerance():
    cfg = QuadratureConfig(rel_tol=1e-10, abs_tol=0.0)
    res = quad_integrate(math.exp, 0.0, 3.0, cfg)
    assert res.err_est <= max(cfg.rel_tol * abs(res.value), cfg.abs_tol)
    assert abs(res.value - (math.e**3 - 1)) <= 1e-12 * res.value


def test_empty_and_reversed_interval():
    assert quad_integrate(math.sin, 0.4, 0.4) == (0.0, 0.0)
    with pytest.raises(ValueError):
        quad_integrate(math.sin, 1.0, 0.0)


def test_depth_exhaustion_reports_partial_result():
    cfg = QuadratureConfig(rel_tol=1e-15, abs_tol=0.0, max_depth=10)
    with pytest.raises(QuadratureError) as info:
        quad_integrate(lambda x: x**-0.9 if x > 0 else 0.0, 0.0, 1.0, cfg)
    assert 0 < info.value.value < 10
    assert info.value.err_est > cfg.rel_tol * info.value.value


@pytest.mark.parametrize("kwargs", [dict(rel_tol=0.0), dict(abs_tol=-1.0), dict(max_depth=5)])
def test_config_invariants(kwargs):
    with pytest.raises(ValueError):
        QuadratureConfig(**kwargs)


@given(st.floats(0.5, 3.0), st.integers(1, 20), st.floats(0.01, 0.99))
def test_mass_fraction_matches_closed_form(delta, gamma, x):
    p = ModelParams(delta=delta, gamma=gamma)
    assert abs(oracle.quad_mass_fraction(x, p) - profiles.f_mass(x, p)) <= 1e-9 * profiles.f_mass(x, p)


def test_normalisations():
    assert oracle.quad_mass_fraction(1.0, P) == 1.0
    assert oracle.quad_pressure_dimless(1.0, P) == 0.0


def test_mass_fraction_point():
    assert abs(oracle.quad_mass_fraction(0.3, P) - profiles.f_mass(0.3, P)) <= 1e-9


def test_fundamental_theorem_round_trip():
    x = 0.3
    deriv = lambda t: float(checks.derivative(lambda u: profiles.f_mass(u, P), t)) if t > 2e-5 else 0.0
    cfg = QuadratureConfig(rel_tol=1e-11, abs_tol=0.0)
    recovered = quad_integrate(deriv, 0.0, x, cfg).value
    assert abs(recovered - profiles.f_mass(x, P)) <= 1e-9 * profiles.f_mass(x, P)


def test_half_peak_density_exact_form():
    expected = (1 - 2 ** (-1 / P.gamma)) ** (1 / P.delta)
    assert half_peak_radius(profiles.f_density, P) == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(0.1209773, abs=1e-7)


def test_half_peak_temperature_regression():
    assert half_peak_radius(profiles.f_temperature, P) == pytest.approx(0.3158044, abs=1e-7)


def test_half_peak_bracket_checked():
    with pytest.raises(ValueError):
        half_peak_radius(lambda x: 1.0 + x)


def test_multinomial_small_case():
    assert [float(c) for c in multinomial_power([1, 1], 2)] == [1, 2, 1]
    assert [float(c) for c in multinomial_power([1, 2, 3], 0)] == [1]


def test_oracle_does_not_call_closed_forms():
    src = inspect.getsource(oracle)
    for name in ("specfun", "f_mass", "f_pressure", "f_temperature", "hyp2f1", "h_polynomial"):
        assert name not in src
