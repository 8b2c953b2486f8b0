from dataclasses import replace

import mpmath
import pytest

from solarhyp import energy, oracle, profiles
from solarhyp.energy import PowerTerm, PowerTermExpansion, epsilon_expansion
from solarhyp.luminosity import (
    build_luminosity_terms,
    luminosity_profile,
    luminosity_shape,
    total_luminosity,
)
from solarhyp.profiles import Composition, ModelParams, PhysicalConstants, central_values
from solarhyp.specfun import complete_beta

P = ModelParams()
C = PhysicalConstants()
COMP = Composition()
CV = central_values(P, C, COMP)


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.fixture(scope="module")
def expansion():
    return epsilon_expansion(P)


@pytest.fixture(scope="module")
def terms(expansion):
    return build_luminosity_terms(expansion, P, CV, C)


def _single(p, s, q, multi):
    term = PowerTerm(mpmath.mpf(1), s, q, multi, p.delta * (s + multi) + 2 * q)
    return PowerTermExpansion((term,), 0, 0.0, 0.5, p, 30)


def test_s_star_leading_term():
    t = build_luminosity_terms(_single(P, 0, 0, 0), P, CV, C)
    assert float(t.terms[0].s_star) == pytest.approx(3 / P.delta, rel=1e-15)


def test_s_star_arithmetic():
    p = ModelParams(delta=1.0)
    t = build_luminosity_terms(_single(p, 2, 1, 3), p, central_values(p, C, COMP), C)
    assert t.terms[0].s_star == 10


def test_term_count_preserved(expansion, terms):
    assert len(terms.terms) == len(expansion.terms)
    assert all(t.s_star > 0 for t in terms.terms)


def test_scale_value(terms):
    expected = 4 * mpmath.pi * energy.central_rate(P, CV) * CV.rho_c * C.R_sun**3 / P.delta
    assert rel(terms.scale, float(expected)) <= 1e-14


def test_zero_at_centre(terms):
    assert luminosity_profile(0.0, terms) == 0.0


def test_domain(terms):
    with pytest.raises(ValueError):
        luminosity_profile(1.5, terms)


def test_against_quadrature_at_point(terms):
    assert rel(luminosity_profile(0.3, terms), oracle.quad_luminosity(0.3, P, CV, C)) <= 1e-6


def test_against_quadrature_grid(terms):
    xs = [0.05 * i for i in range(1, 11)]
    quad = oracle.quad_luminosity_grid(xs, P, CV, C)
    assert max(rel(luminosity_profile(x, terms), q) for x, q in zip(xs, quad)) <= 1e-6


def test_closure_with_total(terms):
    assert rel(luminosity_profile(1.0, terms), total_luminosity(terms, P)) <= 1e-12


def test_total_against_quadrature(terms):
    assert rel(total_luminosity(terms, P), oracle.quad_luminosity(1.0, P, CV, C)) <= 1e-6


def test_inner_fraction_regression(terms):
    # context only: solar-model tables put ~95% of the output inside x < 0.2
    assert luminosity_profile(0.2, terms) / total_luminosity(terms) == pytest.approx(0.92184, abs=1e-5)


def test_single_beta_term():
    assert complete_beta(3, 1) == pytest.approx(1 / 12, rel=1e-15)
    assert oracle.quad_integrate(lambda v: (1 - v) * v * v, 0.0, 1.0).value == pytest.approx(1 / 12, rel=1e-14)


def test_linear_in_epsilon0(expansion, terms):
    p3 = replace(P, epsilon0=3.0)
    tripled = build_luminosity_terms(epsilon_expansion(p3), p3, CV, C)
    for x in (0.1, 0.3, 1.0):
        assert luminosity_profile(x, tripled) == pytest.approx(3 * luminosity_profile(x, terms), rel=1e-15)


def test_integrand_bounded_at_surface():
    # rho * eps carries (1 - x**delta)**(gamma (n - m + 1)) times ratio**m; the ratio
    # vanishes like (1 - x)**(gamma + 2), so the product still goes to zero
    near = 1 - 1e-4
    rho = CV.rho_c * profiles.f_density(near, P)
    product = rho * energy.epsilon_direct(near, P, CV)
    assert product >= 0
    assert product < 1e-12 * CV.rho_c * energy.epsilon_direct(0.0, P, CV)
    farther = CV.rho_c * profiles.f_density(1 - 1e-3, P) * energy.epsilon_direct(1 - 1e-3, P, CV)
    assert product < farther


def test_shape_is_mp(terms):
    assert isinstance(luminosity_shape(0.2, terms), mpmath.mpf)


@pytest.mark.slow
def test_monotone_on_fine_grid(terms):
    xs = [i / 511 for i in range(512)]
    values = [luminosity_profile(x, terms) for x in xs]
    assert all(b >= a for a, b in zip(values, values[1:]))
