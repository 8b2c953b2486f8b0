import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solarhyp import oracle
from solarhyp.specfun import (
    DomainError,
    TerminatingF21,
    complete_beta,
    f21_at_one,
    f21_horner,
    f21_terminating,
    gamma_ratio,
    incomplete_beta_poly,
    pochhammer,
)

DELTA = 1.28


def rel(a, b):
    return abs(a - b) / abs(b)


def test_pochhammer_empty_product():
    assert pochhammer(5.0, 0) == 1


def test_pochhammer_exact_zero_past_degree():
    value = pochhammer(-3, 4)
    assert value == 0 and isinstance(value, int)
    # float input that is integral within tolerance also truncates exactly
    assert pochhammer(-3.0 + 1e-12, 7) == 0.0


def test_pochhammer_against_log_gamma():
    a = 2 / DELTA + 1
    expected = math.exp(math.lgamma(a + 10) - math.lgamma(a))
    assert rel(pochhammer(a, 10), expected) <= 1e-12


def test_pochhammer_rejects_negative_order():
    with pytest.raises(ValueError):
        pochhammer(1.5, -1)


@given(st.integers(-20, 20), st.integers(0, 15), st.integers(0, 15))
def test_pochhammer_split_integer_exact(a, j, k):
    assert pochhammer(a, j + k) == pochhammer(a, j) * pochhammer(a + j, k)


@given(
    st.floats(-20, 20).filter(lambda a: abs(a - round(a)) > 1e-3),
    st.integers(0, 15),
    st.integers(0, 15),
)
def test_pochhammer_split_real(a, j, k):
    lhs = pochhammer(a, j + k)
    rhs = pochhammer(a, j) * pochhammer(a + j, k)
    assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_f21_zero_argument():
    assert f21_terminating(TerminatingF21(-10, 2.3, 3.3, 0.0)) == 1.0


@pytest.mark.parametrize("b,c,z", [(0.5, 1.5, 0.3), (2.34, 3.34, 1.0), (7.0, 2.0, 0.9)])
def test_f21_degree_one(b, c, z):
    got = f21_terminating(TerminatingF21(-1, b, c, z))
    assert got == pytest.approx(1 - b / c * z, rel=1e-15)


def test_f21_matches_mass_quadrature():
    x = 0.5
    b = 3 / DELTA
    got = f21_terminating(TerminatingF21(-10, b, b + 1, x**DELTA))

    class P:
        delta, gamma = DELTA, 10

    expected = 3 / x**3 * oracle.mass_integral(x, P)
    assert rel(got, expected) <= 1e-10


@pytest.mark.parametrize("bad", [
    dict(neg_int_a=2, b=1.0, c=2.0, z=0.5),
    dict(neg_int_a=-1.5, b=1.0, c=2.0, z=0.5),
    dict(neg_int_a=-2, b=1.0, c=0.0, z=0.5),
    dict(neg_int_a=-2, b=1.0, c=2.0, z=1.5),
])
def test_terminating_f21_invariants(bad):
    with pytest.raises(ValueError):
        TerminatingF21(**bad)


def test_f21_mp_inputs_stay_mp():
    with mpmath.workdps(50):
        v = f21_terminating(TerminatingF21(-10, mpmath.mpf(2), mpmath.mpf(3), mpmath.mpf("0.5")))
        assert isinstance(v, mpmath.mpf)
        assert abs(v - mpmath.hyp2f1(-10, 2, 3, mpmath.mpf("0.5"))) <= mpmath.mpf(10) ** -45


def test_mass_prefactor_gauss_identity():
    g, b = 10, 3 / DELTA
    prefactor = pochhammer(b + 1, g) / math.factorial(g)
    assert f21_at_one(-g, b, b + 1) * prefactor == pytest.approx(1.0, rel=1e-13)


def test_f21_at_one_trivial():
    assert f21_at_one(0, 2.5, 4.0) == 1


def test_f21_at_one_matches_series():
    b = 2 / DELTA
    spec = TerminatingF21(-10, b, b + 1, 1.0)
    assert rel(f21_at_one(-10, b, b + 1), f21_terminating(spec)) <= 1e-12


def test_f21_at_one_non_terminating_divergent():
    with pytest.raises(DomainError):
        f21_at_one(0.5, 1.0, 1.2)


def test_f21_at_one_pole_in_c():
    with pytest.raises(DomainError):
        f21_at_one(-2, 1.0, -3.0)


def test_f21_at_one_chu_vandermonde_branch():
    # c - b < 0 sends Gamma arguments through poles; the product form still works
    got = f21_at_one(-3, 5.0, 2.0)
    exact = Fraction(pochhammer(-3, 3), pochhammer(2, 3))
    assert got == pytest.approx(float(exact), rel=1e-15)


def test_gamma_ratio_large_arguments_no_overflow():
    v = gamma_ratio((300.5,), (299.5,))
    assert v == pytest.approx(299.5, rel=1e-12)


@settings(max_examples=200)
@given(st.integers(1, 64), st.floats(0.1, 20.0), st.floats(0.5, 5.0))
def test_gauss_sum_equals_series(g, b, gap):
    c = b + gap
    series = f21_terminating(TerminatingF21(-g, b, c, 1.0))
    assert rel(series, f21_at_one(-g, b, c)) <= 1e-12


@given(st.integers(1, 64), st.floats(0.1, 20.0), st.floats(0.5, 5.0), st.floats(0.0, 1.0))
def test_horner_matches_ascending_sum(g, b, gap, z):
    spec = TerminatingF21(-g, b, b + gap, z)
    a, h = f21_terminating(spec), f21_horner(spec)
    assert abs(a - h) <= 1e-13 * abs(a)


def test_incomplete_beta_empty():
    assert incomplete_beta_poly(7, 2.5, 0.0) == 0


def test_incomplete_beta_unit():
    assert incomplete_beta_poly(1, 1, 1.0) == 0.5


def test_incomplete_beta_quadrature():
    expected = oracle.quad_integrate(lambda v: (1 - v) ** 10 * v**2.5, 0.0, 0.7).value
    assert rel(incomplete_beta_poly(10, 3.5, 0.7), expected) <= 1e-10


@pytest.mark.parametrize("args", [(-1, 1.0, 0.5), (3, 0.0, 0.5), (3, 1.0, 1.2), (2.5, 1.0, 0.5)])
def test_incomplete_beta_rejects(args):
    with pytest.raises(ValueError):
        incomplete_beta_poly(*args)


@given(st.integers(0, 64), st.floats(0.05, 40.0))
def test_incomplete_beta_complete_value(g, s):
    expected = math.exp(math.lgamma(s) + math.lgamma(g + 1) - math.lgamma(s + g + 1))
    assert rel(incomplete_beta_poly(g, s, 1.0), expected) <= 1e-12
    assert rel(complete_beta(s, g), expected) <= 1e-12


@given(st.integers(0, 30), st.floats(0.05, 20.0), st.lists(st.floats(0, 1), min_size=2, max_size=8))
def test_incomplete_beta_monotone(g, s, zs):
    zs = sorted(zs)
    values = [incomplete_beta_poly(g, s, z) for z in zs]
    assert all(b >= a for a, b in zip(values, values[1:]))
