"""Density, mass, pressure and temperature structure of the model core.

The density law ``rho = rho_c (1 - x**delta)**gamma`` fixes everything
else: mass follows from one integration, pressure from hydrostatic
equilibrium, temperature from the perfect-gas law.  All closed forms are
finite hypergeometric sums and are evaluated with mpmath at a precision
that grows with the cancellation near the surface, where pressure and
temperature vanish like high powers of ``1 - x``.

Float arguments return floats; ``mpmath.mpf`` arguments return mpf values
carrying at least the active mpmath precision, which is what the
finite-difference residual checks rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from functools import lru_cache
from numbers import Integral
from typing import NamedTuple

import mpmath

from . import specfun
from .specfun import TerminatingF21, f21_terminating, gamma_ratio, pochhammer

BASE_DPS = 30
SURFACE_GUARD = 1e-6
FIT_VALIDITY_XMAX = 0.3


class ParameterError(ValueError):
    """Invalid model input; ``problems`` lists every violated invariant."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def _as_int(value, name: str, problems: list[str]):
    if isinstance(value, bool):
        problems.append(f"{name} must be an integer, got {value!r}")
        return value
    if isinstance(value, Integral):
        return int(value)
    if isinstance(value, float) and value.is_integer():
        return int(value)
    problems.append(f"{name} must be an integer, got {value!r}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Shape (delta, gamma) and reaction (n, m, epsilon0) parameters."""

    delta: float = 1.28
    gamma: int = 10
    n_exp: int = 1
    m_exp: int = 4
    epsilon0: float = 1.0

    def __post_init__(self):
        problems: list[str] = []
        gamma = _as_int(self.gamma, "gamma", problems)
        n_exp = _as_int(self.n_exp, "n_exp", problems)
        m_exp = _as_int(self.m_exp, "m_exp", problems)
        if not (math.isfinite(self.delta) and self.delta > 0):
            problems.append(f"delta must be positive and finite, got {self.delta!r}")
        if isinstance(gamma, int) and not 1 <= gamma <= specfun.MAX_GAMMA:
            problems.append(f"gamma must lie in [1, {specfun.MAX_GAMMA}], got {gamma}")
        if isinstance(n_exp, int) and n_exp < 0:
            problems.append(f"n_exp must be nonnegative, got {n_exp}")
        if isinstance(m_exp, int) and isinstance(n_exp, int) and m_exp < n_exp:
            problems.append(f"m_exp must be >= n_exp, got m_exp={m_exp}, n_exp={n_exp}")
        if not (math.isfinite(self.epsilon0) and self.epsilon0 > 0):
            problems.append(f"epsilon0 must be positive and finite, got {self.epsilon0!r}")
        if problems:
            raise ParameterError(problems)
        object.__setattr__(self, "delta", float(self.delta))
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "n_exp", n_exp)
        object.__setattr__(self, "m_exp", m_exp)
        object.__setattr__(self, "epsilon0", float(self.epsilon0))


@dataclass(frozen=True)
class Composition:
    """Mass fractions of hydrogen, helium and metals."""

    X: float = 0.7
    Y: float = 0.28
    Z: float = 0.02

    def __post_init__(self):
        problems = [
            f"{f.name} must lie in [0, 1], got {getattr(self, f.name)!r}"
            for f in fields(self)
            if not 0 <= getattr(self, f.name) <= 1
        ]
        total = self.X + self.Y + self.Z
        if abs(total - 1) > 1e-12:
            problems.append(f"X+Y+Z must equal 1, got {total!r}")
        if problems:
            raise ParameterError(problems)


@dataclass(frozen=True)
class PhysicalConstants:
    """SI constants; solar values are the conventional model normalisation.

    ``molar_mass_unit`` (kg/mol) converts the dimensionless mean molecular
    weight into a molar mass, so ``P = rho k N_A T / (mu molar_mass_unit)``.
    """

    G: float = 6.67430e-11
    k: float = 1.380649e-23
    N_A: float = 6.02214076e23
    M_sun: float = 1.98892e30
    R_sun: float = 6.9598e8
    molar_mass_unit: float = 1e-3

    def __post_init__(self):
        problems = [
            f"{f.name} must be positive, got {getattr(self, f.name)!r}"
            for f in fields(self)
            if not (math.isfinite(getattr(self, f.name)) and getattr(self, f.name) > 0)
        ]
        if problems:
            raise ParameterError(problems)


@dataclass(frozen=True)
class CentralValues:
    rho_c: float
    P_c: float
    T_c: float
    mu: float
    eta_gamma: float


class ProfilePoint(NamedTuple):
    rho: float
    mass: float
    pressure: float
    temperature: float


def mean_molecular_weight(comp: Composition) -> float:
    """Mean molecular weight of a fully ionised mixture."""
    return 1.0 / (2 * comp.X + 0.75 * comp.Y + 0.5 * comp.Z)


def _check_x(x) -> None:
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")


def working_dps(x, p: ModelParams) -> int:
    """Decimal digits needed to evaluate the pressure bracket at ``x``.

    The alternating binomial weights cost about ``gamma log10 2`` digits and
    the bracket itself is O((1 - x**delta)**(gamma + 1)) against O(1) terms.
    """
    lost = p.gamma * math.log10(2.0)
    w = 1.0 - float(x) ** p.delta
    if 0 < w < 1:
        lost += (p.gamma + 2) * -math.log10(w)
    return max(mpmath.mp.dps, BASE_DPS + math.ceil(lost))


def _mp_delta(p: ModelParams):
    return mpmath.mpf(p.delta)


def _mass_prefactor_mp(p: ModelParams):
    # (3/delta + 1)_gamma / gamma!
    b = 3 / _mp_delta(p)
    return gamma_ratio((b + 1 + p.gamma,), (b + 1, mpmath.mpf(p.gamma + 1)))


def mass_prefactor(p: ModelParams) -> float:
    """``(3/delta+1)(3/delta+2)...(3/delta+gamma) / gamma!``."""
    with mpmath.workdps(BASE_DPS):
        return float(_mass_prefactor_mp(p))


def _finish(value, x):
    return value if isinstance(x, mpmath.mpf) else float(value)


def f_density(x, p: ModelParams):
    """``(1 - x**delta)**gamma``; 1 at the centre, 0 at the surface."""
    _check_x(x)
    if isinstance(x, mpmath.mpf):
        return (1 - x ** _mp_delta(p)) ** p.gamma
    return (1.0 - float(x) ** p.delta) ** p.gamma


def f_mass(x, p: ModelParams):
    """Enclosed mass fraction ``M(x)/M_sun``."""
    _check_x(x)
    if x == 0:
        return _finish(mpmath.mpf(0), x)
    # only the alternating binomial weights cancel here
    dps = max(mpmath.mp.dps, BASE_DPS + math.ceil(p.gamma * math.log10(2.0)))
    with mpmath.workdps(dps):
        X = mpmath.mpf(x)
        d = _mp_delta(p)
        b = 3 / d
        series = f21_terminating(TerminatingF21(-p.gamma, b, b + 1, X**d))
        value = _series_constants(p, mpmath.mp.prec)[3] * X**3 * series
    return _finish(value, x)


def _pressure_weight(m: int, p: ModelParams):
    d = _mp_delta(p)
    return pochhammer(-p.gamma, m) / (math.factorial(m) * (3 / d + m) * (2 / d + m))


@lru_cache(maxsize=256)
def _series_constants(p: ModelParams, prec: int):
    """Per-(params, precision) constants of the pressure series.

    Returns the outer weights, the full-range bracket values
    ``gamma!/(b_m+1)_gamma``, the coefficient rows of
    ``2F1(-gamma, b_m; b_m+1; z)`` for ``b_m = 2/delta + m``, and the mass
    prefactor.
    """
    with mpmath.workprec(prec):
        d = _mp_delta(p)
        g = p.gamma
        weights = [_pressure_weight(m, p) for m in range(g + 1)]
        full = [
            gamma_ratio((mpmath.mpf(g + 1), 2 / d + m + 1), (2 / d + m + 1 + g,))
            for m in range(g + 1)
        ]
        binom = [pochhammer(-g, k) / math.factorial(k) for k in range(g + 1)]
        rows = [[binom[k] * (2 / d + m) / (2 / d + m + k) for k in range(g + 1)]
                for m in range(g + 1)]
        return weights, full, rows, _mass_prefactor_mp(p)


def _pressure_series(X, p: ModelParams):
    """``sum_m w_m [gamma!/(b_m+1)_gamma - x**(delta m+2) 2F1(-gamma, b_m; b_m+1; x**delta)]``."""
    weights, full, rows, _ = _series_constants(p, mpmath.mp.prec)
    if X == 0:
        return mpmath.fsum(w * f for w, f in zip(weights, full))
    z = X ** _mp_delta(p)
    powers = [mpmath.mpf(1)]
    for _ in range(p.gamma):
        powers.append(powers[-1] * z)
    x2 = X * X
    terms = []
    for m, (w, f, row) in enumerate(zip(weights, full, rows)):
        partial = x2 * powers[m] * mpmath.fsum(c * zk for c, zk in zip(row, powers))
        terms.append(w * (f - partial))
    return mpmath.fsum(terms)


def eta_terms(p: ModelParams) -> list:
    """Summands of eta(gamma) at the active mpmath precision."""
    d = _mp_delta(p)
    terms = []
    for nu in range(p.gamma + 1):
        b = 2 / d + nu
        tail = gamma_ratio((mpmath.mpf(p.gamma + 1), b + 1), (b + 1 + p.gamma,))
        terms.append(_pressure_weight(nu, p) * tail)
    return terms


def _eta_mp(p: ModelParams):
    return mpmath.fsum(eta_terms(p))


def eta(p: ModelParams) -> float:
    """The finite sum eta(gamma) fixing the central pressure."""
    with mpmath.workdps(BASE_DPS):
        return float(_eta_mp(p))


def f_pressure(x, p: ModelParams):
    """Dimensionless pressure; ``P = (9/4pi) G M^2/R^4 f_P``."""
    _check_x(x)
    with mpmath.workdps(working_dps(x, p)):
        d = _mp_delta(p)
        pref = _series_constants(p, mpmath.mp.prec)[3]
        value = pref**2 / d**2 * _pressure_series(mpmath.mpf(x), p)
    return _finish(value, x)


def f_temperature(x, p: ModelParams):
    """Dimensionless temperature; ``T = 3 (mu M_u/k N_A) G M/R f_T``.

    Within ``SURFACE_GUARD`` of the surface the value is interpolated
    linearly to the boundary value 0 from the guard point.
    """
    _check_x(x)
    x_guard = 1 - SURFACE_GUARD
    if x == 1:
        return _finish(mpmath.mpf(0), x)
    if x >= x_guard:
        anchor = _temperature_interior(type(x)(x_guard), p)
        return _finish(anchor * (1 - x) / SURFACE_GUARD, x)
    return _finish(_temperature_interior(x, p), x)


def _temperature_interior(x, p: ModelParams):
    with mpmath.workdps(working_dps(x, p)):
        X = mpmath.mpf(x)
        d = _mp_delta(p)
        pref = _series_constants(p, mpmath.mp.prec)[3]
        return pref / d**2 * _pressure_series(X, p) / f_density(X, p)


def central_values(p: ModelParams, c: PhysicalConstants, comp: Composition) -> CentralValues:
    """Central density, pressure and temperature from the boundary conditions.

    ``M(1) = M_sun`` gives ``rho_c = 3 M/(4 pi R^3) (3/delta+1)_gamma/gamma!``.
    """
    mu = mean_molecular_weight(comp)
    with mpmath.workdps(BASE_DPS):
        pref = _mass_prefactor_mp(p)
        d = _mp_delta(p)
        eta_val = _eta_mp(p)
        M, R = mpmath.mpf(c.M_sun), mpmath.mpf(c.R_sun)
        rho_c = 3 * M / (4 * mpmath.pi * R**3) * pref
        P_c = 9 / (4 * mpmath.pi) * c.G * M**2 / R**4 * pref**2 / d**2 * eta_val
        T_c = mu * c.molar_mass_unit * P_c / (mpmath.mpf(c.k) * c.N_A * rho_c)
        return CentralValues(float(rho_c), float(P_c), float(T_c), mu, float(eta_val))


def pressure_scale(c: PhysicalConstants) -> float:
    return 9 / (4 * math.pi) * c.G * c.M_sun**2 / c.R_sun**4


def temperature_scale(c: PhysicalConstants, comp: Composition) -> float:
    mu = mean_molecular_weight(comp)
    return 3 * mu * c.molar_mass_unit / (c.k * c.N_A) * c.G * c.M_sun / c.R_sun


def physical_profiles(
    x: float,
    p: ModelParams,
    c: PhysicalConstants,
    comp: Composition,
    cv: CentralValues,
) -> ProfilePoint:
    """Density (kg/m^3), enclosed mass (kg), pressure (Pa), temperature (K)."""
    _check_x(x)
    return ProfilePoint(
        rho=cv.rho_c * f_density(x, p),
        mass=c.M_sun * f_mass(x, p),
        pressure=pressure_scale(c) * f_pressure(x, p),
        temperature=temperature_scale(c, comp) * f_temperature(x, p),
    )
