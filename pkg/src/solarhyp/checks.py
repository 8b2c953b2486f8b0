"""Verification suite behind ``solarhyp --mode check``.

Each check compares an analytic quantity with an independent route and
reports the worst discrepancy against a pinned tolerance.
"""

from __future__ import annotations

import contextlib
import math
import random
from dataclasses import dataclass
from typing import Callable, Iterator

import mpmath

from . import energy, luminosity, oracle, profiles, specfun
from .profiles import Composition, ModelParams, PhysicalConstants

FD_STEP = 1e-5
FD_DPS = 60


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance  # NaN fails


def _rel(a, b) -> float:
    return abs(a - b) / abs(b)


def interior_grid(n: int) -> list[float]:
    """``n`` evenly spaced points strictly inside (0, 1)."""
    return [i / (n + 1) for i in range(1, n + 1)]


def derivative(f: Callable, x, h: float = FD_STEP):
    """Fourth-order central difference ``[f(x-2h) - 8f(x-h) + 8f(x+h) - f(x+2h)] / 12h``.

    Evaluated in mpmath at ``FD_DPS`` digits so rounding in ``f`` does not
    swamp the difference where the profiles flatten near the surface.
    """
    with mpmath.workdps(FD_DPS):
        X, H = mpmath.mpf(x), mpmath.mpf(h)
        return (f(X - 2 * H) - 8 * f(X - H) + 8 * f(X + H) - f(X + 2 * H)) / (12 * H)


def mass_conservation_residuals(xs, p: ModelParams, c: PhysicalConstants, comp: Composition,
                                h: float = FD_STEP) -> list[float]:
    """Relative error of ``M_sun dM/dx`` against ``4 pi R^3 rho_c x^2 f_D``."""
    cv = profiles.central_values(p, c, comp)
    out = []
    for x in xs:
        lhs = c.M_sun * derivative(lambda t: profiles.f_mass(t, p), x, h)
        with mpmath.workdps(FD_DPS):
            X = mpmath.mpf(x)
            rhs = 4 * mpmath.pi * mpmath.mpf(c.R_sun) ** 3 * cv.rho_c * X**2 * profiles.f_density(X, p)
            out.append(float(abs(lhs - rhs) / abs(rhs)))
    return out


def hydrostatic_residuals(xs, p: ModelParams, c: PhysicalConstants, comp: Composition,
                          h: float = FD_STEP) -> list[float]:
    """``|dP/dx + G M(x) rho(x) / (R x^2)|`` relative to the gravity term."""
    cv = profiles.central_values(p, c, comp)
    scale = profiles.pressure_scale(c)
    out = []
    for x in xs:
        dp = scale * derivative(lambda t: profiles.f_pressure(t, p), x, h)
        with mpmath.workdps(FD_DPS):
            X = mpmath.mpf(x)
            mass = c.M_sun * profiles.f_mass(X, p)
            rho = cv.rho_c * profiles.f_density(X, p)
            gravity = mpmath.mpf(c.G) * mass * rho / (c.R_sun * X**2)
            out.append(float(abs(dp + gravity) / abs(gravity)))
    return out


def boundary_errors(p: ModelParams) -> list[float]:
    return [
        abs(profiles.f_density(0.0, p) - 1),
        abs(profiles.f_density(1.0, p)),
        abs(profiles.f_mass(0.0, p)),
        abs(profiles.f_mass(1.0, p) - 1),
        abs(profiles.f_pressure(1.0, p)),
        abs(profiles.f_temperature(1.0, p)),
    ]


def perfect_gas_spread(p: ModelParams, xs) -> float:
    ratios = [
        profiles.f_pressure(x, p) / (profiles.f_temperature(x, p) * profiles.f_density(x, p))
        for x in xs
    ]
    return (max(ratios) - min(ratios)) / abs(sum(ratios) / len(ratios))


def gauss_theorem_errors(draws: int, seed: int = 0) -> list[float]:
    """Terminating sum at z=1 against the Gamma-ratio form, random parameters."""
    rng = random.Random(seed)
    errs = []
    for _ in range(draws):
        g = rng.randint(1, specfun.MAX_GAMMA)
        b = rng.uniform(0.1, 20.0)
        c = b + rng.uniform(0.5, 5.0)
        series = specfun.f21_terminating(specfun.TerminatingF21(-g, b, c, 1.0))
        errs.append(_rel(series, specfun.f21_at_one(-g, b, c)))
    return errs


@contextlib.contextmanager
def injected_eta_fault(index: int = 0, rel: float = 1e-3) -> Iterator[None]:
    """Scale one summand of eta(gamma) by ``1 + rel`` for the duration."""
    original = profiles.eta_terms

    def faulty(p):
        terms = original(p)
        terms[index] = terms[index] * (1 + rel)
        return terms

    profiles.eta_terms = faulty
    try:
        yield
    finally:
        profiles.eta_terms = original


def run_checks(
    p: ModelParams,
    c: PhysicalConstants,
    comp: Composition,
    *,
    tail_tol: float = energy.DEFAULT_TAIL_TOL,
    n_points: int = 16,
) -> list[CheckResult]:
    results = []
    add = results.append
    xs = interior_grid(n_points)
    cv = profiles.central_values(p, c, comp)

    add(CheckResult("boundary values", max(boundary_errors(p)), 1e-12))
    add(CheckResult(
        "mass vs quadrature",
        max(_rel(profiles.f_mass(x, p), oracle.quad_mass_fraction(x, p)) for x in xs), 1e-8))
    add(CheckResult(
        "pressure vs quadrature",
        max(_rel(profiles.f_pressure(x, p), oracle.quad_pressure_dimless(x, p)) for x in xs), 1e-8))
    add(CheckResult(
        "central density vs quadrature", _rel(cv.rho_c, oracle.quad_central_density(p, c)), 1e-10))
    add(CheckResult(
        "central pressure vs quadrature",
        _rel(cv.P_c, profiles.pressure_scale(c) * oracle.quad_pressure_dimless(0.0, p)), 1e-8))
    add(CheckResult(
        "central temperature closure",
        _rel(cv.T_c, profiles.temperature_scale(c, comp) * profiles.f_temperature(0.0, p)), 1e-12))
    f_p0 = profiles.f_pressure(0.0, p)
    add(CheckResult(
        "pressure ratio cross-path",
        max(abs(energy.pressure_ratio(x, p) - profiles.f_pressure(x, p) / f_p0)
            for x in [0.0, *xs, 1.0]), 1e-10))
    add(CheckResult(
        "perfect-gas closure", perfect_gas_spread(p, [0.999 * i / 32 for i in range(33)]), 1e-9))
    add(CheckResult("mass conservation residual",
                    max(mass_conservation_residuals(xs, p, c, comp)), 1e-6))
    add(CheckResult("hydrostatic residual", max(hydrostatic_residuals(xs, p, c, comp)), 1e-6))
    add(CheckResult("Gauss theorem", max(gauss_theorem_errors(40)), 1e-12))

    e = energy.epsilon_expansion(p, tol=tail_tol)
    ex_xs = [e.x_max * i / 20 for i in range(21)]
    add(CheckResult(
        "expansion vs direct",
        max(_rel(energy.epsilon_from_expansion(x, e, cv, p), energy.epsilon_direct(x, p, cv))
            for x in ex_xs),
        max(1e-6, e.tail_bound)))

    terms = luminosity.build_luminosity_terms(e, p, cv, c)
    l_xs = [0.05 * i for i in range(1, 11)]
    quad = oracle.quad_luminosity_grid(l_xs, p, cv, c)
    add(CheckResult(
        "luminosity vs quadrature",
        max(_rel(luminosity.luminosity_profile(x, terms), q) for x, q in zip(l_xs, quad)), 1e-6))
    add(CheckResult(
        "total luminosity closure",
        _rel(luminosity.luminosity_profile(1.0, terms), luminosity.total_luminosity(terms, p)),
        1e-12))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'max error':>10}  {'tolerance':>10}  result"]
    for r in results:
        err = "nan" if math.isnan(r.max_error) else f"{r.max_error:.3e}"
        lines.append(
            f"{r.name:<{width}}  {err:>10}  {r.tolerance:>10.1e}  {'PASS' if r.passed else 'FAIL'}"
        )
    return "\n".join(lines)
