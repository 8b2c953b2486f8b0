"""Cumulative luminosity ``L(x) = 4 pi R^3 int_0^x t^2 rho eps dt``.

Each power term ``c x**(delta k + 2 q)`` of the rate expansion, multiplied
by ``t**2 (1 - t**delta)**gamma`` and substituted with ``v = t**delta``,
integrates to ``c B_{x**delta}(s*, gamma + 1) / delta`` where
``s* = k + (3 + 2 q) / delta``.  The total luminosity replaces every
incomplete beta value by the complete one.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .energy import PowerTermExpansion, central_rate
from .profiles import CentralValues, ModelParams, PhysicalConstants
from .specfun import complete_beta, incomplete_beta_poly


@dataclass(frozen=True)
class LuminosityTerm:
    coefficient: mpmath.mpf
    s_star: mpmath.mpf


@dataclass(frozen=True)
class LuminosityTermSet:
    terms: tuple
    scale: float
    gamma: int
    delta: float
    dps: int


def build_luminosity_terms(
    e: PowerTermExpansion,
    p: ModelParams,
    cv: CentralValues,
    c: PhysicalConstants | None = None,
) -> LuminosityTermSet:
    """One incomplete-beta term per expansion term.

    ``scale = 4 pi eps0 rho_c**(n+1) T_c**m R**3 / delta`` in watts.
    """
    c = c or PhysicalConstants()
    with mpmath.workdps(e.dps):
        d = mpmath.mpf(p.delta)
        terms = tuple(
            LuminosityTerm(t.coefficient, t.s + t.multi_exponent + (3 + 2 * t.q) / d)
            for t in e.terms
        )
    scale = 4 * mpmath.pi * central_rate(p, cv) * cv.rho_c * c.R_sun**3 / p.delta
    return LuminosityTermSet(terms, float(scale), p.gamma, p.delta, e.dps)


def _check_x(x) -> None:
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")


def luminosity_shape(x, t: LuminosityTermSet):
    """``L(x) / scale`` as an mpmath number."""
    _check_x(x)
    with mpmath.workdps(t.dps):
        z = mpmath.mpf(x) ** mpmath.mpf(t.delta)
        if z == 0:
            return mpmath.mpf(0)
        return mpmath.fsum(
            term.coefficient * incomplete_beta_poly(t.gamma, term.s_star, z) for term in t.terms
        )


def luminosity_profile(x, t: LuminosityTermSet) -> float:
    """Energy outflow through the sphere of radius ``x R`` in watts."""
    return t.scale * float(luminosity_shape(x, t))


def total_luminosity(t: LuminosityTermSet, p: ModelParams | None = None) -> float:
    """``L(1)`` through the Gauss sum at unit argument."""
    gamma = p.gamma if p is not None else t.gamma
    with mpmath.workdps(t.dps):
        total = mpmath.fsum(term.coefficient * complete_beta(term.s_star, gamma) for term in t.terms)
    return t.scale * float(total)
