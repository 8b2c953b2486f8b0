"""Brute-force reference values for the closed forms.

Everything here integrates the defining differential relations
numerically: mass conservation, hydrostatic equilibrium and the energy
integral.  Nothing calls the hypergeometric closed forms being checked.
The density law itself is re-implemented locally since it is the model's
starting assumption.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import mpmath
import numpy as np

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (positive half)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[1:7:2] = _WG[:3]
_WG_FULL[7] = _WG[3]
_WG_FULL[9:15:2] = _WG[2::-1]


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-15
    max_depth: int = 60

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol >= 0):
            raise ValueError("tolerances must be positive")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")


# abs_tol = 0 keeps relative accuracy for integrals that are tiny near the surface
RELATIVE_ONLY = QuadratureConfig(rel_tol=1e-12, abs_tol=0.0)


class QuadResult(NamedTuple):
    value: float
    err_est: float


class QuadratureError(RuntimeError):
    """Adaptive refinement hit ``max_depth``; carries the partial result."""

    def __init__(self, message: str, value: float, err_est: float):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


def _gk15(f, a: float, b: float, vectorized: bool):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x = mid + half * _NODES
    y = np.asarray(f(x) if vectorized else [f(float(t)) for t in x], dtype=float)
    kronrod = half * float(np.dot(_WK, y))
    gauss = half * float(np.dot(_WG_FULL, y))
    return kronrod, abs(kronrod - gauss)


def quad_integrate(
    f: Callable,
    a: float,
    b: float,
    cfg: QuadratureConfig = QuadratureConfig(),
    *,
    vectorized: bool = False,
) -> QuadResult:
    """Globally adaptive Gauss-Kronrod (7/15) quadrature.

    The interval with the largest |K15 - G7| discrepancy is bisected until
    the summed discrepancy is within ``max(rel_tol |I|, abs_tol)``.  The
    reported error is that sum, so it bounds the G7 error and is a
    pessimistic bound for the returned K15 value.
    """
    if a > b:
        raise ValueError(f"need a <= b, got a={a!r}, b={b!r}")
    if a == b:
        return QuadResult(0.0, 0.0)
    value, err = _gk15(f, a, b, vectorized)
    heap = [(-err, a, b, value, err, 0)]
    while True:
        total = math.fsum(item[3] for item in heap)
        total_err = math.fsum(item[4] for item in heap)
        if total_err <= max(cfg.rel_tol * abs(total), cfg.abs_tol):
            return QuadResult(total, total_err)
        worst = heapq.heappop(heap)
        _, lo, hi, _, _, depth = worst
        if depth >= cfg.max_depth:
            raise QuadratureError(
                f"max_depth {cfg.max_depth} reached on [{lo}, {hi}]", total, total_err
            )
        mid = 0.5 * (lo + hi)
        for u, v in ((lo, mid), (mid, hi)):
            val, e = _gk15(f, u, v, vectorized)
            heapq.heappush(heap, (-e, u, v, val, e, depth + 1))


def density_shape(t, delta: float, gamma: int):
    """``(1 - t**delta)**gamma`` with the bracket formed via expm1."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        w = -np.expm1(delta * np.log(t))
    return np.where(t > 0, w, 1.0) ** gamma


def _mass_integrand(p):
    return lambda t: t * t * density_shape(t, p.delta, p.gamma)


def mass_integral(x: float, p, cfg: QuadratureConfig = RELATIVE_ONLY) -> float:
    """``int_0^x t**2 f_D(t) dt``."""
    return quad_integrate(_mass_integrand(p), 0.0, float(x), cfg, vectorized=True).value


def quad_mass_fraction(x: float, p, cfg: QuadratureConfig = RELATIVE_ONLY) -> float:
    """``M(x)/M_sun`` as a ratio of two mass integrals."""
    _check_x(x)
    return mass_integral(x, p, cfg) / mass_integral(1.0, p, cfg)


def quad_pressure_dimless(x: float, p, cfg: QuadratureConfig = RELATIVE_ONLY) -> float:
    """Dimensionless pressure from integrating hydrostatic equilibrium inward.

    With ``P = (9/4pi) G M^2/R^4 f_P`` and ``rho_c = M/(4 pi R^3 I1)``,
    ``dP/dx = -G M(x) rho(x) / (R x^2)`` integrates to
    ``f_P(x) = int_x^1 m(t) f_D(t) / t^2 dt / (9 I1**2)`` where ``m`` is the
    mass integral and ``I1 = m(1)``.
    """
    _check_x(x)
    inner = _mass_integrand(p)

    def integrand(ts):
        order = np.argsort(ts)
        m = np.empty_like(ts)
        acc, prev = 0.0, 0.0
        for i in order:
            acc += quad_integrate(inner, prev, float(ts[i]), cfg, vectorized=True).value
            prev = float(ts[i])
            m[i] = acc
        return m * density_shape(ts, p.delta, p.gamma) / ts**2

    i1 = mass_integral(1.0, p, cfg)
    outer = quad_integrate(integrand, float(x), 1.0, cfg, vectorized=True).value
    return outer / (9 * i1 * i1)


def quad_central_density(p, c, cfg: QuadratureConfig = RELATIVE_ONLY) -> float:
    """``rho_c`` from ``M(1) = M_sun``."""
    return c.M_sun / (4 * math.pi * c.R_sun**3 * mass_integral(1.0, p, cfg))


SURFACE_CUTOFF = 1e-9


def quad_luminosity_grid(xs, p, cv, c, cfg: QuadratureConfig = RELATIVE_ONLY) -> list[float]:
    """``L(x)`` on an increasing grid, integrating the pointwise rate.

    Uses :func:`solarhyp.energy.epsilon_direct`, which does not involve the
    series expansion.  The integrand vanishes like a high power of
    ``1 - x`` while the rate alone diverges there, so integration stops at
    ``1 - SURFACE_CUTOFF``; the omitted piece is below
    ``integrand(1 - SURFACE_CUTOFF) * SURFACE_CUTOFF``, far under double
    precision of the total.
    """
    from .energy import epsilon_direct

    def integrand(t: float) -> float:
        if t <= 0:
            return 0.0
        return t * t * float(density_shape(t, p.delta, p.gamma)) * epsilon_direct(t, p, cv)

    scale = 4 * math.pi * c.R_sun**3 * cv.rho_c
    out, acc, prev = [], 0.0, 0.0
    for x in xs:
        _check_x(x)
        if x < prev:
            raise ValueError("grid must be nondecreasing")
        upper = min(float(x), 1 - SURFACE_CUTOFF)
        if upper > prev:
            acc += quad_integrate(integrand, prev, upper, cfg).value
            prev = upper
        out.append(scale * acc)
    return out


def quad_luminosity(x: float, p, cv, c, cfg: QuadratureConfig = RELATIVE_ONLY) -> float:
    return quad_luminosity_grid([x], p, cv, c, cfg)[0]


def half_peak_radius(f: Callable, p=None, tol: float = 1e-10) -> float:
    """Bisection root of ``f(x) = f(0)/2`` on [0, 1]."""
    call = (lambda x: f(x)) if p is None else (lambda x: f(x, p))
    target = 0.5 * call(0.0)
    lo, hi = 0.0, 1.0
    if not (target > 0 and call(hi) < target):
        raise ValueError("half-peak bracket fails: need f(0) > 0 and f(1) < f(0)/2")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if call(mid) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def multinomial_power(coeffs, q: int) -> list:
    """Coefficients of ``(sum_i a_i y**i)**q`` by explicit multinomial sums."""
    coeffs = [mpmath.mpf(a) for a in coeffs]
    out = [mpmath.mpf(0)] * (q * (len(coeffs) - 1) + 1)
    for combo in itertools.combinations_with_replacement(range(len(coeffs)), q):
        counts = [combo.count(i) for i in range(len(coeffs))]
        weight = math.factorial(q)
        term = mpmath.mpf(1)
        for i, n_i in enumerate(counts):
            weight //= math.factorial(n_i)
            term *= coeffs[i] ** n_i
        out[sum(combo)] += weight * term
    return out


def _check_x(x) -> None:
    if not 0 <= x <= 1:
        raise ValueError(f"x must lie in [0, 1], got {x!r}")
