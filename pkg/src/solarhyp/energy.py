"""Nuclear energy generation rate ``eps = eps0 rho**n T**m``.

Two evaluators are provided.  :func:`epsilon_direct` follows the pointwise
form ``eps0 rho_c**n T_c**m (P/P_c)**m (1 - x**delta)**(gamma (n - m))``.
:func:`epsilon_expansion` materialises the same rate as a finite list of
power terms ``c x**(delta k + 2 q)``, the form that integrates term by term
into the luminosity.

The expansion multiplies three series:

* the binomial series of ``(1 - x**delta)**(-gamma (m - n))``, which does
  not terminate and is truncated at order ``S`` with a ratio-test tail
  bound;
* the finite binomial sum of ``(1 - x**2 h(x) / eta)**m``;
* the powers ``h(x)**q`` of the degree-``2 gamma`` polynomial ``h`` in
  ``x**delta``, formed by repeated convolution.

The coefficients alternate in sign and cancel by twenty or more orders of
magnitude at ``x = 0.5``, so they are kept as mpmath numbers at a
precision chosen from their absolute sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath

from . import profiles
from .profiles import BASE_DPS, CentralValues, ModelParams, working_dps
from .specfun import pochhammer

DEFAULT_X_MAX = 0.5
DEFAULT_TAIL_TOL = 1e-8
MAX_TRUNCATION = 20000


@dataclass(frozen=True)
class HPolynomial:
    """Coefficients a_0..a_{2 gamma} of h in powers of ``x**delta``."""

    coeffs: tuple
    delta: float

    def __post_init__(self):
        if len(self.coeffs) % 2 != 1:
            raise ValueError("h polynomial must have 2*gamma + 1 coefficients")

    @property
    def gamma(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def __call__(self, x):
        z = mpmath.mpf(x) ** mpmath.mpf(self.delta)
        return mpmath.polyval(list(reversed(self.coeffs)), z)


def _h_summand(m1: int, m2: int, p: ModelParams):
    d = mpmath.mpf(p.delta)
    return (
        pochhammer(-p.gamma, m1) * pochhammer(-p.gamma, m2)
        / (math.factorial(m1) * math.factorial(m2) * (3 / d + m1) * (2 / d + m1 + m2))
    )


@lru_cache(maxsize=256)
def _h_coeffs(p: ModelParams, prec: int) -> tuple:
    with mpmath.workprec(prec):
        g = p.gamma
        return tuple(
            mpmath.fsum(_h_summand(m1, j - m1, p) for m1 in range(max(0, j - g), min(g, j) + 1))
            for j in range(2 * g + 1)
        )


def h_polynomial(p: ModelParams) -> HPolynomial:
    """Collect the double sum for h by total power ``m1 + m2``."""
    return HPolynomial(_h_coeffs(p, mpmath.mp.prec), p.delta)


def h_direct(x, p: ModelParams):
    """The double sum for h evaluated term by term, without collection."""
    d = mpmath.mpf(p.delta)
    z = mpmath.mpf(x) ** d
    g = p.gamma
    return mpmath.fsum(
        _h_summand(m1, m2, p) * z ** (m1 + m2) for m1 in range(g + 1) for m2 in range(g + 1)
    )


def poly_power(coeffs, q: int) -> list:
    """Coefficients of ``poly**q`` by repeated convolution."""
    result = [mpmath.mpf(1)]
    for _ in range(q):
        result = convolve(result, coeffs)
    return result


def convolve(a, b) -> list:
    out = [mpmath.mpf(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += ai * bj
    return out


def _pressure_ratio_mp(X, p: ModelParams):
    coeffs = _h_coeffs(p, mpmath.mp.prec)
    z = X ** mpmath.mpf(p.delta)
    h = mpmath.polyval(list(reversed(coeffs)), z)
    return 1 - X * X * h / profiles._eta_mp(p)


def pressure_ratio(x, p: ModelParams):
    """``P(x)/P_c = 1 - x**2 h(x) / eta``."""
    profiles._check_x(x)
    if x == 1:
        # h(1) = eta exactly; the series would leave round-off instead
        return profiles._finish(mpmath.mpf(0), x)
    with mpmath.workdps(working_dps(x, p)):
        value = _pressure_ratio_mp(mpmath.mpf(x), p)
    return profiles._finish(value, x)


def central_rate(p: ModelParams, cv: CentralValues) -> float:
    """``eps0 rho_c**n T_c**m``, the rate at the centre."""
    return p.epsilon0 * cv.rho_c**p.n_exp * cv.T_c**p.m_exp


def epsilon_direct(x, p: ModelParams, cv: CentralValues):
    """Pointwise rate from the pressure ratio and the density law."""
    profiles._check_x(x)
    if x >= 1 and p.m_exp > p.n_exp:
        raise ValueError("epsilon diverges at x = 1 when m_exp > n_exp")
    with mpmath.workdps(working_dps(x, p)):
        X = mpmath.mpf(x)
        ratio = mpmath.mpf(0) if x == 1 else _pressure_ratio_mp(X, p)
        density = 1 - X ** mpmath.mpf(p.delta)
        shape = ratio**p.m_exp * density ** (p.gamma * (p.n_exp - p.m_exp))
        value = shape * central_rate(p, cv)
    return profiles._finish(value, x)


@dataclass(frozen=True)
class PowerTerm:
    """``coefficient * x**x_power`` with ``x_power = delta (s + multi) + 2 q``.

    Terms sharing ``s + multi_exponent`` and ``q`` are merged and stored
    under the split with the largest multi-exponent.
    """

    coefficient: mpmath.mpf
    s: int
    q: int
    multi_exponent: int
    x_power: float


@dataclass(frozen=True)
class PowerTermExpansion:
    terms: tuple
    truncation_order: int
    tail_bound: float
    x_max: float
    params: ModelParams
    dps: int

    def shape(self, x):
        """``eps / (eps0 rho_c**n T_c**m)`` summed at the expansion precision."""
        with mpmath.workdps(self.dps):
            X = mpmath.mpf(x)
            z = X ** mpmath.mpf(self.params.delta)
            x2 = X * X
            return mpmath.fsum(
                t.coefficient * z ** (t.s + t.multi_exponent) * x2**t.q for t in self.terms
            )

    def abs_sum(self, x) -> float:
        with mpmath.workdps(self.dps):
            X = mpmath.mpf(x)
            z = X ** mpmath.mpf(self.params.delta)
            return float(mpmath.fsum(
                abs(t.coefficient) * z ** (t.s + t.multi_exponent) * X ** (2 * t.q)
                for t in self.terms
            ))


def _binomial_tail(order: int, S: int, z: float) -> float:
    """Ratio-test bound on ``sum_{s>S} (order)_s / s! z**s``.

    Returns inf when the term ratio at ``s = S + 1`` is not below one.
    """
    if order == 0 or z == 0:
        return 0.0
    with mpmath.workdps(BASE_DPS):
        s1 = S + 1
        ratio = (order + s1) / mpmath.mpf(s1 + 1) * z
        if ratio >= 1:
            return math.inf
        log_term = (
            mpmath.loggamma(order + s1) - mpmath.loggamma(order) - mpmath.loggamma(s1 + 1)
            + s1 * mpmath.log(z)
        )
        return float(mpmath.exp(log_term) / (1 - ratio))


def choose_truncation(order: int, x_max: float, delta: float, tol: float) -> int:
    """Smallest S whose tail bound at ``x_max`` is at most ``tol``."""
    z = x_max**delta
    if order == 0 or z == 0:
        return 0
    if z >= 1:
        raise ValueError("the binomial series diverges at x_max = 1")
    S = 0
    while _binomial_tail(order, S, z) > tol:
        S += 1
        if S > MAX_TRUNCATION:
            raise ValueError(f"no truncation below {MAX_TRUNCATION} reaches tail {tol}")
    return S


def _build_terms(p: ModelParams, S: int, eta_val):
    order = p.gamma * (p.m_exp - p.n_exp)
    s_coeffs = [mpmath.mpf(1)]
    for s in range(1, S + 1):
        s_coeffs.append(s_coeffs[-1] * (order + s - 1) / s)
    h = _h_coeffs(p, mpmath.mp.prec)
    merged = {}
    hq = [mpmath.mpf(1)]
    for q in range(p.m_exp + 1):
        if q:
            hq = convolve(hq, h)
        weight = pochhammer(-p.m_exp, q) / math.factorial(q) / eta_val**q
        for k, c in enumerate(convolve(s_coeffs, hq)):
            merged[(k, q)] = weight * c
    terms = []
    for (k, q), c in sorted(merged.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        multi = min(k, 2 * p.gamma * q)
        terms.append(PowerTerm(c, k - multi, q, multi, p.delta * k + 2 * q))
    return tuple(terms)


def epsilon_expansion(
    p: ModelParams,
    truncation: int | None = None,
    *,
    x_max: float = DEFAULT_X_MAX,
    tol: float = DEFAULT_TAIL_TOL,
) -> PowerTermExpansion:
    """Flattened power-term expansion of the rate, truncated at ``s = S``.

    With ``truncation=None`` the smallest admissible S is chosen; an explicit
    S whose tail bound at ``x_max`` exceeds ``tol`` is rejected.
    """
    if p.m_exp < p.n_exp:
        raise ValueError("expansion requires m_exp >= n_exp")
    if not 0 < x_max <= 1:
        raise ValueError(f"x_max must lie in (0, 1], got {x_max!r}")
    order = p.gamma * (p.m_exp - p.n_exp)
    z_max = x_max**p.delta
    if truncation is None:
        S = choose_truncation(order, x_max, p.delta, tol)
    else:
        S = int(truncation)
        if S < 0:
            raise ValueError("truncation order must be nonnegative")
    tail = _binomial_tail(order, S, z_max) if z_max < 1 else (0.0 if order == 0 else math.inf)
    if tail > tol:
        raise ValueError(f"truncation S={S} leaves tail bound {tail:.3g} above tol {tol:.3g}")

    # first pass at modest precision sizes the cancellation, second pass is kept
    dps = BASE_DPS + 20
    while True:
        with mpmath.workdps(dps):
            terms = _build_terms(p, S, profiles._eta_mp(p))
            # worst case is x = 1 where every power is one
            magnitude = mpmath.fsum(abs(t.coefficient) for t in terms)
        needed = _expansion_dps(p, S, magnitude)
        if needed <= dps:
            break
        dps = needed
    return PowerTermExpansion(terms, S, tail, x_max, p, dps)


def _expansion_dps(p: ModelParams, S: int, magnitude) -> int:
    # digits lost summing the terms, plus those lost inside each incomplete beta
    # sum at unit argument, where B(s*, gamma+1) is tiny against 2**gamma / s*
    s_star_max = S + 2 * p.gamma * p.m_exp + (3 + 2 * p.m_exp) / p.delta
    lost_beta = p.gamma * math.log10(2 * s_star_max) - math.lgamma(p.gamma + 1) / math.log(10)
    lost_sum = max(0.0, float(mpmath.log10(magnitude))) if magnitude > 0 else 0.0
    return BASE_DPS + math.ceil(lost_sum + max(lost_beta, 0.0)) + 10


def epsilon_from_expansion(x, e: PowerTermExpansion, cv: CentralValues, p: ModelParams):
    """Rate from the power-term expansion; valid for ``0 <= x <= e.x_max``."""
    if not 0 <= x <= e.x_max:
        raise ValueError(f"x={x!r} outside the expansion radius [0, {e.x_max}]")
    return float(e.shape(x)) * central_rate(p, cv)
