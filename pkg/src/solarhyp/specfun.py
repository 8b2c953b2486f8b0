"""Finite hypergeometric kernel.

Pochhammer symbols, terminating Gauss 2F1 polynomials, the Gauss sum at
unit argument and the incomplete beta partial sum

    B_z(s, g + 1) = z**s * sum_l (-g)_l / l! * z**l / (s + l).

Every series here alternates in sign, and for large ``g`` the cancellation
exceeds what double precision can absorb.  Two evaluation routes are
therefore offered, selected by argument type:

* plain Python numbers are converted to exact rationals, the sum is formed
  without rounding and the result is rounded once to a float;
* ``mpmath.mpf`` arguments are evaluated at the active mpmath precision
  with ``mpmath.fsum`` accumulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Integral

import mpmath

INTEGER_TOL = 1e-9
MAX_GAMMA = 64


class DomainError(ValueError):
    """Raised when a Gamma-function argument lands on a pole."""


def _is_mp(*values) -> bool:
    return any(isinstance(v, (mpmath.mpf, mpmath.mpc)) for v in values)


def nonpositive_integer(a) -> int | None:
    """Return ``-a`` as an int if ``a`` is a nonpositive integer, else None."""
    if isinstance(a, Integral):
        return -int(a) if a <= 0 else None
    nearest = round(float(a))
    if nearest <= 0 and abs(float(a) - nearest) <= INTEGER_TOL:
        return -int(nearest)
    return None


def pochhammer(a, k: int):
    """Rising factorial ``a (a+1) ... (a+k-1)``.

    A nonpositive integer ``a = -g`` gives an exact zero for ``k > g``.
    Integer ``a`` is multiplied in exact integer arithmetic.
    """
    if not isinstance(k, Integral) or k < 0:
        raise ValueError(f"pochhammer order must be a nonnegative integer, got {k!r}")
    k = int(k)
    one = a * 0 + 1
    if k == 0:
        return one
    g = nonpositive_integer(a)
    if g is not None:
        if k > g:
            return one * 0
        if not isinstance(a, Integral):
            a = one * (-g)
    result = one
    for i in range(k):
        result *= a + i
    return result


@dataclass(frozen=True)
class TerminatingF21:
    """Parameters of 2F1(-g, b; c; z) with ``neg_int_a = -g``."""

    neg_int_a: int
    b: float
    c: float
    z: float

    def __post_init__(self):
        g = nonpositive_integer(self.neg_int_a)
        if g is None:
            raise ValueError(
                f"neg_int_a must be a nonpositive integer, got {self.neg_int_a!r}")
        object.__setattr__(self, "neg_int_a", -g)
        if not self.b > 0:
            raise ValueError(f"b must be positive, got {self.b!r}")
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c!r}")
        if not 0 <= self.z <= 1:
            raise ValueError(f"z must lie in [0, 1], got {self.z!r}")

    @property
    def degree(self) -> int:
        return -self.neg_int_a


def _f21_terms(g: int, b, c, z):
    # ascending k; t_k / t_{k-1} = (k-1-g)(b+k-1) z / ((c+k-1) k)
    term = b * 0 + 1
    yield term
    for k in range(1, g + 1):
        term = term * (k - 1 - g) * (b + k - 1) * z / ((c + k - 1) * k)
        yield term


def f21_terminating(spec: TerminatingF21):
    """Evaluate the degree-``g`` polynomial 2F1(-g, b; c; z)."""
    g = spec.degree
    if _is_mp(spec.b, spec.c, spec.z):
        b, c, z = (mpmath.mpf(v) for v in (spec.b, spec.c, spec.z))
        return mpmath.fsum(_f21_terms(g, b, c, z))
    b, c, z = Fraction(spec.b), Fraction(spec.c), Fraction(spec.z)
    return float(sum(_f21_terms(g, b, c, z), Fraction(0)))


def f21_horner(spec: TerminatingF21):
    """Same polynomial as :func:`f21_terminating`, by nested multiplication.

    Kept as an independent route for cross-checks; coefficients are built
    from scratch and the polynomial is evaluated from the top degree down.
    """
    g = spec.degree
    mp = _is_mp(spec.b, spec.c, spec.z)
    conv = mpmath.mpf if mp else Fraction
    b, c, z = conv(spec.b), conv(spec.c), conv(spec.z)
    coeffs = [
        pochhammer(-g, k) * pochhammer(b, k) / (pochhammer(c, k) * math.factorial(k))
        for k in range(g + 1)
    ]
    acc = coeffs[-1]
    for a_k in reversed(coeffs[:-1]):
        acc = acc * z + a_k
    return acc if mp else float(acc)


def _gamma_sign(x) -> int:
    if x > 0:
        return 1
    return -1 if math.ceil(-float(x)) % 2 else 1


def _log_abs_gamma(x):
    if _is_mp(x):
        return mpmath.re(mpmath.loggamma(x))
    return math.lgamma(x)


def gamma_ratio(num, den):
    """``prod Gamma(num) / prod Gamma(den)`` via log-gamma differences."""
    for x in (*num, *den):
        if nonpositive_integer(x) is not None:
            raise DomainError(f"Gamma pole at argument {x!r}")
    mp = _is_mp(*num, *den)
    log_val = sum(_log_abs_gamma(x) for x in num) - sum(_log_abs_gamma(x) for x in den)
    sign = 1
    for x in (*num, *den):
        sign *= _gamma_sign(x)
    return sign * (mpmath.exp(log_val) if mp else math.exp(log_val))


def f21_at_one(a, b, c):
    """Gauss sum 2F1(a, b; c; 1) = G(c) G(c-a-b) / (G(c-a) G(c-b)).

    For terminating ``a = -g`` with any Gamma argument on or below zero the
    equivalent Chu-Vandermonde product ``(c-b)_g / (c)_g`` is used instead.
    """
    if nonpositive_integer(c) is not None:
        raise DomainError(f"c = {c!r} is a pole of 2F1")
    g = nonpositive_integer(a)
    if g is not None:
        if g == 0:
            return b * 0 + c * 0 + 1
        if c > 0 and c - b > 0:
            return gamma_ratio((c, c - a - b), (c - a, c - b))
        return pochhammer(c - b, g) / pochhammer(c, g)
    if not c - a - b > 0:
        raise DomainError(f"2F1(a,b;c;1) diverges for c-a-b = {c - a - b!r} <= 0")
    return gamma_ratio((c, c - a - b), (c - a, c - b))


def incomplete_beta_poly(gamma: int, s_star, z):
    """``int_0^z (1-v)**gamma * v**(s_star-1) dv`` as a finite sum."""
    if not isinstance(gamma, Integral) or gamma < 0:
        raise ValueError(f"gamma must be a nonnegative integer, got {gamma!r}")
    if not s_star > 0:
        raise ValueError(f"s_star must be positive, got {s_star!r}")
    if not 0 <= z <= 1:
        raise ValueError(f"z must lie in [0, 1], got {z!r}")
    if z == 0:
        return z * 0
    if _is_mp(s_star, z):
        s, zz = mpmath.mpf(s_star), mpmath.mpf(z)
        terms = []
        power = mpmath.mpf(1)
        for l, w in enumerate(_binomial_weights(gamma)):
            terms.append(w * power / (s + l))
            power *= zz
        return zz**s * mpmath.fsum(terms)
    s, zz = Fraction(s_star), Fraction(z)
    total = sum(
        (w * zz**l / (s + l) for l, w in enumerate(_binomial_weights(gamma))),
        Fraction(0),
    )
    # one rounding at the end keeps the float result monotone in z
    with mpmath.workprec(200):
        value = mpmath.mpf(total.numerator) / total.denominator * mpmath.mpf(z) ** mpmath.mpf(s_star)
        return float(value)


@lru_cache(maxsize=None)
def _binomial_weights(gamma: int) -> tuple[int, ...]:
    # (-g)_l / l! = (-1)**l * C(g, l)
    return tuple((-1) ** l * math.comb(gamma, l) for l in range(gamma + 1))


def complete_beta(s_star, gamma: int):
    """``B(s_star, gamma + 1)`` through the Gauss sum of 2F1(-g, s; s+1; 1)."""
    return f21_at_one(-gamma, s_star, s_star + 1) / s_star
