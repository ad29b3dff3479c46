"""Complex Gamma function and the Gauss hypergeometric function.

Gamma uses the g=7, n=9 Lanczos approximation evaluated in log form, with
the reflection formula for ``Re z < 1/2``. The hypergeometric function is
summed directly for ``|x| <= SERIES_RADIUS``, through the Pfaff
transformation ``x -> x/(x-1)`` when that lands inside the same disc, and
otherwise by integrating the hypergeometric equation outward from the disc.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, ParameterError, PoleError
from .params import HGParams

SERIES_RADIUS = 0.75
SERIES_REL_TOL = 1e-16
SERIES_QUIET_TERMS = 10
SERIES_MAX_TERMS = 10_000

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _is_nonpositive_integer(z) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def _lanczos_log(z: complex) -> complex:
    # log Gamma(z) for Re z >= 1/2, continuous in z (not reduced mod 2 pi i)
    z = z - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(acc)


def gamma(z) -> complex:
    """Gamma function of a complex argument.

    Raises PoleError at ``0, -1, -2, ...``.
    """
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * cmath.exp(_lanczos_log(1.0 - z)))
    return cmath.exp(_lanczos_log(z))


def rgamma(z) -> complex:
    """Reciprocal Gamma, an entire function (zero at the poles of Gamma)."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        return 0j
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * cmath.exp(_lanczos_log(1.0 - z)) / math.pi
    return cmath.exp(-_lanczos_log(z))


def loggamma(z) -> complex:
    """Principal value of ``log(Gamma(z))`` (imaginary part in (-pi, pi])."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}")
    if z.real >= 0.5:
        lg = _lanczos_log(z)
    else:
        lg = cmath.log(math.pi) - cmath.log(cmath.sin(math.pi * z)) - _lanczos_log(1.0 - z)
    im = math.remainder(lg.imag, 2.0 * math.pi)
    if im == -math.pi:
        im = math.pi
    return complex(lg.real, im)


@dataclass(frozen=True)
class GammaEval:
    z: complex
    log_gamma: complex

    @property
    def value(self) -> complex:
        return cmath.exp(self.log_gamma)


def gamma_eval(z) -> GammaEval:
    return GammaEval(complex(z), loggamma(z))


@dataclass(frozen=True)
class HypergeometricValue:
    params: HGParams
    x: complex
    value: complex
    derivative: complex


def _series(a, b, c, x):
    """Direct Gauss series with its term-wise derivative."""
    total = 1.0 + 0j
    dtotal = 0j
    coef = 1.0 + 0j
    power = 1.0 + 0j  # x**(n-1)
    quiet = 0
    for n in range(1, SERIES_MAX_TERMS + 1):
        coef *= (a + n - 1) * (b + n - 1) / ((c + n - 1) * n)
        dterm = n * coef * power
        power *= x
        term = coef * power
        total += term
        dtotal += dterm
        if abs(term) <= SERIES_REL_TOL * abs(total) and abs(dterm) <= SERIES_REL_TOL * abs(dtotal):
            quiet += 1
            if quiet >= SERIES_QUIET_TERMS:
                return total, dtotal
        else:
            quiet = 0
    raise ConvergenceError(
        f"hypergeometric series for ({a}, {b}, {c}; {x}) did not settle in {SERIES_MAX_TERMS} terms")


def _by_ode(a, b, c, x):
    from .ode import integrate_segment

    x = complex(x)
    start = SERIES_RADIUS * 0.9 * x / abs(x)
    f0, df0 = _series(a, b, c, start)

    def rhs(s, y):
        z = start + s * (x - start)
        f, df = y[:, 0], y[:, 1]
        d2f = (a * b * f - (c - (a + b + 1) * z) * df) / (z * (1 - z))
        return np.stack([df, d2f], axis=1) * (x - start)

    y = integrate_segment(rhs, np.array([[f0, df0]], dtype=complex))
    return complex(y[0, 0]), complex(y[0, 1])


def hyp2f1(a, b, c, x) -> tuple[complex, complex]:
    """Return ``(F(a,b;c;x), dF/dx)`` on the principal branch.

    ``x`` may be any complex number off the cut ``[1, inf)``.
    """
    if _is_nonpositive_integer(c):
        raise ParameterError(f"c = {c} is a non-positive integer")
    x = complex(x)
    if x == 0:
        return 1.0 + 0j, complex(a * b / c)
    if x.imag == 0.0 and x.real >= 1.0:
        raise DomainError(f"x = {x.real:g} lies on the branch cut [1, inf)")
    if abs(x) <= SERIES_RADIUS:
        return _series(a, b, c, x)
    w = x / (x - 1.0)
    if abs(w) <= SERIES_RADIUS:
        g, dg = _series(a, c - b, c, w)
        pre = (1.0 - x) ** (-a)
        value = pre * g
        deriv = a * pre / (1.0 - x) * g - pre * dg / (x - 1.0) ** 2
        return value, deriv
    return _by_ode(a, b, c, x)


def hypergeometric(p: HGParams, x) -> HypergeometricValue:
    value, deriv = hyp2f1(p.a, p.b, p.c, x)
    return HypergeometricValue(p, complex(x), value, deriv)


def gauss_value_at_one(p: HGParams) -> complex:
    """``F(a,b;c;1) = Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b))``."""
    a, b, c = p.a, p.b, p.c
    if not c > 0:
        raise DomainError(f"Gauss summation needs c > 0 (c = {c})")
    if not c - a - b > 0:
        raise DomainError(f"Gauss summation needs c - a - b > 0 (c - a - b = {c - a - b})")
    return gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)
