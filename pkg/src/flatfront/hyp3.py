"""Hyperbolic 3-space, the hyperbolic Schwarz map and its parallel fronts.

Conventions
-----------
A point of H^3 is a positive Hermitian matrix ``H`` with ``det H = 1``. The
Minkowski chart is

    x0 = (h11 + h22)/2,  x1 = Re h12,  x2 = Im h12,  x3 = (h11 - h22)/2,

so ``<X, X> = -det H`` for the pairing of signature (-, +, +, +), and the
hyperboloid is the sheet ``x0 > 0``. The ball chart is ``(x1, x2, x3)/(1 + x0)``.
A rank-one matrix ``v v*`` is the ideal point ``v1/v2``, and the ball chart
of its ray is ``chi(v1/v2)``.

For a lift ``U`` the front is ``phi = U U*`` with normal ``nu = U diag(1,-1) U*``.
The parallel front at signed distance ``t`` is ``U_t U_t*`` with
``U_t = U diag(e^{t/2}, e^{-t/2})``, equal to ``e^t c1 c1* + e^{-t} c2 c2*``
for the columns ``c1, c2`` of ``U``. Hence the normal geodesic ends at
``chi(S)`` for ``t -> +inf`` and at ``chi(DS)`` for ``t -> -inf``.

Its first fundamental form is ``|e^{-t} q dx + e^t dx_bar|**2``, i.e.
``e^{2t} (q_t dx^2 + conj(q_t) dx_bar^2 + (1 + |q_t|^2) |dx|^2)`` with
``q_t = e^{-2t} q``. The front is singular where ``|q_t| = 1``, at the
time ``r(x) = log|q(x)| / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, UmbilicError
from .hgode import (HoloLift, PathPlan, SLCoefficient, lift_at, q_at, sl_coefficient)
from .params import HGParams

SINGULAR_TOL = 1e-6
UMBILIC_TOL = 1e-6
UNIMODULAR_TOL = 1e-8

_SIGN = np.array([-1.0, 1.0, 1.0, 1.0])


def _matrix(U):
    if isinstance(U, HoloLift):
        return U.U
    return np.asarray(U, dtype=complex)


def _check_unimodular(U):
    det = U[..., 0, 0] * U[..., 1, 1] - U[..., 0, 1] * U[..., 1, 0]
    bad = np.abs(det - 1.0) > UNIMODULAR_TOL
    if np.any(bad):
        raise ParameterError(f"lift is not unimodular (|det U - 1| = {np.max(np.abs(det - 1)):.3g})")


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

def hermitian_to_minkowski(H) -> np.ndarray:
    H = np.asarray(H)
    h11, h22, h12 = H[..., 0, 0].real, H[..., 1, 1].real, H[..., 0, 1]
    return np.stack([(h11 + h22) / 2, h12.real, h12.imag, (h11 - h22) / 2], axis=-1)


def minkowski_to_hermitian(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    x0, x1, x2, x3 = X[..., 0], X[..., 1], X[..., 2], X[..., 3]
    H = np.empty(X.shape[:-1] + (2, 2), dtype=complex)
    H[..., 0, 0] = x0 + x3
    H[..., 1, 1] = x0 - x3
    H[..., 0, 1] = x1 + 1j * x2
    H[..., 1, 0] = x1 - 1j * x2
    return H


def mink_inner(X, Y) -> np.ndarray:
    """Minkowski pairing of signature (-, +, +, +)."""
    return np.sum(_SIGN * np.asarray(X) * np.asarray(Y), axis=-1)


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point of H^3 in both charts."""

    hermitian: np.ndarray
    minkowski: np.ndarray

    @classmethod
    def from_hermitian(cls, H):
        H = np.asarray(H, dtype=complex)
        return cls(H, hermitian_to_minkowski(H))

    @classmethod
    def from_minkowski(cls, X):
        X = np.asarray(X, dtype=float)
        return cls(minkowski_to_hermitian(X), X)

    @property
    def ball(self) -> np.ndarray:
        return ball_chart(self.minkowski)


@dataclass(frozen=True, eq=False)
class FrontSample:
    x: complex
    t: float
    position: HPoint
    normal: np.ndarray
    q_t: complex
    singular: bool


# ---------------------------------------------------------------------------
# fronts
# ---------------------------------------------------------------------------

def hs_point(lift) -> HPoint:
    """``H = U U*`` for a unimodular lift."""
    U = _matrix(lift)
    _check_unimodular(U)
    return HPoint.from_hermitian(U @ np.conj(np.swapaxes(U, -1, -2)))


def unit_normal(lift) -> np.ndarray:
    """Minkowski vector of ``U diag(1, -1) U*``."""
    U = _matrix(lift)
    _check_unimodular(U)
    V = U * np.array([1.0, -1.0])
    return hermitian_to_minkowski(V @ np.conj(np.swapaxes(U, -1, -2)))


def parallel_lift(lift, t: float):
    """``U diag(e^{t/2}, e^{-t/2})``; returns the same type as the input."""
    U = _matrix(lift) * np.array([math.exp(t / 2), math.exp(-t / 2)])
    if isinstance(lift, HoloLift):
        return HoloLift(lift.x, U, lift.params)
    return U


def front_point(lift, t: float = 0.0) -> np.ndarray:
    """Minkowski position of the parallel front at distance ``t``."""
    return hs_point(parallel_lift(lift, t)).minkowski


def parallel_q(slc: SLCoefficient, x, t: float):
    """``q_t = e^{-2t} q(x)``; the metric of the parallel front is built on it."""
    return math.exp(-2.0 * t) * q_at(slc, x)


def induced_metric(slc: SLCoefficient, x, t: float, coords: str = "domain"):
    """``(E, F, G)`` of the parallel front in real coordinates.

    ``coords="domain"`` uses ``x = u + iv``; ``coords="canonical"`` uses
    ``y = e^t x``, in which the form is ``q_t dy^2 + conj + (1+|q_t|^2)|dy|^2``.
    """
    qt = parallel_q(slc, x, t)
    w = 1.0 + np.abs(qt) ** 2
    E = w + 2.0 * qt.real
    F = -2.0 * qt.imag
    G = w - 2.0 * qt.real
    if coords == "domain":
        scale = math.exp(2.0 * t)
    elif coords == "canonical":
        scale = 1.0
    else:
        raise ParameterError(f"unknown coordinates {coords!r}")
    return scale * E, scale * F, scale * G


def induced_metric_det(slc: SLCoefficient, x, t: float, coords: str = "canonical"):
    """``EG - F^2``; equals ``(1 - |q_t|^2)^2`` in canonical coordinates
    and ``e^{4t} (1 - |q_t|^2)^2`` in the domain coordinates."""
    qt = parallel_q(slc, x, t)
    det = (1.0 - np.abs(qt) ** 2) ** 2
    if coords == "domain":
        return math.exp(4.0 * t) * det
    if coords == "canonical":
        return det
    raise ParameterError(f"unknown coordinates {coords!r}")


def singular_time(slc: SLCoefficient, x) -> float:
    """Parallel distance at which the front through ``x`` is singular."""
    q = abs(q_at(slc, x))
    if q == 0:
        raise UmbilicError(f"q vanishes at {complex(x)}; the front is never singular there")
    return 0.5 * math.log(q)


def front_sample(lift: HoloLift, slc: SLCoefficient, t: float = 0.0,
                 singular_tol: float = SINGULAR_TOL) -> FrontSample:
    qt = complex(parallel_q(slc, lift.x, t))
    Ut = parallel_lift(lift.U, t)
    return FrontSample(lift.x, t, hs_point(Ut), unit_normal(Ut), qt,
                       bool(abs(abs(qt) - 1.0) < singular_tol))


def caustic_point(p: HGParams, x, path: PathPlan | None = None, lift: HoloLift | None = None) -> HPoint:
    """Point of the caustic: the parallel front at the singular time of ``x``."""
    slc = sl_coefficient(p)
    q = abs(q_at(slc, x))
    if q < UMBILIC_TOL:
        raise UmbilicError(f"|q({complex(x)})| = {q:.3g} is too close to an umbilic")
    lift = lift if lift is not None else lift_at(p, x, path)
    return hs_point(parallel_lift(lift.U, singular_time(slc, x)))


# ---------------------------------------------------------------------------
# ball model
# ---------------------------------------------------------------------------

def chi_boundary(z) -> np.ndarray:
    """Ideal point ``z`` of P^1 on the unit sphere; ``inf -> (0, 0, 1)``."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(invalid="ignore", over="ignore"):
        r2 = np.abs(z) ** 2
        out = np.stack([2 * z.real, 2 * z.imag, r2 - 1], axis=-1) / (1 + r2)[..., None]
    at_inf = ~np.isfinite(z)
    if np.any(at_inf):
        out[at_inf] = (0.0, 0.0, 1.0)
    return out


def ball_chart(point) -> np.ndarray:
    """``(x1, x2, x3) / (1 + x0)`` for a Minkowski vector or HPoint."""
    X = point.minkowski if isinstance(point, HPoint) else np.asarray(point, dtype=float)
    return X[..., 1:] / (1.0 + X[..., :1])


def chordal_distance(a, b) -> np.ndarray:
    return np.linalg.norm(np.asarray(a) - np.asarray(b), axis=-1)


def normal_geodesic(lift, t_range=(-20.0, 20.0), n: int = 101) -> np.ndarray:
    """Ball-chart samples of ``cosh(s) phi + sinh(s) nu`` for ``s`` in ``t_range``.

    Evaluated as ``e^s c1 c1* + e^-s c2 c2*`` from the columns of ``U``.
    """
    if n < 2:
        raise ParameterError("a geodesic needs at least two samples")
    U = _matrix(lift)
    _check_unimodular(U)
    s = np.linspace(t_range[0], t_range[1], n)
    c1, c2 = U[:, 0], U[:, 1]
    H = (np.exp(s)[:, None, None] * np.outer(c1, np.conj(c1))
         + np.exp(-s)[:, None, None] * np.outer(c2, np.conj(c2)))
    return ball_chart(hermitian_to_minkowski(H))


def gauss_limits(lift) -> tuple[np.ndarray, np.ndarray]:
    """Ideal endpoints of the normal geodesic: ``(t -> +inf, t -> -inf)``."""
    U = _matrix(lift)
    return chi_boundary(U[0, 0] / U[1, 0]), chi_boundary(U[0, 1] / U[1, 1])


# ---------------------------------------------------------------------------
# isometries
# ---------------------------------------------------------------------------

def act_on_point(g, H) -> np.ndarray:
    """Isometry ``H -> g H g*`` of H^3 for ``g`` in SL(2, C)."""
    g = np.asarray(g, dtype=complex)
    return g @ np.asarray(H) @ np.conj(g.T)


def act_on_boundary(g, z):
    """Conformal action on the ideal boundary (the matching Moebius map)."""
    from .maps import mobius_apply
    return mobius_apply(np.asarray(g, dtype=complex), z)


def distance_to_geodesic(P, A, V) -> np.ndarray:
    """Hyperbolic distance from ``P`` to the geodesic through ``A`` with unit
    tangent ``V`` (all Minkowski vectors, ``<A, V> = 0``)."""
    pa = mink_inner(P, A)
    pv = mink_inner(P, V)
    return np.arcsinh(np.sqrt(np.maximum(pa * pa - pv * pv - 1.0, 0.0)))
