"""Schwarz map, derived Schwarz map and their relatives.

``S`` and ``DS`` are read off one holomorphic lift: ``S`` is the ratio of the
first column, ``DS`` of the second. Both are normalized by the same Moebius
map, so ``DS = f(S)`` with ``f(z) = z + 2 x'(z)/x''(z)`` for the inverse
``x(z)`` of ``S``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, DomainError, ParameterError, PoleError
from .hgode import (DEFAULT_CLEARANCE, PathPlan, column_ratio, continue_along, gauge_factor,
                    initial_lift, lattice_lifts, lift_at, sl_coefficient, transport)
from .params import HGParams
from .specfun import gamma, hyp2f1, rgamma

INF = complex(math.inf, 0.0)


# ---------------------------------------------------------------------------
# Moebius helpers
# ---------------------------------------------------------------------------

def _homogeneous(z):
    z = complex(z)
    if cmath.isinf(z):
        return np.array([1.0, 0.0], dtype=complex)
    return np.array([z, 1.0], dtype=complex)


def _cross(p, q):
    return p[1] * q[0] - p[0] * q[1]


def mobius_to_standard(z1, z2, z3) -> np.ndarray:
    """Unimodular matrix sending ``z1, z2, z3`` to ``0, 1, inf``."""
    p1, p2, p3 = (_homogeneous(z) for z in (z1, z2, z3))
    m = np.array([_cross(p3, p2) * np.array([p1[1], -p1[0]]),
                  _cross(p1, p2) * np.array([p3[1], -p3[0]])])
    det = np.linalg.det(m)
    if abs(det) == 0:
        raise DomainError("the three points must be distinct")
    return m / cmath.sqrt(det)


def mobius_from_points(src, dst) -> np.ndarray:
    """Unimodular matrix of the Moebius map sending ``src[i]`` to ``dst[i]``."""
    a = mobius_to_standard(*src)
    b = mobius_to_standard(*dst)
    m = np.linalg.solve(b, a)
    return m / cmath.sqrt(np.linalg.det(m))


def mobius_apply(m, z):
    """Apply the matrix ``m`` as a fractional linear map (array-friendly)."""
    z = np.asarray(z, dtype=complex)
    a, b, c, d = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        finite = np.isfinite(z)
        zf = np.where(finite, z, 0.0)
        num = np.where(finite, a * zf + b, a)
        den = np.where(finite, c * zf + d, c)
        out = np.where(den == 0, INF, num / np.where(den == 0, 1.0, den))
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# normalization
# ---------------------------------------------------------------------------

def _gamma_ratio(num, den) -> complex:
    """``prod Gamma(num) / prod Gamma(den)``; infinite when only the numerator has a pole."""
    value = 1.0 + 0j
    for z in den:
        value *= rgamma(z)
    if value == 0:
        raise DomainError("connection constant is indeterminate (Gamma poles in the denominator)")
    for z in num:
        try:
            value *= gamma(z)
        except PoleError:
            return INF
    return value


def schwarz_value_at_one(p: HGParams) -> complex:
    """``S_T(1)`` for ``S_T = x**(1-c) F(a-c+1,b-c+1;2-c;x) / F(a,b;c;x)``.

    For ``a+b-c > 0`` this is ``A/B`` of the connection formula; for
    ``a+b-c < 0`` the dominant solution at 1 changes and the value is ``C/D``.
    """
    a, b, c = p.a, p.b, p.c
    e = a + b - c
    if e > 0:
        return _gamma_ratio((2 - c, a, b), (c, a - c + 1, b - c + 1))
    if e < 0:
        return _gamma_ratio((2 - c, c - a, c - b), (c, 1 - a, 1 - b))
    raise DomainError("S_T(1) needs a + b - c != 0 (a + b - c = 0 here)")


def schwarz_value_at_infinity(p: HGParams) -> complex:
    """``S_T(inf)`` approached through the upper half plane; needs ``0 < c < 2``.

    The closed form assumes ``a <= b``; since ``S_T`` itself is symmetric in
    ``a, b`` the pair is sorted first.
    """
    a, b = sorted((p.a, p.b))
    c = p.c
    if not 0 < c < 2:
        raise DomainError(f"S_T(inf) needs 0 < c < 2 (c = {c})")
    value = _gamma_ratio((2 - c, b, c - a), (c, 1 - a, 1 - c + b))
    return value if cmath.isinf(value) else value * cmath.exp(1j * math.pi * (1 - c))


def _local_basis(p: HGParams, vertex, x):
    """Rows ``(v, v')`` of two local solutions of E(a,b,c) at ``vertex`` (1 or
    inf) and the index of the one that dominates as ``x -> vertex``."""
    a, b, c = p.a, p.b, p.c
    x = complex(x)
    if vertex == 1:
        e = c - a - b
        if e == 0:
            raise DomainError("logarithmic case at x = 1 (c - a - b = 0)")
        f0, d0 = hyp2f1(a, b, 1 - e, 1 - x)
        f1, d1 = hyp2f1(c - a, c - b, 1 + e, 1 - x)
        w = (1 - x) ** e
        rows = [[f0, -d0], [w * f1, -e * w / (1 - x) * f1 - w * d1]]
        return np.array(rows), (1 if e < 0 else 0)
    if math.isinf(abs(complex(vertex))):
        if a == b:
            raise DomainError("logarithmic case at infinity (a = b)")
        rows = []
        for e1, e2 in ((a, b), (b, a)):
            f, d = hyp2f1(e1, e1 - c + 1, e1 - e2 + 1, 1 / x)
            w = x ** (-e1)
            rows.append([w * f, -e1 * w / x * f - w * d / x ** 2])
        return np.array(rows), (0 if a < b else 1)
    raise ParameterError(f"vertex must be 1 or inf, got {vertex!r}")


def vertex_limit(p: HGParams, vertex, x=None, pair: str = "origin") -> complex:
    """Limit of ``S_T`` at the vertex 1 or inf, from the continued lift.

    The lift at a point ``x`` near the vertex is written in the basis of local
    solutions there; the limit is the ratio of the coefficients of the
    dominant one. Works on either side of the Gamma-function formulas and
    needs only that the local exponents at the vertex differ.
    """
    if x is None:
        x = 1 - 1e-4 if vertex == 1 else -3 + 0.5j
    lift = lift_at(p, x, pair=pair)
    V, k = _local_basis(p, vertex, x)
    N, dlogN = gauge_factor(p, x)
    V = N * np.column_stack([V[:, 0], V[:, 1] + dlogN * V[:, 0]])
    T = np.linalg.solve(V.T, lift.U.T).T
    return INF if T[1, k] == 0 else complex(T[0, k] / T[1, k])


@dataclass(frozen=True, eq=False)
class NormalizedMapPair:
    """Moebius normalizer of the pair (S, DS).

    ``mobius`` sends ``S_T(0) = 0``, ``S_T(1)``, ``S_T(inf)`` to ``targets``
    (by default ``0, 1, inf``).
    """

    params: HGParams
    S_T_1: complex
    S_T_inf: complex
    mobius: np.ndarray
    targets: tuple = (0j, 1 + 0j, INF)
    S_T_0: complex = 0j

    def __call__(self, z):
        return mobius_apply(self.mobius, z)

    def lift(self, U):
        """Apply the normalizer to a lift (or a stack of lifts)."""
        return np.einsum("ij,...jk->...ik", self.mobius, U)


def normalize_maps(p: HGParams, targets=(0j, 1 + 0j, INF), pair: str = "origin") -> NormalizedMapPair:
    """Normalizer sending the vertices ``S_T(0), S_T(1), S_T(inf)`` to ``targets``.

    ``pair="mixed"`` is for integer ``c`` (only ``(1/2, 1/2, 1)`` has known
    vertex values: ``S(0) = inf, S(1) = 0, S(inf) = -i``).
    """
    if pair == "origin":
        s0, s1, sinf = 0j, schwarz_value_at_one(p), schwarz_value_at_infinity(p)
    elif pair == "mixed":
        if (p.a, p.b, p.c) != (0.5, 0.5, 1.0):
            raise DomainError("vertex values of the mixed pair are tabulated for (1/2, 1/2, 1) only")
        s0, s1, sinf = INF, 0j, -1j
    else:
        raise ParameterError(f"unknown solution pair {pair!r}")
    m = mobius_from_points((s0, s1, sinf), targets)
    return NormalizedMapPair(p, s1, sinf, m, tuple(complex(t) for t in targets), s0)


def _maybe_normalize(U, norm):
    return U if norm is None else norm.lift(U)


# ---------------------------------------------------------------------------
# S and DS
# ---------------------------------------------------------------------------

def schwarz(p: HGParams, x, path: PathPlan | None = None, norm: NormalizedMapPair | None = None) -> complex:
    """Schwarz map at ``x``: ratio of the first column of the continued lift.

    Without ``norm`` this is ``S_T = u1/u0``.
    """
    U = _maybe_normalize(lift_at(p, x, path).U, norm)
    return complex(column_ratio(U, 0))


def derived_schwarz(p: HGParams, x, path: PathPlan | None = None,
                    norm: NormalizedMapPair | None = None) -> complex:
    """Derived Schwarz map at ``x``: ratio of the second column of the lift."""
    U = _maybe_normalize(lift_at(p, x, path).U, norm)
    return complex(column_ratio(U, 1))


def schwarz_jet(U):
    """``(S, S', S'')`` from a unimodular lift (or stack of lifts).

    Uses ``S' = -1/w**2`` and ``S'' = 2 w'/w**3`` where ``w = U[1, 0]`` and
    ``w' = U[1, 1]``; both follow from ``det U = 1`` and ``u'' = q u``.
    """
    U = np.asarray(U)
    w, dw = U[..., 1, 0], U[..., 1, 1]
    return U[..., 0, 0] / w, -1.0 / w ** 2, 2.0 * dw / w ** 3


def composite_formula(z, xdot, xddot):
    """``f(z) = z + 2 x'(z) / x''(z)``."""
    return z + 2.0 * xdot / xddot


def composite_from_jet(S, dS, ddS):
    """``f`` at ``z = S(x)`` from derivatives of ``S`` with respect to ``x``."""
    xdot = 1.0 / dS
    xddot = -ddS / dS ** 3
    return composite_formula(S, xdot, xddot)


def cauchy_derivatives(func, z, radius=0.1, n=64):
    """First and second derivative of an analytic ``func`` by the trapezoid
    rule on a circle (spectrally accurate)."""
    theta = 2 * np.pi * np.arange(n) / n
    ring = np.exp(1j * theta)
    vals = np.array([func(z + radius * w) for w in ring])
    d1 = np.mean(vals * ring ** -1) / radius
    d2 = 2.0 * np.mean(vals * ring ** -2) / radius ** 2
    return d1, d2


def composite_from_inverse(x_of_z, z, radius=0.1, n=64):
    """``f(z)`` for an explicit local inverse ``x(z)``."""
    d1, d2 = cauchy_derivatives(x_of_z, z, radius, n)
    return composite_formula(z, d1, d2)


class SchwarzInverse:
    """Inverse of ``S`` on ``X_+`` by Newton iteration from a seed grid."""

    def __init__(self, p: HGParams, norm: NormalizedMapPair | None = None,
                 region=(-2.0, 3.0, 0.01, 2.5), resolution=(100, 100)):
        self.params = p
        self.norm = norm
        self.slc = sl_coefficient(p)
        xs = np.linspace(region[0], region[1], resolution[0])
        ys = np.linspace(region[2], region[3], resolution[1])
        U, valid = lattice_lifts(p, xs, ys, exclusion=DEFAULT_CLEARANCE)
        X, Y = np.meshgrid(xs, ys)
        self._seeds = (X + 1j * Y)[valid]
        self._seed_U = _maybe_normalize(U[valid], norm)
        self._seed_S = column_ratio(self._seed_U, 0)

    def __call__(self, z, tol=1e-13, max_iter=60):
        """Return ``(x, U)`` with ``S(x) = z``; ``U`` is the normalized lift."""
        z = complex(z)
        finite = np.isfinite(self._seed_S)
        k = int(np.argmin(np.where(finite, np.abs(self._seed_S - z), np.inf)))
        x = complex(self._seeds[k])
        U = self._seed_U[k]
        raw = None if self.norm is None else np.linalg.inv(self.norm.mobius)
        for _ in range(max_iter):
            S, dS, _ = schwarz_jet(U)
            step = (S - z) / dS
            if abs(S - z) <= tol * max(1.0, abs(z)):
                break
            # damp steps that would leave the region near the real axis
            x_new = x - step
            while min(abs(x_new), abs(x_new - 1)) < 0.5 * min(abs(x), abs(x - 1)):
                step *= 0.5
                x_new = x - step
            base_U = U if raw is None else raw @ U
            base_U = transport(base_U, x, x_new, self.slc)
            U = _maybe_normalize(base_U, self.norm)
            x = x_new
        else:
            raise ConvergenceError(f"Newton inversion of S did not converge at z = {z}")
        if x.imag < -1e-9:
            raise DomainError(f"z = {z} is outside the triangle S(X_+)")
        return x, U


def composite_map_f(p: HGParams, z, norm: NormalizedMapPair | None = None,
                    inverse: SchwarzInverse | None = None) -> complex:
    """``f = DS o S^-1`` at ``z`` via ``z + 2 x'/x''`` with ODE derivatives."""
    inverse = inverse or SchwarzInverse(p, norm)
    _, U = inverse(z)
    S, dS, ddS = schwarz_jet(U)
    return complex(composite_from_jet(complex(z), dS, ddS))


# ---------------------------------------------------------------------------
# ramification
# ---------------------------------------------------------------------------

class RootClass(str, enum.Enum):
    COMPLEX_PAIR = "two-complex-conjugate"
    DOUBLE = "one-double"
    REAL_PAIR = "two-real"


@dataclass(frozen=True)
class RamificationReport:
    params: HGParams
    discriminant: float
    s: float
    t: float
    roots: tuple[complex, ...]
    klass: RootClass
    root_orders: tuple[int, ...]


def discriminant(p: HGParams) -> float:
    """Discriminant of the numerator of q, from the exponent differences."""
    m0, m1, mi = p.mu0 ** 2, p.mu1 ** 2, p.muinf ** 2
    return (mi + m0 - m1 - 1.0) ** 2 - 4.0 * (1.0 - m0) * (1.0 - mi)


def symmetric_functions(p: HGParams) -> tuple[float, float]:
    m = [mu * mu for mu in p.mus]
    return sum(m), m[0] * m[1] + m[1] * m[2] + m[2] * m[0]


def ramification_report(p: HGParams, tol: float = 1e-12) -> RamificationReport:
    D = discriminant(p)
    s, t = symmetric_functions(p)
    roots = sl_coefficient(p).roots(tol)
    if abs(D) <= tol:
        klass, orders = RootClass.DOUBLE, (3,)
    elif D < 0:
        klass, orders = RootClass.COMPLEX_PAIR, (2, 2)
    else:
        klass, orders = RootClass.REAL_PAIR, (2, 2)
    return RamificationReport(p, D, s, t, roots, klass, orders)


class STRegion(str, enum.Enum):
    D_NEGATIVE = "interior-D-negative"
    D_POSITIVE = "interior-D-positive"
    D_ZERO = "on-D-zero"
    OUTSIDE = "outside-domain"


def st_region(s: float, t: float, tol: float = 1e-12) -> STRegion:
    """Locate ``(s, t)`` relative to the domain of admissible symmetric functions.

    The domain is ``0 <= s < 3`` and ``max(0, s-1, 2s-3) <= t <= s**2/3``.
    """
    if s < -tol or s >= 3:
        return STRegion.OUTSIDE
    lower = max(0.0, s - 1.0, 2.0 * s - 3.0)
    if t > s * s / 3.0 + tol or t < lower - tol:
        return STRegion.OUTSIDE
    D = (s + 1.0) ** 2 - 4.0 * (t + 1.0)
    if abs(D) <= tol:
        return STRegion.D_ZERO
    return STRegion.D_NEGATIVE if D < 0 else STRegion.D_POSITIVE


# ---------------------------------------------------------------------------
# confluence model
# ---------------------------------------------------------------------------

def confluence_model(t: float, x):
    return -(np.asarray(x) ** 3 / 3.0 + t * np.asarray(x))


def confluence_ramification(t: float) -> tuple[complex, ...]:
    if t > 0:
        r = math.sqrt(t)
        return (complex(0, -r), complex(0, r))
    if t < 0:
        r = math.sqrt(-t)
        return (complex(-r), complex(r))
    return (0j, 0j)


def hemidisc_boundary(n: int = 4096, radius: float = 1.0) -> np.ndarray:
    """Closed counterclockwise boundary of the upper half disc."""
    arc = radius * np.exp(1j * np.linspace(0.0, np.pi, n, endpoint=False))
    diameter = np.linspace(-radius, radius, n, endpoint=False).astype(complex)
    return np.concatenate([arc, diameter, arc[:1]])


def preimage_count(t: float, w, n: int = 4096, radius: float = 1.0) -> int:
    """Number of solutions of ``confluence_model(t, x) = w`` in the open upper
    half disc, by the argument principle."""
    boundary = hemidisc_boundary(n, radius)
    values = confluence_model(t, boundary) - w
    if np.min(np.abs(values)) < 1e-9:
        raise DomainError(f"{w} lies on the image of the hemi-disc boundary")
    total = np.sum(np.angle(values[1:] / values[:-1]))
    return int(round(total / (2 * np.pi)))


# ---------------------------------------------------------------------------
# winding of DS along (0, 1)
# ---------------------------------------------------------------------------

@dataclass
class WindingRecord:
    params: HGParams
    klass: RootClass
    arc_angle: float
    progression: float
    turning_points: list = field(default_factory=list)
    chart: str = "circle"
    xs: np.ndarray | None = None
    S: np.ndarray | None = None
    DS: np.ndarray | None = None

    @property
    def extra_turns(self) -> float:
        return (self.progression - self.arc_angle) / (2 * math.pi)


def _circle_through(z1, z2, z3):
    """Center and radius of the circle through three points, or None for a line."""
    a = z2 - z1
    b = z3 - z1
    den = 2.0 * (a.real * b.imag - a.imag * b.real)
    if abs(den) < 1e-12 * max(abs(a), abs(b)) ** 2:
        return None
    ux = (b.imag * abs(a) ** 2 - a.imag * abs(b) ** 2) / den
    uy = (a.real * abs(b) ** 2 - b.real * abs(a) ** 2) / den
    center = z1 + complex(ux, uy)
    return center, abs(center - z1)


def trace_interval(p: HGParams, xs, norm: NormalizedMapPair | None = None, offset: float = 0.0):
    """Normalized lifts at the points ``xs + i*offset`` of ``(0, 1)``."""
    xs = np.asarray(xs, dtype=float)
    slc = sl_coefficient(p)
    mid = int(np.searchsorted(xs, 0.5))
    start = initial_lift(p, complex(0.5, offset))
    pts = xs + 1j * offset
    U = np.empty((len(xs), 2, 2), dtype=complex)
    U[mid:] = continue_along(start, pts[mid:], slc)
    U[:mid] = continue_along(start, pts[:mid][::-1], slc)[::-1]
    return _maybe_normalize(U, norm)


def winding_analysis(p: HGParams, samples_on_01: int = 2000, norm: NormalizedMapPair | None = None,
                     offset: float = 0.0) -> WindingRecord:
    """Angular progression of DS along (0, 1) on the circle C through S((0, 1)).

    Endpoints use the exact limits ``DS(0) = S(0)`` and ``DS(1) = S(1)``.
    Turning points are the sample locations where the angular motion of DS
    reverses, refined by a parabola through the neighbouring samples.
    """
    if norm is None:
        try:
            norm = normalize_maps(p)
        except DomainError:
            norm = None
    if norm is not None:
        s_zero, s_one = norm(norm.S_T_0), norm(norm.S_T_1)
    else:
        s_zero, s_one = 0j, schwarz_value_at_one(p)
    xs = np.linspace(0.0, 1.0, samples_on_01 + 2)[1:-1]
    U = trace_interval(p, xs, norm, offset)
    S = column_ratio(U, 0)
    DS = column_ratio(U, 1)
    k_mid = len(xs) // 2
    circle = _circle_through(s_zero, S[k_mid], s_one)
    if circle is not None and circle[1] < 1e6:
        center = circle[0]
        chart = "circle"

        def angle(z):
            return np.angle(np.asarray(z) - center)
    else:
        m = mobius_from_points((s_zero, S[k_mid], s_one), (1 + 0j, 1j, -1 + 0j))
        chart = "moebius"

        def angle(z):
            return np.angle(mobius_apply(m, z))

    s_path = np.concatenate([[s_zero], S, [s_one]])
    ds_path = np.concatenate([[s_zero], DS, [s_one]])
    s_theta = np.unwrap(angle(s_path))
    ds_theta = np.unwrap(angle(ds_path))
    arc = float(s_theta[-1] - s_theta[0])
    progression = float(ds_theta[-1] - ds_theta[0])
    steps = np.diff(ds_theta[1:-1])
    turning = []
    sign = np.sign(steps)
    for k in np.nonzero(sign[1:] * sign[:-1] < 0)[0]:
        # vertex of the parabola through samples k, k+1, k+2
        y0, y1, y2 = ds_theta[1 + k], ds_theta[2 + k], ds_theta[3 + k]
        h = xs[1] - xs[0]
        den = y0 - 2 * y1 + y2
        shift = 0.0 if den == 0 else 0.5 * h * (y0 - y2) / den
        turning.append(float(xs[k + 1] + shift))
    return WindingRecord(p, ramification_report(p).klass, arc, progression, turning, chart,
                         xs, S, DS)


def interval_images(p: HGParams, xs, norm: NormalizedMapPair | None = None, offset: float = 0.0):
    """``(S, DS)`` along points of (0, 1); thin wrapper over ``trace_interval``."""
    U = trace_interval(p, xs, norm, offset)
    return column_ratio(U, 0), column_ratio(U, 1)


def lifts_along(p: HGParams, points, norm: NormalizedMapPair | None = None,
                clearance: float = DEFAULT_CLEARANCE) -> np.ndarray:
    """Normalized lifts at consecutive ``points`` (first reached by a planned path)."""
    points = np.asarray(points, dtype=complex)
    slc = sl_coefficient(p)
    first = lift_at(p, points[0], clearance=clearance)
    U = continue_along(first, points, slc)
    return _maybe_normalize(U, norm)
