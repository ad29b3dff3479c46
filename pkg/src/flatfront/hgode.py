"""SL-form of the hypergeometric equation and its holomorphic lift.

The SL-form is ``u'' = q u`` with

    q(x) = -(n2 x**2 + n1 x + n0) / (4 x**2 (1-x)**2),
    n2 = 1 - muinf**2,  n1 = muinf**2 + mu0**2 - mu1**2 - 1,  n0 = 1 - mu0**2.

A holomorphic lift is a 2x2 matrix ``U`` with ``det U = 1`` solving
``U' = U [[0, q], [1, 0]]``; each row is ``(u, u')`` for one solution of the
SL-form. Rows are ordered so that the column ratio ``U[0, k] / U[1, k]``
is ``u1/u0`` for ``k = 0`` (the Schwarz map) and ``u1'/u0'`` for ``k = 1``
(the derived Schwarz map), where ``u0 = N F(a,b;c;x)`` and
``u1 = N x**(1-c) F(a-c+1, b-c+1; 2-c; x)`` with
``N = sqrt(x**c (1-x)**(a+b+1-c))`` on principal branches.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ClearanceError, ParameterError, PoleError, UmbilicError
from .ode import integrate_segment
from .params import HGParams
from .specfun import SERIES_RADIUS, hyp2f1

BASE_POINT = 0.5 + 0.5j
DEFAULT_CLEARANCE = 0.02
PUNCTURES = (0.0 + 0j, 1.0 + 0j)


@dataclass(frozen=True)
class SLCoefficient:
    """Numerator coefficients of ``q``; see the module docstring."""

    params: HGParams
    n2: float
    n1: float
    n0: float

    @property
    def numerator(self) -> tuple[float, float, float]:
        return (self.n2, self.n1, self.n0)

    @property
    def discriminant(self) -> float:
        return self.n1 * self.n1 - 4.0 * self.n2 * self.n0

    def roots(self, tol: float = 1e-12) -> tuple[complex, ...]:
        """Zeros of ``q`` (a single entry for a double root)."""
        return quadratic_roots(self.n2, self.n1, self.n0, tol)


def sl_coefficient(p: HGParams) -> SLCoefficient:
    m0, m1, mi = p.mu0 ** 2, p.mu1 ** 2, p.muinf ** 2
    return SLCoefficient(p, 1.0 - mi, mi + m0 - m1 - 1.0, 1.0 - m0)


def quadratic_roots(a2, a1, a0, tol=1e-12) -> tuple[complex, ...]:
    """Roots of a real quadratic, ordered by real then imaginary part."""
    if a2 == 0:
        return () if a1 == 0 else (complex(-a0 / a1),)
    disc = a1 * a1 - 4.0 * a2 * a0
    if abs(disc) <= tol:
        return (complex(-a1 / (2.0 * a2)),)
    if disc < 0:
        re = -a1 / (2.0 * a2)
        im = math.sqrt(-disc) / (2.0 * abs(a2))
        return (complex(re, -im), complex(re, im))
    # cancellation-free form
    s = -0.5 * (a1 + math.copysign(math.sqrt(disc), a1))
    r1, r2 = s / a2, a0 / s
    return tuple(complex(r) for r in sorted((r1, r2)))


def _check_poles(x):
    x = np.asarray(x)
    if np.any((x == 0) | (x == 1)):
        raise PoleError("q has double poles at x = 0 and x = 1")


def q_at(slc: SLCoefficient, x):
    """Value of ``q``; accepts scalars or arrays."""
    _check_poles(x)
    x = np.asarray(x, dtype=complex)
    num = (slc.n2 * x + slc.n1) * x + slc.n0
    out = -num / (4.0 * x * x * (1.0 - x) ** 2)
    return out[()] if out.ndim == 0 else out


def q_partial_fractions(slc: SLCoefficient, x):
    """``q`` from its partial-fraction form (independent of ``q_at``)."""
    _check_poles(x)
    p = slc.params
    x = np.asarray(x, dtype=complex)
    m0, m1, mi = p.mu0 ** 2, p.mu1 ** 2, p.muinf ** 2
    out = -0.25 * ((1 - m0) / x ** 2 + (1 - m1) / (1 - x) ** 2 + (1 + mi - m0 - m1) / (x * (1 - x)))
    return out[()] if out.ndim == 0 else out


def q_prime_at(slc: SLCoefficient, x):
    _check_poles(x)
    x = np.asarray(x, dtype=complex)
    num = (slc.n2 * x + slc.n1) * x + slc.n0
    dnum = 2.0 * slc.n2 * x + slc.n1
    den = 4.0 * x * x * (1.0 - x) ** 2
    out = -(dnum - num * (2.0 / x - 2.0 / (1.0 - x))) / den
    return out[()] if out.ndim == 0 else out


def derived_sl_coefficient_at(slc: SLCoefficient, x):
    """SL coefficient of the derived equation, ``q + (q'/q)**2/4 - (q'/q)'/2``."""
    _check_poles(x)
    x = np.asarray(x, dtype=complex)
    num = (slc.n2 * x + slc.n1) * x + slc.n0
    if np.any(np.abs(num) <= 1e-13):
        raise UmbilicError("the derived coefficient is singular at zeros of q")
    dnum = 2.0 * slc.n2 * x + slc.n1
    ddnum = 2.0 * slc.n2
    log_deriv = dnum / num - 2.0 / x + 2.0 / (1.0 - x)
    log_deriv_prime = (ddnum * num - dnum * dnum) / num ** 2 + 2.0 / x ** 2 + 2.0 / (1.0 - x) ** 2
    q = -num / (4.0 * x * x * (1.0 - x) ** 2)
    out = q + 0.25 * log_deriv ** 2 - 0.5 * log_deriv_prime
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# holomorphic lift
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HoloLift:
    """Holomorphic lift ``U`` at the base point ``x``."""

    x: complex
    U: np.ndarray
    params: HGParams | None = field(default=None)

    def __post_init__(self):
        U = np.array(self.U, dtype=complex)
        if U.shape != (2, 2):
            raise ParameterError(f"a lift is a 2x2 matrix, got shape {U.shape}")
        U.setflags(write=False)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "x", complex(self.x))

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.U))

    def column_ratio(self, k: int) -> complex:
        return column_ratio(self.U, k)


def column_ratio(U, k):
    """Projective value ``U[..., 0, k] / U[..., 1, k]`` (infinity allowed)."""
    U = np.asarray(U)
    top, bottom = U[..., 0, k], U[..., 1, k]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(bottom == 0, complex(np.inf, 0.0), top / np.where(bottom == 0, 1.0, bottom))
    return out[()] if out.ndim == 0 else out


def gauge_factor(p: HGParams, x) -> tuple[complex, complex]:
    """``N = sqrt(x**c (1-x)**(a+b+1-c))`` and ``N'/N`` on principal branches."""
    x = complex(x)
    e1 = p.a + p.b + 1.0 - p.c
    n = cmath.exp(0.5 * (p.c * cmath.log(x) + e1 * cmath.log(1.0 - x)))
    return n, 0.5 * (p.c / x - e1 / (1.0 - x))


def _unimodular(U):
    d = complex(np.linalg.det(U))
    r = cmath.sqrt(d)
    # the origin pair has det = c - 1 < 0, so ties are the common case
    tie = abs(r.real) <= 1e-9 * abs(r)
    if (not tie and r.real < 0) or (tie and r.imag < 0):
        r = -r
    return U / r


def solution_pair(p: HGParams, x, pair: str = "origin"):
    """Two solutions of the hypergeometric equation and their derivatives.

    ``pair="origin"`` gives ``F(a,b;c;x)`` and ``x**(1-c) F(a-c+1,b-c+1;2-c;x)``;
    ``pair="mixed"`` replaces the second by ``F(a,b;a+b-c+1;1-x)``, which
    stays independent when ``c`` is an integer.
    Returns ``((u0, u0'), (u1, u1'))``.
    """
    x = complex(x)
    a, b, c = p.a, p.b, p.c
    f0, df0 = hyp2f1(a, b, c, x)
    if pair == "origin":
        if c == round(c):
            raise ParameterError(
                f"c = {c:g} is an integer; the pair F, x^(1-c)F(...) degenerates (use pair='mixed')")
        g, dg = hyp2f1(a - c + 1, b - c + 1, 2 - c, x)
        xp = cmath.exp((1 - c) * cmath.log(x))
        return (f0, df0), (xp * g, (1 - c) * xp / x * g + xp * dg)
    if pair == "mixed":
        g, dg = hyp2f1(a, b, a + b - c + 1, 1.0 - x)
        return (f0, df0), (g, -dg)
    raise ParameterError(f"unknown solution pair {pair!r}")


@functools.lru_cache(maxsize=256)
def _initial_lift_cached(p: HGParams, x0: complex, pair: str) -> HoloLift:
    reach = abs(x0) if pair == "origin" else max(abs(x0), abs(1 - x0))
    if reach > SERIES_RADIUS:
        raise ParameterError(f"base point {x0} is outside the series disc |x| <= {SERIES_RADIUS}")
    if x0 == 0 or x0 == 1:
        raise PoleError("base point at a puncture")
    (u0, du0), (u1, du1) = solution_pair(p, x0, pair)
    n, dlog_n = gauge_factor(p, x0)
    U = np.array([[n * u1, n * (du1 + dlog_n * u1)],
                  [n * u0, n * (du0 + dlog_n * u0)]], dtype=complex)
    return HoloLift(x0, _unimodular(U), p)


def initial_lift(p: HGParams, x0=BASE_POINT, pair: str = "origin") -> HoloLift:
    """Lift at a base point inside the series disc, normalized to ``det U = 1``."""
    return _initial_lift_cached(p, complex(x0), pair)


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------

def _segment_distance(points, a, b):
    """Distance from each of ``points`` to the segment ``[a, b]``."""
    points = np.asarray(points, dtype=complex)
    d = b - a
    if d == 0:
        return np.abs(points - a)
    s = np.clip(((points - a) * np.conj(d)).real / abs(d) ** 2, 0.0, 1.0)
    return np.abs(points - (a + s * d))


def polyline_distance(vertices, points):
    """Minimum distance from a polyline to each point."""
    vertices = np.asarray(vertices, dtype=complex)
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    if len(vertices) == 1:
        return np.abs(points - vertices[0])
    return np.min([_segment_distance(points, vertices[i], vertices[i + 1])
                   for i in range(len(vertices) - 1)], axis=0)


@dataclass(frozen=True)
class PathPlan:
    """Polyline in the x-plane used for analytic continuation.

    ``clearance`` is the distance to the nearest of {0, 1} and the zeros of q;
    ``puncture_clearance`` ignores the zeros of q (which are regular points
    for the lift).
    """

    vertices: tuple[complex, ...]
    clearance: float
    puncture_clearance: float

    @property
    def start(self) -> complex:
        return self.vertices[0]

    @property
    def end(self) -> complex:
        return self.vertices[-1]

    def __len__(self):
        return len(self.vertices)


def path_from_vertices(vertices, slc: SLCoefficient | None = None) -> PathPlan:
    verts = tuple(complex(v) for v in vertices)
    punct = float(np.min(polyline_distance(verts, PUNCTURES)))
    clear = punct
    if slc is not None and slc.roots():
        clear = min(clear, float(np.min(polyline_distance(verts, slc.roots()))))
    return PathPlan(verts, clear, punct)


def _detour(p0, p1, center, radius, upper):
    """Replace the part of ``[p0, p1]`` inside the circle by an arc."""
    d = p1 - p0
    # |p0 + s d - center|^2 = radius^2
    w = p0 - center
    A = abs(d) ** 2
    B = 2.0 * (w * np.conj(d)).real
    C = abs(w) ** 2 - radius ** 2
    disc = B * B - 4 * A * C
    if disc <= 0:
        return [p0, p1]
    sq = math.sqrt(disc)
    s1, s2 = (-B - sq) / (2 * A), (-B + sq) / (2 * A)
    s1, s2 = max(s1, 0.0), min(s2, 1.0)
    e1, e2 = p0 + s1 * d, p0 + s2 * d
    t1 = cmath.phase(e1 - center)
    t2 = cmath.phase(e2 - center)
    sweep = (t2 - t1) % (2 * math.pi)  # counterclockwise sweep
    options = (sweep, sweep - 2 * math.pi)
    mids = [center + radius * cmath.exp(1j * (t1 + o / 2)) for o in options]
    pick = max(range(2), key=lambda i: mids[i].imag if upper else -abs(options[i]))
    sweep = options[pick]
    n = max(4, int(math.ceil(abs(sweep) / (math.pi / 24))))
    arc = [center + radius * cmath.exp(1j * (t1 + sweep * k / n)) for k in range(n + 1)]
    return [p0] + arc + [p1]


def plan_path(start, end, slc: SLCoefficient, clearance: float = DEFAULT_CLEARANCE,
              upper: bool = True) -> PathPlan:
    """Polyline from ``start`` to ``end`` keeping ``clearance`` from obstacles.

    Obstacles are 0, 1 and the zeros of q (zeros closer than ``clearance``
    to an endpoint are not avoided, so paths may end on an umbilic). Detours
    are polygonal arcs of radius ``1.5 * clearance``, taken on the upper side
    when ``upper`` is set.
    """
    start, end = complex(start), complex(end)
    if not clearance > 0:
        raise ClearanceError("clearance must be positive")
    for label, pt in (("start", start), ("end", end)):
        if min(abs(pt - z) for z in PUNCTURES) <= clearance:
            raise ClearanceError(f"{label} point {pt} is within {clearance} of a puncture")
    obstacles = list(PUNCTURES)
    for r in slc.roots():
        if upper and r.imag < -clearance:
            continue
        if min(abs(r - start), abs(r - end)) > clearance:
            obstacles.append(r)
    radius = 1.5 * clearance
    verts = [start, end]
    for _ in range(4 * len(obstacles) + 4):
        changed = False
        for i in range(len(verts) - 1):
            for o in obstacles:
                if _segment_distance(o, verts[i], verts[i + 1]) < clearance:
                    r = min(radius, abs(verts[i] - o), abs(verts[i + 1] - o))
                    piece = _detour(verts[i], verts[i + 1], o, r, upper)
                    verts[i:i + 2] = piece
                    changed = True
                    break
            if changed:
                break
        if not changed:
            break
    plan = path_from_vertices(verts, None)
    obstacle_clear = float(np.min(polyline_distance(verts, obstacles)))
    if obstacle_clear < clearance * (1 - 1e-9):
        raise ClearanceError(f"no path found keeping clearance {clearance}")
    all_roots = slc.roots()
    clear = plan.puncture_clearance
    if all_roots:
        clear = min(clear, float(np.min(polyline_distance(verts, all_roots))))
    return PathPlan(plan.vertices, clear, plan.puncture_clearance)


# ---------------------------------------------------------------------------
# continuation
# ---------------------------------------------------------------------------

def _lift_rhs(slc, xa, xb):
    dx = xb - xa

    def rhs(s, U):
        x = xa + s * dx
        q = q_at(slc, x)
        out = np.empty_like(U)
        out[:, :, 0] = U[:, :, 1]
        out[:, :, 1] = q[:, None] * U[:, :, 0]
        return out * dx[:, None, None]

    return rhs


def transport(U, xa, xb, slc: SLCoefficient):
    """Transport a batch of lifts along straight segments ``xa[i] -> xb[i]``."""
    U = np.asarray(U, dtype=complex)
    xa = np.asarray(xa, dtype=complex).reshape(-1)
    xb = np.asarray(xb, dtype=complex).reshape(-1)
    if U.ndim == 2:
        return transport(U[None], xa, xb, slc)[0]
    dist = min(float(np.min(_seg_dist_batch(z, xa, xb))) for z in PUNCTURES)
    if dist <= 0:
        raise ClearanceError("a continuation segment passes through a puncture")
    return integrate_segment(_lift_rhs(slc, xa, xb), U)


def _seg_dist_batch(z, xa, xb):
    d = xb - xa
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(d == 0, 0.0, ((z - xa) * np.conj(d)).real / np.where(d == 0, 1.0, np.abs(d) ** 2))
    s = np.clip(s, 0.0, 1.0)
    return np.abs(z - (xa + s * d))


def continue_lift(lift: HoloLift, path: PathPlan, slc: SLCoefficient | None = None) -> HoloLift:
    """Analytic continuation of ``lift`` along ``path``."""
    if slc is None:
        if lift.params is None:
            raise ParameterError("pass the SL coefficient or a lift carrying its parameters")
        slc = sl_coefficient(lift.params)
    if abs(path.start - lift.x) > 1e-12 * max(1.0, abs(lift.x)):
        raise ClearanceError(f"path starts at {path.start}, lift lives at {lift.x}")
    if not path.puncture_clearance > 0:
        raise ClearanceError("path touches a puncture")
    U = lift.U
    verts = path.vertices
    for a, b in zip(verts[:-1], verts[1:]):
        if a != b:
            U = transport(U, a, b, slc)
    return HoloLift(verts[-1], U, slc.params)


def continue_along(lift: HoloLift, points, slc: SLCoefficient) -> np.ndarray:
    """Lifts at each of ``points``, visited in order by straight segments.

    Returns an array of shape ``(len(points), 2, 2)``.
    """
    points = np.asarray(points, dtype=complex)
    out = np.empty((len(points), 2, 2), dtype=complex)
    U, here = lift.U, lift.x
    for i, x in enumerate(points):
        if x != here:
            U = transport(U, here, x, slc)
            here = x
        out[i] = U
    return out


def lift_at(p: HGParams, x, path: PathPlan | None = None, base=BASE_POINT,
            clearance: float = DEFAULT_CLEARANCE, pair: str = "origin") -> HoloLift:
    """Lift at ``x``, continued from the default base point."""
    slc = sl_coefficient(p)
    start = initial_lift(p, base, pair)
    if path is None:
        path = plan_path(start.x, x, slc, clearance=min(clearance, 0.5 * _puncture_distance(x)))
    return continue_lift(start, path, slc)


def _puncture_distance(x):
    return min(abs(complex(x) - z) for z in PUNCTURES)


def lattice_lifts(p: HGParams, xs, ys, exclusion: float = DEFAULT_CLEARANCE,
                  base=BASE_POINT, pair: str = "origin"):
    """Lifts on the lattice ``xs x ys`` (``ys`` ascending, all >= 0).

    Lifts are carried from the base point to the top row, along the top row,
    then down every column simultaneously. Vertices within ``exclusion`` of
    0 or 1 are skipped. Returns ``(U, valid)`` with ``U`` of shape
    ``(len(ys), len(xs), 2, 2)`` (NaN where invalid).
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if np.any(np.diff(ys) <= 0) or np.any(np.diff(xs) <= 0):
        raise ParameterError("lattice coordinates must be strictly increasing")
    X, Y = np.meshgrid(xs, ys)
    Z = X + 1j * Y
    valid = (np.abs(Z) > exclusion) & (np.abs(Z - 1) > exclusion)
    if not valid[-1].all():
        raise ClearanceError("the top lattice row must clear the exclusion discs")
    slc = sl_coefficient(p)
    U = np.full(Z.shape + (2, 2), np.nan + 0j)
    start = initial_lift(p, base, pair)
    k0 = int(np.argmin(np.abs(xs - start.x.real)))
    head = continue_lift(start, plan_path(start.x, Z[-1, k0], slc,
                                          clearance=min(DEFAULT_CLEARANCE, exclusion)), slc)
    U[-1, k0] = head.U
    U[-1, k0:] = continue_along(head, Z[-1, k0:], slc)
    U[-1, :k0 + 1] = continue_along(head, Z[-1, k0::-1], slc)[::-1]
    reached = valid[-1].copy()
    for j in range(len(ys) - 2, -1, -1):
        active = reached & valid[j]
        if active.any():
            U[j, active] = transport(U[j + 1, active], Z[j + 1, active], Z[j, active], slc)
        reached = active
    valid = valid & ~np.isnan(U[..., 0, 0])
    return U, valid


# ---------------------------------------------------------------------------
# monodromy
# ---------------------------------------------------------------------------

def loop_path(slc: SLCoefficient, base, around, n_vertices: int = 256) -> PathPlan:
    """Base point -> circle around ``around`` (counterclockwise) -> base point."""
    around = complex(around)
    if around not in PUNCTURES:
        raise ParameterError("loops are taken around 0 or 1")
    others = [z for z in PUNCTURES if z != around] + [complex(r) for r in slc.roots()]
    rho = min(0.5, 0.5 * min(abs(z - around) for z in others))
    base = complex(base)
    if abs(base - around) <= rho:
        raise ClearanceError("base point lies inside the monodromy circle")
    theta0 = cmath.phase(base - around)
    ring = [around + rho * cmath.exp(1j * (theta0 + 2 * math.pi * k / n_vertices))
            for k in range(n_vertices + 1)]
    verts = [base] + ring + [base]
    plan = path_from_vertices(verts, slc)
    if plan.clearance < 0.25 * rho:
        raise ClearanceError("the radial leg of the monodromy loop passes near a zero of q")
    return plan


def _derived_rhs(slc, xa, xb):
    dx = xb - xa

    def rhs(s, V):
        x = xa + s * dx
        q = q_at(slc, x)
        lq = q_prime_at(slc, x) / q
        out = np.empty_like(V)
        out[:, :, 0] = V[:, :, 1]
        out[:, :, 1] = q[:, None] * V[:, :, 0] + lq[:, None] * V[:, :, 1]
        return out * dx[:, None, None]

    return rhs


def monodromy(p: HGParams, base=BASE_POINT, loop_around=0, *, gauge: str = "sl",
              side: str = "right", n_vertices: int = 256) -> np.ndarray:
    """Monodromy matrix of a counterclockwise loop around 0 or 1.

    ``side="right"`` returns ``M`` with ``U_after = U_before @ M``;
    ``side="left"`` returns ``L`` with ``U_after = L @ U_before`` (the matrix
    acting on the solution basis, and as an isometry on the front).
    ``gauge="derived"`` integrates the derived equation
    ``v'' = (q'/q) v' + q v`` for ``v = u'`` instead of the SL-form.
    """
    slc = sl_coefficient(p)
    lift = initial_lift(p, base)
    loop = loop_path(slc, lift.x, loop_around, n_vertices)
    if gauge == "sl":
        before = lift.U
        after = continue_lift(lift, loop, slc).U
    elif gauge == "derived":
        q0 = complex(q_at(slc, lift.x))
        U = lift.U
        before = np.array([[U[0, 1], q0 * U[0, 0]], [U[1, 1], q0 * U[1, 0]]])
        V = before[None]
        for a, b in zip(loop.vertices[:-1], loop.vertices[1:]):
            V = integrate_segment(_derived_rhs(slc, np.array([a]), np.array([b])), V)
        after = V[0]
    else:
        raise ParameterError(f"unknown gauge {gauge!r}")
    if side == "right":
        return np.linalg.solve(before, after)
    if side == "left":
        return after @ np.linalg.inv(before)
    raise ParameterError(f"unknown side {side!r}")
