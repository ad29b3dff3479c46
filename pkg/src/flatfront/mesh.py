"""Domain grids, front meshes and the OBJ/SVG writers.

The default domain is the quadrangle with bottom corners ``A = -1`` and
``E = 2`` and height ``10/8``; the marked points ``B = 0``, ``C = 1/2`` and
``D = 1`` sit on its bottom edge.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyGridError, ParameterError
from .hgode import (DEFAULT_CLEARANCE, column_ratio, continue_along, lattice_lifts, lift_at,
                    q_at, sl_coefficient, transport)
from .hyp3 import (SINGULAR_TOL, ball_chart, chi_boundary, hermitian_to_minkowski)
from .maps import NormalizedMapPair, ramification_report
from .params import HGParams

DEFAULT_REGION = (-1.0, 2.0, 0.0, 1.25)
DEFAULT_RESOLUTION = (300, 125)
BOUNDARY_OFFSET = 1e-4
MARKERS = {"A": -1.0 + 0j, "B": 0j, "C": 0.5 + 0j, "D": 1.0 + 0j, "E": 2.0 + 0j}
SEGMENTS = (("AB", "A", "B"), ("BC", "B", "C"), ("CD", "C", "D"), ("DE", "D", "E"))


@dataclass(frozen=True, eq=False)
class DomainGrid:
    """Uniform lattice over ``region`` with the discs around 0 and 1 removed.

    ``index[j, i]`` is the vertex number of lattice point ``(xs[i], ys[j])``
    or -1 when it is excluded. Faces split every fully valid lattice cell
    into two counterclockwise triangles.
    """

    region: tuple
    resolution: tuple
    exclusion: float
    xs: np.ndarray
    ys: np.ndarray
    index: np.ndarray
    vertices: np.ndarray
    faces: np.ndarray
    markers: dict = field(default_factory=dict)

    @property
    def valid(self) -> np.ndarray:
        return self.index >= 0

    def boundary_segments(self):
        """Labelled bottom-edge segments ``(name, start, end)``."""
        return [(name, self.markers[a], self.markers[b]) for name, a, b in SEGMENTS
                if a in self.markers and b in self.markers]


def build_grid(region=DEFAULT_REGION, resolution=DEFAULT_RESOLUTION,
               exclusion: float = DEFAULT_CLEARANCE) -> DomainGrid:
    x0, x1, y0, y1 = map(float, region)
    nu, nv = map(int, resolution)
    if nu < 2 or nv < 2:
        raise ParameterError(f"resolution must be at least 2x2, got {nu}x{nv}")
    if not exclusion > 0:
        raise ParameterError("exclusion radius must be positive")
    if not (x1 > x0 and y1 > y0 and y0 >= 0):
        raise ParameterError(f"region {region} is not a rectangle in the closed upper half plane")
    xs = np.linspace(x0, x1, nu)
    ys = np.linspace(y0, y1, nv)
    Z = xs[None, :] + 1j * ys[:, None]
    keep = (np.abs(Z) > exclusion) & (np.abs(Z - 1) > exclusion)
    if not keep.any():
        raise EmptyGridError(f"exclusion radius {exclusion} removes every vertex")
    index = np.full(Z.shape, -1, dtype=np.int64)
    index[keep] = np.arange(int(keep.sum()))
    a, b = index[:-1, :-1], index[:-1, 1:]
    c, d = index[1:, 1:], index[1:, :-1]
    cell = (a >= 0) & (b >= 0) & (c >= 0) & (d >= 0)
    faces = np.concatenate([np.stack([a[cell], b[cell], c[cell]], axis=1),
                            np.stack([a[cell], c[cell], d[cell]], axis=1)])
    if len(faces) == 0:
        raise EmptyGridError("no lattice cell survives the exclusion discs")
    markers = {k: v for k, v in MARKERS.items() if x0 <= v.real <= x1 and y0 == 0}
    return DomainGrid((x0, x1, y0, y1), (nu, nv), float(exclusion), xs, ys, index, Z[keep],
                      faces, markers)


def grid_lifts(p: HGParams, grid: DomainGrid, norm: NormalizedMapPair | None = None,
               pair: str = "origin") -> np.ndarray:
    """Lifts at the grid vertices, shape ``(n_vertices, 2, 2)``."""
    U, valid = lattice_lifts(p, grid.xs, grid.ys, exclusion=grid.exclusion, pair=pair)
    missing = grid.valid & ~valid
    if missing.any():
        raise EmptyGridError(f"{int(missing.sum())} grid vertices could not be reached")
    U = U[grid.valid]
    return U if norm is None else norm.lift(U)


@dataclass(eq=False)
class SurfaceMesh:
    vertices: np.ndarray
    faces: np.ndarray
    domain: np.ndarray = None
    q_abs: np.ndarray = None
    singular: np.ndarray = None
    features: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.vertices)
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(n, 3)
        self.faces = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if self.domain is None:
            self.domain = np.full(n, np.nan + 0j)
        if self.q_abs is None:
            self.q_abs = np.full(n, np.nan)
        if self.singular is None:
            self.singular = np.zeros(n, dtype=bool)

    @property
    def feature_edges(self) -> np.ndarray:
        edges = [np.asarray(e, dtype=np.int64).reshape(-1, 2) for e in self.features.values()]
        return np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)


def _front_ball(U, t):
    w = np.array([math.exp(t / 2), math.exp(-t / 2)])
    Ut = U * w
    H = Ut @ np.conj(np.swapaxes(Ut, -1, -2))
    return ball_chart(hermitian_to_minkowski(H))


def _locus_crossings(p, grid, U, t, level):
    """Points where ``|q_t| = 1`` on grid edges, with lifts transported there.

    Returns (domain points, lifts, edge list of feature segments as pairs of
    crossing numbers).
    """
    slc = sl_coefficient(p)
    x = grid.vertices
    g = np.abs(q_at(slc, x)) * math.exp(-2 * t) - level
    edge_id = {}
    ends = []
    segments = []
    for tri in grid.faces:
        hits = []
        for i, j in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
            if (g[i] > 0) != (g[j] > 0):
                key = (min(i, j), max(i, j))
                if key not in edge_id:
                    edge_id[key] = len(ends)
                    ends.append(key)
                hits.append(edge_id[key])
        if len(hits) == 2:
            segments.append(hits)
    if not ends:
        return np.zeros(0, complex), np.zeros((0, 2, 2), complex), np.zeros((0, 2), np.int64)
    ends = np.array(ends)
    xa, xb = x[ends[:, 0]], x[ends[:, 1]]
    ga = g[ends[:, 0]]
    lo, hi = np.zeros(len(ends)), np.ones(len(ends))
    # bisection on the exact |q_t| along each crossed edge
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        gm = np.abs(q_at(slc, xa + mid * (xb - xa))) * math.exp(-2 * t) - level
        same = (gm > 0) == (ga > 0)
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    s = 0.5 * (lo + hi)
    xc = xa + s * (xb - xa)
    Uc = transport(U[ends[:, 0]], xa, xc, slc)
    return xc, Uc, np.array(segments, dtype=np.int64).reshape(-1, 2)


def front_mesh(p: HGParams, grid: DomainGrid, t: float = 0.0, norm: NormalizedMapPair | None = None,
               lifts: np.ndarray | None = None, singular_tol: float = SINGULAR_TOL,
               pair: str = "origin") -> SurfaceMesh:
    """Ball-chart mesh of the parallel front at distance ``t``.

    The singular locus ``|q_t| = 1`` is added as extra vertices on the grid
    edges it crosses, joined by the feature polyline ``"singular"``.
    """
    U = grid_lifts(p, grid, norm, pair) if lifts is None else lifts
    slc = sl_coefficient(p)
    xc, Uc, seg = _locus_crossings(p, grid, U, t, 1.0)
    domain = np.concatenate([grid.vertices, xc])
    allU = np.concatenate([U, Uc])
    qt = np.abs(q_at(slc, domain)) * math.exp(-2 * t)
    n = len(grid.vertices)
    features = {"singular": seg + n} if len(seg) else {}
    return SurfaceMesh(_front_ball(allU, t), grid.faces, domain, qt,
                       np.abs(qt - 1.0) < singular_tol, features)


def sphere_mesh(p: HGParams, grid: DomainGrid, which: str = "S", norm: NormalizedMapPair | None = None,
                lifts: np.ndarray | None = None, half: bool = False, pair: str = "origin") -> SurfaceMesh:
    """Mesh of ``chi(S(X+))`` or ``chi(DS(X+))`` on the unit sphere.

    ``half=True`` keeps only the faces over ``Re x <= 1/2``.
    """
    col = {"S": 0, "DS": 1}.get(which)
    if col is None:
        raise ParameterError(f"which must be 'S' or 'DS', got {which!r}")
    U = grid_lifts(p, grid, norm, pair) if lifts is None else lifts
    verts = chi_boundary(column_ratio(U, col))
    faces = grid.faces
    if half:
        faces = faces[np.all(grid.vertices[faces].real <= 0.5 + 1e-12, axis=1)]
    slc = sl_coefficient(p)
    return SurfaceMesh(verts, faces, grid.vertices, np.abs(q_at(slc, grid.vertices)))


# ---------------------------------------------------------------------------
# boundary curves
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Curve:
    label: str
    points: np.ndarray
    markers: dict = field(default_factory=dict)


def ramification_markers(p: HGParams) -> dict:
    """Names for the zeros of q in the closed upper half plane: ``X`` for a
    non-real (or double) zero, ``Y < Z`` for real ones."""
    rep = ramification_report(p)
    roots = [r for r in rep.roots if r.imag >= -1e-12]
    if len(roots) == 1 or len(rep.roots) == 1:
        return {"X": complex(roots[0].real, max(roots[0].imag, 0.0))}
    if all(abs(r.imag) <= 1e-12 for r in rep.roots):
        y, z = sorted(r.real for r in rep.roots)
        return {"Y": complex(y), "Z": complex(z)}
    return {"X": roots[0]}


def boundary_curves(p: HGParams, grid: DomainGrid, which: str = "DS",
                    norm: NormalizedMapPair | None = None, samples: int = 400,
                    offset: float = BOUNDARY_OFFSET, pair: str = "origin") -> list[Curve]:
    """Images of the bottom segments AB, BC, CD, DE under S or DS.

    Segments are traced ``offset`` above the real axis, stopping ``10*offset``
    short of the punctures; the limits at 0 and 1 (where S and DS agree)
    close the curves. Markers carry the images of A to E and of X, Y, Z.
    """
    col = {"S": 0, "DS": 1}.get(which)
    if col is None:
        raise ParameterError(f"which must be 'S' or 'DS', got {which!r}")
    slc = sl_coefficient(p)
    gap = 10 * offset
    punct_value = {}
    if norm is not None:
        punct_value = {"B": complex(norm(norm.S_T_0)), "D": complex(norm(norm.S_T_1))}
    names = ramification_markers(p)
    curves = []
    for name, a, b in grid.boundary_segments():
        za, zb = a, b
        if abs(za) < 1e-12 or abs(za - 1) < 1e-12:
            za = za + gap
        if abs(zb) < 1e-12 or abs(zb - 1) < 1e-12:
            zb = zb - gap
        xs = np.linspace(za.real, zb.real, samples) + 1j * offset
        start = lift_at(p, xs[0], pair=pair)
        U = continue_along(start, xs, slc)
        if norm is not None:
            U = norm.lift(U)
        values = column_ratio(U, col)
        labels = {}
        for key, z in ((name[0], a), (name[1], b)):
            if key in punct_value:
                labels[key] = punct_value[key]
            else:
                labels[key] = complex(values[0] if z == a else values[-1])
        pts = list(values)
        if name[0] in punct_value:
            pts.insert(0, punct_value[name[0]])
        if name[1] in punct_value:
            pts.append(punct_value[name[1]])
        for key, r in names.items():
            if abs(r.imag) <= 1e-12 and za.real < r.real < zb.real:
                lift = transport(U[0], xs[0], complex(r.real, offset), slc)
                labels[key] = complex(column_ratio(lift, col))
        curves.append(Curve(name, np.array(pts, dtype=complex), labels))
    for key, r in names.items():
        if r.imag > 1e-12:
            U = lift_at(p, r, pair=pair).U
            if norm is not None:
                U = norm.mobius @ U
            curves.append(Curve(key, np.array([complex(column_ratio(U, col))]),
                                {key: complex(column_ratio(U, col))}))
    return curves


# ---------------------------------------------------------------------------
# writers
# ---------------------------------------------------------------------------

def format_complex(z) -> str:
    """``re+imi`` literal using the shortest round-trip digits."""
    z = complex(z)
    return f"{z.real}{z.imag:+}i"


def write_obj(mesh: SurfaceMesh, path, sidecar: bool = True) -> list[Path]:
    """ASCII OBJ (``v``, ``f``, ``l`` records) plus a JSON sidecar of scalars."""
    path = Path(path)
    lines = [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    lines += [f"l {a + 1} {b + 1}" for a, b in mesh.feature_edges]
    path.write_text("".join(line + "\n" for line in lines))
    written = [path]
    if sidecar:
        records = []
        for x, q, s in zip(mesh.domain, mesh.q_abs, mesh.singular):
            records.append({"x": format_complex(x) if np.isfinite(x) else None,
                            "q_abs": float(q) if np.isfinite(q) else None,
                            "singular": bool(s)})
        side = path.with_suffix(".json")
        side.write_text(json.dumps({"vertices": records}, separators=(",", ":")) + "\n")
        written.append(side)
    return written


def read_obj(path):
    """Minimal reader for files written by ``write_obj``: (vertices, faces, lines)."""
    verts, faces, lines = [], [], []
    for raw in Path(path).read_text().splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(v) for v in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(v.split("/")[0]) - 1 for v in parts[1:4]])
        elif parts[0] == "l":
            lines.append([int(v) - 1 for v in parts[1:]])
    return np.array(verts).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3), lines


def write_svg_curves(curves, path, viewport=(-2.0, 2.0, -2.0, 2.0), size: int = 600,
                     clip: float = 1e6) -> Path:
    """SVG 1.1 with one ``path`` element per curve and a text label per marker.

    ``viewport`` is ``(xmin, xmax, ymin, ymax)`` in the complex plane; the
    y axis points up. Points that are not finite or beyond ``clip`` are dropped.
    """
    x0, x1, y0, y1 = map(float, viewport)
    if not (x1 > x0 and y1 > y0):
        raise ParameterError(f"empty viewport {viewport}")
    scale = size / max(x1 - x0, y1 - y0)
    width, height = (x1 - x0) * scale, (y1 - y0) * scale

    def xy(z):
        return f"{(z.real - x0) * scale:.4f} {(y1 - z.imag) * scale:.4f}"

    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.4f}" '
           f'height="{height:.4f}" viewBox="0 0 {width:.4f} {height:.4f}">']
    for curve in curves:
        pts = [complex(z) for z in np.asarray(curve.points).ravel()
               if np.isfinite(z) and abs(z) <= clip]
        if len(pts) >= 2:
            d = "M " + xy(pts[0]) + "".join(" L " + xy(z) for z in pts[1:])
            out.append(f'<path id="{curve.label}" d="{d}" fill="none" stroke="black" stroke-width="1"/>')
        for name, z in sorted(curve.markers.items()):
            z = complex(z)
            if np.isfinite(z) and abs(z) <= clip:
                out.append(f'<circle cx="{(z.real - x0) * scale:.4f}" cy="{(y1 - z.imag) * scale:.4f}" r="2"/>')
                out.append(f'<text x="{(z.real - x0) * scale + 4:.4f}" y="{(y1 - z.imag) * scale - 4:.4f}" '
                           f'font-size="12">{name}</text>')
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path
