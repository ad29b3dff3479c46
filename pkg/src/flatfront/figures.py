"""Figure data: SVG curves, OBJ meshes and JSON marker tables.

Every builder writes into ``out`` and returns the list of written paths.
Output is a pure function of the arguments, so manifests are stable.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import hyp3, maps, mesh
from .errors import ParameterError
from .hgode import q_at, sl_coefficient
from .params import HGParams

FIGURES = ("illst1", "illst2", "DS.conf1", "DS.conf2", "dihed1", "dihed2", "dihed3", "dihed4", "lam2")
DIHEDRAL = (1 / 6, -1 / 6, 1 / 2)
DIHEDRAL_TARGETS = (1 + 0j, cmath.exp(1j * math.pi / 3), 0j)
DEFAULT_T = (-2.0, -1.0, -0.3, 0.3, 1.0, 2.0)


def worker_count() -> int:
    """Worker cap from FLATFRONT_THREADS (default: CPU count)."""
    raw = os.environ.get("FLATFRONT_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ParameterError(f"FLATFRONT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ParameterError(f"FLATFRONT_THREADS must be a positive integer, got {raw!r}")
    return n


def parallel_map(func, items):
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out, paths) -> Path:
    out = Path(out)
    files = [{"path": Path(p).relative_to(out).as_posix(), "sha256": sha256_file(p)}
             for p in sorted(paths, key=lambda p: Path(p).as_posix())]
    target = out / "manifest.json"
    target.write_text(json.dumps({"files": files}, indent=2) + "\n")
    return target


def _tag(x: float) -> str:
    return f"{x:+.2f}".replace("+", "p").replace("-", "m")


def _viewport(curves, pad=0.15, limit=4.0):
    pts = [complex(z) for c in curves for z in list(c.points) + list(c.markers.values())
           if np.isfinite(z) and abs(z) < limit]
    if not pts:
        return (-1.0, 2.0, -1.5, 1.5)
    xs = [z.real for z in pts]
    ys = [z.imag for z in pts]
    w = max(max(xs) - min(xs), max(ys) - min(ys), 1e-3)
    return (min(xs) - pad * w, max(xs) + pad * w, min(ys) - pad * w, max(ys) + pad * w)


def _marker_table(curves):
    table = {}
    for c in curves:
        for k, v in c.markers.items():
            table[k] = mesh.format_complex(v)
    return dict(sorted(table.items()))


# ---------------------------------------------------------------------------
# illustrations for (1/2, 1/2, c)
# ---------------------------------------------------------------------------

def illustration(out, c_values, samples: int = 400):
    out = Path(out)
    written = []
    grid = mesh.build_grid(resolution=(2, 2))  # only the marked bottom edge is used

    def one(c):
        p = HGParams(0.5, 0.5, c)
        norm = maps.normalize_maps(p)
        files = []
        for which in ("S", "DS"):
            curves = mesh.boundary_curves(p, grid, which, norm, samples=samples)
            stem = f"c{c:.2f}_{which}"
            files.append(mesh.write_svg_curves(curves, out / f"{stem}.svg", _viewport(curves)))
            side = out / f"{stem}.json"
            side.write_text(json.dumps({"params": [0.5, 0.5, c], "map": which,
                                        "markers": _marker_table(curves)}, indent=2) + "\n")
            files.append(side)
        return files

    for files in parallel_map(one, c_values):
        written += files
    return written


# ---------------------------------------------------------------------------
# confluence model
# ---------------------------------------------------------------------------

def confluence_markers(t: float) -> dict:
    """Marked points of the hemi-disc for the model map.

    ``E`` and ``C`` are where the preimage of the real axis leaves the
    hemi-disc through the arc (left and right); ``H`` (and ``K``) are the
    ramification points in the closed upper half plane.
    """
    marks = {"O": 0j, "L": -1 + 0j, "R": 1 + 0j, "T": 1j}
    # u^2 - v^2/3 + t = 0 meets u^2 + v^2 = 1 at u^2 = (1 - 3t)/4
    u2 = (1 - 3 * t) / 4
    if 0 <= u2 <= 1:
        u = math.sqrt(u2)
        v = math.sqrt(1 - u2)
        marks["E"] = complex(-u, v)
        marks["C"] = complex(u, v)
    ram = [r for r in maps.confluence_ramification(t) if r.imag >= 0]
    if t > 0:
        marks["H"] = ram[0]
    elif t < 0:
        marks["H"], marks["K"] = sorted(ram, key=lambda z: z.real)
    else:
        marks["H"] = 0j
    return marks


def real_preimage_curves(t: float, n: int = 200):
    """Branches of ``u^2 - v^2/3 + t = 0`` inside the upper unit hemi-disc."""
    curves = []
    if t > 0:
        u2_end = (1 - 3 * t) / 4
        if u2_end > 0:
            u = np.linspace(-math.sqrt(u2_end), math.sqrt(u2_end), n)
            curves.append(u + 1j * np.sqrt(3 * (u * u + t)))
    else:
        v_end = math.sqrt(3 * (1 + t) / 4) if t > -1 else 0.0
        v = np.linspace(0.0, v_end, n)
        for sign in (-1, 1):
            curves.append(sign * np.sqrt(-t + v * v / 3) + 1j * v)
    return curves


def confluence(out, t: float, name: str, n: int = 400):
    out = Path(out)
    boundary = maps.hemidisc_boundary(n)
    marks = confluence_markers(t)
    pre = real_preimage_curves(t)
    left = [mesh.Curve("boundary", boundary, marks)]
    left += [mesh.Curve(f"preimage{k}", c) for k, c in enumerate(pre)]
    image_marks = {k: complex(maps.confluence_model(t, z)) for k, z in marks.items()}
    right = [mesh.Curve("boundary", maps.confluence_model(t, boundary), image_marks)]
    right += [mesh.Curve(f"preimage{k}", maps.confluence_model(t, c)) for k, c in enumerate(pre)]
    files = [mesh.write_svg_curves(left, out / f"{name}_domain.svg", (-1.2, 1.2, -0.2, 1.2)),
             mesh.write_svg_curves(right, out / f"{name}_image.svg", _viewport(right))]
    side = out / f"{name}_markers.json"
    side.write_text(json.dumps({"t": t,
                                "domain": {k: mesh.format_complex(v) for k, v in sorted(marks.items())},
                                "image": {k: mesh.format_complex(v) for k, v in sorted(image_marks.items())}},
                               indent=2) + "\n")
    return files + [side]


# ---------------------------------------------------------------------------
# dihedral case
# ---------------------------------------------------------------------------

def dihedral_setup(resolution=mesh.DEFAULT_RESOLUTION, params=DIHEDRAL):
    p = HGParams(*params)
    norm = maps.normalize_maps(p, DIHEDRAL_TARGETS)
    grid = mesh.build_grid(resolution=resolution)
    return p, norm, grid, mesh.grid_lifts(p, grid, norm)


def dihedral_images(out, resolution=mesh.DEFAULT_RESOLUTION):
    out = Path(out)
    p, norm, grid, U = dihedral_setup(resolution)
    files = []
    files += mesh.write_obj(mesh.sphere_mesh(p, grid, "S", norm, U), out / "chi_S.obj")
    files += mesh.write_obj(mesh.front_mesh(p, grid, 0.0, norm, U), out / "HS.obj")
    files += mesh.write_obj(mesh.sphere_mesh(p, grid, "DS", norm, U, half=True), out / "chi_DS_half.obj")
    return files


def parallel_family(out, t_values=DEFAULT_T, resolution=mesh.DEFAULT_RESOLUTION):
    out = Path(out)
    p, norm, grid, U = dihedral_setup(resolution)

    def one(t):
        return mesh.write_obj(mesh.front_mesh(p, grid, t, norm, U), out / f"front_t{_tag(t)}.obj")

    files = []
    for f in parallel_map(one, t_values):
        files += f
    return files


def equatorial_section(p, norm, n_geodesics: int = 60, n_points: int = 400, t_values=DEFAULT_T):
    """Section of the parallel family by the plane x3 = 0 of the ball.

    For the dihedral normalization both S and DS map (0, 1) into the unit
    circle, so the normal geodesics over (0, 1) lie in the equatorial disc.
    Returns ``(geodesics, fronts, caustic)`` as complex polylines ``x1 + i x2``.
    """
    xs = np.linspace(0.0, 1.0, n_points + 2)[1:-1]
    U = maps.trace_interval(p, xs, norm)
    slc = sl_coefficient(p)

    def planar(b):
        return b[..., 0] + 1j * b[..., 1]

    picks = np.linspace(0, len(xs) - 1, n_geodesics).round().astype(int)
    geodesics = [planar(hyp3.normal_geodesic(U[k], (-12.0, 12.0), 241)) for k in picks]
    fronts = {t: planar(mesh._front_ball(U, t)) for t in t_values}
    r = 0.5 * np.log(np.abs(q_at(slc, xs)))
    caustic = np.array([planar(mesh._front_ball(U[k], r[k])) for k in range(len(xs))])
    return geodesics, fronts, caustic, xs


def dihedral_section(out, n_geodesics: int = 60):
    out = Path(out)
    p = HGParams(*DIHEDRAL)
    norm = maps.normalize_maps(p, DIHEDRAL_TARGETS)
    geodesics, fronts, caustic, _ = equatorial_section(p, norm, n_geodesics)
    circle = np.exp(2j * np.pi * np.linspace(0, 1, 361))
    chi = lambda z: complex(*hyp3.chi_boundary(z)[:2])  # noqa: E731
    marks = {"X": chi(norm(norm.S_T_0)), "Y": chi(norm(norm.S_T_1))}
    curves = [mesh.Curve("circle", circle, marks)]
    curves += [mesh.Curve(f"geodesic{k}", g) for k, g in enumerate(geodesics)]
    curves += [mesh.Curve(f"front_t{_tag(t)}", f) for t, f in fronts.items()]
    curves.append(mesh.Curve("caustic", caustic))
    files = [mesh.write_svg_curves(curves, out / "section.svg", (-1.05, 1.05, -1.05, 1.05))]
    zoom = _viewport([mesh.Curve("caustic", caustic)], pad=0.3)
    files.append(mesh.write_svg_curves(curves, out / "section_zoom.svg", zoom))
    return files


def caustic_mesh(p, grid, norm, U) -> mesh.SurfaceMesh:
    """Caustic surface over the grid; faces touching near-umbilic vertices are dropped."""
    slc = sl_coefficient(p)
    qa = np.abs(q_at(slc, grid.vertices))
    ok = qa > hyp3.UMBILIC_TOL
    r = np.where(ok, 0.5 * np.log(np.where(ok, qa, 1.0)), 0.0)
    w = np.stack([np.exp(r / 2), np.exp(-r / 2)], axis=-1)[:, None, :]
    Ut = U * w
    H = Ut @ np.conj(np.swapaxes(Ut, -1, -2))
    verts = hyp3.ball_chart(hyp3.hermitian_to_minkowski(H))
    faces = grid.faces[np.all(ok[grid.faces], axis=1)]
    return mesh.SurfaceMesh(verts, faces, grid.vertices, qa, ok)


def dihedral_caustic(out, resolution=mesh.DEFAULT_RESOLUTION):
    out = Path(out)
    p, norm, grid, U = dihedral_setup(resolution)
    return mesh.write_obj(caustic_mesh(p, grid, norm, U), out / "caustic.obj")


# ---------------------------------------------------------------------------
# c = 1
# ---------------------------------------------------------------------------

def lambda_images(out, resolution=mesh.DEFAULT_RESOLUTION):
    out = Path(out)
    p = HGParams(0.5, 0.5, 1.0)
    norm = maps.normalize_maps(p, pair="mixed")
    grid = mesh.build_grid(resolution=resolution)
    U = mesh.grid_lifts(p, grid, norm, pair="mixed")
    files = []
    files += mesh.write_obj(mesh.sphere_mesh(p, grid, "S", norm, U), out / "chi_S.obj")
    files += mesh.write_obj(mesh.sphere_mesh(p, grid, "DS", norm, U), out / "chi_DS.obj")
    return files


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def build_figure(fig_id: str, out, c_values=None, t_values=None, resolution=None) -> list[Path]:
    """Write the data of figure ``fig_id`` into ``out/fig_id`` plus a manifest."""
    if fig_id not in FIGURES:
        raise ParameterError(f"unknown figure {fig_id!r}; choose from {', '.join(FIGURES)}")
    res = tuple(resolution) if resolution else mesh.DEFAULT_RESOLUTION
    target = Path(out) / fig_id
    target.mkdir(parents=True, exist_ok=True)
    if fig_id == "illst1":
        files = illustration(target, c_values or (0.9, 0.5, 0.2))
    elif fig_id == "illst2":
        files = illustration(target, c_values or (0.05,))
    elif fig_id == "DS.conf1":
        files = confluence(target, 0.25, "conf1")
    elif fig_id == "DS.conf2":
        files = confluence(target, -0.25, "conf2")
    elif fig_id == "dihed1":
        files = dihedral_images(target, res)
    elif fig_id == "dihed2":
        files = parallel_family(target, t_values or DEFAULT_T, res)
    elif fig_id == "dihed3":
        files = dihedral_section(target)
    elif fig_id == "dihed4":
        files = dihedral_caustic(target, res)
    else:
        files = lambda_images(target, res)
    return [*files, write_manifest(target, files)]
