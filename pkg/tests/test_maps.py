import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatfront import maps
from flatfront.errors import DomainError, ParameterError
from flatfront.hgode import column_ratio, lattice_lifts, lift_at, sl_coefficient
from flatfront.maps import (INF, RootClass, STRegion, SchwarzInverse, composite_formula,
                            composite_from_inverse, composite_map_f, confluence_model,
                            confluence_ramification, derived_schwarz, discriminant,
                            mobius_apply, mobius_from_points, mobius_to_standard, normalize_maps,
                            preimage_count, ramification_report, schwarz,
                            schwarz_value_at_infinity, schwarz_value_at_one, st_region,
                            symmetric_functions, vertex_limit, winding_analysis)
from flatfront.params import HGParams

DOUBLE_C = 1 - math.sqrt(3) / 2


def chordal(z, w):
    z, w = complex(z), complex(w)
    return 2 * abs(z - w) / math.sqrt((1 + abs(z) ** 2) * (1 + abs(w) ** 2))


# ---------------------------------------------------------------------------
# Moebius helpers
# ---------------------------------------------------------------------------

def test_mobius_to_standard_and_back():
    m = mobius_to_standard(0.3 + 1j, -2 + 0j, 5 - 1j)
    assert abs(np.linalg.det(m) - 1) < 1e-12
    assert abs(mobius_apply(m, 0.3 + 1j)) < 1e-14
    assert abs(mobius_apply(m, -2 + 0j) - 1) < 1e-14
    assert abs(mobius_apply(m, 5 - 1j)) > 1e12
    g = mobius_from_points((0, 1, INF), (1, 1j, -1))
    assert abs(mobius_apply(g, INF) + 1) < 1e-14
    assert abs(mobius_apply(g, 1) - 1j) < 1e-14


# ---------------------------------------------------------------------------
# connection values
# ---------------------------------------------------------------------------

def mp_value_at_one(a, b, c):
    g = mpmath.gamma
    return complex(g(2 - c) * g(a) * g(b) / (g(c) * g(a - c + 1) * g(b - c + 1)))


@pytest.mark.parametrize("abc", [(0.5, 0.5, 0.2), (0.4, 0.3, 0.5), (0.35, 0.45, 0.6)])
def test_value_at_one_closed_form(abc):
    p = HGParams(*abc)
    assert abs(schwarz_value_at_one(p) - mp_value_at_one(*abc)) < 1e-12 * abs(mp_value_at_one(*abc))
    cont = vertex_limit(p, 1, 1 - 1e-4)
    assert abs(cont - schwarz_value_at_one(p)) < 1e-4 * abs(schwarz_value_at_one(p))


def test_value_at_one_when_c_exceeds_a_plus_b():
    # the other Gamma-function branch, checked against the connection solve
    p = HGParams(0.2, 0.3, 0.9)
    assert abs(vertex_limit(p, 1) - schwarz_value_at_one(p)) < 1e-8


@pytest.mark.parametrize("abc", [(0.3, 0.1, 0.7), (1 / 6, -1 / 6, 0.5), (0.2, 0.45, 1.3)])
def test_value_at_infinity_against_connection_solve(abc):
    p = HGParams(*abc)
    exact = schwarz_value_at_infinity(p)
    assert abs(vertex_limit(p, INF) - exact) < 1e-8 * max(1, abs(exact))


def test_value_at_infinity_pole():
    assert schwarz_value_at_infinity(HGParams(0.5, 0.5, 0.5)) == INF


def test_value_at_one_degenerate():
    with pytest.raises(DomainError):
        schwarz_value_at_one(HGParams(0.25, 0.25, 0.5))


def test_vertex_limit_rejects_other_points():
    with pytest.raises(ParameterError):
        vertex_limit(HGParams(0.3, 0.1, 0.7), 0)


# ---------------------------------------------------------------------------
# normalized maps
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("abc", [(0.5, 0.5, 0.2), (0.3, 0.1, 0.7), (1 / 6, -1 / 6, 0.5)])
def test_normalizer_fixes_vertices(abc):
    p = HGParams(*abc)
    n = normalize_maps(p)
    assert abs(n(0)) < 1e-15
    assert abs(n(n.S_T_1) - 1) < 1e-13
    assert abs(n(n.S_T_inf)) > 1e12


def test_normalized_values_near_vertices():
    # S - S(vertex) ~ const * dist^|mu| near 0 and 1
    p = HGParams(0.3, 0.1, 0.7)
    n = normalize_maps(p)
    for vertex, target, mu in ((0, 0, p.mu0), (1, 1, p.mu1)):
        d = [abs(schwarz(p, vertex + eps * 1j, norm=n) - target) for eps in (1e-4, 1e-6)]
        assert abs(math.log(d[1] / d[0]) / math.log(1e-2) - abs(mu)) < 0.05
    far = [abs(schwarz(p, r * (-1 + 0.1j), norm=n)) for r in (1e4, 1e6)]
    assert abs(math.log(far[1] / far[0]) / math.log(1e2) - abs(p.muinf)) < 0.05


@pytest.mark.parametrize("abc", [(0.3, 0.1, 0.7), (0.2, 0.45, 1.3)])
def test_normalized_map_is_symmetric_in_a_and_b(abc):
    p = HGParams(*abc)
    q = p.swapped()
    for x in (0.3 + 0.6j, 1.7 + 0.2j, -0.8 + 0.9j):
        s1 = schwarz(p, x, norm=normalize_maps(p))
        s2 = schwarz(q, x, norm=normalize_maps(q))
        assert abs(s1 - s2) < 1e-9 * max(1, abs(s1))


def test_schwarz_real_on_unit_interval():
    p = HGParams(0.3, 0.1, 0.7)
    S, DS = maps.interval_images(p, np.linspace(0.05, 0.95, 19))
    assert np.max(np.abs(S.imag)) < 1e-12 * np.max(np.abs(S))
    assert np.max(np.abs(DS.imag)) < 1e-12 * np.max(np.abs(DS))


def test_schwarz_injective_on_upper_grid():
    p = HGParams(1 / 6, -1 / 6, 0.5)
    xs = np.linspace(-1.5, 2.5, 20)
    ys = np.linspace(0.05, 2.0, 20)
    U, valid = lattice_lifts(p, xs, ys)
    S = column_ratio(U[valid], 0)
    d = np.abs(S[:, None] - S[None, :]) + np.eye(len(S))
    assert valid.all()
    assert d.min() > 1e-9


def test_boundary_values_agree_from_both_sides():
    # S is real on (0, 1), so the values just above and below are conjugate
    p = HGParams(0.3, 0.1, 0.7)
    for x in (0.25, 0.5, 0.8):
        up = schwarz(p, x + 1e-6j)
        down = np.conj(schwarz(p, x + 1e-6j))
        assert abs(up - down) < 1e-5


def test_derived_schwarz_agrees_with_schwarz_at_punctures():
    # both maps tend to the vertex value at the rate dist^|mu|, along rays
    p = HGParams(0.3, 0.1, 0.7)
    n = normalize_maps(p)
    for vertex, target, mu, ray in ((0, 0, p.mu0, math.pi / 3), (1, 1, p.mu1, 2 * math.pi / 3)):
        gaps = []
        for eps in (1e-3, 1e-4):
            x = vertex + eps * cmath.exp(1j * ray)
            s, ds = schwarz(p, x, norm=n), derived_schwarz(p, x, norm=n)
            assert abs(ds - target) < 4 * eps ** abs(mu)
            gaps.append(abs(ds - s))
        assert abs(math.log(gaps[1] / gaps[0]) / math.log(1e-1) - abs(mu)) < 0.05


# ---------------------------------------------------------------------------
# ramification
# ---------------------------------------------------------------------------

def test_discriminant_for_half_half_c():
    for c in np.linspace(0.02, 0.98, 50):
        assert abs(discriminant(HGParams(0.5, 0.5, c)) - (4 * (1 - c) ** 2 - 3)) < 1e-12


def test_discriminant_identity_on_random_mus(rng):
    for mus in rng.uniform(-1, 1, (1000, 3)):
        p = HGParams.from_mu(*mus)
        s, t = symmetric_functions(p)
        assert abs(discriminant(p) - ((s + 1) ** 2 - 4 * (t + 1))) < 1e-12
        assert abs(discriminant(p) - sl_coefficient(p).discriminant) < 1e-12


def test_numerator_for_random_c(rng):
    for c in rng.uniform(0.01, 0.99, 20):
        n = sl_coefficient(HGParams(0.5, 0.5, c)).numerator
        assert n == pytest.approx((1.0, -1.0, 2 * c - c * c), abs=1e-14)


def test_report_complex_pair():
    rep = ramification_report(HGParams(0.5, 0.5, 0.2))
    assert rep.klass is RootClass.COMPLEX_PAIR
    assert rep.root_orders == (2, 2)
    roots = sorted(rep.roots, key=lambda z: z.imag)
    assert abs(roots[1] - (0.5 + 1j * math.sqrt(0.11))) < 1e-12
    assert abs(roots[0] - (0.5 - 1j * math.sqrt(0.11))) < 1e-12


def test_report_real_pair():
    rep = ramification_report(HGParams(0.5, 0.5, 0.05))
    assert rep.klass is RootClass.REAL_PAIR
    y, z = sorted(r.real for r in rep.roots)
    assert abs(y - (0.5 - math.sqrt(0.1525))) < 1e-12
    assert abs(z - (0.5 + math.sqrt(0.1525))) < 1e-12
    assert y == pytest.approx(0.1095, abs=1e-4)


def test_report_double_root():
    rep = ramification_report(HGParams(0.5, 0.5, DOUBLE_C))
    assert rep.klass is RootClass.DOUBLE
    assert rep.root_orders == (3,)
    assert len(rep.roots) == 1 and abs(rep.roots[0] - 0.5) < 1e-7


@pytest.mark.parametrize("st_pair,region", [
    ((1.5, 9 / 16), STRegion.D_ZERO),
    ((0.0, 0.0), STRegion.D_NEGATIVE),
    ((5 / 3, 25 / 27 + 0.01), STRegion.OUTSIDE),
    ((3.2, 1.0), STRegion.OUTSIDE),
    ((2.5, 2.03), STRegion.D_POSITIVE),
    ((1.5, 0.4), STRegion.OUTSIDE),
])
def test_st_region(st_pair, region):
    assert st_region(*st_pair) is region


def test_admissible_mus_land_inside_the_st_domain(rng):
    for mus in rng.uniform(-1, 1, (500, 3)):
        s, t = symmetric_functions(HGParams.from_mu(*mus))
        assert st_region(s, t) is not STRegion.OUTSIDE


def angle_steps(p, alpha, index, eps=1e-3):
    """Differences of arg(DS(alpha + eps e^{i theta}) - DS(alpha)) for theta = 0, pi/4, pi/2."""
    center = derived_schwarz(p, alpha)
    args = [cmath.phase(derived_schwarz(p, alpha + eps * cmath.exp(1j * th)) - center)
            for th in (0.0, math.pi / 4, math.pi / 2)]
    steps = np.angle(np.exp(1j * np.diff(args)))
    return steps - index * math.pi / 4


def test_angle_doubling_at_simple_root():
    p = HGParams(0.5, 0.5, 0.2)
    alpha = 0.5 + 1j * math.sqrt(0.11)
    assert np.max(np.abs(angle_steps(p, alpha, 2))) < 1e-2
    # S itself is conformal there
    s0 = schwarz(p, alpha)
    args = [cmath.phase(schwarz(p, alpha + 1e-3 * cmath.exp(1j * th)) - s0)
            for th in (0.0, math.pi / 4)]
    assert abs(np.angle(np.exp(1j * (args[1] - args[0]))) - math.pi / 4) < 1e-2


def test_angle_tripling_at_double_root():
    p = HGParams(0.5, 0.5, DOUBLE_C)
    assert np.max(np.abs(angle_steps(p, 0.5 + 1e-9j, 3))) < 2e-2


# ---------------------------------------------------------------------------
# composite map
# ---------------------------------------------------------------------------

def test_composite_formula_synthetic_square():
    for z in (0.3 + 0.2j, -1.1 + 0.5j, 2.0 - 0.7j):
        f = composite_from_inverse(lambda w: w * w, z)
        assert abs(f - 3 * z) < 1e-12
        assert abs(composite_from_inverse(lambda w: w * w, -z) + f) < 1e-12
    assert composite_formula(1.0, 2.0, 2.0) == 3.0


def test_composite_formula_translation_covariance():
    # periodic x(z) = exp(2 pi i z) is invariant under g: z -> z + 1
    def x_of_z(w):
        return cmath.exp(2j * math.pi * w) + 0.3 * cmath.exp(4j * math.pi * w)

    for z in (0.1 + 0.4j, 0.37 + 0.25j):
        f = composite_from_inverse(x_of_z, z, radius=0.05)
        fg = composite_from_inverse(lambda w: x_of_z(w - 1), z + 1, radius=0.05)
        assert abs(fg - (f + 1)) < 1e-8


@pytest.fixture(scope="module")
def dihedral_inverse():
    p = HGParams(1 / 6, -1 / 6, 0.5)
    n = normalize_maps(p)
    return p, n, SchwarzInverse(p, n)


def test_composite_map_equals_derived_schwarz(dihedral_inverse):
    p, n, inv = dihedral_inverse
    rng = np.random.default_rng(3)
    xs = rng.uniform(-0.8, 1.8, 10) + 1j * rng.uniform(0.1, 1.2, 10)
    for x in xs:
        U = n.lift(lift_at(p, x).U)
        f = composite_map_f(p, column_ratio(U, 0), n, inv)
        assert abs(f - column_ratio(U, 1)) < 1e-6 * max(1, abs(column_ratio(U, 1)))


def test_inverse_rejects_points_outside_triangle(dihedral_inverse):
    p, n, inv = dihedral_inverse
    # the lower half plane of x maps to the mirror triangle
    z = schwarz(p, 0.5 - 0.5j, norm=n)
    with pytest.raises(DomainError):
        inv(z)


# ---------------------------------------------------------------------------
# confluence model
# ---------------------------------------------------------------------------

def test_confluence_examples():
    assert confluence_model(0.0, 1.0) == pytest.approx(-1 / 3)
    assert confluence_ramification(0.25) == pytest.approx((-0.5j, 0.5j))
    assert confluence_ramification(-0.25) == pytest.approx((-0.5, 0.5))
    assert confluence_ramification(0.0) == (0j, 0j)


def exact_count(t, w):
    roots = np.roots([-1 / 3, 0.0, -t, -w])
    return int(np.sum((roots.imag > 1e-12) & (np.abs(roots) < 1)))


@pytest.mark.parametrize("t", [0.25, -0.25])
def test_preimage_counts_match_cubic_roots(t):
    for w in (-0.05j, -0.3j, 0.2 - 0.05j, -0.1 - 0.02j, 0.05j):
        assert preimage_count(t, w) == exact_count(t, w)


def test_lower_half_plane_covered_twice_off_the_strip():
    t = -0.25
    # points of the lower half plane outside the strip |Re w| < 1/12
    hits = [preimage_count(t, w) for w in (0.2 - 0.05j, -0.2 - 0.05j)]
    assert hits == [exact_count(t, 0.2 - 0.05j), exact_count(t, -0.2 - 0.05j)]
    assert max(hits) >= 1


def test_preimage_count_on_boundary_image():
    with pytest.raises(DomainError):
        preimage_count(0.25, confluence_model(0.25, 0.5))


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.5, 0.5), st.floats(-0.6, 0.6), st.floats(-0.6, 0.6))
def test_argument_principle_matches_roots(t, wr, wi):
    w = complex(wr, wi)
    roots = np.roots([-1 / 3, 0.0, -t, -w])
    if np.min(np.abs(roots.imag)) < 1e-3 or np.min(np.abs(np.abs(roots) - 1)) < 1e-3:
        return
    assert preimage_count(t, w) == exact_count(t, w)


# ---------------------------------------------------------------------------
# winding
# ---------------------------------------------------------------------------

def test_winding_one_extra_turn_for_negative_discriminant():
    rec = winding_analysis(HGParams(0.5, 0.5, 0.5), 2000)
    assert abs(rec.progression - (rec.arc_angle + 2 * math.pi)) < 0.05
    assert rec.turning_points == []


def test_winding_turning_points_for_positive_discriminant():
    rec = winding_analysis(HGParams(0.5, 0.5, 0.05), 2000)
    assert len(rec.turning_points) == 2
    expected = (0.5 - math.sqrt(0.1525), 0.5 + math.sqrt(0.1525))
    for got, want in zip(sorted(rec.turning_points), expected):
        assert abs(got - want) < 1e-3


def test_winding_dihedral_itinerary():
    p = HGParams(1 / 6, -1 / 6, 0.5)
    rec = winding_analysis(p, 1000, normalize_maps(p, ((1 + 0j), cmath.exp(1j * math.pi / 3), 0j)))
    # S covers the arc from 1 to e^{i pi/3} and DS goes once more around the circle
    assert abs(rec.arc_angle - math.pi / 3) < 1e-6
    assert abs(rec.extra_turns - 1) < 1e-3
    assert np.max(np.abs(np.abs(rec.DS) - 1)) < 1e-9


def test_derived_image_of_outer_intervals_stays_on_schwarz_sides():
    p = HGParams(0.3, 0.1, 0.7)
    n = normalize_maps(p)
    for interval in (np.linspace(-3, -0.05, 12), np.linspace(1.05, 4, 12)):
        xs = interval + 1e-7j
        S = np.array([schwarz(p, x, norm=n) for x in xs])
        DS = np.array([derived_schwarz(p, x, norm=n) for x in xs])
        fit = maps._circle_through(S[0], S[len(S) // 2], S[-1])
        for z in np.concatenate([S, DS]):
            if fit is None:
                a, b = S[0], S[-1]
                dist = abs(((z - a) * np.conj(b - a)).imag) / abs(b - a)
                assert dist < 1e-3 * max(1, abs(z))
            else:
                center, radius = fit
                assert abs(abs(z - center) - radius) < 1e-3 * max(1, radius)


def test_lifts_along_matches_lift_at():
    p = HGParams(0.3, 0.1, 0.7)
    pts = [0.2 + 0.3j, 0.4 + 0.3j, 0.6 + 0.4j]
    U = maps.lifts_along(p, pts)
    for k, x in enumerate(pts):
        assert np.max(np.abs(U[k] - lift_at(p, x).U)) < 1e-8


def test_mixed_pair_vertex_values_for_lambda_case():
    p = HGParams(0.5, 0.5, 1.0)
    n = normalize_maps(p, pair="mixed")
    assert n.S_T_0 == INF and n.S_T_1 == 0 and n.S_T_inf == -1j
    with pytest.raises(DomainError):
        normalize_maps(HGParams(0.4, 0.5, 1.0), pair="mixed")
    x = -200 + 50j
    z = lift_at(p, x, pair="mixed").column_ratio(0)
    ref = complex(mpmath.hyp2f1(0.5, 0.5, 1, 1 - x) / mpmath.hyp2f1(0.5, 0.5, 1, x))
    assert abs(z - ref) < 1e-8
    # the ratio tends to -i at infinity, with a 1/log|x| correction
    far = [abs(complex(mpmath.hyp2f1(0.5, 0.5, 1, 1 - w) / mpmath.hyp2f1(0.5, 0.5, 1, w)) + 1j)
           for w in (mpmath.mpc(-1e5, 2e4), mpmath.mpc(-1e15, 2e14), mpmath.mpc(-1e40, 2e39))]
    assert far[0] > far[1] > far[2] and far[2] < 0.05
