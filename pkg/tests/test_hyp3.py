import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatfront import maps
from flatfront.errors import ParameterError, UmbilicError
from flatfront.hgode import HoloLift, column_ratio, lift_at, monodromy, initial_lift, q_at, sl_coefficient
from flatfront.hyp3 import (HPoint, act_on_boundary, act_on_point, ball_chart, caustic_point,
                            chi_boundary, chordal_distance, distance_to_geodesic, front_point,
                            front_sample, gauss_limits, hermitian_to_minkowski, hs_point,
                            induced_metric, induced_metric_det, mink_inner,
                            minkowski_to_hermitian, normal_geodesic, parallel_lift, parallel_q,
                            singular_time, unit_normal)
from flatfront.params import HGParams

DIHEDRAL = HGParams(1 / 6, -1 / 6, 0.5)


def random_lifts(p, rng, n):
    xs = rng.uniform(-0.8, 1.8, n) + 1j * rng.uniform(0.1, 1.2, n)
    return [lift_at(p, x) for x in xs]


def front_in_canonical(U0, x0, t, y_offset, slc):
    """phi_t at the point with canonical coordinate e^t x0 + y_offset."""
    from flatfront.hgode import transport
    x = x0 + y_offset * math.exp(-t)
    U = transport(U0[None], np.array([x0]), np.array([x]), slc)[0]
    return front_point(U, t)


def fd_gram(U0, x0, t, slc, h=1e-4, signed=False):
    """Gram matrix of phi_t in canonical coordinates, 4th-order central differences."""
    def d(direction):
        f = [front_in_canonical(U0, x0, t, k * h * direction, slc) for k in (-2, -1, 1, 2)]
        return (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
    fu, fv = d(1.0), d(1j)
    E, F, G = mink_inner(fu, fu), mink_inner(fu, fv), mink_inner(fv, fv)
    if signed:
        phi = front_point(U0, t)
        nu = unit_normal(parallel_lift(U0, t))
        return np.linalg.det(np.array([phi, fu, fv, nu]))
    return E * G - F * F


# ---------------------------------------------------------------------------
# charts and points
# ---------------------------------------------------------------------------

def test_identity_and_diagonal_lifts():
    assert hs_point(np.eye(2)).minkowski == pytest.approx([1, 0, 0, 0])
    s = 0.8
    U = np.diag([math.exp(s / 2), math.exp(-s / 2)])
    assert hs_point(U).minkowski == pytest.approx([math.cosh(s), 0, 0, math.sinh(s)])
    assert unit_normal(np.eye(2)) == pytest.approx([0, 0, 0, 1])


def test_chart_round_trip(rng):
    for lift in random_lifts(DIHEDRAL, rng, 5):
        P = hs_point(lift)
        assert np.allclose(minkowski_to_hermitian(P.minkowski), P.hermitian)
        assert abs(np.linalg.det(P.hermitian) - 1) < 1e-9
        assert P.minkowski[0] > 0
        assert HPoint.from_minkowski(P.minkowski).ball == pytest.approx(P.ball)


def test_non_unimodular_input_is_rejected():
    with pytest.raises(ParameterError):
        hs_point(2 * np.eye(2))


def test_frame_identities_at_random_lifts(rng):
    for lift in random_lifts(DIHEDRAL, rng, 100):
        phi, nu = hs_point(lift).minkowski, unit_normal(lift)
        assert abs(mink_inner(phi, phi) + 1) < 1e-9
        assert abs(mink_inner(nu, nu) - 1) < 1e-9
        assert abs(mink_inner(phi, nu)) < 1e-9


def test_normal_orientation_under_antidiagonal_gauge():
    U = lift_at(DIHEDRAL, 0.3 + 0.7j).U
    J = np.array([[0, 1], [-1, 0]])
    assert np.allclose(hs_point(U @ J).minkowski, hs_point(U).minkowski)
    assert np.allclose(unit_normal(U @ J), -unit_normal(U))


# ---------------------------------------------------------------------------
# parallel family
# ---------------------------------------------------------------------------

def test_parallel_lift_group_law_and_identity():
    lift = lift_at(DIHEDRAL, 0.3 + 0.7j)
    assert np.array_equal(parallel_lift(lift, 0.0).U, lift.U)
    assert isinstance(parallel_lift(lift, 0.3), HoloLift)
    two = parallel_lift(parallel_lift(lift.U, 0.4), -1.1)
    assert np.allclose(two, parallel_lift(lift.U, -0.7), atol=1e-14)
    assert abs(np.linalg.det(parallel_lift(lift.U, 2.0)) - 1) < 1e-12


def test_matrix_and_hyperboloid_routes_agree(rng):
    for lift in random_lifts(DIHEDRAL, rng, 5):
        phi, nu = hs_point(lift).minkowski, unit_normal(lift)
        for t in (0.7, -1.3, 2.5):
            assert np.max(np.abs(front_point(lift, t) - (math.cosh(t) * phi + math.sinh(t) * nu))) < 1e-10


def test_induced_metric_matches_finite_differences(rng):
    slc = sl_coefficient(DIHEDRAL)
    for _ in range(20):
        x = complex(rng.uniform(-0.8, 1.8), rng.uniform(0.1, 1.2))
        t = rng.uniform(-1.5, 1.5)
        U = lift_at(DIHEDRAL, x).U
        E, F, G = induced_metric(slc, x, t, coords="canonical")
        assert abs(fd_gram(U, x, t, slc) - induced_metric_det(slc, x, t)) < 1e-5
        assert abs(E * G - F * F - induced_metric_det(slc, x, t)) < 1e-12


def test_domain_coordinates_scale_by_e_4t():
    slc = sl_coefficient(DIHEDRAL)
    x, t = 0.4 + 0.6j, 0.8
    E, F, G = induced_metric(slc, x, t)
    assert E * G - F * F == pytest.approx(induced_metric_det(slc, x, t, coords="domain"))
    assert induced_metric_det(slc, x, t, coords="domain") == pytest.approx(
        math.exp(4 * t) * induced_metric_det(slc, x, t))
    with pytest.raises(ParameterError):
        induced_metric_det(slc, x, t, coords="polar")


def test_umbilic_gives_unit_determinant():
    slc = sl_coefficient(HGParams(0.5, 0.5, 0.2))
    root = 0.5 + 1j * math.sqrt(0.11)
    assert induced_metric_det(slc, root, 0.3) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(UmbilicError):
        singular_time(slc, slc.roots()[1])


def point_with_q_abs(slc, target):
    lo, hi = 0.05, 3.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if abs(q_at(slc, 0.5 + 1j * mid)) > target:
            lo = mid
        else:
            hi = mid
    return 0.5 + 1j * lo


def test_singular_time_examples():
    slc = sl_coefficient(DIHEDRAL)
    x1 = point_with_q_abs(slc, 1.0)
    assert abs(singular_time(slc, x1)) < 1e-12
    x2 = point_with_q_abs(slc, math.exp(-1))
    assert singular_time(slc, x2) == pytest.approx(-0.5, abs=1e-12)
    assert abs(parallel_q(slc, x2, singular_time(slc, x2))) == pytest.approx(1.0)


def test_determinant_vanishes_at_singular_time(rng):
    slc = sl_coefficient(DIHEDRAL)
    for _ in range(10):
        x = complex(rng.uniform(-0.8, 1.8), rng.uniform(0.1, 1.2))
        r = singular_time(slc, x)
        assert abs(induced_metric_det(slc, x, r)) < 1e-10
        U = lift_at(DIHEDRAL, x).U
        assert abs(fd_gram(U, x, r, slc)) < 1e-7


def test_minus_log_q_is_not_the_singular_time():
    # with phi_t = U_t U_t*, the front at t = -log|q| is regular unless |q| = 1
    slc = sl_coefficient(DIHEDRAL)
    x = point_with_q_abs(slc, 3.0)
    U = lift_at(DIHEDRAL, x).U
    t = -math.log(abs(q_at(slc, x)))
    assert fd_gram(U, x, t, slc) > 1.0
    assert induced_metric_det(slc, x, t) > 1.0


def test_orientation_flips_across_the_singular_locus(rng):
    slc = sl_coefficient(DIHEDRAL)
    for _ in range(10):
        x = complex(rng.uniform(-0.6, 1.6), rng.uniform(0.15, 1.0))
        r = singular_time(slc, x)
        U = lift_at(DIHEDRAL, x).U
        # along the transversal segment t in [r - 0.2, r + 0.2]
        before = fd_gram(U, x, r - 0.2, slc, signed=True)
        after = fd_gram(U, x, r + 0.2, slc, signed=True)
        assert before * after < 0
        assert induced_metric_det(slc, x, r - 0.2) > 0 and induced_metric_det(slc, x, r + 0.2) > 0


def test_front_sample_flags():
    slc = sl_coefficient(DIHEDRAL)
    x = point_with_q_abs(slc, 2.0)
    lift = lift_at(DIHEDRAL, x)
    s = front_sample(lift, slc, singular_time(slc, x))
    assert s.singular
    assert abs(mink_inner(s.position.minkowski, s.normal)) < 1e-9
    assert not front_sample(lift, slc, 0.0).singular


# ---------------------------------------------------------------------------
# caustic
# ---------------------------------------------------------------------------

def test_caustic_point_is_on_the_family():
    slc = sl_coefficient(DIHEDRAL)
    x = 0.3 + 0.4j
    C = caustic_point(DIHEDRAL, x)
    lift = lift_at(DIHEDRAL, x)
    assert np.allclose(C.minkowski, front_point(lift, singular_time(slc, x)))
    assert abs(mink_inner(C.minkowski, C.minkowski) + 1) < 1e-9


def test_caustic_refuses_umbilics():
    with pytest.raises(UmbilicError):
        caustic_point(HGParams(0.5, 0.5, 0.2), 0.5 + 1j * math.sqrt(0.11))


def test_caustic_section_is_enveloped_by_normal_geodesics(dihedral, dihedral_norm):
    # x = sin^2(pi s / 2) with s uniform spaces the geodesics evenly near 0 and 1,
    # where S behaves like a square root
    s0 = 2 / math.pi * math.asin(math.sqrt(0.02))
    xs = np.sin(0.5 * math.pi * np.linspace(s0, 1 - s0, 399)) ** 2
    U = maps.trace_interval(dihedral, xs, dihedral_norm)
    slc = sl_coefficient(dihedral)
    picks = np.arange(0, 399, 2)                       # 200 geodesics
    A = np.array([hs_point(U[k]).minkowski for k in picks])
    V = np.array([unit_normal(U[k]) for k in picks])
    worst, generic = 0.0, math.inf
    for k in range(1, 398, 2):                         # caustic points between the geodesics
        r = singular_time(slc, xs[k])
        P = front_point(U[k], r)
        worst = max(worst, np.min(distance_to_geodesic(P, A, V)))
        # a non-focal point of the same geodesic, measured against the same neighbours
        Q = front_point(U[k], r + 1.0)
        near = slice((k - 1) // 2, (k + 1) // 2 + 1)
        generic = min(generic, np.min(distance_to_geodesic(Q, A[near], V[near])))
    assert worst < 1e-3
    assert generic > 10 * worst


def test_distance_to_geodesic_basic():
    A = np.array([1.0, 0, 0, 0])
    V = np.array([0, 0, 0, 1.0])
    assert distance_to_geodesic(A, A, V) == pytest.approx(0.0, abs=1e-12)
    s = 0.7
    P = np.array([math.cosh(s), math.sinh(s), 0, 0])
    assert distance_to_geodesic(P, A, V) == pytest.approx(s)


# ---------------------------------------------------------------------------
# ball model and Gauss maps
# ---------------------------------------------------------------------------

def test_chi_examples():
    assert chi_boundary(0) == pytest.approx([0, 0, -1])
    assert chi_boundary(1) == pytest.approx([1, 0, 0])
    assert chi_boundary(1j) == pytest.approx([0, 1, 0])
    assert chi_boundary(complex(math.inf, 0)) == pytest.approx([0, 0, 1])
    z = np.array([0.3 - 2j, -5 + 1e3j])
    assert np.allclose(np.linalg.norm(chi_boundary(z), axis=-1), 1, atol=1e-12)


def test_ball_chart_examples():
    assert ball_chart(np.array([1.0, 0, 0, 0])) == pytest.approx([0, 0, 0])
    g = normal_geodesic(np.eye(2), (-3, 3), 7)
    assert np.allclose(g[:, :2], 0)
    assert np.allclose(g[:, 2], np.tanh(np.linspace(-3, 3, 7) / 2))


def test_normal_geodesic_samples(rng):
    lift = random_lifts(DIHEDRAL, rng, 1)[0]
    g = normal_geodesic(lift, (-20, 20), 41)
    assert np.allclose(g[20], hs_point(lift).ball)
    assert np.all(np.linalg.norm(g, axis=-1) < 1)
    with pytest.raises(ParameterError):
        normal_geodesic(lift, n=1)


def test_gauss_limits_order(rng):
    # t -> +inf ends at chi(S), t -> -inf at chi(DS)
    for lift in random_lifts(DIHEDRAL, rng, 10):
        g = normal_geodesic(lift, (-20, 20), 3)
        S, DS = lift.column_ratio(0), lift.column_ratio(1)
        assert chordal_distance(g[-1], chi_boundary(S)) < 1e-4
        assert chordal_distance(g[0], chi_boundary(DS)) < 1e-4
        plus, minus = gauss_limits(lift)
        assert np.allclose(plus, chi_boundary(S)) and np.allclose(minus, chi_boundary(DS))


def test_gauss_maps_invariant_along_parallel_family(rng):
    for lift in random_lifts(DIHEDRAL, rng, 5):
        ref = normal_geodesic(lift, (-20, 20), 2)
        for t in (-1.0, 0.0, 0.5, 1.5):
            g = normal_geodesic(parallel_lift(lift.U, t), (-20, 20), 2)
            assert np.max(chordal_distance(g, ref)) < 1e-4


def test_monodromy_acts_as_isometry():
    p = HGParams(0.3, 0.1, 0.7)
    base = initial_lift(p)
    L = monodromy(p, loop_around=1, side="left")
    after = L @ base.U
    H_after = after @ np.conj(after.T)
    assert np.allclose(act_on_point(L, hs_point(base).hermitian), H_after, atol=1e-9)
    for k in (0, 1):
        moved = act_on_boundary(L, column_ratio(base.U, k))
        assert abs(moved - column_ratio(after, k)) < 1e-8
    # the Minkowski form is preserved
    X, Y = hs_point(base).minkowski, unit_normal(base)
    X2 = hermitian_to_minkowski(act_on_point(L, minkowski_to_hermitian(X)))
    Y2 = hermitian_to_minkowski(act_on_point(L, minkowski_to_hermitian(Y)))
    assert mink_inner(X2, Y2) == pytest.approx(mink_inner(X, Y), abs=1e-9)
    assert mink_inner(X2, X2) == pytest.approx(-1, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-4, 4))
def test_hyperboloid_and_ball_bounds(a, b, c, d, t):
    U = np.array([[1 + 0j, a + 1j * b], [c + 1j * d, 0]])
    U[1, 1] = (1 + U[0, 1] * U[1, 0]) / U[0, 0]
    X = front_point(U, t)
    assert abs(mink_inner(X, X) + 1) < 1e-9 * X[0] ** 2
    assert np.linalg.norm(ball_chart(X)) < 1
