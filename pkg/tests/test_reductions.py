from __future__ import annotations

import math

import numpy as np
import pytest

from helpers import PARAM_PAIRS, random_admissible
from sisfronts.errors import SigmaNotZero, SpeedBelowBound
from sisfronts.kernels import pack_case1_flow
from sisfronts.model import Regime, equilibria, make_params
from sisfronts.phasespace import field_eigenvalues, numerical_jacobian
from sisfronts import reductions as red
from sisfronts.reductions import Manifold


# ---- case 1 -----------------------------------------------------------------

def test_case1_flow_zeros_at_equilibria():
    p = make_params(2, 1, 0, c=1, regime="case1")
    assert red.case1_reduced_flow(0.0, p) == 0.0
    assert red.case1_reduced_flow(p.infected_endemic, p) == pytest.approx(0.0, abs=1e-15)
    # for these parameters the endemic state sits exactly at I = 1/2
    assert red.case1_reduced_flow(0.5, p) == pytest.approx(0.0, abs=1e-15)


def test_case1_flow_sign_structure(rng):
    # negative between the equilibria (driving endemic -> disease-free),
    # positive beyond; exactly one interior sign change on a fine grid
    for _ in range(20):
        p = random_admissible(rng, regime="case1")
        ia = p.infected_endemic
        inside = np.linspace(1e-4, ia - 1e-4, 200)
        assert all(red.case1_reduced_flow(i, p) < 0 for i in inside)
        grid = np.linspace(1e-6, 1.0 - 1e-6, 10_000)
        vals = np.array([red.case1_reduced_flow(i, p) for i in grid])
        sign_changes = np.sum(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
        assert sign_changes == 1


def test_case1_manifold_point_frozen():
    p = make_params(2, 1, 0, c=1, regime="case1")
    assert red.case1_manifold_point(0.0, p) == pytest.approx([1.0, 0.0, 0.0])
    assert red.case1_manifold_point(1.0, p) == pytest.approx([0.0, 1.0, 1.0])  # V = gamma/c
    assert red.case1_manifold_point(0.5, p) == pytest.approx([0.5, 0.5, 0.0])


def test_case1_manifold_point_satisfies_relations(rng):
    for _ in range(10):
        p = random_admissible(rng, regime="case1")
        for i in np.linspace(0, 1, 41):
            point = red.case1_manifold_point(i, p)
            assert red.manifold_residual(Manifold.CASE1_CRITICAL, point, p) < 1e-12


def test_case1_fast_rhs_eps_zero():
    p = make_params(2, 1, 0, c=1, alpha=1, regime="case1")
    # the critical manifold is the equilibrium set of the eps = 0 fiber flow
    for i in np.linspace(0, 1, 11):
        out = red.case1_fast_rhs(red.case1_manifold_point(i, p), p, eps=0.0)
        assert np.max(np.abs(out)) < 1e-14
    out = red.case1_fast_rhs([0.6, 0.5, 0.0], p, eps=0.0)
    assert out == pytest.approx([-0.1, 0.0, -0.1], abs=1e-15)


def test_case1_fast_rhs_equilibrium_for_positive_eps():
    p = make_params(2, 1, 0, c=1, regime="case1")
    _, free = equilibria(p)
    out = red.case1_fast_rhs(free.reduced3, p, eps=0.01)
    assert np.max(np.abs(out)) < 1e-15


# ---- case 2 -----------------------------------------------------------------

def test_case2_reduced_frozen_values():
    p = make_params(2, 1, 0, c=1, regime="case2")
    endemic, free = equilibria(p)
    assert red.case2_reduced_rhs(*free.si_plane, p) == (0.0, 0.0)
    assert red.case2_reduced_rhs(*endemic.si_plane, p) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert red.case2_reduced_rhs(0.5, 0.25, p) == pytest.approx((0.25, 0.0), abs=1e-15)
    assert red.case2_reduced_rhs(0.75, 0.25, p) == pytest.approx((0.0, -0.125), abs=1e-15)


def test_case2_eigs_disease_free_frozen():
    assert red.case2_eigs_disease_free(make_params(2, 0.5, 0.5, c=1)) == pytest.approx(
        (-1.25 / 1.5, -1.0)
    )
    assert red.case2_eigs_disease_free(make_params(2, 1, 0, c=2)) == pytest.approx(
        (-0.5, -2.0)
    )


def test_case2_eigs_endemic_frozen():
    lam1, lam2 = red.case2_eigs_endemic(make_params(2, 0.5, 0.5, c=1))
    assert lam1 == pytest.approx((-1 + math.sqrt(5.375)) / 2, rel=1e-12)
    assert lam2 == pytest.approx((-1 - math.sqrt(5.375)) / 2, rel=1e-12)
    lam1, lam2 = red.case2_eigs_endemic(make_params(2, 1, 0, c=1))
    assert lam1 == pytest.approx((-1 + math.sqrt(5)) / 2, rel=1e-12)
    assert lam2 == pytest.approx((-1 - math.sqrt(5)) / 2, rel=1e-12)


def test_case2_eigs_match_numerical_jacobian(rng):
    for _ in range(20):
        p = random_admissible(rng, regime="case2")
        vf = red.planar_reduction_field(p)
        endemic, free = equilibria(p)
        closed_a = np.sort(red.case2_eigs_endemic(p))
        num_a = np.sort(field_eigenvalues(vf, endemic.si_plane).real)
        assert np.max(np.abs(closed_a - num_a)) < 1e-8
        closed_b = np.sort(red.case2_eigs_disease_free(p))
        num_b = np.sort(field_eigenvalues(vf, free.si_plane).real)
        assert np.max(np.abs(closed_b - num_b)) < 1e-8


def test_case2_endemic_eigenvalue_product_identity(rng):
    for _ in range(50):
        p = random_admissible(rng, regime="case2")
        lam1, lam2 = red.case2_eigs_endemic(p)
        expected = -(p.beta - p.sigma * p.gamma) * (p.beta - (1 + p.sigma) * p.gamma) / p.beta
        assert lam1 * lam2 == pytest.approx(expected, rel=1e-10)
        assert lam1 > 0 > lam2


def test_case2_rescaled_frozen_values():
    p = make_params(2, 1, 0, c=1, regime="case2")
    assert red.case2_rescaled_rhs(0.7, 0.3, p, delta=0.0) == pytest.approx((0.0, 0.0))
    assert red.case2_rescaled_rhs(0.5, 0.2, p, delta=0.0) == pytest.approx((0.3, 0.0))
    assert red.case2_rescaled_rhs(1.0, 0.5, p, delta=1.0) == pytest.approx((-0.5, -0.5))


def test_case2_limit_flow_frozen_and_zeros():
    p = make_params(2, 1, 0, regime="case2")
    assert red.case2_limit_flow(0.0, p) == 0.0
    assert red.case2_limit_flow(p.infected_endemic, p) == pytest.approx(0.0, abs=1e-15)
    assert red.case2_limit_flow(0.25, p) == pytest.approx(-0.125)


# ---- case 3 -----------------------------------------------------------------

def test_case3_reduced_frozen_values():
    p = make_params(2, 1, 0, c=1, regime="case3")
    assert red.case3_reduced_rhs(0.0, 0.0, p) == (0.0, 0.0)
    assert red.case3_reduced_rhs(p.infected_endemic, 0.0, p) == pytest.approx(
        (0.0, 0.0), abs=1e-15
    )
    assert red.case3_reduced_rhs(0.25, 0.0, p) == pytest.approx((0.0, -0.125))


def test_case3_eigs_endemic_frozen():
    assert red.case3_eigs_endemic(make_params(2, 1, 0, c=3, regime="case3")) == pytest.approx(
        (-3.0, 1.0 / 3.0)
    )
    assert red.case3_eigs_endemic(
        make_params(2, 0.5, 0.5, c=2, regime="case3")
    ) == pytest.approx((-2.0, 0.546875))


def test_case3_eigs_disease_free_regimes():
    p = make_params(2, 1, 0, c=2, regime="case3")
    lam1, lam2 = red.case3_eigs_disease_free(p)
    assert lam1 == lam2 == pytest.approx(-1.0)  # repeated exactly at c = c_min
    lam1, lam2 = red.case3_eigs_disease_free(make_params(2, 1, 0, c=3, regime="case3"))
    assert lam1 == pytest.approx(-1.5 + math.sqrt(1.25), rel=1e-12)
    assert lam2 == pytest.approx(-1.5 - math.sqrt(1.25), rel=1e-12)
    lam1, lam2 = red.case3_eigs_disease_free(make_params(2, 1, 0, c=1, regime="case3"))
    assert isinstance(lam1, complex)
    assert lam1.real == pytest.approx(-0.5)
    assert lam1 == lam2.conjugate()


def test_case3_eigs_match_numerical_jacobian(rng):
    for _ in range(20):
        p = random_admissible(rng, regime="case3")
        vf = red.planar_reduction_field(p)
        endemic, free = equilibria(p)
        closed_a = np.sort(red.case3_eigs_endemic(p))
        num_a = np.sort(field_eigenvalues(vf, endemic.iv_plane).real)
        assert np.max(np.abs(closed_a - num_a)) < 1e-8
        closed_b = sorted(red.case3_eigs_disease_free(p), key=lambda z: (complex(z).real,
                                                                         complex(z).imag))
        num_b = sorted(field_eigenvalues(vf, free.iv_plane),
                       key=lambda z: (z.real, z.imag))
        assert max(abs(complex(a) - complex(b)) for a, b in zip(closed_b, num_b)) < 1e-8


def test_case3_disease_free_product_identity(rng):
    for _ in range(50):
        p = random_admissible(rng, regime="case3")
        lam1, lam2 = red.case3_eigs_disease_free(p)
        m = (p.beta - (1 + p.sigma) * p.gamma) / (1 + p.sigma)
        product = complex(lam1) * complex(lam2)
        assert product.real == pytest.approx(m, rel=1e-10)
        assert abs(product.imag) < 1e-12


def test_case3_min_speed_frozen():
    assert red.case3_min_speed(make_params(2, 1, 0, regime="case3")) == pytest.approx(2.0)
    assert red.case3_min_speed(
        make_params(2, 0.5, 0.5, regime="case3")
    ) == pytest.approx(2 * math.sqrt(1.25 / 1.5), rel=1e-12)


def test_case3_min_speed_degenerates_at_admissibility_boundary():
    gamma, sigma = 1.0, 0.5
    boundary = gamma * (1 + sigma)
    speeds = [
        red.case3_min_speed(make_params(boundary * (1 + e), gamma, sigma, regime="case3"))
        for e in (1e-2, 1e-4, 1e-6)
    ]
    assert speeds[0] > speeds[1] > speeds[2]
    assert speeds[2] < 2e-3


def test_case3_slope_interval_frozen():
    p = make_params(2, 1, 0, c=3, regime="case3")
    lo, hi = red.case3_slope_interval(p)
    assert lo == pytest.approx((3 - math.sqrt(5)) / 2, rel=1e-12)
    assert hi == pytest.approx((3 + math.sqrt(5)) / 2, rel=1e-12)
    lo, hi = red.case3_slope_interval(make_params(2, 1, 0, c=2, regime="case3"))
    assert lo == hi == pytest.approx(1.0)  # degenerate single slope at c_min
    with pytest.raises(SpeedBelowBound):
        red.case3_slope_interval(make_params(2, 1, 0, c=1, regime="case3"))


def test_slope_interval_nonempty_iff_speed_admissible(rng):
    for _ in range(20):
        p = random_admissible(rng, regime="case3")
        c_min = red.case3_min_speed(p)
        for factor in (0.5, 0.9, 0.99):
            with pytest.raises(SpeedBelowBound):
                red.case3_slope_interval(p, c=factor * c_min)
        for factor in (1.0, 1.01, 1.5, 3.0):
            lo, hi = red.case3_slope_interval(p, c=factor * c_min)
            assert 0.0 < lo <= hi <= factor * c_min
        bound = red.case3_speed_bound(p, c=0.5 * c_min)
        assert bound.r_interval is None and bound.c_min == pytest.approx(c_min)


def test_kpp_residual_trivial_zeros():
    p = make_params(2, 1, 0, c=2.5, regime="case3")
    assert red.kpp_second_order_residual(0.0, 0.0, 0.0, p) == 0.0
    assert red.kpp_second_order_residual(
        p.infected_endemic, 0.0, 0.0, p
    ) == pytest.approx(0.0, abs=1e-15)


def test_kpp_residual_vanishes_along_orbit():
    # fixed-step RK4 integration of the planar flow, then purely
    # finite-difference derivatives of the I samples: the scalar
    # second-order form must vanish on them
    p = make_params(2, 0.5, 0.5, c=2.5, regime="case3")
    h = 1e-3
    steps = 8000
    y = np.array([p.infected_endemic - 1e-3, -1e-3])
    samples = np.empty(steps + 1)
    samples[0] = y[0]

    def f(state):
        return np.array(red.case3_reduced_rhs(state[0], state[1], p))

    for k in range(steps):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        samples[k + 1] = y[0]
    mid = samples[1:-1]
    first = (samples[2:] - samples[:-2]) / (2 * h)
    second = (samples[2:] - 2 * mid + samples[:-2]) / (h * h)
    residuals = [
        abs(red.kpp_second_order_residual(i, iy, iyy, p))
        for i, iy, iyy in zip(mid[::50], first[::50], second[::50])
    ]
    assert max(residuals) < 1e-6


# ---- sigma = 0 ----------------------------------------------------------------

def test_fkpp_parameters_frozen():
    fk = red.fkpp_parameters(make_params(2, 1, 0, c=2, regime="case3"))
    assert (fk.k, fk.scaled_min_speed, fk.min_speed) == pytest.approx((0.5, 2.0, 2.0))
    fk = red.fkpp_parameters(make_params(5, 1, 0, c=0.5, regime="case3"))
    assert fk.k == pytest.approx(4.0)
    assert fk.scaled_min_speed == pytest.approx(2.5)  # k/2 + 2/k above the kink


def test_fkpp_requires_sigma_zero():
    with pytest.raises(SigmaNotZero):
        red.fkpp_parameters(make_params(2, 0.5, 0.5, regime="case3"))
    with pytest.raises(SigmaNotZero):
        red.burgers_fkpp_rhs_tw(0.1, 0.0, make_params(2, 0.5, 0.5, regime="case3"))


def test_burgers_frozen_values():
    p = make_params(2, 1, 0, c=1, regime="case3")
    assert red.burgers_fkpp_rhs_tw(0.0, 0.0, p) == (0.0, 0.0)
    assert red.burgers_fkpp_rhs_tw(0.5, 0.0, p) == pytest.approx((0.0, 0.0), abs=1e-15)
    assert red.burgers_fkpp_rhs_tw(0.25, 0.1, p) == pytest.approx((0.1, -0.175))


def test_burgers_matches_case3_at_sigma_zero(rng):
    p = make_params(2, 1, 0, c=1.7, regime="case3")
    for _ in range(200):
        i, v = rng.uniform(-0.5, 1.5), rng.uniform(-1.0, 1.0)
        a = red.case3_reduced_rhs(i, v, p)
        b = red.burgers_fkpp_rhs_tw(i, v, p)
        assert a == pytest.approx(b, abs=1e-12)


# ---- manifolds and the parameterized constructor ---------------------------------

def test_manifold_residual_frozen_values():
    p = make_params(2, 1, 0, c=1, regime="case3")
    assert red.manifold_residual(Manifold.CASE3_SLOW, [0.6, 0.3, 0.1], p) == pytest.approx(
        0.0, abs=1e-15
    )
    assert red.manifold_residual(Manifold.LARGE_SPEED_LINE, [0.5, 0.2], p) == pytest.approx(0.3)
    p1 = make_params(2, 1, 0, c=1, regime="case1")
    for i in np.linspace(0, 1, 21):
        assert red.manifold_residual(
            Manifold.CASE1_CRITICAL, red.case1_manifold_point(i, p1), p1
        ) < 1e-12


def test_case2_manifold_contains_equilibria():
    p = make_params(2, 0.5, 0.5, c=1.2, regime="case2")
    for eq in equilibria(p):
        assert red.manifold_residual(Manifold.CASE2_SLOW, eq.reduced3, p) < 1e-15


def test_case3_manifold_tangency(rng):
    # motion assembled from the planar reduced flow plus the constraint-
    # consistent S rate never leaves the slow plane
    p = make_params(2, 0.5, 0.5, c=2.2, regime="case3")
    for _ in range(20):
        i, v = rng.uniform(0.05, 0.7), rng.uniform(-0.5, 0.0)
        s = 1.0 - i - v / p.c
        di, dv = red.case3_reduced_rhs(i, v, p)
        ds = -di - dv / p.c
        # the slow set is a plane, so the directional derivative is exact;
        # h only needs to dominate one-ulp rounding of the coordinates
        h = 1e-4
        moved = [s + h * ds, i + h * di, v + h * dv]
        assert red.manifold_residual(Manifold.CASE3_SLOW, moved, p) / h < 1e-10


def test_epsilon_field_fast_is_eps_times_slow(rng):
    for regime in ("case1", "case2", "case3"):
        p = random_admissible(rng, regime=regime)
        eps = 0.02
        slow = red.epsilon_field(p, "slow", eps)
        fast = red.epsilon_field(p, "fast", eps)
        for _ in range(20):
            y = rng.uniform([0.05, 0.0, -0.5], [1.2, 1.0, 0.5])
            assert fast(y) == pytest.approx(eps * slow(y), rel=1e-12, abs=1e-14)


def test_epsilon_field_slow_matches_regime_diffusivities(rng):
    from sisfronts.phasespace import rhs_reduced3

    p = make_params(2, 1, 0, c=1, epsilon=0.03, alpha=2.0, regime="case1")
    slow = red.epsilon_field(p, "slow")
    y = np.array([0.7, 0.4, -0.1])
    assert slow(y) == pytest.approx(rhs_reduced3(y, p), rel=1e-14)


def test_epsilon_field_fast_at_zero_matches_fiber_systems():
    y = np.array([0.6, 0.5, 0.2])
    S, I, V = y
    p1 = make_params(2, 1, 0, c=1, alpha=2.0, regime="case1")
    w = 2 * S * I - I
    expected1 = np.array([-(1.0 / 2.0) * (I + S - 1), 0.0, -V - w])
    assert red.epsilon_field(p1, "fast", 0.0)(y) == pytest.approx(expected1, abs=1e-15)
    p2 = make_params(2, 1, 0, c=1, regime="case2")
    expected2 = np.array([0.0, 0.0, -V - w])
    assert red.epsilon_field(p2, "fast", 0.0)(y) == pytest.approx(expected2, abs=1e-15)
    p3 = make_params(2, 1, 0, c=1, regime="case3")
    expected3 = np.array([-(S + I - 1) - V, 0.0, 0.0])
    assert red.epsilon_field(p3, "fast", 0.0)(y) == pytest.approx(expected3, abs=1e-15)


def test_epsilon_field_slow_rejects_eps_zero():
    p = make_params(2, 1, 0, regime="case2")
    with pytest.raises(ValueError):
        red.epsilon_field(p, "slow", 0.0)
    with pytest.raises(ValueError):
        red.epsilon_field(p, "sideways")


def test_case1_flow_matches_packed_kernel(rng):
    p = make_params(3, 0.5, 1.0, c=2.0, regime="case1")
    vf = pack_case1_flow(p)
    for i in rng.uniform(0, 1, size=20):
        assert vf(np.array([i]))[0] == pytest.approx(red.case1_reduced_flow(i, p), rel=1e-14)
