from __future__ import annotations

import numpy as np
import pytest

from helpers import random_admissible
from sisfronts.errors import OutsideTriangle, SlopeOutOfInterval, SpeedBelowBound
from sisfronts.geometry import (
    case2_triangle,
    case3_triangle,
    hausdorff_distance,
    interior_grid,
    point_segment_distance,
    rotation_monotonicity_scan,
    trap_check_case2,
    trap_check_case3,
    wedge_rotation,
)
from sisfronts.model import make_params
from sisfronts.reductions import case2_rescaled_rhs, case3_slope_interval

P21 = make_params(2, 1, 0, c=1, regime="case2")


def test_case2_triangle_vertices():
    tri = case2_triangle(P21)
    assert tri.vertices == pytest.approx(np.array([[0.5, 0.5], [0.5, 0.0], [1.0, 0.0]]))
    assert tri.invariant_sides == frozenset({"l3"})
    assert tri.contains((0.7, 0.2))
    assert not tri.contains((0.4, 0.2))


def test_trap_case2_passes_and_reports_margins():
    report = trap_check_case2(P21, n=100)
    assert report.verdict
    by_name = {seg.name: seg for seg in report.segments}
    # vertical side: inward margin equals the S-rate c*(1 - S_A - I) > 0
    assert by_name["l1"].min_margin > 0
    assert by_name["l2"].min_margin > 0
    # the base I = 0 is invariant: identically zero normal flux
    assert by_name["l3"].invariant
    assert by_name["l3"].max_abs_flux < 1e-12


def test_trap_case2_field_values_on_sides():
    from sisfronts.reductions import case2_reduced_rhs

    # on the vertical side the field is (c*(1 - S_A - I), 0)
    f = case2_reduced_rhs(0.5, 0.2, P21)
    assert f == pytest.approx((0.3, 0.0), abs=1e-15)
    # on the hypotenuse it points straight down into the triangle
    f = case2_reduced_rhs(0.75, 0.25, P21)
    assert f == pytest.approx((0.0, -0.125), abs=1e-15)


def test_trap_case2_sample_count_validated():
    with pytest.raises(ValueError):
        trap_check_case2(P21, n=5)


def test_trap_case3_midpoint_passes():
    p = make_params(2, 1, 0, c=3, regime="case3")
    report = trap_check_case3(p, n=100)
    assert report.verdict
    for seg in report.segments:
        assert seg.min_margin > 0


def test_trap_case3_slope_outside_interval_fails():
    p = make_params(2, 1, 0, c=3, regime="case3")
    lo, hi = case3_slope_interval(p)
    report = trap_check_case3(p, r=2.9, n=100)  # above hi = 2.618...
    assert not report.verdict
    s3 = {seg.name: seg for seg in report.segments}["s3"]
    assert s3.min_margin < 0
    report_low = trap_check_case3(p, r=0.5 * lo, n=100)
    assert not report_low.verdict


def test_trap_case3_slope_above_speed_fails():
    # slopes beyond the wave speed push the field outward on the slant
    p = make_params(2, 1, 0, c=3, regime="case3")
    report = trap_check_case3(p, r=3.5, n=100)
    assert not report.verdict


def test_trap_case3_guards():
    p = make_params(2, 1, 0, c=1, regime="case3")
    with pytest.raises(SpeedBelowBound):
        trap_check_case3(p, n=100)
    p3 = make_params(2, 1, 0, c=3, regime="case3")
    with pytest.raises(SlopeOutOfInterval):
        trap_check_case3(p3, r=-0.5, n=100)
    with pytest.raises(SlopeOutOfInterval):
        case3_triangle(p3, 0.0)


def test_trap_case3_speed_override():
    p = make_params(2, 1, 0, c=1, regime="case3")
    report = trap_check_case3(p, n=50, c=3.0)
    assert report.verdict


def test_wedge_rotation_values():
    assert wedge_rotation(0.7, 0.2, P21) == pytest.approx(-0.004, rel=1e-12)
    assert wedge_rotation(0.75, 0.25, P21) == pytest.approx(0.0, abs=1e-15)  # on S = 1 - I
    assert wedge_rotation(0.8, 0.0, P21) == pytest.approx(0.0, abs=1e-15)  # on I = 0
    with pytest.raises(OutsideTriangle):
        wedge_rotation(0.4, 0.2, P21)
    with pytest.raises(OutsideTriangle):
        wedge_rotation(0.7, 0.6, P21)


def test_wedge_negative_on_interior(rng):
    for _ in range(5):
        p = random_admissible(rng, regime="case2")
        for S, I in interior_grid(p, per_axis=10):
            assert wedge_rotation(S, I, p) < 0


def test_rotation_scan_passes():
    scan = rotation_monotonicity_scan(P21)
    assert scan.passed
    assert scan.angles.shape == (400, 20)
    assert np.all(scan.wedge < 0)
    assert np.all(np.diff(scan.angles, axis=1) < 0)


def test_rotation_scan_single_delta_trivially_passes():
    scan = rotation_monotonicity_scan(P21, deltas=np.array([1.0]))
    assert scan.passed


def test_rotation_scan_rejects_bad_deltas():
    with pytest.raises(ValueError):
        rotation_monotonicity_scan(P21, deltas=np.array([2.0, 1.0]))


def test_angle_derivative_matches_wedge_identity():
    # d(angle)/d(delta) = (F ^ dF/ddelta)/|F|^2; the packed field carries
    # the extra factor beta relative to the reported wedge value
    S, I = 0.7, 0.2
    delta, h = 0.8, 1e-6
    f = np.array(case2_rescaled_rhs(S, I, P21, delta))
    ang = lambda d: np.arctan2(*case2_rescaled_rhs(S, I, P21, d)[::-1])
    deriv = (ang(delta + h) - ang(delta - h)) / (2 * h)
    expected = P21.beta * wedge_rotation(S, I, P21) / float(f @ f)
    assert deriv == pytest.approx(expected, rel=1e-5)


def test_point_segment_distance_known_values():
    d = point_segment_distance([[0.0, 1.0], [2.0, 0.0], [-1.0, 0.0]], [0.0, 0.0], [1.0, 0.0])
    assert d == pytest.approx([1.0, 1.0, 1.0])


def test_hausdorff_distance_symmetric_and_zero_on_self():
    path_a = np.column_stack([np.linspace(0, 1, 50), np.linspace(0, 1, 50) ** 2])
    assert hausdorff_distance(path_a, path_a) == 0.0
    path_b = path_a + np.array([0.0, 0.1])
    d = hausdorff_distance(path_a, path_b)
    assert 0.05 < d <= 0.1 + 1e-12
