"""Trapping-region verification and the clockwise-rotation argument.

Two triangles confine the planar front orbits:

  case2, (S, I) plane: endemic vertex, the corner (S_endemic, 0) and
  the disease-free vertex (1, 0).  The field enters through the
  vertical side and the hypotenuse {S = 1 - I}; the base {I = 0} is
  invariant.

  case3, (I, V) plane: the right triangle with vertices (0, 0),
  (I_endemic, 0) and (I_endemic, -r*I_endemic), for a slope r taken
  from the admissible interval at the given speed.

Inward margins are signed against outward normals fixed by the
triangles' counter-clockwise vertex winding, removing any sign
ambiguity.  Boundary sampling insets the vertices (the inequalities are
strict on the open segments).

The rotation argument: inside the case-2 triangle the wedge product of
the delta-parameterized rescaled field with its delta-derivative is
strictly negative, so field vectors (and with them the connecting
orbit) rotate clockwise monotonically as delta = 1/c^2 grows.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import OutsideTriangle, SlopeOutOfInterval, SpeedBelowBound
from .kernels import pack_case2_planar, pack_case3_planar, pack_rescaled
from .model import ModelParams
from .reductions import case3_min_speed, case3_slope_interval


@dataclass(frozen=True)
class TriangleSpec:
    """A candidate trapping triangle with CCW vertices.

    Edge i runs vertices[i] -> vertices[(i+1) % 3] and carries
    side_names[i]; sides listed in invariant_sides are flow-invariant
    lines checked for zero normal flux instead of inward margin.
    """

    vertices: np.ndarray
    side_names: tuple[str, str, str]
    invariant_sides: frozenset
    axis_names: tuple[str, str]
    r: float | None = None

    def contains(self, point, tol: float = 0.0) -> bool:
        """Point in the closed (tol-inflated) triangle, via CCW margins."""
        p = np.asarray(point, dtype=float)
        for i in range(3):
            a = self.vertices[i]
            d = self.vertices[(i + 1) % 3] - a
            cross = d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])
            if cross < -tol:
                return False
        return True


def case2_triangle(params: ModelParams) -> TriangleSpec:
    sa, ia = params.susceptible_endemic, params.infected_endemic
    vertices = np.array([[sa, ia], [sa, 0.0], [1.0, 0.0]])
    return TriangleSpec(
        vertices=vertices,
        side_names=("l1", "l3", "l2"),
        invariant_sides=frozenset({"l3"}),
        axis_names=("S", "I"),
    )


def case3_triangle(params: ModelParams, r: float) -> TriangleSpec:
    if r <= 0.0:
        raise SlopeOutOfInterval(f"triangle slope must be > 0, got {r}")
    ia = params.infected_endemic
    vertices = np.array([[0.0, 0.0], [ia, -r * ia], [ia, 0.0]])
    return TriangleSpec(
        vertices=vertices,
        side_names=("s3", "s2", "s1"),
        invariant_sides=frozenset(),
        axis_names=("I", "V"),
        r=r,
    )


@dataclass
class SegmentReport:
    name: str
    n_samples: int
    invariant: bool
    min_margin: float
    max_abs_flux: float
    worst_point: tuple[float, float]

    @property
    def ok(self) -> bool:
        if self.invariant:
            return self.max_abs_flux < 1e-12
        return self.min_margin > 0.0


@dataclass
class TrapReport:
    region: str
    segments: list[SegmentReport]

    @property
    def verdict(self) -> bool:
        return all(seg.ok for seg in self.segments)

    def summary(self) -> dict:
        return {
            "region": self.region,
            "verdict": self.verdict,
            "segments": [
                {
                    "name": s.name,
                    "n_samples": s.n_samples,
                    "invariant": s.invariant,
                    "min_margin": s.min_margin,
                    "max_abs_flux": s.max_abs_flux,
                    "worst_point": list(s.worst_point),
                }
                for s in self.segments
            ],
        }


def _check_triangle(vf, tri: TriangleSpec, n: int, region: str) -> TrapReport:
    if n < 10:
        raise ValueError(f"need at least 10 samples per side, got {n}")
    segments = []
    ts = np.arange(1, n + 1) / (n + 1.0)  # vertices excluded (open segments)
    for i, name in enumerate(tri.side_names):
        a = tri.vertices[i]
        d = tri.vertices[(i + 1) % 3] - a
        length = float(np.hypot(d[0], d[1]))
        margins = np.empty(n)
        points = np.empty((n, 2))
        for j, t in enumerate(ts):
            x = a + t * d
            f = vf(x)
            # inward normal component for CCW winding
            margins[j] = (d[0] * f[1] - d[1] * f[0]) / length
            points[j] = x
        worst = int(np.argmin(margins)) if name not in tri.invariant_sides else int(
            np.argmax(np.abs(margins))
        )
        segments.append(
            SegmentReport(
                name=name,
                n_samples=n,
                invariant=name in tri.invariant_sides,
                min_margin=float(margins.min()),
                max_abs_flux=float(np.max(np.abs(margins))),
                worst_point=(float(points[worst, 0]), float(points[worst, 1])),
            )
        )
    order = {nm: k for k, nm in enumerate(sorted(tri.side_names))}
    segments.sort(key=lambda s: order[s.name])
    return TrapReport(region=region, segments=segments)


def trap_check_case2(params: ModelParams, n: int = 100) -> TrapReport:
    """Verify the case-2 triangle traps the planar reduced flow.

    Expected to pass for every admissible parameter set and c > 0; the
    base {I = 0} is checked as an invariant line (zero normal flux).
    """
    return _check_triangle(pack_case2_planar(params), case2_triangle(params), n, "case2")


def trap_check_case3(params: ModelParams, r: float | None = None, n: int = 100,
                     c: float | None = None) -> TrapReport:
    """Verify the case-3 right triangle with slope r at speed params.c.

    r defaults to the midpoint of the admissible slope interval (the
    quadratic's negativity margin is maximal there).  Any r > 0 is
    checked; slopes outside the interval are expected to produce a
    failing report with a negative margin on the slanted side.
    """
    if c is not None:
        params = replace(params, c=c)
    c_min = case3_min_speed(params)
    if params.c < c_min:
        raise SpeedBelowBound(f"c = {params.c} is below the minimum front speed {c_min}")
    if r is None:
        lo, hi = case3_slope_interval(params)
        r = 0.5 * (lo + hi)
    tri = case3_triangle(params, r)
    return _check_triangle(pack_case3_planar(params), tri, n, "case3")


def wedge_rotation(S: float, I: float, params: ModelParams) -> float:
    """Wedge product of the rescaled case-2 field with its delta-derivative.

    (I+S-1) * I * (S/(1+sigma*S) - gamma/beta): strictly negative at
    interior points of the case-2 triangle, zero on its hypotenuse and
    base.  Raises OutsideTriangle for points outside the closed
    triangle.
    """
    tri = case2_triangle(params)
    if not tri.contains((S, I), tol=1e-12):
        raise OutsideTriangle(f"({S}, {I}) is outside the case-2 triangle")
    return (I + S - 1.0) * I * (S / (1.0 + params.sigma * S) - params.gamma / params.beta)


def interior_grid(params: ModelParams, per_axis: int = 20) -> np.ndarray:
    """Strictly interior probe grid for the case-2 triangle.

    per_axis^2 points: I spans inset fractions of the endemic value,
    and for each I the probes span the open (S_endemic, 1-I) range.
    """
    sa, ia = params.susceptible_endemic, params.infected_endemic
    fractions = np.arange(1, per_axis + 1) / (per_axis + 1.0)
    probes = np.empty((per_axis * per_axis, 2))
    k = 0
    for a in fractions:
        I = ia * a
        for b in fractions:
            probes[k] = (sa + b * (1.0 - I - sa), I)
            k += 1
    return probes


@dataclass
class RotationScan:
    """Per-probe field angles across a delta sweep, plus the verdict."""

    probes: np.ndarray
    deltas: np.ndarray
    angles: np.ndarray  # (n_probes, n_deltas), unwrapped
    wedge: np.ndarray  # (n_probes,)
    passed: bool

    def summary(self) -> dict:
        return {
            "n_probes": int(self.probes.shape[0]),
            "n_deltas": int(self.deltas.size),
            "max_wedge": float(self.wedge.max()),
            "passed": self.passed,
        }


def rotation_monotonicity_scan(params: ModelParams, probes=None,
                               deltas=None) -> RotationScan:
    """Check clockwise monotone rotation of the rescaled field in delta.

    At every interior probe the unwrapped angle of the field against
    the S-axis must be strictly decreasing across the increasing delta
    list, and the wedge product must be negative.  Lists of length one
    pass trivially.
    """
    probes = interior_grid(params) if probes is None else np.atleast_2d(probes)
    deltas = np.logspace(-2.0, 2.0, 20) if deltas is None else np.asarray(deltas, float)
    if np.any(deltas <= 0.0) or np.any(np.diff(deltas) <= 0.0):
        raise ValueError("deltas must be positive and strictly increasing")
    n_p, n_d = probes.shape[0], deltas.size
    angles = np.empty((n_p, n_d))
    wedge = np.empty(n_p)
    for i, (S, I) in enumerate(probes):
        wedge[i] = wedge_rotation(S, I, params)
        for j, delta in enumerate(deltas):
            f = pack_rescaled(params, delta)(np.array([S, I]))
            angles[i, j] = np.arctan2(f[1], f[0])
    angles = np.unwrap(angles, axis=1)
    decreasing = bool(np.all(np.diff(angles, axis=1) < 0.0)) if n_d > 1 else True
    passed = decreasing and bool(np.all(wedge < 0.0))
    return RotationScan(probes=probes, deltas=deltas, angles=angles, wedge=wedge,
                        passed=passed)


# ---- sampled-path distances (limit-shape diagnostics) -----------------------

def point_segment_distance(points, a, b) -> np.ndarray:
    """Distance from each point to the segment [a, b]."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = b - a
    denom = float(d @ d)
    if denom == 0.0:
        return np.linalg.norm(pts - a, axis=1)
    t = np.clip((pts - a) @ d / denom, 0.0, 1.0)
    proj = a + t[:, None] * d
    return np.linalg.norm(pts - proj, axis=1)


def path_distance(points, polyline) -> np.ndarray:
    """Distance from each point to a polyline (min over its segments)."""
    polyline = np.asarray(polyline, dtype=float)
    dists = np.full(np.atleast_2d(points).shape[0], np.inf)
    for k in range(len(polyline) - 1):
        dists = np.minimum(dists, point_segment_distance(points, polyline[k], polyline[k + 1]))
    return dists


def hausdorff_distance(path_a: Sequence, path_b: Sequence) -> float:
    """Symmetric Hausdorff distance between two sampled paths."""
    a = np.atleast_2d(np.asarray(path_a, dtype=float))
    b = np.atleast_2d(np.asarray(path_b, dtype=float))
    return float(max(path_distance(a, b).max(), path_distance(b, a).max()))
