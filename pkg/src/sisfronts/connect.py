"""Heteroclinic front construction by shooting along unstable directions.

Every front in this model is a saddle-to-sink connection: launch a
trajectory a small offset along the saddle's one-dimensional unstable
direction, integrate until it enters a small ball around the attracting
equilibrium, and reject runs that escape or stall.  The connection is
structurally robust, so plain forward shooting converges; a re-run at a
ten-times-smaller launch offset guards against offset-induced
artifacts.

Profiles are re-parameterized so the infected density crosses half its
endemic value at z = 0 (fixing translation invariance) and carry the
exact saddle coordinates as a z -> -infinity marker row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    EigenstructureChanged,
    NoConnection,
    NotASaddle,
    SpeedBelowBound,
)
from .integrate import DEFAULT_TOL, EventSpec, Trajectory, integrate_until
from .kernels import VectorField
from .model import ModelParams, Regime, equilibria
from .phasespace import numerical_jacobian
from .reductions import (
    REGIME_MANIFOLD,
    case3_min_speed,
    manifold_residual,
    planar_reduction_field,
    traveling_wave_field,
)

ESCAPE_NORM = 1e3  # shooting aborts when |state| exceeds this


@dataclass(frozen=True)
class ShootSpec:
    """One shooting problem: field, saddle, target, and run controls."""

    field: VectorField
    source: np.ndarray
    target: np.ndarray
    offset: float = 1e-6
    ball_radius: float = 1e-6
    max_span: float = 1e4
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not (self.offset > 0.0 and self.ball_radius > 0.0):
            raise ValueError("offset and ball_radius must be > 0")
        gap = float(np.linalg.norm(np.asarray(self.source) - np.asarray(self.target)))
        if self.offset >= 0.1 * gap:
            raise ValueError(
                f"offset {self.offset} is not small against the equilibrium gap {gap}"
            )


@dataclass
class FrontProfile:
    """A heteroclinic orbit re-expressed as (z, S, I) samples.

    z[0] is -inf marking the exact saddle; native holds the orbit in
    the shooting system's own coordinates, one row per z.
    """

    z: np.ndarray
    S: np.ndarray
    I: np.ndarray
    native: np.ndarray
    names: tuple[str, ...]
    regime: Regime
    c: float
    epsilon: float | None
    endpoint_gap: float
    launch_offset: float
    termination_reason: str
    max_manifold_residual: float | None = None
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.z)

    @property
    def finite(self) -> np.ndarray:
        """Mask selecting rows with finite z (drops the saddle marker)."""
        return np.isfinite(self.z)

    def to_csv(self, path) -> None:
        from ._io import write_csv

        header = ["z", "S", "I"]
        cols = [self.z, self.S, self.I]
        for j, name in enumerate(self.names):
            if name in ("S", "I"):
                continue
            header.append(name)
            cols.append(self.native[:, j])
        write_csv(path, header, cols)

    def summary(self) -> dict:
        return {
            "regime": self.regime.value,
            "c": self.c,
            "epsilon": self.epsilon,
            "endpoint_gap": self.endpoint_gap,
            "launch_offset": self.launch_offset,
            "max_manifold_residual": self.max_manifold_residual,
            "termination_reason": self.termination_reason,
            "n_samples": len(self.z),
        }


def unstable_direction(vf, saddle, orient_axis: str | None = None) -> np.ndarray:
    """Unit eigenvector of the one unstable direction at a saddle.

    The saddle must have exactly one eigenvalue with positive real
    part.  The sign is fixed so the launched point moves toward the
    target region: decreasing I where the system has an I coordinate,
    else decreasing V.
    """
    saddle = np.asarray(saddle, dtype=float)
    jac = numerical_jacobian(vf, saddle)
    eigvals, eigvecs = np.linalg.eig(jac)
    scale = max(1.0, float(np.max(np.abs(eigvals))))
    unstable = np.flatnonzero(eigvals.real > 1e-9 * scale)
    if unstable.size != 1:
        raise NotASaddle(
            f"expected exactly one unstable direction, found {unstable.size} "
            f"(eigenvalues {np.round(eigvals, 6)})"
        )
    v = eigvecs[:, unstable[0]]
    # a simple real eigenvalue of a real matrix has a real eigenvector up to phase
    phase = v[np.argmax(np.abs(v))]
    v = np.real(v / phase)
    v /= np.linalg.norm(v)

    names = getattr(vf, "names", None) or ()
    axis = orient_axis or ("I" if "I" in names else ("V" if "V" in names else None))
    if axis is not None and axis in names:
        comp = v[names.index(axis)]
        if abs(comp) > 1e-12 and comp > 0.0:
            v = -v
    return v


def _run_shot(spec: ShootSpec, offset: float) -> tuple[Trajectory, float]:
    direction = unstable_direction(spec.field, spec.source)
    y0 = np.asarray(spec.source, dtype=float) + offset * direction
    event = EventSpec(
        span=spec.max_span,
        ball_center=np.asarray(spec.target, dtype=float),
        ball_radius=spec.ball_radius,
        norm_bound=ESCAPE_NORM,
    )
    traj = integrate_until(spec.field, y0, event, tol=spec.tol)
    if traj.meta.termination_reason != "enter_ball":
        raise NoConnection(
            f"shot from {np.round(y0, 8)} failed: {traj.meta.termination_reason} "
            f"at t={traj.times[-1]:.6g}, state={np.round(traj.final_state, 6)}",
            escape_state=traj.final_state,
            reason=traj.meta.termination_reason,
        )
    gap = float(np.linalg.norm(traj.final_state - np.asarray(spec.target)))
    return traj, gap


def susceptible_infected(states, names, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """(S, I) arrays for states of any shooting system.

    Reduced systems fill the eliminated coordinate from their manifold
    relation: case3 planar uses S = 1 - I - V/c, the case-1 flow uses
    S = 1 - I; systems carrying S directly pass it through.
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    names = tuple(names)
    if names == ("I",):
        I = states[:, 0]
        return 1.0 - I, I
    if names == ("I", "V"):
        I, V = states[:, 0], states[:, 1]
        return 1.0 - I - V / params.c, I
    i_s = names.index("S")
    i_i = names.index("I")
    return states[:, i_s], states[:, i_i]


def reconstruct_susceptible(profile: FrontProfile, params: ModelParams) -> FrontProfile:
    """Fill the (S, I) view of a profile from its native coordinates."""
    S, I = susceptible_infected(profile.native, profile.names, params)
    return replace(profile, S=S, I=I)


def _recenter(z: np.ndarray, I: np.ndarray, half_level: float) -> np.ndarray:
    """Shift z so I first crosses half_level (downward) at z = 0."""
    for k in range(len(I) - 1):
        if I[k] >= half_level >= I[k + 1] and I[k] > I[k + 1]:
            frac = (I[k] - half_level) / (I[k] - I[k + 1])
            zk = z[k] if np.isfinite(z[k]) else z[k + 1]
            z0 = zk + frac * (z[k + 1] - zk)
            return z - z0
    return z


def _build_profile(spec: ShootSpec, traj: Trajectory, gap: float, params: ModelParams,
                   epsilon: float | None) -> FrontProfile:
    m = len(traj)
    native = np.empty((m + 1, traj.states.shape[1]))
    native[0] = np.asarray(spec.source, dtype=float)
    native[1:] = traj.states
    z = np.empty(m + 1)
    z[0] = -np.inf
    z[1:] = traj.times
    S, I = susceptible_infected(native, traj.names, params)
    z = _recenter(z, I, 0.5 * params.infected_endemic)
    return FrontProfile(
        z=z,
        S=S,
        I=I,
        native=native,
        names=traj.names,
        regime=params.regime,
        c=params.c,
        epsilon=epsilon,
        endpoint_gap=gap,
        launch_offset=spec.offset,
        termination_reason=traj.meta.termination_reason,
    )


def shoot_heteroclinic(spec: ShootSpec, params: ModelParams,
                       epsilon: float | None = None) -> FrontProfile:
    """Construct the saddle-to-sink connection defined by ``spec``.

    Runs the shot at the requested offset and verifies it with a second
    run at offset/10; the profile is accepted only when the two
    endpoint gaps agree within a factor of ten.
    """
    traj, gap = _run_shot(spec, spec.offset)
    _, gap_check = _run_shot(spec, spec.offset / 10.0)
    ratio = gap / gap_check if gap_check > 0.0 else math.inf
    if not (0.1 <= ratio <= 10.0):
        raise NoConnection(
            f"offset sensitivity: endpoint gaps {gap:.3e} vs {gap_check:.3e} "
            "disagree by more than 10x",
            escape_state=traj.final_state,
            reason="offset_sensitivity",
        )
    return _build_profile(spec, traj, gap, params, epsilon)


def reduced_connection(params: ModelParams, offset: float = 1e-6,
                       ball_radius: float = 1e-6, max_span: float = 1e4,
                       tol: float = DEFAULT_TOL) -> FrontProfile:
    """Front of the regime's reduced flow (eps = 0 slow-manifold system).

    case1 connects the endemic I to 0 along the 1D manifold flow; case2
    and case3 shoot the planar reductions.  case3 requires the speed to
    be at or above the minimum-speed bound.
    """
    endemic, free = equilibria(params)
    if params.regime is Regime.CASE1_COMPARABLE_SMALL:
        source, target = np.array([endemic.I]), np.array([0.0])
    elif params.regime is Regime.CASE2_SLOW_INFECTED:
        source, target = np.array(endemic.si_plane), np.array(free.si_plane)
    else:
        c_min = case3_min_speed(params)
        if params.c < c_min:
            raise SpeedBelowBound(
                f"c = {params.c} is below the minimum front speed {c_min}"
            )
        source, target = np.array(endemic.iv_plane), np.array(free.iv_plane)
    spec = ShootSpec(
        field=planar_reduction_field(params),
        source=source,
        target=target,
        offset=offset,
        ball_radius=ball_radius,
        max_span=max_span,
        tol=tol,
    )
    return shoot_heteroclinic(spec, params, epsilon=None)


def full_system_connection(params: ModelParams, eps: float | None = None,
                           offset: float = 1e-6, ball_radius: float = 1e-6,
                           max_span: float = 1e4, tol: float = DEFAULT_TOL) -> FrontProfile:
    """Front of the full 3D eps > 0 system for the params' regime.

    Shoots from the exact endemic equilibrium along its one-dimensional
    unstable direction and records the maximum residual of the regime's
    slow manifold along the orbit (an O(eps) quantity).  Raises
    EigenstructureChanged when the saddle index differs from the eps = 0
    prediction of exactly one unstable direction.
    """
    eps = params.epsilon if eps is None else eps
    if not 0.0 < eps <= 0.1:
        raise ValueError(f"full-system shooting needs eps in (0, 0.1], got {eps}")
    if params.regime is Regime.CASE3_FAST_INFECTED:
        c_min = case3_min_speed(params)
        if params.c < c_min:
            raise SpeedBelowBound(
                f"c = {params.c} is below the minimum front speed {c_min}"
            )
    vf = traveling_wave_field(params, eps)
    endemic, free = equilibria(params)
    spec = ShootSpec(
        field=vf,
        source=np.array(endemic.reduced3),
        target=np.array(free.reduced3),
        offset=offset,
        ball_radius=ball_radius,
        max_span=max_span,
        tol=tol,
    )
    try:
        profile = shoot_heteroclinic(spec, params, epsilon=eps)
    except NotASaddle as exc:
        raise EigenstructureChanged(str(exc)) from exc
    manifold = REGIME_MANIFOLD[params.regime]
    residuals = [
        manifold_residual(manifold, state, params) for state in profile.native
    ]
    profile.max_manifold_residual = float(np.max(residuals))
    return profile
