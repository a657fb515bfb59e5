"""Method-of-lines simulation of the 1D reaction-diffusion SIS system.

Space is discretized with second-order central differences and
zero-flux (mirror-node) boundaries on a uniform grid; time stepping is
classic explicit RK4 under a CFL precondition that is enforced, never
worked around.  Because the two reaction terms cancel in S + I, the
trapezoid-rule total population is conserved to round-off, which the
conservation checks rely on; dispersion undershoots are therefore never
clipped in state, only in diagnostics.

The default frame is stationary (front speeds are measured, not
imposed).  A co-moving mode adds the frame advection c*u_z with
first-order upwind differences, pinning a front in place so its settled
profile can be compared against an ODE-constructed one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import CFLViolation, InterfaceLost, NoOverlap, NonFiniteField
from .model import ModelParams

DIFFUSION_CFL = 0.4  # dt <= DIFFUSION_CFL * dx^2 / max(d1, d2)
REACTION_CFL = 0.1  # dt <= REACTION_CFL / beta
MIN_DIFFUSION_LENGTHS = 50.0
BOUNDARY_CLEARANCE = 10  # interface must stay this many dx from the walls


@dataclass(frozen=True)
class Grid1D:
    """Uniform node-centered grid with n >= 100 nodes."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 100:
            raise ValueError(f"grid needs n >= 100 nodes, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass
class Field:
    """Nodal (S, I) densities at one time."""

    t: float
    S: np.ndarray
    I: np.ndarray

    def copy(self) -> "Field":
        return Field(self.t, self.S.copy(), self.I.copy())


@dataclass
class SimResult:
    """Snapshots plus the configuration that produced them."""

    grid: Grid1D
    params: ModelParams
    dt: float
    frame_speed: float
    fields: list[Field] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([f.t for f in self.fields])

    def total_population(self, snapshot: Field) -> float:
        """Trapezoid-rule integral of S + I (exactly conserved)."""
        return float(np.trapezoid(snapshot.S + snapshot.I, dx=self.grid.dx))


@dataclass
class SpeedEstimate:
    """Least-squares front speed from level-crossing positions."""

    c_hat: float
    r2: float
    level: float
    t_lo: float
    t_hi: float
    n_snapshots: int

    def summary(self) -> dict:
        return {
            "c_hat": self.c_hat,
            "r2": self.r2,
            "level": self.level,
            "window": [self.t_lo, self.t_hi],
            "n_snapshots": self.n_snapshots,
        }


def stable_dt(params: ModelParams, grid: Grid1D, safety: float = 0.9) -> float:
    """A time step satisfying both CFL bounds with a safety factor."""
    dmax = max(params.d1, params.d2)
    bound = REACTION_CFL / params.beta
    if dmax > 0.0:
        bound = min(bound, DIFFUSION_CFL * grid.dx ** 2 / dmax)
    return safety * bound


def _validate_dt(params: ModelParams, grid: Grid1D, dt: float) -> None:
    problems = []
    dmax = max(params.d1, params.d2)
    if dmax > 0.0:
        diff_bound = DIFFUSION_CFL * grid.dx ** 2 / dmax
        if dt > diff_bound:
            problems.append(f"dt={dt} exceeds diffusion bound {diff_bound:.6g}")
    react_bound = REACTION_CFL / params.beta
    if dt > react_bound:
        problems.append(f"dt={dt} exceeds reaction bound {react_bound:.6g}")
    if problems:
        raise CFLViolation("; ".join(problems))


def initial_front(grid: Grid1D, params: ModelParams, interface_x: float | None = None,
                  width: float | None = None) -> Field:
    """Smoothed-step data: endemic values left, disease-free right.

    Each component follows the same tanh ramp, so I crosses half its
    endemic value exactly at interface_x.  The interface defaults to a
    quarter of the way into the domain, leaving a rightward front its
    runway.
    """
    if interface_x is None:
        interface_x = grid.x_min + 0.25 * grid.length
    if width is None:
        width = max(20.0 * grid.dx, 1.0)
    if not grid.x_min < interface_x < grid.x_max:
        raise ValueError(f"interface_x={interface_x} is outside the domain")
    if width <= 2.0 * grid.dx:
        raise ValueError(f"width must exceed 2*dx = {2 * grid.dx:.6g}, got {width}")
    x = grid.x
    ramp = 0.5 * (1.0 - np.tanh(2.0 * (x - interface_x) / width))  # 1 left, 0 right
    sa, ia = params.susceptible_endemic, params.infected_endemic
    S = 1.0 + (sa - 1.0) * ramp
    I = ia * ramp
    return Field(0.0, S, I)


def simulate(params: ModelParams, grid: Grid1D, init: Field, dt: float, horizon: float,
             n_snapshots: int = 51, frame_speed: float = 0.0) -> SimResult:
    """Advance the discretized system to the horizon, keeping snapshots.

    Snapshots (including the initial state) are taken at approximately
    evenly spaced step counts.  Raises CFLViolation before stepping and
    NonFiniteField the moment a non-finite value appears.
    """
    _validate_dt(params, grid, dt)
    min_length = MIN_DIFFUSION_LENGTHS * math.sqrt(max(params.d1, params.d2) / params.beta)
    if grid.length < min_length:
        raise ValueError(
            f"domain length {grid.length} is below {min_length:.6g} "
            f"({MIN_DIFFUSION_LENGTHS:g} diffusion lengths of the faster species)"
        )
    if not (np.all(np.isfinite(init.S)) and np.all(np.isfinite(init.I))):
        raise NonFiniteField("initial data contains non-finite values")
    if init.S.shape != (grid.n,) or init.I.shape != (grid.n,):
        raise ValueError("initial data does not match the grid")

    n_steps = max(1, int(round(horizon / dt)))
    snap_at = sorted(set(np.linspace(0, n_steps, max(2, n_snapshots)).round().astype(int)))
    S = init.S.astype(float).copy()
    I = init.I.astype(float).copy()
    result = SimResult(grid=grid, params=params, dt=dt, frame_speed=frame_speed)
    result.fields.append(Field(0.0, S.copy(), I.copy()))

    done = 0
    for target in snap_at:
        if target == 0:
            continue
        chunk = target - done
        bad = kernels.advance_chunk(
            S, I, chunk, dt, grid.dx, params.d1, params.d2,
            params.beta, params.gamma, params.sigma, frame_speed,
        )
        if bad:
            raise NonFiniteField(
                f"field blew up at t ~ {(done + bad) * dt:.6g} (step {done + bad})"
            )
        done = target
        result.fields.append(Field(done * dt, S.copy(), I.copy()))
    return result


def profile_to_field(profile, grid: Grid1D, interface_x: float,
                     tail_decay: float | None = None) -> Field:
    """Render an ODE front profile onto the grid as initial data.

    The profile is translated so its half-level crossing (z = 0 by
    construction) sits at interface_x.  Beyond the sampled range the
    end values extend constantly unless tail_decay is given, in which
    case the leading edge continues its exponential approach to the
    disease-free state at that rate (the slow eigenvalue magnitude);
    a constant positive infected plateau ahead of the front would
    otherwise self-ignite under the reaction.
    """
    finite = np.isfinite(profile.z)
    z = profile.z[finite] + interface_x
    S = np.interp(grid.x, z, profile.S[finite])
    I = np.interp(grid.x, z, profile.I[finite])
    if tail_decay is not None:
        if tail_decay <= 0.0:
            raise ValueError(f"tail_decay must be > 0, got {tail_decay}")
        ahead = grid.x > z[-1]
        factor = np.exp(-tail_decay * (grid.x[ahead] - z[-1]))
        S[ahead] = 1.0 - (1.0 - profile.S[finite][-1]) * factor
        I[ahead] = profile.I[finite][-1] * factor
    return Field(0.0, S, I)


# ---- front tracking ----------------------------------------------------------

def interface_position(snapshot: Field, grid: Grid1D, level_value: float) -> float | None:
    """x where I last crosses level_value going down, or None.

    Uses the rightmost downward crossing (robust to overshoot humps
    behind the front) with linear interpolation between nodes.
    """
    I = snapshot.I
    above = I >= level_value
    if above.all() or not above.any():
        return None
    x = grid.x
    for k in range(grid.n - 2, -1, -1):
        if above[k] and not above[k + 1]:
            frac = (I[k] - level_value) / (I[k] - I[k + 1])
            return float(x[k] + frac * (x[k + 1] - x[k]))
    return None


def measure_front_speed(result: SimResult, level: float = 0.5,
                        window: float = 0.5) -> SpeedEstimate:
    """Fit the front speed from level-crossing positions over time.

    level is a fraction of the endemic infected density.  Only
    snapshots whose interface stays at least 10 dx clear of both
    boundaries are usable; the fit runs over the trailing ``window``
    fraction of the usable time range and needs at least 10 snapshots
    there.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be a fraction in (0, 1), got {level}")
    if not 0.0 < window <= 1.0:
        raise ValueError(f"window must be a fraction in (0, 1], got {window}")
    grid = result.grid
    level_value = level * result.params.infected_endemic
    clearance = BOUNDARY_CLEARANCE * grid.dx
    usable: list[tuple[float, float]] = []
    for snap in result.fields:
        pos = interface_position(snap, grid, level_value)
        if pos is None:
            continue
        if pos - grid.x_min < clearance or grid.x_max - pos < clearance:
            continue
        usable.append((snap.t, pos))
    if not usable:
        raise InterfaceLost("no snapshot carries a trackable front interface")
    t_all = np.array([t for t, _ in usable])
    x_all = np.array([x for _, x in usable])
    t_hi = t_all[-1]
    t_lo = t_hi - window * (t_hi - t_all[0])
    mask = t_all >= t_lo
    if mask.sum() < 10:
        raise InterfaceLost(
            f"only {int(mask.sum())} usable snapshots in the fit window (need 10)"
        )
    t_fit = t_all[mask]
    x_fit = x_all[mask]
    slope, intercept = np.polyfit(t_fit, x_fit, 1)
    pred = slope * t_fit + intercept
    ss_res = float(np.sum((x_fit - pred) ** 2))
    ss_tot = float(np.sum((x_fit - x_fit.mean()) ** 2))
    r2 = 1.0 if ss_tot < 1e-30 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return SpeedEstimate(
        c_hat=float(slope),
        r2=r2,
        level=level,
        t_lo=float(t_fit[0]),
        t_hi=float(t_fit[-1]),
        n_snapshots=int(mask.sum()),
    )


def compare_profile(snapshot: Field, grid: Grid1D, profile, params: ModelParams,
                    lo: float = 0.05, hi: float = 0.95) -> float:
    """Sup-norm (S, I) discrepancy between a snapshot and an ODE profile.

    Both are aligned at their half-endemic-level crossings, the profile
    is resampled onto the grid by linear interpolation, and the maximum
    component-wise difference is taken over the nodes whose PDE
    infected density lies in the front window
    [lo * I_endemic, hi * I_endemic].
    """
    ia = params.infected_endemic
    x_star = interface_position(snapshot, grid, 0.5 * ia)
    if x_star is None:
        raise NoOverlap("snapshot has no half-level front interface")
    finite = np.isfinite(profile.z)
    z = profile.z[finite]
    S_ode = profile.S[finite]
    I_ode = profile.I[finite]
    if len(z) < 2:
        raise NoOverlap("profile has too few finite samples")
    # profiles are recentered to cross half level at z = 0
    z_shifted = z + x_star
    x = grid.x
    window = (snapshot.I >= lo * ia) & (snapshot.I <= hi * ia)
    if not window.any():
        raise NoOverlap("snapshot infected density never enters the front window")
    if x[window].min() < z_shifted[0] or x[window].max() > z_shifted[-1]:
        raise NoOverlap("profile does not cover the snapshot's front window")
    S_interp = np.interp(x, z_shifted, S_ode)
    I_interp = np.interp(x, z_shifted, I_ode)
    diff_s = np.abs(snapshot.S - S_interp)[window]
    diff_i = np.abs(snapshot.I - I_interp)[window]
    return float(max(diff_s.max(), diff_i.max()))
