"""Adaptive embedded Runge-Kutta integration with event detection.

An explicit Dormand-Prince 5(4) pair drives every trajectory in the
package: local error is controlled per step against tol*(1+|y|)
component-wise, events (entering a ball around a target, exceeding a
norm bound) are localized by bisection on the accepted step, and all
accepted steps are recorded.

The driver source is instantiated twice from one factory: a jitted
chain used when the right-hand side is one of the package's packed
vector fields, and a plain chain for arbitrary Python callables or the
SISFRONTS_NUMBA=0 fallback.  The method is explicit only; stiffness
beyond its stability range surfaces as StepUnderflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from ._accel import NUMBA_ENABLED
from .errors import NonFiniteState, SisFrontsError, StepUnderflow
from .kernels import VectorField

DEFAULT_TOL = 1e-10
_TOL_RANGE = (1e-13, 1e-3)
_MAX_STEPS = 20_000_000

# driver status codes
_ST_SPAN_END = 0
_ST_ENTER_BALL = 1
_ST_EXCEED_NORM = 2
_ST_UNDERFLOW = 3
_ST_NONFINITE = 4
_ST_MAXSTEPS = 5


def _make_driver(jit: bool):
    """Instantiate the Dormand-Prince driver chain, optionally jitted."""
    if jit:
        import numba

        deco = numba.njit(cache=False)  # rhs argument defeats disk caching
    else:
        def deco(f):
            return f

    # Dormand-Prince 5(4) tableau (FSAL pair); E* = b5 - b4.
    A21 = 1.0 / 5.0
    A31, A32 = 3.0 / 40.0, 9.0 / 40.0
    A41, A42, A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
    A51, A52, A53, A54 = (
        19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0,
    )
    A61, A62, A63, A64, A65 = (
        9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0,
    )
    B1, B3, B4, B5, B6 = (
        35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0,
    )
    E1, E3, E4, E5, E6, E7 = (
        71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
        -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0,
    )

    @deco
    def dp_step(rhs, p, y, h, k1):
        k2 = rhs(y + h * (A21 * k1), p)
        k3 = rhs(y + h * (A31 * k1 + A32 * k2), p)
        k4 = rhs(y + h * (A41 * k1 + A42 * k2 + A43 * k3), p)
        k5 = rhs(y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4), p)
        k6 = rhs(y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5), p)
        y5 = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
        k7 = rhs(y5, p)
        err = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7)
        return y5, k7, err

    @deco
    def event_hit(y, mode, center, radius, bound):
        # mode 1: inside the target ball; mode 2: norm bound exceeded
        acc = 0.0
        if mode == 1:
            for i in range(y.shape[0]):
                d = y[i] - center[i]
                acc += d * d
            return acc <= radius * radius
        for i in range(y.shape[0]):
            acc += y[i] * y[i]
        return acc >= bound * bound

    @deco
    def locate_event(rhs, p, y, k1, h_hi, y_hi, mode, center, radius, bound, t_abs):
        # first h in (0, h_hi] whose landing state satisfies the predicate,
        # bisected to 1e-10 relative accuracy on the step interval
        lo = 0.0
        hi = h_hi
        tol_loc = 1e-10 * (1.0 + abs(t_abs) + h_hi)
        while hi - lo > tol_loc:
            mid = 0.5 * (lo + hi)
            y_mid, _, _ = dp_step(rhs, p, y, mid, k1)
            if event_hit(y_mid, mode, center, radius, bound):
                hi = mid
                y_hi = y_mid
            else:
                lo = mid
        return hi, y_hi

    @deco
    def drive(rhs, p, y0, span, tol, h0, ball_center, ball_radius, norm_bound, max_steps):
        n = y0.shape[0]
        cap = 512
        ts = np.empty(cap)
        ys = np.empty((cap, n))
        ts[0] = 0.0
        for i in range(n):
            ys[0, i] = y0[i]
        m = 1

        t = 0.0
        y = y0.copy()
        k1 = rhs(y, p)
        h = h0
        n_acc = 0
        n_rej = 0
        status = _ST_SPAN_END
        rejected_nonfinite = False

        while t < span:
            if h > span - t:
                h = span - t
            if h <= 1e-14 * span:
                status = _ST_NONFINITE if rejected_nonfinite else _ST_UNDERFLOW
                break
            if n_acc + n_rej >= max_steps:
                status = _ST_MAXSTEPS
                break

            y5, k7, err = dp_step(rhs, p, y, h, k1)

            finite = True
            emax = 0.0
            for i in range(n):
                ai = abs(y5[i])
                if not np.isfinite(ai):
                    finite = False
                    break
                a0 = abs(y[i])
                if ai > a0:
                    a0 = ai
                e = abs(err[i]) / (tol * (1.0 + a0))
                if e > emax:
                    emax = e
            if not finite:
                n_rej += 1
                rejected_nonfinite = True
                h *= 0.25
                continue
            rejected_nonfinite = False
            if emax > 1.0:
                n_rej += 1
                fac = 0.9 * emax ** -0.2
                if fac < 0.2:
                    fac = 0.2
                h *= fac
                continue

            t_new = t + h
            hit_ball = ball_radius > 0.0 and event_hit(y5, 1, ball_center, ball_radius, 0.0)
            hit_norm = (not hit_ball) and norm_bound > 0.0 and event_hit(
                y5, 2, ball_center, 0.0, norm_bound
            )
            if hit_ball or hit_norm:
                mode = 1 if hit_ball else 2
                h_ev, y_ev = locate_event(
                    rhs, p, y, k1, h, y5, mode, ball_center, ball_radius, norm_bound, t
                )
                t_new = t + h_ev
                y5 = y_ev
                status = _ST_ENTER_BALL if hit_ball else _ST_EXCEED_NORM

            if m == cap:
                cap *= 2
                ts_new = np.empty(cap)
                ys_new = np.empty((cap, n))
                ts_new[:m] = ts[:m]
                ys_new[:m] = ys[:m]
                ts = ts_new
                ys = ys_new
            ts[m] = t_new
            for i in range(n):
                ys[m, i] = y5[i]
            m += 1
            n_acc += 1

            if hit_ball or hit_norm:
                break

            t = t_new
            y = y5
            k1 = k7
            if emax < 1e-30:
                fac = 5.0
            else:
                fac = 0.9 * emax ** -0.2
                if fac > 5.0:
                    fac = 5.0
                if fac < 0.2:
                    fac = 0.2
            h *= fac

        return ts, ys, m, n_acc, n_rej, status

    return drive


_drive = _make_driver(False)
_drive_jit = _make_driver(True) if NUMBA_ENABLED else None


# ---- public surface --------------------------------------------------------

@dataclass
class TrajectoryMeta:
    n_accepted: int
    n_rejected: int
    tol: float
    termination_reason: str


@dataclass
class Trajectory:
    """Dense record of accepted integration steps.

    times are strictly increasing and states holds one row per time;
    identical inputs reproduce identical trajectories bit for bit
    within one build.
    """

    times: np.ndarray
    states: np.ndarray
    names: tuple[str, ...]
    meta: TrajectoryMeta

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path) -> None:
        from ._io import write_csv

        cols = [self.times] + [self.states[:, j] for j in range(self.states.shape[1])]
        write_csv(path, ("t", *self.names), cols)


@dataclass(frozen=True)
class EventSpec:
    """Termination predicate for :func:`integrate_until`.

    span acts as the max-span guard in every case; the ball and norm
    triggers are optional.  Reaching span without a trigger is the
    distinguished outcome "span_exhausted", not an error.
    """

    span: float
    ball_center: np.ndarray | None = None
    ball_radius: float = 0.0
    norm_bound: float = 0.0

    def __post_init__(self):
        if not self.span > 0.0:
            raise ValueError(f"event span must be > 0, got {self.span}")
        if self.ball_center is not None and not self.ball_radius > 0.0:
            raise ValueError("ball_radius must be > 0 when a ball center is given")
        if self.norm_bound < 0.0:
            raise ValueError("norm_bound must be >= 0")

    @classmethod
    def enter_ball(cls, center, radius, span) -> "EventSpec":
        return cls(span=span, ball_center=np.asarray(center, dtype=float), ball_radius=radius)

    @classmethod
    def exceed_norm(cls, bound, span) -> "EventSpec":
        return cls(span=span, norm_bound=bound)

    @classmethod
    def max_span(cls, span) -> "EventSpec":
        return cls(span=span)


def _run(rhs, y0, span, tol, h0, ball_center, ball_radius, norm_bound, params):
    if not span > 0.0:
        raise ValueError(f"span must be > 0, got {span}")
    if not (_TOL_RANGE[0] <= tol <= _TOL_RANGE[1]):
        raise ValueError(f"tol must lie in [{_TOL_RANGE[0]}, {_TOL_RANGE[1]}], got {tol}")
    y0 = np.asarray(y0, dtype=float).copy()
    if y0.ndim != 1 or y0.size == 0:
        raise ValueError("y0 must be a non-empty 1D state")
    if not np.all(np.isfinite(y0)):
        raise NonFiniteState(f"initial state is not finite: {y0}")

    if isinstance(rhs, VectorField):
        fn, p, names, fast = kernels.ode_rhs, rhs.p, rhs.names, True
    else:
        fn = rhs
        p = np.asarray(params, dtype=float) if params is not None else np.empty(0)
        names, fast = None, False

    center = np.zeros(y0.size) if ball_center is None else np.asarray(ball_center, dtype=float)
    if ball_radius > 0.0:
        if center.shape != y0.shape:
            raise ValueError("ball center dimension does not match the state")
        if float(np.sqrt(np.sum((y0 - center) ** 2))) <= ball_radius:
            raise ValueError("initial state already inside the target ball")
    if h0 is None:
        h0 = span / 1000.0

    driver = _drive_jit if (fast and NUMBA_ENABLED) else _drive
    ts, ys, m, n_acc, n_rej, status = driver(
        fn, p, y0, float(span), float(tol), float(h0), center,
        float(ball_radius), float(norm_bound), _MAX_STEPS,
    )
    if status == _ST_UNDERFLOW:
        raise StepUnderflow(f"step size underflow at t={ts[m - 1]:.6g} (span {span:.6g})")
    if status == _ST_NONFINITE:
        raise NonFiniteState(f"vector field produced non-finite values near t={ts[m - 1]:.6g}")
    if status == _ST_MAXSTEPS:
        raise SisFrontsError(f"step budget {_MAX_STEPS} exceeded")
    return ts[:m].copy(), ys[:m].copy(), n_acc, n_rej, status, names


def integrate(rhs, y0, span, tol=DEFAULT_TOL, params=None, h0=None, names=None) -> Trajectory:
    """Integrate an autonomous field over [0, span].

    rhs is either a packed :class:`~sisfronts.kernels.VectorField`
    (jitted fast path) or any callable ``f(y, p) -> dy`` paired with
    ``params``.  The initial step defaults to span/1000.
    """
    ts, ys, n_acc, n_rej, _, auto_names = _run(rhs, y0, span, tol, h0, None, 0.0, 0.0, params)
    names = names or auto_names or tuple(f"x{i}" for i in range(ys.shape[1]))
    return Trajectory(ts, ys, tuple(names), TrajectoryMeta(n_acc, n_rej, tol, "completed"))


def integrate_until(rhs, y0, event: EventSpec, tol=DEFAULT_TOL, params=None, h0=None,
                    names=None) -> Trajectory:
    """Integrate until the event triggers or the span is exhausted.

    meta.termination_reason records which predicate fired: one of
    "enter_ball", "exceed_norm", "span_exhausted".
    """
    ts, ys, n_acc, n_rej, status, auto_names = _run(
        rhs, y0, event.span, tol, h0, event.ball_center, event.ball_radius,
        event.norm_bound, params,
    )
    reason = {
        _ST_ENTER_BALL: "enter_ball",
        _ST_EXCEED_NORM: "exceed_norm",
        _ST_SPAN_END: "span_exhausted",
    }[status]
    names = names or auto_names or tuple(f"x{i}" for i in range(ys.shape[1]))
    return Trajectory(ts, ys, tuple(names), TrajectoryMeta(n_acc, n_rej, tol, reason))
