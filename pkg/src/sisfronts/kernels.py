"""Vector-field kernels and PDE stepping kernels.

Every ODE right-hand side in the package funnels through one dispatch
kernel ``ode_rhs(y, p)`` where ``p`` is a packed float64 parameter
vector with the system id in ``p[0]``.  This keeps a single source of
truth for each formula and lets the adaptive integrator driver run the
same code jitted or plain.

State conventions (z is the wave variable, U = S_z, V = I_z):

  full 4D        (S, U, I, V)   both diffusivities positive
  reduced 3D     (S, I, V)      conserved-quantity elimination of U
  stretched 3D   (S, I, V)      epsilon-regular fast-variable form
  case1 flow     (I,)           1D flow on the case-1 critical manifold
  case2 planar   (S, I)         slow-manifold reduction, d2 -> 0
  case3 planar   (I, V)         slow-manifold reduction, d1 -> 0
  sigma=0 planar (I, V)         Burgers-FKPP traveling-wave form
  rescaled       (S, I)         case-2 system in eta-time, delta = 1/c^2

The PDE kernels advance the method-of-lines discretization of the
reaction-diffusion system with zero-flux (mirror-node) boundaries and
classic RK4 in time.  The njit loop version and the vectorized numpy
version are twins; tests assert their agreement.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._accel import NUMBA_ENABLED, maybe_jit
from .model import ModelParams, Regime

# ---- system ids ---------------------------------------------------------

SYS_FULL4 = 0
SYS_REDUCED3 = 1
SYS_STRETCHED3 = 2
SYS_CASE1_FLOW = 3
SYS_CASE2_PLANAR = 4
SYS_CASE3_PLANAR = 5
SYS_BURGERS = 6
SYS_RESCALED = 7

_NPARAMS = 10  # p[0]=sys id, p[1..4]=beta,gamma,sigma,c, p[5..9]=extras


# ---- leaf kernels --------------------------------------------------------
# p[1]=beta p[2]=gamma p[3]=sigma p[4]=c throughout.

@maybe_jit
def _net_infection(S, I, beta, gamma, sigma):
    """beta*S*I/(1+sigma*S) - gamma*I, the flux from S to I."""
    return beta * S * I / (1.0 + sigma * S) - gamma * I


@maybe_jit
def _full4(y, p):
    beta, gamma, sigma, c = p[1], p[2], p[3], p[4]
    d1, d2 = p[5], p[6]
    S, U, I, V = y[0], y[1], y[2], y[3]
    w = _net_infection(S, I, beta, gamma, sigma)
    out = np.empty(4)
    out[0] = U
    out[1] = (-c * U + w) / d1
    out[2] = V
    out[3] = (-c * V - w) / d2
    return out


@maybe_jit
def _reduced3(y, p):
    beta, gamma, sigma, c = p[1], p[2], p[3], p[4]
    d1, d2 = p[5], p[6]
    S, I, V = y[0], y[1], y[2]
    w = _net_infection(S, I, beta, gamma, sigma)
    out = np.empty(3)
    out[0] = (-d2 * V - c * (I + S - 1.0)) / d1
    out[1] = V
    out[2] = (-c * V - w) / d2
    return out


@maybe_jit
def _stretched3(y, p):
    # epsilon-regular time-stretched form: q1 = eps/d1, q2 = eps/d2 are
    # evaluated per regime outside the kernel so eps = 0 is exact.
    beta, gamma, sigma, c = p[1], p[2], p[3], p[4]
    q1, q2, d2, eps = p[5], p[6], p[7], p[8]
    S, I, V = y[0], y[1], y[2]
    w = _net_infection(S, I, beta, gamma, sigma)
    out = np.empty(3)
    out[0] = q1 * (-d2 * V - c * (I + S - 1.0))
    out[1] = eps * V
    out[2] = q2 * (-c * V - w)
    return out


@maybe_jit
def _case1_flow(y, p):
    beta, gamma, sigma, c = p[1], p[2], p[3], p[4]
    I = y[0]
    out = np.empty(1)
    out[0] = (
        I
        * (gamma - (beta - sigma * gamma) * (1.0 - I))
        / (c * beta * (1.0 + sigma * (1.0 - I)))
    )
    return out


@maybe_jit
def _case2_planar(y, p):
    beta, gamma, sigma, c = p[1], p[2], p[3], p[4]
    S, I = y[0], y[1]
    out = np.empty(2)
    out[0] = -c * (I + S - 1.0)
    out[1] = -(beta / c) * I * (S / (1.0 + sigma * S) - gamma / beta)
    return out


@maybe_jit
def _case3_planar(y, p):
    beta, gamma, sigma, c = p[1], p[2], p[3], p[4]
    I, V = y[0], y[1]
    Sm = 1.0 - I - V / c
    out = np.empty(2)
    out[0] = V
    out[1] = -c * V - beta * I * (Sm / (1.0 + sigma * Sm) - gamma / beta)
    return out


@maybe_jit
def _burgers(y, p):
    beta, gamma, c = p[1], p[2], p[4]
    I, V = y[0], y[1]
    out = np.empty(2)
    out[0] = V
    out[1] = (beta * I / c - c) * V - beta * I * (1.0 - gamma / beta - I)
    return out


@maybe_jit
def _rescaled(y, p):
    beta, gamma, sigma = p[1], p[2], p[3]
    delta = p[5]
    S, I = y[0], y[1]
    out = np.empty(2)
    out[0] = 1.0 - I - S
    out[1] = -delta * beta * I * (S / (1.0 + sigma * S) - gamma / beta)
    return out


@maybe_jit
def ode_rhs(y, p):
    """Dispatch kernel; p[0] selects the system."""
    sid = int(p[0])
    if sid == SYS_REDUCED3:
        return _reduced3(y, p)
    elif sid == SYS_CASE2_PLANAR:
        return _case2_planar(y, p)
    elif sid == SYS_CASE3_PLANAR:
        return _case3_planar(y, p)
    elif sid == SYS_STRETCHED3:
        return _stretched3(y, p)
    elif sid == SYS_FULL4:
        return _full4(y, p)
    elif sid == SYS_CASE1_FLOW:
        return _case1_flow(y, p)
    elif sid == SYS_BURGERS:
        return _burgers(y, p)
    else:
        return _rescaled(y, p)


# ---- packing and the public field object ---------------------------------

def _base_p(sys_id: int, params: ModelParams) -> np.ndarray:
    p = np.zeros(_NPARAMS)
    p[0] = float(sys_id)
    p[1] = params.beta
    p[2] = params.gamma
    p[3] = params.sigma
    p[4] = params.c
    return p


@dataclass(frozen=True)
class VectorField:
    """A packed, integrator-ready autonomous vector field.

    Calling the object evaluates the field through the dispatch kernel;
    the integrator fast path uses ``sys_id``/``p`` directly.
    """

    sys_id: int
    p: np.ndarray
    names: tuple[str, ...]
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def dim(self) -> int:
        return len(self.names)

    def __call__(self, y, p=None):
        arr = np.asarray(y, dtype=float)
        return ode_rhs(arr, self.p)


def pack_full4(params: ModelParams, d1=None, d2=None) -> VectorField:
    p = _base_p(SYS_FULL4, params)
    p[5] = params.d1 if d1 is None else d1
    p[6] = params.d2 if d2 is None else d2
    return VectorField(SYS_FULL4, p, ("S", "U", "I", "V"))


def pack_reduced3(params: ModelParams, d1=None, d2=None) -> VectorField:
    p = _base_p(SYS_REDUCED3, params)
    p[5] = params.d1 if d1 is None else d1
    p[6] = params.d2 if d2 is None else d2
    return VectorField(SYS_REDUCED3, p, ("S", "I", "V"))


def pack_stretched3(params: ModelParams, eps: float) -> VectorField:
    # q1 = eps/d1 and q2 = eps/d2 taken in the eps -> 0 limit per regime,
    # so the eps = 0 fast-fiber systems are reproduced exactly.
    if params.regime is Regime.CASE1_COMPARABLE_SMALL:
        q1, q2, d2 = 1.0 / params.alpha, 1.0, eps
    elif params.regime is Regime.CASE2_SLOW_INFECTED:
        q1, q2, d2 = eps, 1.0, eps
    else:
        q1, q2, d2 = 1.0, eps, 1.0
    p = _base_p(SYS_STRETCHED3, params)
    p[5], p[6], p[7], p[8] = q1, q2, d2, eps
    return VectorField(SYS_STRETCHED3, p, ("S", "I", "V"))


def pack_case1_flow(params: ModelParams) -> VectorField:
    return VectorField(SYS_CASE1_FLOW, _base_p(SYS_CASE1_FLOW, params), ("I",))


def pack_case2_planar(params: ModelParams) -> VectorField:
    return VectorField(SYS_CASE2_PLANAR, _base_p(SYS_CASE2_PLANAR, params), ("S", "I"))


def pack_case3_planar(params: ModelParams) -> VectorField:
    return VectorField(SYS_CASE3_PLANAR, _base_p(SYS_CASE3_PLANAR, params), ("I", "V"))


def pack_burgers(params: ModelParams) -> VectorField:
    return VectorField(SYS_BURGERS, _base_p(SYS_BURGERS, params), ("I", "V"))


def pack_rescaled(params: ModelParams, delta: float) -> VectorField:
    p = _base_p(SYS_RESCALED, params)
    p[5] = delta
    return VectorField(SYS_RESCALED, p, ("S", "I"))


# ---- PDE kernels ----------------------------------------------------------

@maybe_jit
def _pde_rhs_loop(S, I, dS, dI, inv_dx, inv_dx2, d1, d2, beta, gamma, sigma, cf):
    n = S.shape[0]
    for i in range(n):
        il = 1 if i == 0 else i - 1
        ir = n - 2 if i == n - 1 else i + 1
        lap_s = (S[il] - 2.0 * S[i] + S[ir]) * inv_dx2
        lap_i = (I[il] - 2.0 * I[i] + I[ir]) * inv_dx2
        w = beta * S[i] * I[i] / (1.0 + sigma * S[i]) - gamma * I[i]
        dS[i] = d1 * lap_s - w
        dI[i] = d2 * lap_i + w
    if cf != 0.0:
        # co-moving frame: +cf*u_z transports leftward, upwind side is +z
        for i in range(n - 1):
            dS[i] += cf * (S[i + 1] - S[i]) * inv_dx
            dI[i] += cf * (I[i + 1] - I[i]) * inv_dx


@maybe_jit
def advance_chunk_loop(S, I, nsteps, dt, dx, d1, d2, beta, gamma, sigma, cf):
    """Advance (S, I) in place by nsteps RK4 steps; 0 on success.

    Returns the 1-based step index at which a non-finite value was
    first detected, 0 otherwise.
    """
    n = S.shape[0]
    inv_dx = 1.0 / dx
    inv_dx2 = inv_dx * inv_dx
    k1s = np.empty(n)
    k1i = np.empty(n)
    k2s = np.empty(n)
    k2i = np.empty(n)
    k3s = np.empty(n)
    k3i = np.empty(n)
    k4s = np.empty(n)
    k4i = np.empty(n)
    ts = np.empty(n)
    ti = np.empty(n)
    for step in range(nsteps):
        _pde_rhs_loop(S, I, k1s, k1i, inv_dx, inv_dx2, d1, d2, beta, gamma, sigma, cf)
        for i in range(n):
            ts[i] = S[i] + 0.5 * dt * k1s[i]
            ti[i] = I[i] + 0.5 * dt * k1i[i]
        _pde_rhs_loop(ts, ti, k2s, k2i, inv_dx, inv_dx2, d1, d2, beta, gamma, sigma, cf)
        for i in range(n):
            ts[i] = S[i] + 0.5 * dt * k2s[i]
            ti[i] = I[i] + 0.5 * dt * k2i[i]
        _pde_rhs_loop(ts, ti, k3s, k3i, inv_dx, inv_dx2, d1, d2, beta, gamma, sigma, cf)
        for i in range(n):
            ts[i] = S[i] + dt * k3s[i]
            ti[i] = I[i] + dt * k3i[i]
        _pde_rhs_loop(ts, ti, k4s, k4i, inv_dx, inv_dx2, d1, d2, beta, gamma, sigma, cf)
        sixth = dt / 6.0
        ok = True
        for i in range(n):
            S[i] += sixth * (k1s[i] + 2.0 * k2s[i] + 2.0 * k3s[i] + k4s[i])
            I[i] += sixth * (k1i[i] + 2.0 * k2i[i] + 2.0 * k3i[i] + k4i[i])
            if not (np.isfinite(S[i]) and np.isfinite(I[i])):
                ok = False
        if not ok:
            return step + 1
    return 0


def _pde_rhs_numpy(S, I, inv_dx, inv_dx2, d1, d2, beta, gamma, sigma, cf):
    lap_s = np.empty_like(S)
    lap_i = np.empty_like(I)
    lap_s[1:-1] = S[:-2] - 2.0 * S[1:-1] + S[2:]
    lap_i[1:-1] = I[:-2] - 2.0 * I[1:-1] + I[2:]
    lap_s[0] = 2.0 * (S[1] - S[0])
    lap_i[0] = 2.0 * (I[1] - I[0])
    lap_s[-1] = 2.0 * (S[-2] - S[-1])
    lap_i[-1] = 2.0 * (I[-2] - I[-1])
    w = beta * S * I / (1.0 + sigma * S) - gamma * I
    dS = d1 * inv_dx2 * lap_s - w
    dI = d2 * inv_dx2 * lap_i + w
    if cf != 0.0:
        dS[:-1] += cf * inv_dx * (S[1:] - S[:-1])
        dI[:-1] += cf * inv_dx * (I[1:] - I[:-1])
    return dS, dI


def advance_chunk_numpy(S, I, nsteps, dt, dx, d1, d2, beta, gamma, sigma, cf):
    """Vectorized twin of :func:`advance_chunk_loop`."""
    inv_dx = 1.0 / dx
    inv_dx2 = inv_dx * inv_dx
    args = (inv_dx, inv_dx2, d1, d2, beta, gamma, sigma, cf)
    for step in range(nsteps):
        k1s, k1i = _pde_rhs_numpy(S, I, *args)
        k2s, k2i = _pde_rhs_numpy(S + 0.5 * dt * k1s, I + 0.5 * dt * k1i, *args)
        k3s, k3i = _pde_rhs_numpy(S + 0.5 * dt * k2s, I + 0.5 * dt * k2i, *args)
        k4s, k4i = _pde_rhs_numpy(S + dt * k3s, I + dt * k3i, *args)
        S += (dt / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)
        I += (dt / 6.0) * (k1i + 2.0 * k2i + 2.0 * k3i + k4i)
        if not (np.isfinite(S).all() and np.isfinite(I).all()):
            return step + 1
    return 0


advance_chunk = advance_chunk_loop if NUMBA_ENABLED else advance_chunk_numpy
