"""Regime-specific reductions: critical manifolds, reduced flows,
closed-form linearizations, speed bounds, and the sigma = 0
Burgers-FKPP specialization.

Each diffusion regime collapses the 3D traveling-wave system onto a
slow manifold:

  case1  both diffusivities O(eps): the critical set is the curve
         {I + S = 1, c*V = gamma*I - beta*S*I/(1+sigma*S)} carrying a
         1D flow in I.
  case2  d2 = eps: the surface {V = -(beta/c)(S/(1+sigma*S) -
         gamma/beta) I} carrying a planar flow in (S, I).
  case3  d1 = eps: the plane {S = 1 - I - V/c} carrying a planar flow
         in (I, V); fronts exist only above a minimum speed.

For sigma = 0 the case-3 flow is the traveling-wave form of the
Burgers-FKPP equation, with the classical piecewise minimum-speed law
of its unit-rate normal form.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import SigmaNotZero, SingularDenominator, SpeedBelowBound
from .kernels import VectorField
from .model import ModelParams, Regime, _derived_diffusivities


# ---- case 1: comparable small diffusivities --------------------------------

def case1_reduced_flow(I: float, params: ModelParams) -> float:
    """dI/dz of the 1D flow on the case-1 critical manifold.

    Zeros exactly at I = 0 (stable) and the endemic I (unstable);
    negative in between, which drives the endemic-to-disease-free
    connection.
    """
    return float(kernels.pack_case1_flow(params)(np.array([I]))[0])


def case1_manifold_point(I: float, params: ModelParams) -> np.ndarray:
    """(S, I, V) on the case-1 critical manifold at a given I.

    S = 1 - I and V balances the infection flux against the advection,
    so both defining relations vanish identically.
    """
    S = 1.0 - I
    V = (
        -params.beta * I * (1.0 - I) / (params.c * (1.0 + params.sigma * (1.0 - I)))
        + params.gamma * I / params.c
    )
    return np.array([S, I, V])


def case1_fast_rhs(state, params: ModelParams, eps: float) -> np.ndarray:
    """Stretched-variable case-1 field at explicit eps >= 0.

    At eps = 0 this is the fast-fiber system whose equilibrium set is
    the critical manifold.
    """
    vf = stretched_field(params, eps, regime=Regime.CASE1_COMPARABLE_SMALL)
    return vf(state)


# ---- case 2: slow infected ---------------------------------------------------

def case2_reduced_rhs(S: float, I: float, params: ModelParams) -> tuple[float, float]:
    """Planar slow-manifold flow (dS/dz, dI/dz) for the case-2 regime."""
    out = kernels.pack_case2_planar(params)(np.array([S, I]))
    return float(out[0]), float(out[1])


def case2_eigs_endemic(params: ModelParams) -> tuple[float, float]:
    """Saddle eigenvalues of the case-2 planar flow at the endemic state.

    lambda = (-c +- sqrt(c^2 + 4(beta-sigma*gamma)(beta-(1+sigma)gamma)/beta))/2,
    returned as (positive, negative).
    """
    beta, gamma, sigma, c = params.beta, params.gamma, params.sigma, params.c
    disc = c * c + 4.0 * (beta - sigma * gamma) * (beta - (1.0 + sigma) * gamma) / beta
    root = math.sqrt(disc)
    return (-c + root) / 2.0, (-c - root) / 2.0


def case2_eigs_disease_free(params: ModelParams) -> tuple[float, float]:
    """Stable-node eigenvalues at the disease-free state.

    (-(beta - gamma(1+sigma)) / (c(1+sigma)), -c); both negative on the
    admissible parameter region.
    """
    beta, gamma, sigma, c = params.beta, params.gamma, params.sigma, params.c
    return -(beta - gamma * (1.0 + sigma)) / (c * (1.0 + sigma)), -c


def case2_rescaled_rhs(S: float, I: float, params: ModelParams, delta: float) -> tuple[float, float]:
    """Case-2 flow in the stretched eta-variable with delta = 1/c^2.

    At delta = 0 the line {S = 1 - I} is invariant and attracting.
    """
    if delta < 0.0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    out = kernels.pack_rescaled(params, delta)(np.array([S, I]))
    return float(out[0]), float(out[1])


def case2_limit_flow(I: float, params: ModelParams) -> float:
    """Large-speed limit flow dI/dzeta on the invariant line S = 1 - I."""
    beta, gamma, sigma = params.beta, params.gamma, params.sigma
    return -beta * I * ((1.0 - I) / (1.0 + sigma * (1.0 - I)) - gamma / beta)


# ---- case 3: fast infected ----------------------------------------------------

def case3_reduced_rhs(I: float, V: float, params: ModelParams) -> tuple[float, float]:
    """Planar slow-manifold flow (dI/dy, dV/dy) for the case-3 regime."""
    Sm = 1.0 - I - V / params.c
    if abs(1.0 + params.sigma * Sm) < 1e-14:
        raise SingularDenominator(
            f"saturation denominator vanishes at S = {Sm} (sigma = {params.sigma})"
        )
    out = kernels.pack_case3_planar(params)(np.array([I, V]))
    return float(out[0]), float(out[1])


def case3_eigs_endemic(params: ModelParams) -> tuple[float, float]:
    """Saddle eigenvalues of the case-3 planar flow at the endemic state.

    (-c, (beta-(1+sigma)gamma)(beta-gamma*sigma)/(c*beta)); the second
    is positive on the admissible region.
    """
    beta, gamma, sigma, c = params.beta, params.gamma, params.sigma, params.c
    lam2 = (beta - (1.0 + sigma) * gamma) * (beta - gamma * sigma) / (c * beta)
    return -c, lam2


def case3_eigs_disease_free(params: ModelParams) -> tuple[complex, complex]:
    """Eigenvalues at the disease-free state of the case-3 planar flow.

    -c/2 +- sqrt(c^2/4 - (beta-(1+sigma)gamma)/(1+sigma)): real and
    distinct above the minimum speed, repeated at it, complex with real
    part -c/2 below it.
    """
    beta, gamma, sigma, c = params.beta, params.gamma, params.sigma, params.c
    disc = c * c / 4.0 - (beta - (1.0 + sigma) * gamma) / (1.0 + sigma)
    if disc >= 0.0:
        root = math.sqrt(disc)
        return -c / 2.0 + root, -c / 2.0 - root
    root = cmath.sqrt(disc)
    return -c / 2.0 + root, -c / 2.0 - root


def case3_min_speed(params: ModelParams) -> float:
    """Minimum admissible front speed 2*sqrt((beta-(1+sigma)gamma)/(1+sigma))."""
    return 2.0 * math.sqrt(
        (params.beta - (1.0 + params.sigma) * params.gamma) / (1.0 + params.sigma)
    )


def case3_slope_interval(params: ModelParams, c: float | None = None) -> tuple[float, float]:
    """Open interval of trapping-triangle slopes admissible at speed c.

    ((c - sqrt(c^2 - 4m))/2, (c + sqrt(c^2 - 4m))/2) with
    m = (beta-(1+sigma)gamma)/(1+sigma), intersected with (0, c]; both
    endpoints are excluded.  Raises SpeedBelowBound for c < c_min.
    """
    c = params.c if c is None else c
    c_min = case3_min_speed(params)
    if c < c_min:
        raise SpeedBelowBound(f"c = {c} is below the minimum front speed {c_min}")
    m = (params.beta - (1.0 + params.sigma) * params.gamma) / (1.0 + params.sigma)
    root = math.sqrt(max(c * c - 4.0 * m, 0.0))
    lo, hi = (c - root) / 2.0, (c + root) / 2.0
    return max(lo, 0.0), min(hi, c)


@dataclass(frozen=True)
class SpeedBound:
    """Minimum front speed plus the trapping-slope interval at a given c."""

    c_min: float
    r_interval: tuple[float, float] | None

    @property
    def midpoint(self) -> float | None:
        if self.r_interval is None:
            return None
        return 0.5 * (self.r_interval[0] + self.r_interval[1])


def case3_speed_bound(params: ModelParams, c: float | None = None) -> SpeedBound:
    """SpeedBound report; r_interval is None when c is below the bound."""
    c = params.c if c is None else c
    c_min = case3_min_speed(params)
    if c < c_min:
        return SpeedBound(c_min, None)
    return SpeedBound(c_min, case3_slope_interval(params, c))


def kpp_second_order_residual(I: float, Iy: float, Iyy: float, params: ModelParams) -> float:
    """Residual of the scalar second-order equation equivalent to case 3.

    I_yy + c*I_y + beta*I*((1-I-I_y/c)/(1+sigma*(1-I-I_y/c)) - gamma/beta);
    vanishes along exact case-3 orbits.
    """
    beta, gamma, sigma, c = params.beta, params.gamma, params.sigma, params.c
    Sm = 1.0 - I - Iy / c
    den = 1.0 + sigma * Sm
    if abs(den) < 1e-14:
        raise SingularDenominator(f"saturation denominator vanishes at S = {Sm}")
    return Iyy + c * Iy + beta * I * (Sm / den - gamma / beta)


# ---- sigma = 0: Burgers-FKPP --------------------------------------------------

@dataclass(frozen=True)
class FkppParameters:
    """Rescaled convection strength and minimum speeds for sigma = 0.

    k is the convection coefficient of the unit-rate Burgers-FKPP
    normal form; scaled_min_speed is the piecewise minimum speed in
    those variables (2 for k < 2, else k/2 + 2/k); min_speed is the
    original-variable bound 2*sqrt(beta - gamma).
    """

    k: float
    scaled_min_speed: float
    min_speed: float


def fkpp_parameters(params: ModelParams) -> FkppParameters:
    """Map sigma = 0 parameters onto the Burgers-FKPP normal form."""
    if params.sigma != 0.0:
        raise SigmaNotZero(f"Burgers-FKPP specialization needs sigma = 0, got {params.sigma}")
    k = math.sqrt(params.beta - params.gamma) / params.c
    scaled = 2.0 if k < 2.0 else k / 2.0 + 2.0 / k
    return FkppParameters(k, scaled, 2.0 * math.sqrt(params.beta - params.gamma))


def burgers_fkpp_rhs_tw(I: float, V: float, params: ModelParams) -> tuple[float, float]:
    """Traveling-wave form of the Burgers-FKPP equation (sigma = 0).

    Agrees pointwise with the case-3 planar flow at sigma = 0.
    """
    if params.sigma != 0.0:
        raise SigmaNotZero(f"Burgers-FKPP form needs sigma = 0, got {params.sigma}")
    out = kernels.pack_burgers(params)(np.array([I, V]))
    return float(out[0]), float(out[1])


# ---- manifolds -----------------------------------------------------------------

class Manifold(enum.Enum):
    """Invariant sets whose defining relations back the residual checks."""

    CASE1_CRITICAL = "case1"
    CASE2_SLOW = "case2"
    CASE3_SLOW = "case3"
    LARGE_SPEED_LINE = "largec"


def manifold_residual(manifold: Manifold, state, params: ModelParams) -> float:
    """Absolute residual of the manifold's defining relation(s) at a state.

    The case-1 critical set has two defining equations; their absolute
    residuals are summed.  3D manifolds expect (S, I, V); the
    large-speed line expects (S, I).
    """
    state = np.asarray(state, dtype=float)
    beta, gamma, sigma, c = params.beta, params.gamma, params.sigma, params.c
    if manifold is Manifold.LARGE_SPEED_LINE:
        S, I = state
        return abs(1.0 - I - S)
    S, I, V = state
    if manifold is Manifold.CASE1_CRITICAL:
        flux = beta * S * I / (1.0 + sigma * S) - gamma * I
        return abs(I + S - 1.0) + abs(-c * V - flux)
    if manifold is Manifold.CASE2_SLOW:
        return abs(V + (beta / c) * (S / (1.0 + sigma * S) - gamma / beta) * I)
    return abs(S - (1.0 - I - V / c))


REGIME_MANIFOLD = {
    Regime.CASE1_COMPARABLE_SMALL: Manifold.CASE1_CRITICAL,
    Regime.CASE2_SLOW_INFECTED: Manifold.CASE2_SLOW,
    Regime.CASE3_FAST_INFECTED: Manifold.CASE3_SLOW,
}


# ---- parameterized vector-field constructor -------------------------------------

def epsilon_field(params: ModelParams, form: str = "slow", eps: float | None = None,
                  regime: Regime | None = None) -> VectorField:
    """The regime's 3D singularly perturbed system in either time form.

    form "slow" is the traveling-wave variable (z, or y in case 3);
    form "fast" is the stretched variable, which stays regular at
    eps = 0 and reduces there to the fast-fiber system.  The six
    regime/form combinations differ only by the diffusivity pattern and
    an eps time rescale, so they share two kernels.
    """
    regime = params.regime if regime is None else regime
    eps = params.epsilon if eps is None else eps
    if eps < 0.0:
        raise ValueError(f"eps must be >= 0, got {eps}")
    if form == "fast":
        if regime is not params.regime:
            params = _with_regime(params, regime)
        return kernels.pack_stretched3(params, eps)
    if form != "slow":
        raise ValueError(f"form must be 'slow' or 'fast', got {form!r}")
    if eps == 0.0:
        raise ValueError("the slow (traveling-wave) form is singular at eps = 0; "
                         "use the planar reductions instead")
    d1, d2 = _derived_diffusivities(regime, eps, params.alpha)
    return kernels.pack_reduced3(params, d1, d2)


def _with_regime(params: ModelParams, regime: Regime) -> ModelParams:
    from dataclasses import replace

    d1, d2 = _derived_diffusivities(regime, params.epsilon, params.alpha)
    return replace(params, regime=regime, d1=d1, d2=d2)


def stretched_field(params: ModelParams, eps: float | None = None,
                    regime: Regime | None = None) -> VectorField:
    """Stretched-variable form (valid down to eps = 0)."""
    return epsilon_field(params, "fast", eps, regime)


def traveling_wave_field(params: ModelParams, eps: float | None = None) -> VectorField:
    """Traveling-wave-variable form of the regime's 3D system (eps > 0)."""
    return epsilon_field(params, "slow", eps)


def planar_reduction_field(params: ModelParams) -> VectorField:
    """The regime's reduced flow on its slow manifold.

    case1 -> 1D flow in I; case2 -> planar (S, I); case3 -> planar
    (I, V).
    """
    if params.regime is Regime.CASE1_COMPARABLE_SMALL:
        return kernels.pack_case1_flow(params)
    if params.regime is Regime.CASE2_SLOW_INFECTED:
        return kernels.pack_case2_planar(params)
    return kernels.pack_case3_planar(params)


def rescaled_field(params: ModelParams, delta: float) -> VectorField:
    """Case-2 flow in the stretched eta-variable at a given delta = 1/c^2."""
    if delta < 0.0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    return kernels.pack_rescaled(params, delta)


def burgers_field(params: ModelParams) -> VectorField:
    """Traveling-wave Burgers-FKPP field (sigma = 0 only)."""
    if params.sigma != 0.0:
        raise SigmaNotZero(f"Burgers-FKPP form needs sigma = 0, got {params.sigma}")
    return kernels.pack_burgers(params)
