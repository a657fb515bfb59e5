"""Model parameters, saturating incidence, and equilibrium states.

The diffusive SIS system evolves susceptible/infected densities (S, I)
with infection rate beta, recovery rate gamma and inhibition constant
sigma; the per-infected incidence is beta*S/(1 + sigma*S).  Parameters
are admissible when beta > gamma*(1+sigma), which keeps the endemic
state inside the physical unit square.

Three diffusion regimes are supported, each fixing the diffusivities
(d1 for S, d2 for I) from the singular-perturbation parameter epsilon:

  case1  comparable, small:   d1 = alpha*epsilon, d2 = epsilon
  case2  slow infected:       d1 = 1,             d2 = epsilon
  case3  fast infected:       d1 = epsilon,       d2 = 1
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Mapping

from .errors import (
    AdmissibilityViolation,
    BadEpsilon,
    NegativeDensity,
    NonPositiveParameter,
    ValidationError,
)


class Regime(enum.Enum):
    """Diffusion-scaling regime; the value is the config/CLI spelling."""

    CASE1_COMPARABLE_SMALL = "case1"
    CASE2_SLOW_INFECTED = "case2"
    CASE3_FAST_INFECTED = "case3"

    @classmethod
    def parse(cls, value) -> "Regime":
        if isinstance(value, Regime):
            return value
        text = str(value).strip().lower()
        for member in cls:
            if member.value == text:
                return member
        raise ValidationError([f"unknown regime {value!r}; expected case1|case2|case3"])


@dataclass(frozen=True)
class ModelParams:
    """Validated epidemiological and diffusion parameters.

    d1 and d2 are derived from (regime, epsilon, alpha); construct
    instances through :func:`validate_params` or :func:`make_params`.
    """

    beta: float
    gamma: float
    sigma: float
    c: float
    epsilon: float
    alpha: float
    regime: Regime
    d1: float
    d2: float

    @property
    def susceptible_endemic(self) -> float:
        """S-coordinate of the endemic state, gamma / (beta - gamma*sigma)."""
        return self.gamma / (self.beta - self.gamma * self.sigma)

    @property
    def infected_endemic(self) -> float:
        """I-coordinate of the endemic state, 1 - S_endemic."""
        return 1.0 - self.susceptible_endemic

    def as_dict(self) -> dict:
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "sigma": self.sigma,
            "c": self.c,
            "epsilon": self.epsilon,
            "alpha": self.alpha,
            "regime": self.regime.value,
            "d1": self.d1,
            "d2": self.d2,
        }


_NUMERIC_KEYS = ("beta", "gamma", "sigma", "c", "epsilon", "alpha")
# default epsilon is small enough for slow-manifold behavior at desk scale
_DEFAULTS = {"sigma": 0.0, "c": 1.0, "epsilon": 0.01, "alpha": 1.0}


def _derived_diffusivities(regime: Regime, epsilon: float, alpha: float) -> tuple[float, float]:
    if regime is Regime.CASE1_COMPARABLE_SMALL:
        return alpha * epsilon, epsilon
    if regime is Regime.CASE2_SLOW_INFECTED:
        return 1.0, epsilon
    return epsilon, 1.0


def validate_params(raw: Mapping[str, object]) -> ModelParams:
    """Validate a raw parameter record and derive the diffusivities.

    Every violated constraint is collected and reported together.  The
    admissibility boundary beta = gamma*(1+sigma) is rejected (the
    endemic state degenerates to I = 0 there).

    Raises:
        AdmissibilityViolation, NonPositiveParameter, BadEpsilon when a
        single constraint class is violated; ValidationError with the
        full list otherwise.
    """
    record = dict(raw)
    regime = Regime.parse(record.pop("regime", "case2"))

    values = {}
    violations: list[str] = []
    kinds: set[type] = set()
    for key in _NUMERIC_KEYS:
        v = record.pop(key, _DEFAULTS.get(key))
        if v is None:
            violations.append(f"missing parameter {key}")
            kinds.add(ValidationError)
            continue
        try:
            values[key] = float(v)
        except (TypeError, ValueError):
            violations.append(f"parameter {key}={v!r} is not numeric")
            kinds.add(ValidationError)
    record.pop("d1", None)
    record.pop("d2", None)
    if record:
        violations.append(f"unknown parameter keys {sorted(record)}")
        kinds.add(ValidationError)

    def got(key):
        return key in values

    for key in ("beta", "gamma", "c"):
        if got(key) and not values[key] > 0.0:
            violations.append(f"{key} must be > 0, got {values[key]}")
            kinds.add(NonPositiveParameter)
    if got("alpha") and not values["alpha"] > 0.0:
        violations.append(f"alpha must be > 0, got {values['alpha']}")
        kinds.add(NonPositiveParameter)
    if got("sigma") and values["sigma"] < 0.0:
        violations.append(f"sigma must be >= 0, got {values['sigma']}")
        kinds.add(NonPositiveParameter)
    if got("epsilon") and not values["epsilon"] > 0.0:
        violations.append(f"epsilon must be > 0, got {values['epsilon']}")
        kinds.add(BadEpsilon)
    if got("beta") and got("gamma") and got("sigma"):
        if not values["beta"] > values["gamma"] * (1.0 + values["sigma"]):
            violations.append(
                "admissibility requires beta > gamma*(1+sigma): "
                f"{values['beta']} <= {values['gamma']} * (1 + {values['sigma']})"
            )
            kinds.add(AdmissibilityViolation)

    if violations:
        if kinds == {AdmissibilityViolation}:
            raise AdmissibilityViolation(violations)
        if kinds == {NonPositiveParameter}:
            raise NonPositiveParameter(violations)
        if kinds == {BadEpsilon}:
            raise BadEpsilon(violations)
        raise ValidationError(violations)

    d1, d2 = _derived_diffusivities(regime, values["epsilon"], values["alpha"])
    return ModelParams(
        beta=values["beta"],
        gamma=values["gamma"],
        sigma=values["sigma"],
        c=values["c"],
        epsilon=values["epsilon"],
        alpha=values["alpha"],
        regime=regime,
        d1=d1,
        d2=d2,
    )


def make_params(
    beta: float,
    gamma: float,
    sigma: float = 0.0,
    c: float = 1.0,
    epsilon: float = 0.01,
    alpha: float = 1.0,
    regime: str | Regime = "case2",
) -> ModelParams:
    """Keyword-style convenience wrapper around :func:`validate_params`."""
    return validate_params(
        {
            "beta": beta,
            "gamma": gamma,
            "sigma": sigma,
            "c": c,
            "epsilon": epsilon,
            "alpha": alpha,
            "regime": regime,
        }
    )


def incidence_rate(S: float, params: ModelParams) -> float:
    """Per-infected incidence beta*S / (1 + sigma*S).

    Monotone increasing in S, bounded by beta/sigma for sigma > 0, and
    exactly beta*S in the classical sigma = 0 case.
    """
    if S < 0.0:
        raise NegativeDensity(f"susceptible density must be >= 0, got {S}")
    return params.beta * S / (1.0 + params.sigma * S)


@dataclass(frozen=True)
class Equilibrium:
    """A constant state of the traveling-wave system in full coordinates.

    coords is (S, U, I, V) with U = S_z and V = I_z, so both derivative
    slots are zero.  Projections onto the reduced systems are provided
    as properties.
    """

    label: str  # "endemic" | "disease_free"
    coords: tuple[float, float, float, float]

    @property
    def S(self) -> float:
        return self.coords[0]

    @property
    def I(self) -> float:
        return self.coords[2]

    @property
    def full4(self) -> tuple[float, float, float, float]:
        return self.coords

    @property
    def reduced3(self) -> tuple[float, float, float]:
        S, _, I, V = self.coords
        return (S, I, V)

    @property
    def si_plane(self) -> tuple[float, float]:
        """(S, I) projection used by the slow-infected planar reduction."""
        return (self.coords[0], self.coords[2])

    @property
    def iv_plane(self) -> tuple[float, float]:
        """(I, V) projection used by the fast-infected planar reduction."""
        return (self.coords[2], self.coords[3])


def equilibria(params: ModelParams) -> tuple[Equilibrium, Equilibrium]:
    """Endemic and disease-free constant states, in that order.

    endemic      = (gamma/(beta-gamma*sigma), 0, 1 - gamma/(beta-gamma*sigma), 0)
    disease-free = (1, 0, 0, 0)
    """
    s = params.susceptible_endemic
    endemic = Equilibrium("endemic", (s, 0.0, 1.0 - s, 0.0))
    disease_free = Equilibrium("disease_free", (1.0, 0.0, 0.0, 0.0))
    return endemic, disease_free


def read_config(path) -> dict:
    """Read a flat key-value config file (``key = value`` per line).

    ``#`` starts a comment; ``=`` or ``:`` separate key and value.
    Returned values are raw strings; pass the merged record through
    :func:`validate_params`.
    """
    record: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            for sep in ("=", ":"):
                if sep in text:
                    key, value = text.split(sep, 1)
                    break
            else:
                raise ValidationError(
                    [f"{path}:{lineno}: expected 'key = value', got {line.strip()!r}"]
                )
            record[key.strip()] = value.strip()
    return record
