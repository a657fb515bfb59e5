"""Traveling-front toolkit for the diffusive SIS epidemic model with
saturating incidence: slow-manifold reductions per diffusion regime,
heteroclinic front construction by shooting, trapping-region and
rotation verification, and a direct PDE simulator for cross-checking
front shapes and speeds.
"""

from .errors import SisFrontsError
from .model import ModelParams, Regime, equilibria, incidence_rate, make_params, validate_params

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "Regime",
    "SisFrontsError",
    "__version__",
    "equilibria",
    "incidence_rate",
    "make_params",
    "validate_params",
]
