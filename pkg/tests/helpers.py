"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from sisfronts.model import ModelParams, make_params

# the two parameter pairs exercised throughout the acceptance suite
PARAM_PAIRS = ((2.0, 1.0, 0.0), (2.0, 0.5, 0.5))


def random_admissible(rng: np.random.Generator, regime: str = "case2",
                      sigma_max: float = 2.0, c_range=(0.3, 5.0),
                      epsilon: float = 0.01) -> ModelParams:
    """Draw parameters uniformly from the admissible region."""
    sigma = rng.uniform(0.0, sigma_max)
    gamma = rng.uniform(0.1, 2.0)
    beta = gamma * (1.0 + sigma) * (1.0 + rng.uniform(0.1, 2.0))
    c = rng.uniform(*c_range)
    return make_params(beta, gamma, sigma, c=c, epsilon=epsilon, regime=regime)
