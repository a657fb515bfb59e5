"""Exception hierarchy shared by the whole package.

Every failure mode listed in the public API contracts maps onto one of
these classes so callers (and the CLI exit-code logic) can discriminate
input-validation problems from numerical failures.
"""

from __future__ import annotations


class SisFrontsError(Exception):
    """Base class for all package-specific errors."""


# ---- parameter / input validation -------------------------------------

class ValidationError(SisFrontsError):
    """A raw parameter record violated one or more constraints.

    ``violations`` lists every violated constraint, not just the first.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class AdmissibilityViolation(ValidationError):
    """beta <= gamma*(1+sigma): the endemic state is not physical."""


class NonPositiveParameter(ValidationError):
    """A parameter that must be strictly positive (or >= 0) is not."""


class BadEpsilon(ValidationError):
    """epsilon <= 0."""


class NegativeDensity(SisFrontsError):
    """A population density argument was negative."""


class SpeedBelowBound(SisFrontsError):
    """Wave speed below the regime's minimum admissible speed."""


class SlopeOutOfInterval(SisFrontsError):
    """Trapping-triangle slope is degenerate (r <= 0 gives no triangle)."""


class SigmaNotZero(SisFrontsError):
    """Operation only defined for the sigma = 0 specialization."""


class OutsideTriangle(SisFrontsError):
    """Probe point is not strictly inside the required triangle."""


# ---- vector-field evaluation -------------------------------------------

class ZeroDiffusivity(SisFrontsError):
    """A vector field divides by a diffusivity that is zero."""


class SingularDenominator(SisFrontsError):
    """The saturation denominator 1 + sigma*(...) vanished."""


# ---- integration --------------------------------------------------------

class StepUnderflow(SisFrontsError):
    """Adaptive step fell below 1e-14 * span."""


class NonFiniteState(SisFrontsError):
    """Integration produced a non-finite state."""


# ---- connection / shooting ----------------------------------------------

class NotASaddle(SisFrontsError):
    """Equilibrium does not have exactly one unstable direction."""


class NoConnection(SisFrontsError):
    """Shooting failed to reach the target equilibrium.

    Carries the escape state (last computed state) for diagnosis.
    """

    def __init__(self, message, escape_state=None, reason=""):
        super().__init__(message)
        self.escape_state = escape_state
        self.reason = reason


class EigenstructureChanged(SisFrontsError):
    """Saddle index at eps > 0 differs from the eps = 0 prediction."""


# ---- PDE simulation -------------------------------------------------------

class CFLViolation(SisFrontsError):
    """Time step violates the explicit stability / reaction-resolution bound."""


class NonFiniteField(SisFrontsError):
    """PDE field blew up (non-finite values detected)."""


class InterfaceLost(SisFrontsError):
    """Front interface missing or too close to a boundary to track."""


class NoOverlap(SisFrontsError):
    """PDE snapshot and ODE profile do not cover a common front window."""
