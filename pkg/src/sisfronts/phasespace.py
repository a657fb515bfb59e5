"""Traveling-wave phase space: full 4D system, reduced 3D system,
conservation diagnostic, and finite-difference linearization.

In the wave variable z = x - c*t the traveling-wave equations form a
first-order system in (S, U, I, V) = (S, S_z, I, I_z).  Summing the two
second-order equations and integrating against the disease-free state
at +infinity yields the first integral

    d1*U + d2*V + c*S + c*I = c,

whose level set {residual = 0} carries every front; eliminating U on it
gives the equivalent 3D system in (S, I, V).
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .errors import ZeroDiffusivity
from .kernels import VectorField
from .model import ModelParams


def full_system_field(params: ModelParams, d1=None, d2=None) -> VectorField:
    """The 4D first-order traveling-wave field in (S, U, I, V).

    Requires both diffusivities strictly positive; the reduced 3D field
    handles the singular limits.
    """
    d1 = params.d1 if d1 is None else d1
    d2 = params.d2 if d2 is None else d2
    if d1 <= 0.0 or d2 <= 0.0:
        raise ZeroDiffusivity(f"full 4D system needs d1, d2 > 0, got d1={d1}, d2={d2}")
    return kernels.pack_full4(params, d1, d2)


def reduced_system_field(params: ModelParams, d1=None, d2=None) -> VectorField:
    """The conserved-quantity-reduced 3D field in (S, I, V)."""
    d1 = params.d1 if d1 is None else d1
    d2 = params.d2 if d2 is None else d2
    if d1 <= 0.0 or d2 <= 0.0:
        raise ZeroDiffusivity(f"reduced 3D system needs d1, d2 > 0, got d1={d1}, d2={d2}")
    return kernels.pack_reduced3(params, d1, d2)


def rhs_full4(state, params: ModelParams) -> np.ndarray:
    """Evaluate the 4D field at one state."""
    return full_system_field(params)(state)


def rhs_reduced3(state, params: ModelParams) -> np.ndarray:
    """Evaluate the reduced 3D field at one state."""
    return reduced_system_field(params)(state)


def conservation_residual(state, params: ModelParams) -> float:
    """d1*U + d2*V + c*S + c*I - c for a 4D state (S, U, I, V).

    Exactly conserved along the 4D flow; zero on every orbit satisfying
    the disease-free boundary condition at +infinity.
    """
    S, U, I, V = np.asarray(state, dtype=float)
    return params.d1 * U + params.d2 * V + params.c * (S + I) - params.c


def lift_to_full(state3, params: ModelParams) -> np.ndarray:
    """Embed a reduced (S, I, V) state into 4D on the conserved level set.

    U is recovered from the first line of the reduced system,
    U = (-d2*V - c*(I+S-1)) / d1, which places the lifted state exactly
    on {residual = 0}.
    """
    S, I, V = np.asarray(state3, dtype=float)
    if params.d1 <= 0.0:
        raise ZeroDiffusivity("lift requires d1 > 0")
    U = (-params.d2 * V - params.c * (I + S - 1.0)) / params.d1
    return np.array([S, U, I, V])


def numerical_jacobian(f, point, args=()) -> np.ndarray:
    """Central finite-difference Jacobian of a vector field.

    Step h_j = 1e-6 * max(1, |x_j|) per coordinate; the symmetric
    difference has O(h^2) truncation error, which is what the
    closed-form eigenvalue cross-checks at 1e-8 rely on.
    """
    x = np.asarray(point, dtype=float)
    n = x.size
    f0 = np.asarray(f(x, *args), dtype=float)
    jac = np.empty((f0.size, n))
    for j in range(n):
        h = 1e-6 * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (np.asarray(f(xp, *args), dtype=float) - np.asarray(f(xm, *args), dtype=float)) / (2.0 * h)
    return jac


def sorted_eigenvalues(matrix) -> np.ndarray:
    """Eigenvalues sorted by decreasing real part (then imaginary part)."""
    eig = np.linalg.eigvals(np.asarray(matrix, dtype=float))
    order = np.lexsort((eig.imag, -eig.real))
    return eig[order]


def field_eigenvalues(field, point) -> np.ndarray:
    """Eigenvalues of the finite-difference linearization of a field."""
    return sorted_eigenvalues(numerical_jacobian(field, point))
