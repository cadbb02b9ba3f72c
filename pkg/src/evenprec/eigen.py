"""Largest eigenpair of a dense real symmetric matrix, with residual check."""
import numpy as np
from scipy import linalg

from .protocol import NumericalError

RESIDUAL_TOL = 1e-9


def largest_eigenpair(matrix: np.ndarray, tol: float = RESIDUAL_TOL):
    """Return ``(eigenvalue, unit eigenvector, residual)`` for the top eigenvalue.

    Raises :class:`NumericalError` when ``||A v - lambda v|| > tol``.
    """
    a = np.asarray(matrix)
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0]), np.ones(1), 0.0
    w, v = linalg.eigh(a, subset_by_index=[n - 1, n - 1], driver="evr")
    lam, vec = float(w[0]), v[:, 0]
    # fix the global sign so the largest-magnitude component is positive
    i = int(np.argmax(np.abs(vec)))
    if vec[i] < 0:
        vec = -vec
    residual = float(np.linalg.norm(a @ vec - lam * vec))
    if not residual <= tol:
        raise NumericalError(f"eigensolver residual {residual:.3e} exceeds {tol:.1e}")
    return lam, vec, residual
