"""Input validation helpers shared by the solvers and estimators."""

import numpy as np
from sklearn.utils import check_array

__all__ = [
    "check_matrix",
    "check_sign_matrix",
    "check_binary_matrix",
    "is_sign_matrix",
    "is_binary_matrix",
    "check_power_of_two",
    "EnumerationCapError",
]


class EnumerationCapError(ValueError):
    """Raised when an exhaustive search would exceed its configured size cap."""


def check_matrix(M) -> np.ndarray:
    """Return ``M`` as a finite 2-D float64 array (no copy when possible)."""
    return check_array(M, dtype=np.float64, ensure_all_finite=True,
                       ensure_2d=True, copy=False)


def is_sign_matrix(M) -> bool:
    M = np.asarray(M)
    return M.size > 0 and bool(np.all((M == 1) | (M == -1)))


def is_binary_matrix(M) -> bool:
    M = np.asarray(M)
    return M.size > 0 and bool(np.all((M == 0) | (M == 1)))


def check_sign_matrix(A) -> np.ndarray:
    A = check_matrix(A)
    if not is_sign_matrix(A):
        raise ValueError("expected a matrix with entries in {-1, +1}")
    return A


def check_binary_matrix(M) -> np.ndarray:
    M = check_matrix(M)
    if not is_binary_matrix(M):
        raise ValueError("expected a matrix with entries in {0, 1}")
    return M


def check_power_of_two(p) -> int:
    if isinstance(p, bool) or int(p) != p or p < 1 or (int(p) & (int(p) - 1)):
        raise ValueError(f"p must be a positive power of two, got {p!r}")
    return int(p)
