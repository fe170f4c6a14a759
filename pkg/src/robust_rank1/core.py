"""Rank-one factor types, residual objectives and sign/binary conversions.

Matrices are plain ``numpy.ndarray`` objects of dtype float64. Factor pairs
are wrapped in :class:`RankOneFactors` so that objective functions can check
dimensions once and the outer product never has to be stored by callers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import check_binary_matrix, check_matrix, check_sign_matrix

__all__ = [
    "RankOneFactors",
    "SignFactors",
    "BinaryFactors",
    "l0_error",
    "l1_error",
    "frobenius_error_sq",
    "to_sign",
    "to_binary",
]


def _frozen_vector(x, name):
    arr = np.array(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class RankOneFactors:
    """A pair ``(u, v)`` standing for the rank-one matrix ``u v^T``."""

    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u", _frozen_vector(self.u, "u"))
        object.__setattr__(self, "v", _frozen_vector(self.v, "v"))

    @property
    def shape(self) -> tuple[int, int]:
        return self.u.size, self.v.size

    def matrix(self) -> np.ndarray:
        return np.outer(self.u, self.v)

    def is_sign(self) -> bool:
        return bool(np.all(np.abs(self.u) == 1) and np.all(np.abs(self.v) == 1))

    def is_binary(self) -> bool:
        return bool(np.all((self.u == 0) | (self.u == 1))
                    and np.all((self.v == 0) | (self.v == 1)))

    def is_zero(self) -> bool:
        return not (np.any(self.u) and np.any(self.v))

    def __eq__(self, other):
        if not isinstance(other, RankOneFactors):
            return NotImplemented
        return (np.array_equal(self.u, other.u)
                and np.array_equal(self.v, other.v))

    def __hash__(self):
        return hash((self.u.tobytes(), self.v.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}(u={self.u.tolist()}, v={self.v.tolist()})"


class SignFactors(RankOneFactors):
    """Factors restricted to {-1, +1}."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_sign():
            raise ValueError("sign factors must have entries in {-1, +1}")


class BinaryFactors(RankOneFactors):
    """Factors restricted to {0, 1}."""

    def __post_init__(self):
        super().__post_init__()
        if not self.is_binary():
            raise ValueError("binary factors must have entries in {0, 1}")


def _residual(M, f: RankOneFactors) -> np.ndarray:
    M = check_matrix(M)
    if M.shape != f.shape:
        raise ValueError(
            f"dimension mismatch: matrix is {M.shape[0]}x{M.shape[1]}, "
            f"factors give {f.shape[0]}x{f.shape[1]}")
    return M - np.outer(f.u, f.v)


def l0_error(M, f: RankOneFactors, tol: float = 0.0) -> int:
    """Number of entries where ``M`` and ``u v^T`` differ.

    With ``tol > 0`` an entry counts as matched when ``|M_ij - u_i v_j| <= tol``.
    The default is exact comparison.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    R = _residual(M, f)
    if tol == 0:
        return int(np.count_nonzero(R))
    return int(np.count_nonzero(np.abs(R) > tol))


def l1_error(M, f: RankOneFactors) -> float:
    """Entrywise l1 residual ``sum |M - u v^T|``."""
    return math.fsum(np.abs(_residual(M, f)).ravel())


def frobenius_error_sq(M, f: RankOneFactors) -> float:
    """Squared Frobenius residual ``||M - u v^T||_F^2``."""
    R = _residual(M, f)
    return math.fsum((R * R).ravel())


def to_sign(M) -> np.ndarray:
    """Map a {0,1} matrix to the {-1,+1} matrix ``2M - 1``."""
    M = check_binary_matrix(M)
    return 2.0 * M - 1.0


def to_binary(A) -> np.ndarray:
    """Inverse of :func:`to_sign`."""
    A = check_sign_matrix(A)
    return (A + 1.0) / 2.0
