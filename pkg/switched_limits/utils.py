from typing import Optional

import numpy as np

from switched_limits.exceptions import InvalidArgumentError


def as_matrix(value, *, name: str = "matrix", square: bool = True) -> np.ndarray:
    """
    Converts ``value`` into a finite 2-d float array (a fresh copy).

    :raises: :attr:`InvalidArgumentError <switched_limits.exceptions.InvalidArgumentError>` on bad shapes or
             non-finite entries.
    """
    try:
        array = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{name} is not a numeric array: {exc}")
    if array.ndim != 2:
        raise InvalidArgumentError(f"{name} must be 2-dimensional, got {array.ndim} dimension(s).")
    if square and (array.shape[0] != array.shape[1] or array.shape[0] < 1):
        raise InvalidArgumentError(
            f"{name} must be a non-empty square matrix, got shape {array.shape}."
        )
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError(f"{name} has non-finite entries.")
    return array


def as_vector(value, *, dim: Optional[int] = None, name: str = "vector") -> np.ndarray:
    try:
        array = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidArgumentError(f"{name} is not a numeric array: {exc}")
    if array.ndim != 1:
        raise InvalidArgumentError(f"{name} must be 1-dimensional, got shape {array.shape}.")
    if dim is not None and array.shape[0] != dim:
        raise InvalidArgumentError(f"{name} has dimension {array.shape[0]}, expected {dim}.")
    if not np.all(np.isfinite(array)):
        raise InvalidArgumentError(f"{name} has non-finite entries.")
    return array


def check_finite_scalar(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise InvalidArgumentError(f"{name} must be finite, got {value}.")
    return value


def op_norm(matrix: np.ndarray) -> float:
    """Operator (spectral) norm; 0 for empty arrays."""
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def max_symmetric_eigenvalue(matrix: np.ndarray) -> float:
    """Largest eigenvalue of :math:`B + B^T`."""
    return float(np.linalg.eigvalsh(matrix + matrix.T)[-1])


def spectral_abscissa(matrix: np.ndarray) -> float:
    """Largest real part of the eigenvalues; ``-inf`` for an empty matrix."""
    if matrix.size == 0:
        return float("-inf")
    return float(np.max(np.linalg.eigvals(matrix).real))
