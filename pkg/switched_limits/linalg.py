"""
Dense linear-algebra primitives: matrix exponentials, polar factors, symmetric square roots,
numerical nullspaces and the :class:`Subspace` value type with its lattice operations.
"""
import functools
from typing import Iterable, Optional, Tuple

import numpy as np
import scipy.linalg

from switched_limits.config import DEFAULT_TOLERANCES, Tolerances
from switched_limits.exceptions import InvalidArgumentError, NotPSDError
from switched_limits.utils import as_matrix, as_vector, check_finite_scalar, op_norm

#: maximum deviation of :math:`Q^T Q` from the identity accepted for a subspace basis
ORTHONORMAL_TOL = 1e-12
#: relative size of the smallest polar factor eigenvalue below which M counts as singular
SINGULAR_TOL = 1e-13


class Subspace:
    """
    A linear subspace of :math:`\\mathbb{R}^d` stored as a ``(d, k)`` matrix with orthonormal columns.

    Two subspaces compare equal when each contains the other up to ``rank`` tolerance, so the
    particular basis never matters. Instances are immutable; the basis array is read-only.

    :param basis: ``(d, k)`` array with orthonormal columns, ``k`` may be 0.
    """

    __slots__ = ("_basis",)

    def __init__(self, basis) -> None:
        array = np.array(basis, dtype=float)
        if array.ndim != 2:
            raise InvalidArgumentError(f"Subspace basis must be a (d, k) array, got shape {array.shape}.")
        if array.shape[0] < 1:
            raise InvalidArgumentError("Ambient dimension must be at least 1.")
        if array.shape[1] > array.shape[0]:
            raise InvalidArgumentError(
                f"A basis of R^{array.shape[0]} cannot have {array.shape[1]} columns."
            )
        if not np.all(np.isfinite(array)):
            raise InvalidArgumentError("Subspace basis has non-finite entries.")
        if array.shape[1]:
            gram = array.T @ array
            deviation = float(np.max(np.abs(gram - np.eye(array.shape[1]))))
            if deviation > ORTHONORMAL_TOL * max(1, array.shape[0]):
                raise InvalidArgumentError(
                    f"Subspace basis is not orthonormal (deviation {deviation:.2e}); use Subspace.span."
                )
        array.setflags(write=False)
        self._basis = array

    @classmethod
    def zero(cls, dim: int) -> "Subspace":
        return cls(np.zeros((dim, 0)))

    @classmethod
    def full(cls, dim: int) -> "Subspace":
        return cls(np.eye(dim))

    @classmethod
    def span(cls, vectors, rel_tol: float = DEFAULT_TOLERANCES.rank) -> "Subspace":
        """
        Orthonormalizes the columns of ``vectors``.

        :param vectors: ``(d, k)`` array whose columns span the subspace.
        :param rel_tol: singular values below ``rel_tol * sigma_max`` are discarded.
        """
        return column_span(as_matrix(vectors, name="vectors", square=False), rel_tol)

    @property
    def basis(self) -> np.ndarray:
        return self._basis

    @property
    def ambient_dim(self) -> int:
        return self._basis.shape[0]

    @property
    def dim(self) -> int:
        return self._basis.shape[1]

    @property
    def is_zero(self) -> bool:
        return self.dim == 0

    @property
    def is_full(self) -> bool:
        return self.dim == self.ambient_dim

    @property
    def projector(self) -> np.ndarray:
        """Orthogonal projector :math:`QQ^T`."""
        return self._basis @ self._basis.T

    def project(self, x) -> np.ndarray:
        """Projects a vector, or the columns of a ``(d, m)`` array."""
        return self._basis @ (self._basis.T @ np.asarray(x, dtype=float))

    def distance(self, x) -> float:
        """Euclidean distance from a vector to the subspace."""
        x = as_vector(x, dim=self.ambient_dim)
        return float(np.linalg.norm(x - self.project(x)))

    def distances(self, points: np.ndarray) -> np.ndarray:
        """Distances of the rows of an ``(m, d)`` array to the subspace."""
        points = np.asarray(points, dtype=float)
        residual = points - points @ self._basis @ self._basis.T
        return np.linalg.norm(residual, axis=-1)

    def contains(self, x, tol: float = DEFAULT_TOLERANCES.rank) -> bool:
        return subspace_contains(self, x, tol)

    def is_subspace_of(self, other: "Subspace", tol: float = DEFAULT_TOLERANCES.rank) -> bool:
        _check_same_ambient(self, other)
        if self.dim > other.dim:
            return False
        if self.is_zero:
            return True
        residual = self._basis - other.project(self._basis)
        return op_norm(residual) <= tol

    def orthogonal_complement(self) -> "Subspace":
        if self.is_zero:
            return Subspace.full(self.ambient_dim)
        return nullspace(self._basis.T)

    def principal_angles(self, other: "Subspace") -> np.ndarray:
        """Principal angles in radians, ascending; empty when either side is zero."""
        _check_same_ambient(self, other)
        if self.is_zero or other.is_zero:
            return np.zeros(0)
        # sine-based, accurate for nearly equal subspaces
        return np.sort(scipy.linalg.subspace_angles(self._basis, other._basis))

    def equals(self, other: "Subspace", tol: float = DEFAULT_TOLERANCES.rank) -> bool:
        return (
            self.ambient_dim == other.ambient_dim
            and self.dim == other.dim
            and self.is_subspace_of(other, tol)
            and other.is_subspace_of(self, tol)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.equals(other)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"

    def to_json(self) -> dict:
        return {"dim": self.dim, "basis": self._basis.T.tolist()}


def _check_same_ambient(*subspaces: Subspace) -> None:
    dims = {subspace.ambient_dim for subspace in subspaces}
    if len(dims) > 1:
        raise InvalidArgumentError(f"Subspaces live in different ambient dimensions: {sorted(dims)}.")


def _check_rel_tol(rel_tol: float) -> None:
    if not 0 < rel_tol < 1:
        raise InvalidArgumentError(f"rel_tol must be in (0, 1), got {rel_tol}.")


def matrix_exponential(matrix, t: float = 1.0) -> np.ndarray:
    """
    :return: :math:`e^{tA}` computed by Pade scaling and squaring.
    """
    a = as_matrix(matrix)
    t = check_finite_scalar(t, "t")
    return scipy.linalg.expm(t * a)


def polar_decompose(matrix) -> Tuple[np.ndarray, np.ndarray]:
    """
    Factors ``M = O S`` with ``O`` orthogonal and ``S`` symmetric positive semidefinite.

    ``S`` is unique. ``O`` is unique when ``M`` is invertible and then has the sign of ``det M``;
    for singular ``M`` it is picked with determinant +1 by reflecting along a null direction of ``S``.
    """
    m = as_matrix(matrix)
    orthogonal, positive = scipy.linalg.polar(m, side="right")
    positive = (positive + positive.T) / 2
    if np.linalg.det(orthogonal) < 0:
        eigenvalues, eigenvectors = np.linalg.eigh(positive)
        if eigenvalues[0] <= SINGULAR_TOL * max(1.0, eigenvalues[-1]):
            direction = eigenvectors[:, 0]
            orthogonal = orthogonal - 2 * np.outer(orthogonal @ direction, direction)
    return orthogonal, positive


def sym_sqrt(matrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    Symmetric positive semidefinite square root of a symmetric positive semidefinite matrix.

    Eigenvalues in ``[-psd_clamp, 0]`` are clamped to 0 before taking roots.

    :raises: :attr:`NotPSDError <switched_limits.exceptions.NotPSDError>` below the clamp,
             :attr:`InvalidArgumentError <switched_limits.exceptions.InvalidArgumentError>` on asymmetric input.
    """
    a = as_matrix(matrix)
    scale = max(1.0, op_norm(a))
    asymmetry = float(np.max(np.abs(a - a.T)))
    if asymmetry > tolerances.symmetry * scale:
        raise InvalidArgumentError(f"Matrix is not symmetric (asymmetry {asymmetry:.2e}).")
    eigenvalues, eigenvectors = np.linalg.eigh((a + a.T) / 2)
    if eigenvalues[0] < -tolerances.psd_clamp * scale:
        raise NotPSDError(float(eigenvalues[0]), tolerances.psd_clamp)
    roots = np.sqrt(np.clip(eigenvalues, 0.0, None))
    root = (eigenvectors * roots) @ eigenvectors.T
    return (root + root.T) / 2


def nullspace(matrix, rel_tol: float = DEFAULT_TOLERANCES.rank, scale: Optional[float] = None) -> Subspace:
    """
    Orthonormal basis of :math:`\\ker A` from a full SVD.

    Singular values at or below ``rel_tol * scale`` count as zero; ``scale`` defaults to the largest
    singular value of ``A``. Passing an explicit ``scale`` keeps round-off in a nearly vanishing ``A``
    from being mistaken for rank.
    """
    _check_rel_tol(rel_tol)
    a = as_matrix(matrix, square=False)
    _, singular_values, vh = scipy.linalg.svd(a, full_matrices=True)
    reference = float(singular_values.max(initial=0.0)) if scale is None else float(scale)
    rank = int(np.sum(singular_values > rel_tol * reference))
    return Subspace(vh[rank:].T)


def column_span(matrix: np.ndarray, rel_tol: float = DEFAULT_TOLERANCES.rank, scale: Optional[float] = None) -> Subspace:
    """Orthonormal basis of the column space, with the same rank rule as :func:`nullspace`."""
    _check_rel_tol(rel_tol)
    if matrix.shape[1] == 0:
        return Subspace.zero(matrix.shape[0])
    u, singular_values, _ = scipy.linalg.svd(matrix, full_matrices=False)
    reference = float(singular_values.max(initial=0.0)) if scale is None else float(scale)
    rank = int(np.sum(singular_values > rel_tol * reference))
    return Subspace(u[:, :rank])


def subspace_intersect(first: Subspace, second: Subspace, rel_tol: float = DEFAULT_TOLERANCES.rank) -> Subspace:
    """
    :math:`U \\cap W`, from the nullspace of :math:`[Q_U, -Q_W]`.
    """
    _check_same_ambient(first, second)
    if first.is_zero or second.is_zero:
        return Subspace.zero(first.ambient_dim)
    stacked = np.hstack([first.basis, -second.basis])
    # singular values of the stacked bases lie in [0, sqrt(2)]
    kernel = nullspace(stacked, rel_tol, scale=1.0)
    if kernel.is_zero:
        return Subspace.zero(first.ambient_dim)
    vectors = first.basis @ kernel.basis[: first.dim]
    return column_span(vectors, rel_tol)


def subspace_sum(first: Subspace, second: Subspace, rel_tol: float = DEFAULT_TOLERANCES.rank) -> Subspace:
    """:math:`U + W`."""
    _check_same_ambient(first, second)
    return column_span(np.hstack([first.basis, second.basis]), rel_tol)


def subspace_contains(subspace: Subspace, x, tol: float = DEFAULT_TOLERANCES.rank) -> bool:
    """
    ``True`` iff :math:`\\|x - P_U x\\| \\leq tol \\cdot \\|x\\|`; the zero vector lies in every subspace.
    """
    x = as_vector(x, dim=subspace.ambient_dim)
    norm = float(np.linalg.norm(x))
    if norm == 0:
        return True
    return subspace.distance(x) <= tol * norm


def intersect_all(subspaces: Iterable[Subspace], rel_tol: float = DEFAULT_TOLERANCES.rank) -> Subspace:
    subspaces = list(subspaces)
    if not subspaces:
        raise InvalidArgumentError("Cannot intersect an empty family of subspaces.")
    return functools.reduce(lambda acc, item: subspace_intersect(acc, item, rel_tol), subspaces)


def sum_all(subspaces: Iterable[Subspace], rel_tol: float = DEFAULT_TOLERANCES.rank) -> Subspace:
    subspaces = list(subspaces)
    if not subspaces:
        raise InvalidArgumentError("Cannot add an empty family of subspaces.")
    _check_same_ambient(*subspaces)
    return column_span(np.hstack([subspace.basis for subspace in subspaces]), rel_tol)


def restrict(matrix: np.ndarray, subspace: Subspace) -> np.ndarray:
    """Matrix of :math:`P_U B|_U` in the basis of ``U``."""
    return subspace.basis.T @ matrix @ subspace.basis


def preimage(matrix: np.ndarray, subspace: Subspace, rel_tol: float = DEFAULT_TOLERANCES.rank,
             scale: Optional[float] = None) -> Subspace:
    """:math:`B^{-1}(W) = \\ker((I - P_W) B)`."""
    if subspace.is_full:
        return Subspace.full(subspace.ambient_dim)
    residual = matrix - subspace.project(matrix)
    return nullspace(residual, rel_tol, scale=op_norm(matrix) if scale is None else scale)


def invariance_residual(matrix: np.ndarray, subspace: Subspace) -> float:
    """Largest :math:`\\|Bq - P_U Bq\\|` over the basis vectors ``q`` of ``U``."""
    if subspace.is_zero:
        return 0.0
    image = matrix @ subspace.basis
    residual = image - subspace.project(image)
    return float(np.max(np.linalg.norm(residual, axis=0)))
