"""
Switched linear systems :math:`\\dot x = B_{u(t)} x` sharing a quadratic Lyapunov function, and the
per-matrix subspaces that govern their limit sets:

* ``K_i = ker(B_i + B_i^T)``, the directions along which the Lyapunov function is not strictly
  decreasing;
* ``V_i``, the largest ``B_i``-invariant subspace of ``K_i`` (``B_i`` is skew-symmetric on it).
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from switched_limits.config import DEFAULT_TOLERANCES, Tolerances
from switched_limits.exceptions import InvalidArgumentError
from switched_limits.linalg import (
    Subspace,
    invariance_residual,
    matrix_exponential,
    nullspace,
    preimage,
    restrict,
    subspace_intersect,
    sym_sqrt,
)
from switched_limits.utils import (
    as_matrix,
    as_vector,
    max_symmetric_eigenvalue,
    op_norm,
    spectral_abscissa,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SwitchedSystem:
    """
    A finite family of real ``d x d`` matrices with an optional common Lyapunov matrix ``P``.

    ``lyapunov=None`` means the identity: the system is already in normalized coordinates.
    The Lyapunov inequality itself is not enforced here; use :func:`check_common_lyapunov`.
    """

    matrices: Tuple[np.ndarray, ...]
    lyapunov: Optional[np.ndarray] = None
    labels: Optional[Tuple[str, ...]] = None
    #: :math:`P^{1/2}`, set by :func:`normalize_system` to map original states to normalized ones
    transform: Optional[np.ndarray] = None

    def __post_init__(self):
        if isinstance(self.matrices, np.ndarray) and self.matrices.ndim == 2:
            raise InvalidArgumentError("matrices must be a sequence of square matrices.")
        matrices = tuple(as_matrix(b, name=f"matrix {i}") for i, b in enumerate(self.matrices))
        if not matrices:
            raise InvalidArgumentError("A switched system needs at least one matrix.")
        dim = matrices[0].shape[0]
        for i, matrix in enumerate(matrices):
            if matrix.shape != (dim, dim):
                raise InvalidArgumentError(f"matrix {i} has shape {matrix.shape}, expected {(dim, dim)}.")
            matrix.setflags(write=False)
        object.__setattr__(self, "matrices", matrices)

        if self.lyapunov is not None:
            lyapunov = as_matrix(self.lyapunov, name="lyapunov")
            if lyapunov.shape != (dim, dim):
                raise InvalidArgumentError(f"lyapunov has shape {lyapunov.shape}, expected {(dim, dim)}.")
            _check_positive_definite(lyapunov, DEFAULT_TOLERANCES)
            lyapunov.setflags(write=False)
            object.__setattr__(self, "lyapunov", lyapunov)

        if self.labels is not None:
            labels = tuple(str(label) for label in self.labels)
            if len(labels) != len(matrices):
                raise InvalidArgumentError(f"Got {len(labels)} labels for {len(matrices)} matrices.")
            object.__setattr__(self, "labels", labels)

        if self.transform is not None:
            transform = as_matrix(self.transform, name="transform")
            transform.setflags(write=False)
            object.__setattr__(self, "transform", transform)

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def size(self) -> int:
        """Number of matrices ``p``."""
        return len(self.matrices)

    def __len__(self) -> int:
        return self.size

    @property
    def normalized(self) -> bool:
        if self.lyapunov is None:
            return True
        return bool(np.allclose(self.lyapunov, np.eye(self.dim), rtol=0, atol=DEFAULT_TOLERANCES.symmetry))

    @property
    def lipschitz(self) -> float:
        """:math:`\\max_i \\|B_i\\|_2`, a Lipschitz constant of every flow in normalized coordinates."""
        return max(op_norm(b) for b in self.matrices)

    def label(self, index: int) -> str:
        if self.labels is not None:
            return self.labels[index]
        return f"B{index}"

    def to_json(self) -> dict:
        data = {"dimension": self.dim, "matrices": [b.tolist() for b in self.matrices]}
        if self.lyapunov is not None:
            data["lyapunov"] = self.lyapunov.tolist()
        if self.labels is not None:
            data["labels"] = list(self.labels)
        return data


def _check_positive_definite(matrix: np.ndarray, tolerances: Tolerances) -> None:
    scale = max(1.0, op_norm(matrix))
    if np.max(np.abs(matrix - matrix.T)) > tolerances.symmetry * scale:
        raise InvalidArgumentError("lyapunov matrix is not symmetric.")
    smallest = float(np.linalg.eigvalsh((matrix + matrix.T) / 2)[0])
    if smallest <= 0:
        raise InvalidArgumentError(
            f"lyapunov matrix is not positive definite (smallest eigenvalue {smallest:.6g})."
        )


@dataclass(frozen=True)
class LyapunovVerdict:
    passed: bool
    #: first offending matrix, ``None`` when the check passes
    index: Optional[int]
    #: largest eigenvalue of :math:`B_i + B_i^T` over the offending matrix (or over all when passing)
    max_eigenvalue: float
    #: largest eigenvalue of :math:`B_i + B_i^T` for every ``i``, in normalized coordinates
    eigenvalues: Tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "index": self.index,
            "max_eigenvalue": self.max_eigenvalue,
            "eigenvalues": list(self.eigenvalues),
        }


def check_common_lyapunov(system: SwitchedSystem, tolerances: Tolerances = DEFAULT_TOLERANCES) -> LyapunovVerdict:
    """
    Checks :math:`\\lambda_{max}(B_i + B_i^T) \\leq` ``spectral_margin`` for every matrix, after
    normalizing when the system carries a non-identity ``P``.

    :return: :class:`LyapunovVerdict`, failing on the first offending index.

        Example:

        >>> check_common_lyapunov(SwitchedSystem([np.eye(2)])).to_json()
        {"passed": False, "index": 0, "max_eigenvalue": 2.0, "eigenvalues": [2.0]}
    """
    normalized = system if system.normalized else normalize_system(system, tolerances)
    eigenvalues = tuple(max_symmetric_eigenvalue(b) for b in normalized.matrices)
    for index, (matrix, value) in enumerate(zip(normalized.matrices, eigenvalues)):
        if value > tolerances.spectral_margin * max(1.0, op_norm(matrix)):
            logger.info("Matrix %d violates the common Lyapunov condition (%.6g).", index, value)
            return LyapunovVerdict(False, index, value, eigenvalues)
    return LyapunovVerdict(True, None, max(eigenvalues), eigenvalues)


def normalize_system(system: SwitchedSystem, tolerances: Tolerances = DEFAULT_TOLERANCES) -> SwitchedSystem:
    """
    Changes coordinates by :math:`\\tilde x = P^{1/2} x`, so that :math:`\\tilde B_i = P^{1/2} B_i P^{-1/2}`
    and the Lyapunov function becomes :math:`\\|\\tilde x\\|^2`.

    :raises: :attr:`InvalidArgumentError <switched_limits.exceptions.InvalidArgumentError>`
             when ``P`` is not symmetric positive definite.
    """
    if system.lyapunov is None:
        return system
    _check_positive_definite(system.lyapunov, tolerances)
    root = sym_sqrt(system.lyapunov, tolerances)
    inverse_root = np.linalg.inv(root)
    matrices = tuple(root @ b @ inverse_root for b in system.matrices)
    return SwitchedSystem(matrices=matrices, lyapunov=None, labels=system.labels, transform=root)


def compute_K(matrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Subspace:
    """:math:`\\ker(B + B^T)`, with rank decided relative to :math:`\\|B\\|`."""
    b = as_matrix(matrix)
    return nullspace(b + b.T, tolerances.rank, scale=op_norm(b))


def invariant_chain(matrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[Subspace]:
    """
    Computes the decreasing chain :math:`W_0 = K \\supseteq W_1 \\supseteq \\dots`,
    :math:`W_{j+1} = W_j \\cap B^{-1} W_j`, stopping once a step no longer shrinks the subspace.

    The last element is ``V``, the largest ``B``-invariant subspace of ``K``.

    :raises: :attr:`InvalidArgumentError <switched_limits.exceptions.InvalidArgumentError>`
             if :math:`B + B^T` has an eigenvalue above the spectral margin.
    """
    b = as_matrix(matrix)
    scale = op_norm(b)
    top = max_symmetric_eigenvalue(b)
    if top > tolerances.spectral_margin * max(1.0, scale):
        raise InvalidArgumentError(
            f"B + B^T must be negative semidefinite; largest eigenvalue is {top:.6g}."
        )
    current = compute_K(b, tolerances)
    chain = [current]
    for _ in range(b.shape[0]):
        if current.is_zero:
            break
        following = subspace_intersect(current, preimage(b, current, tolerances.rank, scale=scale), tolerances.rank)
        if following.dim == current.dim:
            break
        chain.append(following)
        current = following
    logger.debug("Invariant chain dimensions: %s", [subspace.dim for subspace in chain])
    return chain


def compute_V(matrix, tolerances: Tolerances = DEFAULT_TOLERANCES) -> Subspace:
    """Largest ``B``-invariant subspace of :math:`\\ker(B + B^T)`."""
    return invariant_chain(matrix, tolerances)[-1]


@dataclass(frozen=True)
class MatrixAnalysis:
    index: int
    V: Subspace
    K: Subspace
    is_hurwitz: bool
    #: :math:`\\|Q^T (B + B^T) Q\\| / 2` over ``V``; ``B`` restricted to ``V`` is skew up to this value
    skew_residual: float
    #: spectral abscissa of ``B`` compressed to the orthogonal complement of ``V``; ``None`` when ``V`` is everything
    complement_spectral_abscissa: Optional[float]
    chain_dims: Tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "V": self.V.to_json(),
            "K": self.K.to_json(),
            "is_hurwitz": self.is_hurwitz,
            "skew_residual": self.skew_residual,
            "complement_spectral_abscissa": self.complement_spectral_abscissa,
            "chain_dims": list(self.chain_dims),
        }


def analyze_matrix(matrix, index: int = 0, tolerances: Tolerances = DEFAULT_TOLERANCES) -> MatrixAnalysis:
    """
    Computes ``K``, ``V`` and the diagnostics of the decomposition :math:`\\mathbb{R}^d = V \\oplus V^\\perp`.

    ``B`` is skew on ``V`` and Hurwitz on :math:`V^\\perp` (once compressed), hence ``B`` is Hurwitz
    iff ``V = {0}``.
    """
    b = as_matrix(matrix)
    chain = invariant_chain(b, tolerances)
    v, k = chain[-1], chain[0]
    skew_residual = 0.0
    if not v.is_zero:
        on_v = restrict(b, v)
        skew_residual = op_norm(on_v + on_v.T) / 2
    abscissa = None
    if not v.is_full:
        abscissa = spectral_abscissa(restrict(b, v.orthogonal_complement()))
        if abscissa >= -tolerances.spectral_margin:
            logger.warning(
                "Matrix %d: compression to the complement of V has spectral abscissa %.3g >= 0; "
                "the rank tolerance may be too tight.",
                index,
                abscissa,
            )
    return MatrixAnalysis(
        index=index,
        V=v,
        K=k,
        is_hurwitz=v.is_zero,
        skew_residual=skew_residual,
        complement_spectral_abscissa=abscissa,
        chain_dims=tuple(subspace.dim for subspace in chain),
    )


def analyze_system(system: SwitchedSystem, tolerances: Tolerances = DEFAULT_TOLERANCES,
                   workers: int = 1) -> List[MatrixAnalysis]:
    """
    Runs :func:`analyze_matrix` on every matrix of the normalized system.

    :param workers: analyses are independent and may run on a thread pool.
    """
    normalized = system if system.normalized else normalize_system(system, tolerances)
    jobs = list(enumerate(normalized.matrices))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda job: analyze_matrix(job[1], job[0], tolerances), jobs))
    return [analyze_matrix(matrix, index, tolerances) for index, matrix in jobs]


@dataclass(frozen=True)
class DecompositionCheck:
    v_invariance: float
    complement_invariance: float
    skew_residual: float
    complement_spectral_abscissa: Optional[float]

    def passed(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
        abscissa_ok = (
            self.complement_spectral_abscissa is None
            or self.complement_spectral_abscissa < -tolerances.spectral_margin
        )
        return self.v_invariance <= 1e-6 and self.skew_residual <= 1e-6 and abscissa_ok


def validate_decomposition(matrix, analysis: MatrixAnalysis) -> DecompositionCheck:
    """
    Measures how well :math:`V` and :math:`V^\\perp` are ``B``-invariant. ``V^\\perp`` is invariant
    because ``B`` is skew on ``V``: :math:`\\langle Bw, v\\rangle = -\\langle w, Bv\\rangle = 0`.
    """
    b = as_matrix(matrix)
    return DecompositionCheck(
        v_invariance=invariance_residual(b, analysis.V),
        complement_invariance=invariance_residual(b, analysis.V.orthogonal_complement()),
        skew_residual=analysis.skew_residual,
        complement_spectral_abscissa=analysis.complement_spectral_abscissa,
    )


def norm_preserving(matrix, x, tau: float = 1.0, rtol: float = 1e-10) -> bool:
    """
    ``True`` iff :math:`\\|e^{\\tau B} x\\| \\geq (1 - rtol) \\|x\\|`, i.e. the flow of a dissipative ``B``
    does not decrease the norm of ``x``; for ``tau > 0`` this happens iff ``x`` lies in ``V``.
    """
    b = as_matrix(matrix)
    x = as_vector(x, dim=b.shape[0])
    norm = float(np.linalg.norm(x))
    if norm == 0:
        return True
    return float(np.linalg.norm(matrix_exponential(b, tau) @ x)) >= (1 - rtol) * norm


def subspaces_of(analyses: Sequence[MatrixAnalysis], which: str = "V") -> List[Subspace]:
    return [getattr(analysis, which) for analysis in analyses]
