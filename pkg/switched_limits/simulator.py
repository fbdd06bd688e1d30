"""
Evaluation of the flow :math:`\\Phi_u(t)` of a switched system along a switching signal, and the
numerical experiments built on it: the limit :math:`S_u = \\lim \\sqrt{\\Phi_u(t)^T \\Phi_u(t)}`,
sampled omega-limit sets and the inclusion checks predicted by the theory.

All functions expect a system in normalized coordinates (``P = I``) satisfying
:math:`B_i + B_i^T \\leq 0`; see :func:`normalize_system <switched_limits.systems.normalize_system>`.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.integrate

from switched_limits.config import DEFAULT_TOLERANCES, Tolerances
from switched_limits.exceptions import InvalidArgumentError, LyapunovConditionError, OutOfRangeError
from switched_limits.linalg import matrix_exponential, polar_decompose, sym_sqrt
from switched_limits.signals import Chaoticity, Regularity, SignalClassification, SwitchingSignal
from switched_limits.systems import MatrixAnalysis, SwitchedSystem, analyze_system, check_common_lyapunov
from switched_limits.utils import op_norm

logger = logging.getLogger(__name__)

#: switching times between two stored flow values, used to answer queries behind the frontier
ANCHOR_STRIDE = 128
#: cached segment exponentials; the cache is cleared when full
EXPONENTIAL_CACHE_SIZE = 4096


def require_hypotheses(system: SwitchedSystem, tolerances: Tolerances = DEFAULT_TOLERANCES) -> None:
    """
    :raises: :attr:`InvalidArgumentError <switched_limits.exceptions.InvalidArgumentError>` for a
             system that is not normalized,
             :attr:`LyapunovConditionError <switched_limits.exceptions.LyapunovConditionError>` when
             some :math:`B_i + B_i^T` is not negative semidefinite.
    """
    if not system.normalized:
        raise InvalidArgumentError("The system must be in normalized coordinates; call normalize_system first.")
    verdict = check_common_lyapunov(system, tolerances)
    if not verdict.passed:
        raise LyapunovConditionError(verdict.index, verdict.max_eigenvalue)


class Flow:
    """
    Incremental evaluator of :math:`\\Phi_u(t) = e^{(t - a_n) B_{u_n}} \\Phi_u(a_n)`.

    The product over completed segments is advanced once and kept, together with an anchor every
    :data:`ANCHOR_STRIDE` switches; increasing queries therefore cost one exponential each, earlier
    queries restart from the nearest anchor.

    :param system: a normalized switched system
    :param signal: the switching signal; its indices must be below ``system.size``
    """

    def __init__(self, system: SwitchedSystem, signal: SwitchingSignal,
                 tolerances: Tolerances = DEFAULT_TOLERANCES, check: bool = True):
        if check:
            require_hypotheses(system, tolerances)
        self.system = system
        self.signal = signal
        self._exponentials: Dict[Tuple[int, float], np.ndarray] = {}
        self._frontier = 0
        self._value = np.eye(system.dim)
        self._anchors: Dict[int, np.ndarray] = {0: self._value}

    def _matrix(self, index: int) -> np.ndarray:
        if index >= self.system.size:
            raise InvalidArgumentError(
                f"Signal uses index {index} but the system has {self.system.size} matrices."
            )
        return self.system.matrices[index]

    def _segment_exponential(self, index: int, duration: float) -> np.ndarray:
        # durations agreeing to 14 significant digits share one exponential
        duration = float(f"{duration:.14g}")
        key = (index, duration)
        cached = self._exponentials.get(key)
        if cached is None:
            cached = matrix_exponential(self._matrix(index), duration)
            if len(self._exponentials) >= EXPONENTIAL_CACHE_SIZE:
                self._exponentials.clear()
            self._exponentials[key] = cached
        return cached

    def _step(self, n: int, value: np.ndarray) -> np.ndarray:
        start, index = self.signal.switch(n)
        end = self.signal.segment_end(n)
        return self._segment_exponential(index, end - start) @ value

    def at_switch(self, n: int) -> np.ndarray:
        """:math:`\\Phi_u(a_n)`."""
        if n < 0:
            raise InvalidArgumentError(f"Switch number must be non-negative, got {n}.")
        if n >= self._frontier:
            while self._frontier < n:
                self._value = self._step(self._frontier, self._value)
                self._frontier += 1
                if self._frontier % ANCHOR_STRIDE == 0:
                    self._anchors[self._frontier] = self._value
            return self._value
        anchor = (n // ANCHOR_STRIDE) * ANCHOR_STRIDE
        value = self._anchors[anchor]
        for k in range(anchor, n):
            value = self._step(k, value)
        return value

    def at(self, t: float) -> np.ndarray:
        """:math:`\\Phi_u(t)`."""
        n = self.signal.segment_index(t)
        start, index = self.signal.switch(n)
        at_switch = self.at_switch(n)
        if t == start:
            return at_switch.copy()
        return matrix_exponential(self._matrix(index), t - start) @ at_switch

    def gram(self, t: float) -> np.ndarray:
        """:math:`\\Phi_u(t)^T \\Phi_u(t)`, symmetrized."""
        value = self.at(t)
        gram = value.T @ value
        return (gram + gram.T) / 2


def flow(system: SwitchedSystem, signal: SwitchingSignal, t: float,
         tolerances: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """
    :return: :math:`\\Phi_u(t)`, with :math:`\\Phi_u(0) = I`.

    :raises: :attr:`LyapunovConditionError <switched_limits.exceptions.LyapunovConditionError>`,
             :attr:`InvalidArgumentError <switched_limits.exceptions.InvalidArgumentError>` for
             negative ``t`` or out-of-range indices,
             :attr:`OutOfRangeError <switched_limits.exceptions.OutOfRangeError>` past an explicit horizon.
    """
    return Flow(system, signal, tolerances).at(t)


@dataclass(frozen=True)
class FlowRecord:
    times: np.ndarray
    #: ``(m, d, d)`` flow values
    flows: np.ndarray
    grams: np.ndarray
    orthogonal_factors: np.ndarray
    active_indices: np.ndarray
    #: ``(n, d)`` initial conditions, one per row
    initial_conditions: np.ndarray
    #: ``(n, m)`` norms of :math:`\\Phi_u(t_j) x_k`
    norms: np.ndarray

    def gram_eigenvalues(self) -> np.ndarray:
        """``(m, d)`` eigenvalues of every Gram matrix, descending."""
        return np.linalg.eigvalsh(self.grams)[:, ::-1]

    def loewner_violation(self) -> float:
        """Largest eigenvalue of :math:`G(t_{j+1}) - G(t_j)`; at most round-off for a dissipative system."""
        if len(self.times) < 2:
            return 0.0
        steps = self.grams[1:] - self.grams[:-1]
        return float(np.max(np.linalg.eigvalsh((steps + np.swapaxes(steps, 1, 2)) / 2)[:, -1]))

    def norm_increase(self) -> float:
        if self.norms.shape[1] < 2:
            return 0.0
        return float(np.max(np.diff(self.norms, axis=1), initial=0.0))

    def lipschitz_excess(self, constant: float) -> float:
        """Largest :math:`\\|\\Phi(t_{j+1}) - \\Phi(t_j)\\| - L (t_{j+1} - t_j)` over the grid."""
        if len(self.times) < 2:
            return 0.0
        jumps = np.linalg.norm(self.flows[1:] - self.flows[:-1], ord=2, axis=(1, 2))
        return float(np.max(jumps - constant * np.diff(self.times)))

    def to_json(self) -> dict:
        return {
            "times": self.times.tolist(),
            "gram_eigenvalues": self.gram_eigenvalues().tolist(),
            "active_indices": self.active_indices.tolist(),
            "norms": self.norms.tolist(),
            "loewner_violation": self.loewner_violation(),
        }


def record_flow(system: SwitchedSystem, signal: SwitchingSignal, times: Sequence[float],
                initial_conditions: Optional[np.ndarray] = None,
                tolerances: Tolerances = DEFAULT_TOLERANCES) -> FlowRecord:
    """
    Evaluates the flow on a non-decreasing time grid, with Gram matrices, polar rotation factors and the
    norms of the trajectories starting at ``initial_conditions``.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0:
        raise InvalidArgumentError("times must be a non-empty 1-d sequence.")
    if np.any(np.diff(times) < 0):
        raise InvalidArgumentError("times must be non-decreasing.")
    d = system.dim
    states = np.eye(d) if initial_conditions is None else np.atleast_2d(np.asarray(initial_conditions, dtype=float))
    if states.shape[1] != d:
        raise InvalidArgumentError(f"Initial conditions have dimension {states.shape[1]}, expected {d}.")
    evaluator = Flow(system, signal, tolerances)
    flows = np.empty((times.size, d, d))
    orthogonal = np.empty((times.size, d, d))
    active = np.empty(times.size, dtype=int)
    for j, t in enumerate(times):
        flows[j] = evaluator.at(t)
        orthogonal[j], _ = polar_decompose(flows[j])
        active[j] = signal.signal_at(t)
    grams = np.einsum("mki,mkj->mij", flows, flows)
    norms = np.linalg.norm(np.einsum("mij,nj->nmi", flows, states), axis=-1)
    record = FlowRecord(times, flows, (grams + np.swapaxes(grams, 1, 2)) / 2, orthogonal, active, states, norms)
    violation = record.loewner_violation()
    if violation > tolerances.spectral_margin:
        logger.warning("Gram matrices increased by %.3g along the grid.", violation)
    return record


@dataclass(frozen=True)
class SuEstimate:
    matrix: np.ndarray
    rank: int
    horizon_used: float
    #: :math:`\\|G(t) - G(t/2)\\|` at the final checkpoint
    gram_residual: float
    converged: bool
    #: ``(t, residual)`` at every checkpoint
    checkpoints: Tuple[Tuple[float, float], ...] = ()
    monotone: bool = True

    def to_json(self) -> dict:
        return {
            "matrix": self.matrix.tolist(),
            "rank": self.rank,
            "eigenvalues": np.linalg.eigvalsh(self.matrix)[::-1].tolist(),
            "horizon_used": self.horizon_used,
            "gram_residual": self.gram_residual,
            "converged": self.converged,
            "monotone": self.monotone,
            "checkpoints": [list(checkpoint) for checkpoint in self.checkpoints],
        }


def first_switch_time(signal: SwitchingSignal) -> float:
    """:math:`a_1`, or ``0`` for a signal that never switches."""
    try:
        return signal.switch(1)[0]
    except OutOfRangeError:
        return 0.0


def estimate_su(system: SwitchedSystem, signal: SwitchingSignal, horizon: Optional[float] = None,
                tol: Optional[float] = None, tolerances: Tolerances = DEFAULT_TOLERANCES,
                start: float = 1.0) -> SuEstimate:
    """
    Estimates :math:`S_u` from Gram matrices at geometric checkpoints ``start * 2^k``.

    Stops at the first eligible checkpoint ``t`` with :math:`\\|G(t) - G(t/2)\\| \\leq` ``tol``, or at
    ``horizon`` (never beyond ``tolerances.horizon_cap``). A checkpoint is eligible when ``t/2`` lies at or
    past the first switching time and ``t >= start * system.size``; before that the flow may not have met
    every matrix and a stalled Gram says nothing about the limit. Gram matrices decrease in the Loewner
    order; a violation is logged and reported through ``monotone``.

    :return: :class:`SuEstimate`; ``converged`` is ``False`` when the horizon was reached first.
    :raises: :attr:`InvalidArgumentError <switched_limits.exceptions.InvalidArgumentError>` for a horizon
             that is not positive and finite.
    """
    tol = tolerances.convergence if tol is None else tol
    horizon = tolerances.horizon_cap if horizon is None else min(float(horizon), tolerances.horizon_cap)
    if horizon <= 0 or not math.isfinite(horizon):
        raise InvalidArgumentError(f"horizon must be positive and finite, got {horizon}.")
    if start <= 0:
        raise InvalidArgumentError(f"start must be positive, got {start}.")
    evaluator = Flow(system, signal, tolerances)
    earliest = max(start * system.size, 2 * first_switch_time(signal))
    grams: Dict[float, np.ndarray] = {}

    def gram(t: float) -> np.ndarray:
        if t not in grams:
            grams[t] = evaluator.gram(t)
        return grams[t]

    checkpoints = []
    monotone = True
    t = min(start, horizon)
    while True:
        current, half = gram(t), gram(t / 2)
        residual = op_norm(current - half)
        increase = float(np.linalg.eigvalsh(current - half)[-1])
        if increase > tolerances.spectral_margin * max(1.0, op_norm(half)):
            monotone = False
            logger.warning("Gram matrix increased by %.3g between t=%s and t=%s.", increase, t / 2, t)
        checkpoints.append((t, residual))
        logger.debug("S_u checkpoint t=%s residual=%.3g", t, residual)
        converged = residual <= tol and t >= earliest
        if converged or t >= horizon:
            break
        t = min(2 * t, horizon)

    matrix = sym_sqrt(gram(t), tolerances)
    rank = int(np.sum(np.linalg.eigvalsh(matrix) > tolerances.su_rank))
    if not converged:
        logger.info("S_u estimate did not converge by t=%s (residual %.3g).", t, residual)
    return SuEstimate(matrix, rank, t, residual, converged, tuple(checkpoints), monotone)


def su_integral_check(system: SwitchedSystem, signal: SwitchingSignal, horizon: float,
                      tolerances: Tolerances = DEFAULT_TOLERANCES,
                      epsabs: float = 1e-12, epsrel: float = 1e-10) -> float:
    """
    Checks :math:`\\Phi^T(T)\\Phi(T) = I + \\int_0^T \\Phi^T(s)(B_{u(s)} + B_{u(s)}^T)\\Phi(s)\\,ds` by
    adaptive quadrature on every segment.

    :return: operator norm of the difference of both sides.
    """
    evaluator = Flow(system, signal, tolerances)
    total = np.eye(system.dim)
    for start, end, index in signal.segments_until(horizon):
        if end <= start:
            continue
        matrix = system.matrices[index]
        symmetric = matrix + matrix.T
        initial = evaluator.at(start)

        def integrand(s, matrix=matrix, symmetric=symmetric, initial=initial):
            value = matrix_exponential(matrix, s) @ initial
            return value.T @ symmetric @ value

        integral, _ = scipy.integrate.quad_vec(integrand, 0.0, end - start, epsabs=epsabs, epsrel=epsrel)
        total = total + integral
    return op_norm(total - evaluator.gram(horizon))


@dataclass(frozen=True)
class OmegaBudget:
    """Where and how densely the omega-limit set is sampled."""

    start: float = 100.0
    horizon: float = 200.0
    samples: int = 200
    #: late switching points kept for the switch-point cluster
    max_switch_points: int = 500

    def __post_init__(self):
        if not (0 <= self.start < self.horizon) or not math.isfinite(self.horizon):
            raise InvalidArgumentError("Sampling window must satisfy 0 <= start < horizon < inf.")
        if self.samples < 2 or self.max_switch_points < 1:
            raise InvalidArgumentError("samples must be at least 2 and max_switch_points at least 1.")


@dataclass(frozen=True)
class OmegaSample:
    times: np.ndarray
    #: ``(m, d, d)`` flow values on the sampling grid
    matrix_points: np.ndarray
    orthogonal_cluster: np.ndarray
    switch_times: np.ndarray
    switch_indices: np.ndarray
    switch_dwells: np.ndarray
    #: ``(s, d, d)`` flow values at the late switching times
    switch_points: np.ndarray
    initial_conditions: np.ndarray
    #: ``(n, m, d)`` trajectory points :math:`\\Phi_u(t_j) x_k`
    points: np.ndarray
    #: ``(n, m, p)`` distances of every point to every ``V_i``
    distances_to_v: np.ndarray
    #: ``(n, m)`` distances of every point to the nearest late switching point of the same trajectory
    distances_to_switches: np.ndarray
    #: ``(n,)`` final norms, the radius of the sphere that contains each omega-limit set
    radius: np.ndarray
    #: ``(n,)`` spread of the norms over the sampling window
    radius_spread: np.ndarray
    final_gram: np.ndarray
    analyses: Tuple[MatrixAnalysis, ...] = field(repr=False, default=())

    def switch_groups(self) -> Dict[int, np.ndarray]:
        """Positions of the late switching points, grouped by the index switched to."""
        return {int(i): np.flatnonzero(self.switch_indices == i) for i in np.unique(self.switch_indices)}

    def to_json(self) -> dict:
        return {
            "start": float(self.times[0]),
            "horizon": float(self.times[-1]),
            "samples": int(self.times.size),
            "switch_points": int(self.switch_times.size),
            "radius": self.radius.tolist(),
            "radius_spread": self.radius_spread.tolist(),
            "max_distance_to_v": np.min(self.distances_to_v, axis=-1).max(initial=0.0),
        }


def sample_omega(system: SwitchedSystem, signal: SwitchingSignal, initial_conditions,
                 budget: OmegaBudget = OmegaBudget(), tolerances: Tolerances = DEFAULT_TOLERANCES) -> OmegaSample:
    """
    Samples the tail of the flow on ``[budget.start, budget.horizon]``: matrix points, their polar
    rotation factors, the flow at late switching times and the trajectories of ``initial_conditions``.
    """
    states = np.atleast_2d(np.asarray(initial_conditions, dtype=float))
    if states.shape[1] != system.dim:
        raise InvalidArgumentError(f"Initial conditions have dimension {states.shape[1]}, expected {system.dim}.")
    evaluator = Flow(system, signal, tolerances)
    analyses = tuple(analyze_system(system, tolerances))
    times = np.linspace(budget.start, budget.horizon, budget.samples)
    matrix_points = np.stack([evaluator.at(t) for t in times])
    orthogonal = np.stack([polar_decompose(point)[0] for point in matrix_points])

    first = signal.segment_index(budget.start)
    last = signal.segment_index(budget.horizon)
    late = list(range(first + 1, last + 1))
    if len(late) > budget.max_switch_points:
        late = [late[k] for k in np.linspace(0, len(late) - 1, budget.max_switch_points).astype(int)]
    switch_times = np.array([signal.switch(n)[0] for n in late])
    switch_indices = np.array([signal.switch(n)[1] for n in late], dtype=int)
    switch_dwells = np.array([signal.segment_end(n) - signal.switch(n)[0] for n in late])
    switch_points = (
        np.stack([evaluator.at_switch(n) for n in late]) if late else np.zeros((0, system.dim, system.dim))
    )

    points = np.einsum("mij,nj->nmi", matrix_points, states)
    distances_to_v = np.stack([analysis.V.distances(points) for analysis in analyses], axis=-1)
    if late:
        cluster = np.einsum("sij,nj->nsi", switch_points, states)
        gaps = np.linalg.norm(points[:, :, None, :] - cluster[:, None, :, :], axis=-1)
        distances_to_switches = gaps.min(axis=-1)
    else:
        distances_to_switches = np.full(points.shape[:2], np.inf)
    norms = np.linalg.norm(points, axis=-1)
    final = matrix_points[-1]
    return OmegaSample(
        times=times,
        matrix_points=matrix_points,
        orthogonal_cluster=orthogonal,
        switch_times=switch_times,
        switch_indices=switch_indices,
        switch_dwells=switch_dwells,
        switch_points=switch_points,
        initial_conditions=states,
        points=points,
        distances_to_v=distances_to_v,
        distances_to_switches=distances_to_switches,
        radius=norms[:, -1],
        radius_spread=norms.max(axis=1) - norms.min(axis=1),
        final_gram=(final.T @ final + (final.T @ final).T) / 2,
        analyses=analyses,
    )


@dataclass(frozen=True)
class InclusionCheck:
    name: str
    applicable: bool
    passed: Optional[bool]
    value: Optional[float]
    threshold: Optional[float]
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "applicable": self.applicable,
            "passed": self.passed,
            "value": self.value,
            "threshold": self.threshold,
            "detail": self.detail,
        }


def _not_applicable(name: str, detail: str) -> InclusionCheck:
    return InclusionCheck(name, False, None, None, None, detail)


def _judge(name: str, value: float, threshold: float, detail: str = "") -> InclusionCheck:
    return InclusionCheck(name, True, bool(value <= threshold), float(value), threshold, detail)


def omega_inclusion_check(sample: OmegaSample, tolerances: Tolerances = DEFAULT_TOLERANCES) -> InclusionCheck:
    """
    Every late trajectory point lies near :math:`\\bigcup_i V_i` or near the late switching points.
    """
    nearest = np.minimum(sample.distances_to_v.min(axis=-1), sample.distances_to_switches)
    return _judge("omega_in_union_of_V", float(nearest.max(initial=0.0)), tolerances.inclusion)


def fu_inclusion_checks(sample: OmegaSample, persistent: Sequence[int],
                        tolerances: Tolerances = DEFAULT_TOLERANCES) -> List[InclusionCheck]:
    """
    Late points lie near :math:`F_u = \\bigcup_{i \\in J_u} K_i`, and the omega-limit set meets every
    ``K_i`` with ``i`` in ``J_u``.
    """
    if not persistent:
        return [
            _not_applicable("omega_in_F_u", "J_u is empty"),
            _not_applicable("omega_meets_each_K", "J_u is empty"),
        ]
    persistent = sorted(persistent)
    points = sample.points.reshape(-1, sample.points.shape[-1])
    distances = np.stack([sample.analyses[i].K.distances(points) for i in persistent], axis=-1)
    inside = _judge("omega_in_F_u", float(distances.min(axis=-1).max(initial=0.0)), tolerances.inclusion)
    closest = []
    for k in range(sample.points.shape[0]):
        per_trajectory = np.stack([sample.analyses[i].K.distances(sample.points[k]) for i in persistent], axis=-1)
        closest.append(per_trajectory.min(axis=0).max())
    meets = _judge(
        "omega_meets_each_K",
        float(max(closest)),
        tolerances.inclusion,
        f"J_u = {persistent}",
    )
    return [inside, meets]


def rank_bound_check(rank: int, analyses: Sequence[MatrixAnalysis],
                     classification: Optional[SignalClassification] = None) -> InclusionCheck:
    """
    For regular signals :math:`rank(S_u) \\leq \\min_i \\dim V_i`.
    """
    bound = min(analysis.V.dim for analysis in analyses)
    if classification is not None and classification.regular_verdict is not Regularity.REGULAR:
        return _not_applicable("rank_bound", f"signal is {classification.regular_verdict.value}")
    return InclusionCheck("rank_bound", True, rank <= bound, float(rank), float(bound), "rank(S_u) <= min dim V_i")


def image_inclusion_check(sample: OmegaSample, tolerances: Tolerances = DEFAULT_TOLERANCES) -> InclusionCheck:
    """
    Late flow matrices map into some ``V_i``: :math:`\\min_i \\|(I - P_{V_i}) \\Phi_u(t)\\|` is small.
    """
    residuals = []
    for point in sample.matrix_points:
        residuals.append(min(op_norm(point - analysis.V.project(point)) for analysis in sample.analyses))
    return _judge("image_in_some_V", float(max(residuals, default=0.0)), tolerances.inclusion)


def switch_point_check(sample: OmegaSample, classification: SignalClassification,
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> InclusionCheck:
    """
    Flow values at switches into a recurrent index ``i`` with dwell at least ``delta_i`` approach ``V_i``.
    """
    worst = 0.0
    checked = 0
    for evidence in classification.per_index:
        if not evidence.recurrent:
            continue
        positions = np.flatnonzero(
            (sample.switch_indices == evidence.index) & (sample.switch_dwells >= min(evidence.delta, 1e300))
        )
        for n in positions:
            point = sample.switch_points[n]
            v = sample.analyses[evidence.index].V
            worst = max(worst, op_norm(point - v.project(point)))
            checked += 1
    if not checked:
        return _not_applicable("switch_points_in_V", "no late switch into a recurrent index")
    return _judge("switch_points_in_V", worst, tolerances.inclusion, f"{checked} switch points")


@dataclass(frozen=True)
class InclusionReport:
    checks: Tuple[InclusionCheck, ...]

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks if check.applicable)

    def __getitem__(self, name: str) -> InclusionCheck:
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": [check.to_json() for check in self.checks]}


def inclusion_checks(sample: OmegaSample, classification: SignalClassification,
                     su: Optional[SuEstimate] = None,
                     tolerances: Tolerances = DEFAULT_TOLERANCES) -> InclusionReport:
    """
    Runs every empirical check that the signal class makes applicable on an omega-limit sample.
    """
    checks = [omega_inclusion_check(sample, tolerances)]
    checks.extend(fu_inclusion_checks(sample, sorted(classification.j_u_estimate), tolerances))
    if su is not None:
        rank = su.rank
    else:
        rank = int(np.sum(np.linalg.eigvalsh(sym_sqrt(sample.final_gram, tolerances)) > tolerances.su_rank))
    checks.append(rank_bound_check(rank, sample.analyses, classification))
    if classification.chaotic_verdict is Chaoticity.NON_CHAOTIC:
        checks.append(image_inclusion_check(sample, tolerances))
    else:
        checks.append(_not_applicable("image_in_some_V", "signal is not known to be non-chaotic"))
    checks.append(switch_point_check(sample, classification, tolerances))
    return InclusionReport(tuple(checks))
