"""
Exact stability certificates computed from the subspaces ``V_i`` and ``K_i`` alone, without simulation.

Every certificate is sufficient only: a failing check means "inconclusive", never "unstable".
"""
import itertools
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from switched_limits.config import DEFAULT_TOLERANCES, Tolerances
from switched_limits.exceptions import InvalidArgumentError
from switched_limits.linalg import Subspace, intersect_all, subspace_intersect, sum_all
from switched_limits.systems import (
    LyapunovVerdict,
    MatrixAnalysis,
    SwitchedSystem,
    analyze_system,
    check_common_lyapunov,
    normalize_system,
)
from switched_limits.utils import spectral_abscissa

logger = logging.getLogger(__name__)

#: largest family for which every index set is enumerated by :func:`theorem6_any_input`
MAX_ANY_INPUT_SIZE = 12


def _check_family(subspaces: Sequence[Subspace]) -> None:
    if not subspaces:
        raise InvalidArgumentError("The subspace list must not be empty.")
    dims = {subspace.ambient_dim for subspace in subspaces}
    if len(dims) > 1:
        raise InvalidArgumentError(f"Subspaces live in different ambient dimensions: {sorted(dims)}.")


@dataclass(frozen=True)
class IntersectionGraph:
    """
    Nodes are subspace indices; ``(i, j)`` is an edge iff :math:`\\dim(V_i \\cap V_j) \\geq 1`.
    Zero subspaces never get an edge.
    """

    dims: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    components: Tuple[Tuple[int, ...], ...]
    zero_nodes: Tuple[int, ...]

    @property
    def is_connected(self) -> bool:
        return len(self.components) == 1

    def to_json(self) -> dict:
        return {
            "dims": list(self.dims),
            "edges": [list(edge) for edge in self.edges],
            "components": [list(component) for component in self.components],
            "zero_nodes": list(self.zero_nodes),
        }


def build_intersection_graph(subspaces: Sequence[Subspace],
                             tolerances: Tolerances = DEFAULT_TOLERANCES) -> IntersectionGraph:
    _check_family(subspaces)
    nodes = range(len(subspaces))
    edges = [
        (i, j)
        for i, j in itertools.combinations(nodes, 2)
        if not subspaces[i].is_zero
        and not subspaces[j].is_zero
        and subspace_intersect(subspaces[i], subspaces[j], tolerances.rank).dim >= 1
    ]
    neighbours = np.zeros((len(subspaces), len(subspaces)), dtype=bool)
    for i, j in edges:
        neighbours[i, j] = True
    _, labels = connected_components(csr_matrix(neighbours), directed=False)
    components = sorted(tuple(int(i) for i in np.flatnonzero(labels == label)) for label in np.unique(labels))
    return IntersectionGraph(
        dims=tuple(subspace.dim for subspace in subspaces),
        edges=tuple(edges),
        components=tuple(components),
        zero_nodes=tuple(i for i in nodes if subspaces[i].is_zero),
    )


@dataclass(frozen=True)
class ConditionC:
    holds: bool
    #: ``"zero-subspace"``, ``"disconnected"`` or ``"connected"``
    reason: str
    #: the component meeting every subspace when the condition fails
    component: Optional[Tuple[int, ...]]
    graph: IntersectionGraph

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "reason": self.reason,
            "component": None if self.component is None else list(self.component),
            "graph": self.graph.to_json(),
        }


def condition_c(subspaces: Sequence[Subspace], tolerances: Tolerances = DEFAULT_TOLERANCES) -> ConditionC:
    """
    Decides whether no connected component of :math:`(\\bigcup_i V_i) \\cap S_r` meets every ``V_i``.

    Each projectivized subspace is closed and connected and two of them meet iff the subspaces
    intersect nontrivially, so components of the union are unions over the components of the
    intersection graph. The condition therefore holds iff some ``V_i`` is zero or the graph is disconnected.

        Example:

        >>> condition_c([Subspace(np.eye(2)[:, :1]), Subspace(np.eye(2)[:, 1:])]).holds
        True
    """
    graph = build_intersection_graph(subspaces, tolerances)
    if graph.zero_nodes:
        return ConditionC(True, "zero-subspace", None, graph)
    if not graph.is_connected:
        return ConditionC(True, "disconnected", None, graph)
    return ConditionC(False, "connected", graph.components[0], graph)


@dataclass(frozen=True)
class DimensionCriterion:
    """Verdict of a list of dimension conditions guarded by a trivial-intersection prerequisite."""

    indices: Tuple[int, ...]
    #: :math:`\\bigcap_i V_i = \\{0\\}`
    prerequisite: bool
    conditions: Dict[str, bool]
    sum_dim: int
    dims: Tuple[int, ...]

    @property
    def fired(self) -> Tuple[str, ...]:
        return tuple(name for name, value in self.conditions.items() if value)

    @property
    def certified(self) -> bool:
        return self.prerequisite and bool(self.fired)

    def to_json(self) -> dict:
        return {
            "indices": list(self.indices),
            "prerequisite": self.prerequisite,
            "conditions": dict(self.conditions),
            "fired": list(self.fired),
            "certified": self.certified,
            "sum_dim": self.sum_dim,
            "dims": list(self.dims),
        }


def _dimension_conditions(subspaces: Sequence[Subspace], tolerances: Tolerances) -> Tuple[bool, Dict[str, bool], int]:
    count = len(subspaces)
    prerequisite = intersect_all(subspaces, tolerances.rank).is_zero
    sum_dim = sum_all(subspaces, tolerances.rank).dim
    dims = [subspace.dim for subspace in subspaces]
    isolated_line = any(
        subspace.dim == 1
        and not any(subspace.is_subspace_of(other, 1e3 * tolerances.rank) for j, other in enumerate(subspaces) if j != i)
        for i, subspace in enumerate(subspaces)
    )
    conditions = {
        "zero_dimensional": any(dim == 0 for dim in dims),
        "isolated_line": isolated_line,
        "pair": count == 2,
        "dimension_count": count > 2 and sum_dim > sum(dims) - count + 1,
    }
    return prerequisite, conditions, sum_dim


def theorem4_check(subspaces: Sequence[Subspace], tolerances: Tolerances = DEFAULT_TOLERANCES) -> DimensionCriterion:
    """
    Given :math:`\\bigcap_i V_i = \\{0\\}`, any of the following implies asymptotic stability for every
    regular input: some ``V_i`` is zero; some line ``V_i`` lies in no other ``V_j``; ``p = 2``;
    :math:`\\dim \\sum_i V_i > \\sum_i \\dim V_i - p + 1`.
    """
    _check_family(subspaces)
    prerequisite, conditions, sum_dim = _dimension_conditions(subspaces, tolerances)
    return DimensionCriterion(
        indices=tuple(range(len(subspaces))),
        prerequisite=prerequisite,
        conditions=conditions,
        sum_dim=sum_dim,
        dims=tuple(subspace.dim for subspace in subspaces),
    )


def theorem6_check(k_subspaces: Sequence[Subspace], indices: Sequence[int],
                   tolerances: Tolerances = DEFAULT_TOLERANCES) -> DimensionCriterion:
    """
    The analogue of :func:`theorem4_check` over :math:`\\{K_i: i \\in J\\}`, plus Condition (C) on those
    subspaces. A pass certifies asymptotic stability for every input with :math:`J_u = J`, chaotic or not.
    """
    _check_family(k_subspaces)
    indices = tuple(sorted(set(indices)))
    if not indices:
        raise InvalidArgumentError("The index set J must not be empty.")
    if indices[0] < 0 or indices[-1] >= len(k_subspaces):
        raise InvalidArgumentError(f"Index set {list(indices)} is out of range for {len(k_subspaces)} subspaces.")
    selected = [k_subspaces[i] for i in indices]
    prerequisite, conditions, sum_dim = _dimension_conditions(selected, tolerances)
    conditions["condition_c"] = condition_c(selected, tolerances).holds
    return DimensionCriterion(
        indices=indices,
        prerequisite=prerequisite,
        conditions=conditions,
        sum_dim=sum_dim,
        dims=tuple(subspace.dim for subspace in selected),
    )


@dataclass(frozen=True)
class AnyInputCertificate:
    applicable: bool
    certified: bool
    #: index sets ``J`` on which :func:`theorem6_check` is inconclusive
    failing_sets: Tuple[Tuple[int, ...], ...] = ()

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "certified": self.certified,
            "failing_sets": [list(indices) for indices in self.failing_sets],
        }


def theorem6_any_input(k_subspaces: Sequence[Subspace],
                       tolerances: Tolerances = DEFAULT_TOLERANCES) -> AnyInputCertificate:
    """
    Every input has a nonempty :math:`J_u`, so passing :func:`theorem6_check` on every nonempty ``J``
    certifies asymptotic stability for all inputs.
    """
    _check_family(k_subspaces)
    if len(k_subspaces) > MAX_ANY_INPUT_SIZE:
        return AnyInputCertificate(False, False)
    failing = []
    for size in range(1, len(k_subspaces) + 1):
        for indices in itertools.combinations(range(len(k_subspaces)), size):
            if not theorem6_check(k_subspaces, indices, tolerances).certified:
                failing.append(indices)
    return AnyInputCertificate(True, not failing, tuple(failing))


@dataclass(frozen=True)
class PairCertificate:
    applicable: bool
    certified: bool
    reason: str
    abscissas: Tuple[float, ...] = ()
    lyapunov_ok: Optional[bool] = None
    intersection_dim: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "certified": self.certified,
            "reason": self.reason,
            "abscissas": list(self.abscissas),
            "lyapunov_ok": self.lyapunov_ok,
            "intersection_dim": self.intersection_dim,
        }


def theorem7_pair_check(system: SwitchedSystem, tolerances: Tolerances = DEFAULT_TOLERANCES,
                        analyses: Optional[Sequence[MatrixAnalysis]] = None) -> PairCertificate:
    """
    Two Hurwitz matrices sharing a common Lyapunov function with :math:`K_1 \\cap K_2 = \\{0\\}` give a
    system that is asymptotically stable for every input.
    """
    if system.size != 2:
        return PairCertificate(False, False, f"needs exactly two matrices, got {system.size}")
    verdict = check_common_lyapunov(system, tolerances)
    if not verdict.passed:
        return PairCertificate(True, False, "common Lyapunov condition fails", lyapunov_ok=False)
    normalized = system if system.normalized else normalize_system(system, tolerances)
    abscissas = tuple(spectral_abscissa(b) for b in normalized.matrices)
    if analyses is None:
        analyses = analyze_system(normalized, tolerances)
    intersection = subspace_intersect(analyses[0].K, analyses[1].K, tolerances.rank)
    hurwitz = all(value < -tolerances.spectral_margin for value in abscissas)
    if not hurwitz:
        reason = "both matrices must be Hurwitz"
    elif not intersection.is_zero:
        reason = "K_1 and K_2 intersect nontrivially"
    else:
        reason = "Hurwitz pair with K_1 and K_2 intersecting trivially"
    return PairCertificate(
        applicable=True,
        certified=hurwitz and intersection.is_zero,
        reason=reason,
        abscissas=abscissas,
        lyapunov_ok=True,
        intersection_dim=intersection.dim,
    )


@dataclass(frozen=True)
class PlanarReport:
    applicable: bool
    certified: bool
    reason: str
    #: per matrix: ``"marginal"`` (V = K a line), ``"hurwitz"`` or ``"conservative"`` (V = R^2)
    kinds: Tuple[str, ...] = ()
    hypotheses_ok: Optional[bool] = None
    particular_case: Optional[bool] = None
    particular_index: Optional[int] = None

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "certified": self.certified,
            "reason": self.reason,
            "kinds": list(self.kinds),
            "hypotheses_ok": self.hypotheses_ok,
            "particular_case": self.particular_case,
            "particular_index": self.particular_index,
        }


def _planar_kind(matrix, analysis: MatrixAnalysis, tolerances: Tolerances) -> str:
    if analysis.V.dim == 2:
        return "conservative"
    if analysis.V.dim == 1:
        eigenvalues = sorted(complex(value).real for value in np.linalg.eigvals(matrix))
        consistent = (
            abs(eigenvalues[1]) <= 1e3 * tolerances.spectral_margin
            and eigenvalues[0] < -tolerances.spectral_margin
            and analysis.K.equals(analysis.V)
        )
        if not consistent:
            logger.warning("Matrix %d has a one-dimensional V but not the spectrum {0, alpha < 0}.", analysis.index)
        return "marginal"
    return "hurwitz"


def planar_classify(system: SwitchedSystem, analyses: Optional[Sequence[MatrixAnalysis]] = None,
                    tolerances: Tolerances = DEFAULT_TOLERANCES) -> PlanarReport:
    """
    Planar systems with :math:`\\bigcap_i V_i = \\{0\\}` and every ``V_i`` at most a line are asymptotically
    stable for every input visiting each index for an infinite time, except in one particular case: some
    Hurwitz ``B_{i0}`` has a line ``K_{i0}`` and every ``K_i`` equals it.
    """
    if system.dim != 2:
        return PlanarReport(False, False, f"needs dimension 2, got {system.dim}")
    normalized = system if system.normalized else normalize_system(system, tolerances)
    if analyses is None:
        analyses = analyze_system(normalized, tolerances)
    kinds = tuple(_planar_kind(b, a, tolerances) for b, a in zip(normalized.matrices, analyses))
    v_subspaces = [analysis.V for analysis in analyses]
    hypotheses_ok = intersect_all(v_subspaces, tolerances.rank).is_zero and all(v.dim <= 1 for v in v_subspaces)
    if not hypotheses_ok:
        return PlanarReport(True, False, "needs trivial intersection of the V_i and every V_i at most a line",
                            kinds, False)
    particular_index = next(
        (
            analysis.index
            for analysis in analyses
            if analysis.V.is_zero
            and analysis.K.dim == 1
            and all(other.K.equals(analysis.K, 1e3 * tolerances.rank) for other in analyses)
        ),
        None,
    )
    if particular_index is not None:
        return PlanarReport(True, False, "every K_i is the kernel line of a Hurwitz matrix", kinds, True, True,
                            particular_index)
    k_trivial = intersect_all([analysis.K for analysis in analyses], tolerances.rank).is_zero
    if not k_trivial:
        return PlanarReport(True, False, "the K_i share a common line", kinds, True, False)
    return PlanarReport(True, True, "stable for every input with infinite occupancy of each index", kinds, True, False)


@dataclass(frozen=True)
class Conclusion:
    #: ``"any-input"``, ``"inputs-with-J"``, ``"regular-inputs"``, ``"none"`` or ``"hypotheses-not-met"``
    scope: str
    theorem: Optional[str]
    statement: str

    def to_json(self) -> dict:
        return {"scope": self.scope, "theorem": self.theorem, "statement": self.statement}


@dataclass(frozen=True)
class StabilityReport:
    lyapunov: LyapunovVerdict
    per_matrix: Tuple[MatrixAnalysis, ...] = ()
    condition_c: Optional[ConditionC] = None
    theorem4: Optional[DimensionCriterion] = None
    theorem6: Optional[DimensionCriterion] = None
    theorem6_any_input: Optional[AnyInputCertificate] = None
    theorem7: Optional[PairCertificate] = None
    planar: Optional[PlanarReport] = None
    conclusion: Conclusion = field(default_factory=lambda: Conclusion("none", None, "no certificate applies"))

    @property
    def lyapunov_ok(self) -> bool:
        return self.lyapunov.passed

    def to_json(self) -> dict:
        def optional(value):
            return None if value is None else value.to_json()

        return {
            "lyapunov": self.lyapunov.to_json(),
            "per_matrix": [analysis.to_json() for analysis in self.per_matrix],
            "condition_c": optional(self.condition_c),
            "theorem4": optional(self.theorem4),
            "theorem6": optional(self.theorem6),
            "theorem6_any_input": optional(self.theorem6_any_input),
            "theorem7": optional(self.theorem7),
            "planar": optional(self.planar),
            "conclusion": self.conclusion.to_json(),
        }

    def to_text(self) -> str:
        lines = [f"Common Lyapunov condition: {'pass' if self.lyapunov.passed else 'FAIL'}"]
        if not self.lyapunov.passed:
            lines.append(
                f"  matrix {self.lyapunov.index}: max eigenvalue of B + B^T = {self.lyapunov.max_eigenvalue:.6g}"
            )
        for analysis in self.per_matrix:
            lines.append(
                f"Matrix {analysis.index}: dim V = {analysis.V.dim}, dim K = {analysis.K.dim}, "
                f"Hurwitz = {'yes' if analysis.is_hurwitz else 'no'}"
            )
        if self.condition_c is not None:
            status = "holds" if self.condition_c.holds else f"fails (component {list(self.condition_c.component)})"
            lines.append(f"Condition (C): {status}")
        if self.theorem4 is not None:
            fired = ", ".join(self.theorem4.fired) or "none"
            lines.append(
                f"Theorem 4: intersection trivial = {self.theorem4.prerequisite}, conditions fired: {fired}"
            )
        if self.theorem6 is not None:
            lines.append(f"Theorem 6 (J = all): {'pass' if self.theorem6.certified else 'inconclusive'}")
        if self.theorem6_any_input is not None and self.theorem6_any_input.applicable:
            lines.append(f"Theorem 6 (every J): {'pass' if self.theorem6_any_input.certified else 'inconclusive'}")
        if self.theorem7 is not None and self.theorem7.applicable:
            lines.append(f"Theorem 7: {'pass' if self.theorem7.certified else 'inconclusive'} ({self.theorem7.reason})")
        if self.planar is not None and self.planar.applicable:
            lines.append(f"Planar classification: {self.planar.reason}")
        theorem = f" ({self.conclusion.theorem})" if self.conclusion.theorem else ""
        lines.append(f"Conclusion: {self.conclusion.statement}{theorem}")
        return "\n".join(lines)


def _conclude(report: StabilityReport) -> Conclusion:
    if report.theorem7 is not None and report.theorem7.certified:
        return Conclusion("any-input", "Theorem 7", "stable for any input")
    if report.theorem6_any_input is not None and report.theorem6_any_input.certified:
        return Conclusion("any-input", "Theorem 6", "stable for any input")
    if report.theorem6 is not None and report.theorem6.certified:
        return Conclusion("inputs-with-J", "Theorem 6",
                          f"stable for every input with J_u = {list(report.theorem6.indices)}, chaotic or not")
    if report.planar is not None and report.planar.certified:
        return Conclusion("inputs-with-J", "planar classification",
                          "stable for every input with infinite occupancy of each index, chaotic or not")
    if report.condition_c is not None and report.condition_c.holds:
        return Conclusion("regular-inputs", "Theorem 3", "stable for every regular input")
    if report.theorem4 is not None and report.theorem4.certified:
        return Conclusion("regular-inputs", "Theorem 4", "stable for every regular input")
    return Conclusion("none", None, "no certificate applies; the criteria are sufficient only")


def build_report(system: SwitchedSystem, tolerances: Tolerances = DEFAULT_TOLERANCES,
                 indices: Optional[Sequence[int]] = None, workers: int = 1) -> StabilityReport:
    """
    Runs every certificate on ``system`` and keeps the strongest conclusion, any-input certificates first.

    :param indices: the index set ``J`` for the Theorem 6 check, every index by default.
    """
    lyapunov = check_common_lyapunov(system, tolerances)
    if not lyapunov.passed:
        return StabilityReport(
            lyapunov=lyapunov,
            conclusion=Conclusion("hypotheses-not-met", None, "the matrices share no common Lyapunov function P"),
        )
    normalized = normalize_system(system, tolerances)
    analyses = tuple(analyze_system(normalized, tolerances, workers=workers))
    v_subspaces = [analysis.V for analysis in analyses]
    k_subspaces = [analysis.K for analysis in analyses]
    report = StabilityReport(
        lyapunov=lyapunov,
        per_matrix=analyses,
        condition_c=condition_c(v_subspaces, tolerances),
        theorem4=theorem4_check(v_subspaces, tolerances),
        theorem6=theorem6_check(k_subspaces, range(system.size) if indices is None else indices, tolerances),
        theorem6_any_input=theorem6_any_input(k_subspaces, tolerances),
        theorem7=theorem7_pair_check(normalized, tolerances, analyses),
        planar=planar_classify(normalized, analyses, tolerances),
    )
    conclusion = _conclude(report)
    logger.debug("Stability report conclusion: %s", conclusion.statement)
    return replace(report, conclusion=conclusion)
