import logging

import numpy as np
import pytest

from switched_limits.exceptions import InvalidArgumentError
from switched_limits.linalg import Subspace
from switched_limits.systems import (
    SwitchedSystem,
    analyze_matrix,
    analyze_system,
    check_common_lyapunov,
    compute_K,
    compute_V,
    invariant_chain,
    normalize_system,
    norm_preserving,
    subspaces_of,
    validate_decomposition,
)
from tests.factories import SwitchedSystemFactory, dissipative_family, dissipative_matrix
from tests.utils import max_principal_angle

E = np.eye(3)
#: K = span{e1, e2} and V = span{e1}
CHAIN_EXAMPLE = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, -1.0]])


class TestSwitchedSystem:
    def test_shape_and_labels(self, worked_system):
        assert worked_system.dim == 3
        assert worked_system.size == len(worked_system) == 3
        assert worked_system.normalized
        assert worked_system.label(2) == "B2"
        assert SwitchedSystem([-np.eye(2)], labels=["damped"]).label(0) == "damped"
        assert worked_system.lipschitz == pytest.approx(1.0)

    def test_matrices_are_read_only(self, worked_system):
        with pytest.raises(ValueError):
            worked_system.matrices[0][0, 0] = 1.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"matrices": []},
            {"matrices": np.eye(2)},
            {"matrices": [np.eye(2), np.eye(3)]},
            {"matrices": [np.array([[np.inf]])]},
            {"matrices": [np.eye(2)], "labels": ["a", "b"]},
            {"matrices": [np.eye(2)], "lyapunov": np.diag([1.0, -1.0])},
            {"matrices": [np.eye(2)], "lyapunov": np.array([[1.0, 1.0], [0.0, 1.0]])},
            {"matrices": [np.eye(2)], "lyapunov": np.eye(3)},
        ],
    )
    def test_rejects_malformed_families(self, kwargs):
        with pytest.raises(InvalidArgumentError):
            SwitchedSystem(**kwargs)

    def test_to_json(self):
        system = SwitchedSystem([-np.eye(2)], lyapunov=2 * np.eye(2), labels=["a"])
        assert system.to_json() == {
            "dimension": 2,
            "matrices": [[[-1.0, -0.0], [-0.0, -1.0]]],
            "lyapunov": [[2.0, 0.0], [0.0, 2.0]],
            "labels": ["a"],
        }
        assert not system.normalized


def test_common_lyapunov_on_worked_example(worked_system):
    verdict = check_common_lyapunov(worked_system)
    assert verdict.passed
    assert verdict.index is None
    assert verdict.eigenvalues == pytest.approx((0.0, 0.0, 0.0), abs=1e-15)


def test_common_lyapunov_reports_first_offender():
    verdict = check_common_lyapunov(SwitchedSystem([-np.eye(2), np.eye(2), 3 * np.eye(2)]))
    assert verdict.to_json() == {
        "passed": False,
        "index": 1,
        "max_eigenvalue": 2.0,
        "eigenvalues": [-2.0, 2.0, 6.0],
    }


@pytest.mark.parametrize("seed", range(5))
def test_normalization_recovers_the_dissipative_family(seed):
    system = SwitchedSystemFactory(seed=seed, dim=3, size=2, with_lyapunov=True)
    assert not system.normalized
    assert check_common_lyapunov(system).passed

    normalized = normalize_system(system)
    assert normalized.normalized
    assert np.allclose(normalized.transform @ normalized.transform, system.lyapunov, atol=1e-9)
    for matrix, (expected, _) in zip(normalized.matrices, dissipative_family(seed, 3, 2)):
        assert np.allclose(matrix, expected, atol=1e-8)


def test_normalizing_a_normalized_system_is_a_no_op(worked_system):
    assert normalize_system(worked_system) is worked_system


def test_lyapunov_check_uses_the_given_coordinates():
    # B + B^T is indefinite, B^T P + P B is not
    b = np.array([[-1.0, 4.0], [0.0, -1.0]])
    assert not check_common_lyapunov(SwitchedSystem([b])).passed
    assert check_common_lyapunov(SwitchedSystem([b], lyapunov=np.diag([1.0, 4.0]))).passed


def test_compute_K_on_worked_example(worked_system):
    k = [compute_K(b) for b in worked_system.matrices]
    assert k[0].equals(Subspace(E[:, 1:]))
    assert k[1].equals(Subspace(E[:, 2:]))
    assert k[2].equals(Subspace(E[:, 1:2]))


def test_compute_V_on_worked_example(worked_system):
    v = [compute_V(b) for b in worked_system.matrices]
    assert [subspace.dim for subspace in v] == [2, 1, 1]
    assert max_principal_angle(v[0], Subspace(E[:, 1:])) <= 1e-9
    assert max_principal_angle(v[1], Subspace(E[:, 2:])) <= 1e-9
    assert max_principal_angle(v[2], Subspace(E[:, 1:2])) <= 1e-9


def test_invariant_chain_shrinks_to_V():
    chain = invariant_chain(CHAIN_EXAMPLE)
    assert [subspace.dim for subspace in chain] == [2, 1]
    assert chain[0].equals(Subspace(E[:, :2]))
    assert chain[-1].equals(Subspace(E[:, :1]))
    assert compute_V(CHAIN_EXAMPLE).equals(Subspace(E[:, :1]))


def test_invariant_chain_requires_dissipative_matrix():
    with pytest.raises(InvalidArgumentError) as exc:
        invariant_chain(np.eye(2))
    assert "negative semidefinite" in str(exc.value)


@pytest.mark.parametrize(
    "matrix, v_dim, k_dim, hurwitz",
    [
        (-np.eye(3), 0, 0, True),
        (np.array([[0.0, -1.0], [1.0, 0.0]]), 2, 2, False),
        (np.zeros((2, 2)), 2, 2, False),
        (np.array([[0.0, -1.0], [1.0, -1.0]]), 0, 1, True),
        (CHAIN_EXAMPLE, 1, 2, False),
    ],
)
def test_analyze_matrix(matrix, v_dim, k_dim, hurwitz):
    analysis = analyze_matrix(matrix)
    assert analysis.V.dim == v_dim
    assert analysis.K.dim == k_dim
    assert analysis.is_hurwitz is hurwitz
    if v_dim == matrix.shape[0]:
        assert analysis.complement_spectral_abscissa is None
    else:
        assert analysis.complement_spectral_abscissa < 0
    assert validate_decomposition(matrix, analysis).passed()


def test_analysis_of_worked_example(worked_system):
    analyses = analyze_system(worked_system)
    assert [analysis.chain_dims for analysis in analyses] == [(2,), (1,), (1,)]
    assert [analysis.complement_spectral_abscissa for analysis in analyses] == pytest.approx([-1.0, -1.0, -1.0])
    assert all(analysis.skew_residual <= 1e-15 for analysis in analyses)
    data = analyses[0].to_json()
    assert data["index"] == 0
    assert data["V"]["dim"] == 2
    assert data["is_hurwitz"] is False


def test_parallel_analysis_matches_sequential():
    system = SwitchedSystemFactory(dim=4, size=4)
    sequential = analyze_system(system)
    parallel = analyze_system(system, workers=3)
    assert [a.index for a in parallel] == [0, 1, 2, 3]
    for first, second in zip(subspaces_of(sequential), subspaces_of(parallel)):
        assert first.equals(second)
    for first, second in zip(subspaces_of(sequential, "K"), subspaces_of(parallel, "K")):
        assert first.equals(second)


def test_analysis_normalizes_first():
    system = SwitchedSystemFactory(seed=11, dim=3, size=2, v_dims=[1, 2], with_lyapunov=True)
    assert [analysis.V.dim for analysis in analyze_system(system)] == [1, 2]


@pytest.mark.parametrize("seed", range(100))
def test_decomposition_properties_of_random_dissipative_matrices(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, 5))
    v_dim = int(rng.integers(0, dim + 1))
    extra = int(rng.integers(0, 2)) if dim - v_dim > 1 else 0
    matrix, v_basis = dissipative_matrix(rng, dim, v_dim, extra)

    analysis = analyze_matrix(matrix)
    assert analysis.V.dim == v_dim
    assert analysis.K.dim == v_dim + extra
    if v_dim:
        assert max_principal_angle(analysis.V, Subspace(v_basis)) <= 1e-8

    check = validate_decomposition(matrix, analysis)
    assert check.v_invariance <= 1e-9
    assert check.complement_invariance <= 1e-9
    assert check.skew_residual <= 1e-9
    if v_dim < dim:
        assert check.complement_spectral_abscissa < 0

    inside = v_basis @ rng.standard_normal(v_dim) if v_dim else np.zeros(dim)
    assert norm_preserving(matrix, inside, rtol=1e-6)
    if v_dim < dim:
        outside = analysis.V.orthogonal_complement().basis @ rng.standard_normal(dim - v_dim)
        assert not norm_preserving(matrix, inside + outside, rtol=1e-6)


def test_norm_preserving_on_worked_example(worked_system):
    b = worked_system.matrices[1]
    assert norm_preserving(b, [0.0, 0.0, 2.0])
    assert not norm_preserving(b, [1.0, 0.0, 0.0])
    assert norm_preserving(b, [0.0, 0.0, 0.0])


def test_dissipation_below_rank_tolerance_counts_as_conservative(caplog):
    matrix = np.array([[-1e-12, 0.0], [0.0, -1.0]])
    with caplog.at_level(logging.WARNING, logger="switched_limits.systems"):
        analysis = analyze_matrix(matrix)
    assert analysis.V.dim == 1
    assert not caplog.records
