import itertools

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from switched_limits.linalg import Subspace

#: chaining radius of the sphere-connectivity oracle
ORACLE_RADIUS = 0.05
#: points per great circle of a two-dimensional subspace
CIRCLE_POINTS = 720
#: configurations with two subspaces closer than this (but not intersecting) are ambiguous for the oracle
MIN_SEPARATION = 0.15


def max_principal_angle(first: Subspace, second: Subspace) -> float:
    if first.dim != second.dim:
        return np.pi / 2
    angles = first.principal_angles(second)
    return float(angles.max(initial=0.0))


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def sphere_points(subspace: Subspace):
    """
    Unit vectors of ``subspace`` (``dim <= 2``) and the pairs of positions that are antipodes of each other.
    """
    basis = subspace.basis
    if subspace.dim == 0:
        return np.zeros((0, subspace.ambient_dim)), []
    if subspace.dim == 1:
        return np.stack([basis[:, 0], -basis[:, 0]]), [(0, 1)]
    angles = np.linspace(0.0, 2 * np.pi, CIRCLE_POINTS, endpoint=False)
    points = np.outer(np.cos(angles), basis[:, 0]) + np.outer(np.sin(angles), basis[:, 1])
    return points, []


def is_ambiguous(subspaces) -> bool:
    for first, second in itertools.combinations(subspaces, 2):
        if first.is_zero or second.is_zero:
            continue
        smallest = float(first.principal_angles(second).min())
        if 1e-8 < smallest < MIN_SEPARATION:
            return True
    return False


def oracle_condition_c(subspaces) -> bool:
    """
    Monte-Carlo style decision of whether no connected component of the union of the subspaces, intersected
    with the unit sphere and with antipodes identified, meets every subspace.
    """
    if any(subspace.is_zero for subspace in subspaces):
        return True
    clouds, labels, antipodes = [], [], []
    offset = 0
    for index, subspace in enumerate(subspaces):
        points, pairs = sphere_points(subspace)
        clouds.append(points)
        labels.extend([index] * len(points))
        antipodes.extend((offset + i, offset + j) for i, j in pairs)
        offset += len(points)
    cloud = np.vstack(clouds)
    labels = np.array(labels)
    edges = list(cKDTree(cloud).query_pairs(ORACLE_RADIUS)) + antipodes
    rows = np.array([i for i, _ in edges], dtype=int)
    cols = np.array([j for _, j in edges], dtype=int)
    graph = coo_matrix((np.ones(len(edges)), (rows, cols)), shape=(len(cloud), len(cloud)))
    _, component = connected_components(graph, directed=False)
    for value in np.unique(component):
        if set(labels[component == value]) == set(range(len(subspaces))):
            return False
    return True
