from typing import List, Tuple

import factory
import numpy as np

from switched_limits.linalg import sym_sqrt
from switched_limits.signals import generate_chaotic, generate_dwell_random, generate_periodic
from switched_limits.systems import SwitchedSystem
from tests.utils import random_orthogonal


def skew(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim))
    return a - a.T


def dissipative_matrix(rng: np.random.Generator, dim: int, v_dim: int = 0,
                       kernel_extra: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    ``B = Q diag(S, H) Q^T`` with ``S`` skew on the first ``v_dim`` columns of ``Q`` and
    ``H = S' - G^T G`` on the rest, ``G`` having ``kernel_extra`` fewer rows than columns.

    :return: ``B`` and an orthonormal basis of its ``V``.
    """
    rest = dim - v_dim
    if rest and kernel_extra >= rest:
        raise ValueError("kernel_extra must leave at least one dissipative direction.")
    q = random_orthogonal(rng, dim)
    block = np.zeros((dim, dim))
    block[:v_dim, :v_dim] = skew(rng, v_dim)
    if rest:
        g = rng.standard_normal((rest - kernel_extra, rest))
        block[v_dim:, v_dim:] = skew(rng, rest) - g.T @ g
    return q @ block @ q.T, q[:, :v_dim]


def random_spd(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.standard_normal((dim, dim))
    return a @ a.T + np.eye(dim)


def dissipative_family(seed: int, dim: int, size: int, v_dims=None,
                       kernel_extra: int = 0) -> List[Tuple[np.ndarray, np.ndarray]]:
    rng = np.random.default_rng(seed)
    v_dims = v_dims or [int(rng.integers(0, dim + 1)) for _ in range(size)]
    family = []
    for v_dim in v_dims:
        extra = min(kernel_extra, max(dim - v_dim - 1, 0))
        family.append(dissipative_matrix(rng, dim, v_dim, extra))
    return family


def in_original_coordinates(matrices, lyapunov: np.ndarray):
    """``P^{-1/2} B P^{1/2}``: matrices whose normalization by ``P`` gives back ``matrices``."""
    root = sym_sqrt(lyapunov)
    inverse_root = np.linalg.inv(root)
    return tuple(inverse_root @ b @ root for b in matrices)


class SwitchedSystemFactory(factory.Factory):
    """
    Random systems sharing a common quadratic Lyapunov function. With ``with_lyapunov`` the matrices are
    given in the coordinates of a random ``P``; otherwise ``P = I``.
    """

    class Meta:
        model = SwitchedSystem

    class Params:
        dim = 3
        size = 2
        v_dims = None
        kernel_extra = 0
        with_lyapunov = False
        seed = factory.Faker("pyint", min_value=0, max_value=2 ** 31 - 1)
        family = factory.LazyAttribute(
            lambda o: dissipative_family(o.seed, o.dim, o.size, o.v_dims, o.kernel_extra)
        )

    lyapunov = factory.LazyAttribute(
        lambda o: random_spd(np.random.default_rng(o.seed + 1), o.dim) if o.with_lyapunov else None
    )
    matrices = factory.LazyAttribute(
        lambda o: tuple(b for b, _ in o.family)
        if o.lyapunov is None
        else in_original_coordinates([b for b, _ in o.family], o.lyapunov)
    )


class DwellRandomSignalFactory(factory.Factory):
    class Meta:
        model = generate_dwell_random

    class Params:
        p = 2
        tenths = factory.Faker("pyint", min_value=3, max_value=8)

    min_dwell = factory.LazyAttribute(lambda o: o.tenths / 10)
    max_dwell = factory.LazyAttribute(lambda o: o.min_dwell + 1.0)
    weights = factory.LazyAttribute(lambda o: [1.0] * o.p)
    seed = factory.Faker("pyint", min_value=0, max_value=10 ** 6)


class ChaoticSignalFactory(factory.Factory):
    class Meta:
        model = generate_chaotic

    tau = factory.Faker("pyint", min_value=1, max_value=3)
    p = 2
    seed = factory.Faker("pyint", min_value=0, max_value=10 ** 6)


class PeriodicSignalFactory(factory.Factory):
    """Cycles through ``0, ..., p - 1`` with the given durations."""

    class Meta:
        model = generate_periodic

    class Params:
        p = 2
        durations = (1.0, 1.0)

    pattern = factory.LazyAttribute(lambda o: list(zip(range(o.p), o.durations)))
