"""
Numerical thresholds and run settings shared by every module.
"""
from dataclasses import dataclass, field, replace
from typing import Optional


@dataclass(frozen=True)
class Tolerances:
    """
    All numerical thresholds in one record.

    Every public operation accepts ``tolerances=`` and falls back to :data:`DEFAULT_TOLERANCES`.
    """

    #: relative singular-value threshold for rank and nullspace decisions
    rank: float = 1e-9
    #: allowed asymmetry of matrices expected to be symmetric
    symmetry: float = 1e-10
    #: margin used by Hurwitz tests and by the common Lyapunov check
    spectral_margin: float = 1e-9
    #: eigenvalues of a Gram matrix in [-psd_clamp, 0] are clamped to 0
    psd_clamp: float = 1e-10
    #: operator-norm distance between successive Gram checkpoints that counts as converged
    convergence: float = 1e-8
    #: hard cap on the simulated horizon
    horizon_cap: float = 1e4
    #: absolute eigenvalue threshold for the rank of an S_u estimate
    su_rank: float = 1e-6
    #: distance below which an empirical limit-set inclusion is accepted
    inclusion: float = 1e-3
    #: minimum occupancy slope for an index to be counted in J_u on a bare prefix
    occupancy_slope: float = 1e-2

    def replace(self, **changes) -> "Tolerances":
        return replace(self, **changes)


DEFAULT_TOLERANCES = Tolerances()


@dataclass(frozen=True)
class RunConfig:
    """
    Settings of one CLI invocation, validated by :class:`RunConfigSchema <switched_limits.schemas.RunConfigSchema>`.
    """

    tolerances: Tolerances = field(default_factory=Tolerances)
    horizon: float = 100.0
    #: samples per unit time on trajectory grids
    grid_density: float = 10.0
    #: overrides the seed of generated signals when set
    seed: Optional[int] = None
    out: Optional[str] = None
