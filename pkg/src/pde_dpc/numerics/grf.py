"""Gaussian random fields with RBF covariance, sampled by Cholesky factorization."""

import functools
import logging

import numpy as np

from ..dsl.models import GRFConfig
from ..errors import ConfigurationError
from .grid import Grid1D
from .types import Array

logger = logging.getLogger(__name__)

MAX_JITTER_DOUBLINGS = 8


def rbf_kernel_matrix(cfg: GRFConfig, grid: Grid1D, jitter: float | None = None) -> Array:
    """σ²·exp(−(x−x′)²/(2l²)) on the grid, plus ``jitter`` on the diagonal."""
    x = grid.x
    d = x[:, None] - x[None, :]
    k = cfg.variance * np.exp(-(d * d) / (2.0 * cfg.length_scale**2))
    k[np.diag_indices_from(k)] += cfg.effective_jitter if jitter is None else jitter
    return k


@functools.lru_cache(maxsize=32)
def cholesky_factor(cfg: GRFConfig, grid: Grid1D) -> Array:
    """Lower Cholesky factor of the regularized kernel; jitter doubles on failure."""
    jitter = cfg.effective_jitter
    for attempt in range(MAX_JITTER_DOUBLINGS + 1):
        try:
            factor = np.linalg.cholesky(rbf_kernel_matrix(cfg, grid, jitter))
        except np.linalg.LinAlgError:
            logger.debug(
                "Cholesky failed, doubling jitter",
                extra={"grf": {"attempt": attempt, "jitter": jitter}},
            )
            jitter *= 2.0
            continue
        factor.setflags(write=False)
        return factor
    raise ConfigurationError(
        f"RBF kernel (l={cfg.length_scale}) is not factorizable on a grid with "
        f"dx={grid.dx}: length scale too large for the grid spacing"
    )


def sample_grf_batch(cfg: GRFConfig, grid: Grid1D, rng_seed: int, count: int) -> Array:
    """``count`` independent zero-mean samples, shape (count, n_x)."""
    sample_grid = grid
    if cfg.periodic_projection and grid.periodic:
        sample_grid = Grid1D(n_x=grid.n_x + 1, dx=grid.dx, periodic=False)
    factor = cholesky_factor(cfg, sample_grid)
    z = np.random.default_rng(rng_seed).standard_normal((count, sample_grid.n_x))
    samples = z @ factor.T
    if sample_grid is not grid:
        # remove the linear drift so u(0) == u(1), then drop the duplicate endpoint
        drift = samples[:, -1:] - samples[:, :1]
        samples = (samples - drift * sample_grid.x[None, :])[:, :-1]
    if cfg.taper:
        samples = samples * np.sin(np.pi * grid.x)[None, :]
    return samples


def sample_grf(cfg: GRFConfig, grid: Grid1D, rng_seed: int) -> Array:
    """One reproducible sample L·z with z ~ N(0, I) drawn from ``rng_seed``."""
    return sample_grf_batch(cfg, grid, rng_seed, 1)[0]
