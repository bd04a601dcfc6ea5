"""Labeled mixture-of-Gaussians ground truth for the 1-D experiments.

The mixture plays three roles: it is sampled for training batches, its
exact density is the reference curve for the KDE comparisons, and it can
be discretized onto a grid to produce an exact joint table for the
closed-form machinery.  Component parameters are axis-aligned, so the
density factorizes over dimensions.

The default spec is three unit-variance classes at -2, 0, +2 with equal
priors: neighbouring classes overlap enough that the label is genuinely
ambiguous between components, which is the regime where entropy-
minimizing classifier guidance visibly shrinks each class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from adclab import rng
from adclab.tabular import JointTable

_SQRT_2PI = np.sqrt(2.0 * np.pi)


class DegenerateGrid(Exception):
    """Discretization grid is too small or not strictly increasing."""


@dataclass(frozen=True)
class GaussianMixtureSpec:
    """Per-class means/stds (K, data_dim) and class priors (K,)."""

    means: np.ndarray
    stds: np.ndarray
    priors: np.ndarray

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        stds = np.atleast_2d(np.asarray(self.stds, dtype=np.float64))
        priors = np.asarray(self.priors, dtype=np.float64)
        if means.shape != stds.shape or priors.shape != (means.shape[0],):
            raise ValueError(f"inconsistent shapes: means {means.shape}, stds {stds.shape}, "
                             f"priors {priors.shape}")
        if np.any(stds <= 0):
            raise ValueError("stds must be positive")
        if np.any(priors <= 0) or abs(priors.sum() - 1.0) > 1e-12:
            raise ValueError("priors must be positive and sum to 1")
        for name, arr in (("means", means), ("stds", stds), ("priors", priors)):
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def num_classes(self) -> int:
        return self.means.shape[0]

    @property
    def data_dim(self) -> int:
        return self.means.shape[1]


def default_mixture() -> GaussianMixtureSpec:
    """Three overlapping unit-variance classes at -2, 0, +2, equal priors."""
    return GaussianMixtureSpec(means=[[-2.0], [0.0], [2.0]],
                               stds=[[1.0], [1.0], [1.0]],
                               priors=[1.0 / 3.0] * 3)


def sample_from(spec: GaussianMixtureSpec, n: int, gen: np.random.Generator
                ) -> tuple[np.ndarray, np.ndarray]:
    """n labeled draws from an ongoing uniform stream.

    Consumes n uniforms for the labels, then Box-Muller normals for the
    coordinates, in that order.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    cdf = np.cumsum(spec.priors)
    labels = np.searchsorted(cdf, rng.uniforms(gen, n), side="right")
    labels = np.minimum(labels, spec.num_classes - 1).astype(np.int64)
    z = rng.normals(gen, n * spec.data_dim).reshape(n, spec.data_dim)
    x = spec.means[labels] + spec.stds[labels] * z
    return x, labels


def sample(spec: GaussianMixtureSpec, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """n labeled draws from a fresh stream keyed by seed."""
    return sample_from(spec, n, rng.philox_stream(seed, rng.STREAM_TRAIN))


def _component_pdf(spec: GaussianMixtureSpec, x: np.ndarray) -> np.ndarray:
    """(n, K) per-class normal densities at the points x of shape (n, data_dim)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    # (n, K, d) standardized residuals; product over d gives the joint pdf
    z = (x[:, None, :] - spec.means[None, :, :]) / spec.stds[None, :, :]
    log_pdf = -0.5 * np.sum(z * z, axis=2) - np.sum(np.log(spec.stds * _SQRT_2PI), axis=1)[None, :]
    return np.exp(log_pdf)


def true_joint_density(spec: GaussianMixtureSpec, x) -> np.ndarray:
    """Joint densities p(x, y) for all classes: prior_y * pdf_y(x), shape (n, K)."""
    return _component_pdf(spec, x) * spec.priors[None, :]


def true_density(spec: GaussianMixtureSpec, x, y: int):
    """Joint density p(x, y) = prior_y * pdf_y(x) at one class."""
    scalar = np.ndim(x) == 0
    vals = true_joint_density(spec, np.atleast_1d(x).reshape(-1, spec.data_dim))[:, y]
    return float(vals[0]) if scalar else vals


def marginal_density(spec: GaussianMixtureSpec, x) -> np.ndarray:
    """Mixture density p(x) = sum_y p(x, y)."""
    return true_joint_density(spec, x).sum(axis=1)


def discretize(spec: GaussianMixtureSpec, grid: np.ndarray) -> JointTable:
    """Exact-table approximation of the mixture on a 1-D grid.

    Each grid point gets mass density * local cell width (midpoint rule,
    cell edges halfway between neighbours), renormalized so the table sums
    to one.
    """
    if spec.data_dim != 1:
        raise ValueError("discretize supports 1-D mixtures only")
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise DegenerateGrid("grid must be strictly increasing with at least 2 points")
    # cell widths partition [grid[0], grid[-1]] with edges halfway between points
    widths = np.empty_like(grid)
    widths[1:-1] = 0.5 * (grid[2:] - grid[:-2])
    widths[0] = 0.5 * (grid[1] - grid[0])
    widths[-1] = 0.5 * (grid[-1] - grid[-2])
    mass = true_joint_density(spec, grid[:, None]) * widths[:, None]
    return JointTable(mass / mass.sum())
