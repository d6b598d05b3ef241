"""Directional-Gaussian-smoothing gradient estimators.

The central object is the nonlocal gradient assembled from d one-dimensional
Gaussian-smoothed directional derivatives along an orthonormal basis, each
approximated by Gauss-Hermite quadrature. A plain Monte Carlo estimator of
the globally-smoothed gradient is kept as the baseline.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .quadrature import GHRule

_SQRT2 = np.sqrt(2.0)
_SQRT_PI = np.sqrt(np.pi)


class EvaluationError(RuntimeError):
    """Objective returned a non-finite value; carries the offending point."""

    def __init__(self, point: np.ndarray):
        self.point = np.array(point, copy=True)
        super().__init__(f"objective returned a non-finite value at {self.point}")


@dataclass
class Objective:
    """A noisy observable F(x) = phi(x) + eps(x).

    ``evaluate`` must be a pure, deterministic map from a point to a real
    number and safe for concurrent calls. If ``vectorized`` is set, it also
    accepts an (n, d) array of points and returns n values; the estimators
    batch their node evaluations through this path. ``true_gradient`` and
    ``minimizer`` are available only for synthetic objectives.
    """

    dimension: int
    evaluate: Callable[[np.ndarray], float]
    true_gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    minimizer: Optional[np.ndarray] = None
    vectorized: bool = False

    def eval_batch(self, points: np.ndarray) -> np.ndarray:
        """Evaluate at every row of an (n, d) array, in row order."""
        if self.vectorized:
            return np.asarray(self.evaluate(points), dtype=float)
        return np.array([float(self.evaluate(p)) for p in points])


@dataclass(frozen=True)
class DirectionBasis:
    """d orthonormal unit vectors, stored as the columns of a d x d matrix."""

    dimension: int
    columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        if cols.shape != (self.dimension, self.dimension):
            raise ValueError(
                f"basis must be {self.dimension}x{self.dimension}, got {cols.shape}"
            )
        gram = cols.T @ cols
        if not np.allclose(gram, np.eye(self.dimension), atol=1e-12):
            raise ValueError("basis columns are not orthonormal to 1e-12")


def identity_basis(d: int) -> DirectionBasis:
    return DirectionBasis(dimension=d, columns=np.eye(d))


def random_orthonormal_basis(d: int, seed: int) -> DirectionBasis:
    """Orthogonally-invariant random basis: QR of a Gaussian matrix with the
    sign of R's diagonal fixed. Deterministic given the seed."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d))
    q, r = np.linalg.qr(a)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return DirectionBasis(dimension=d, columns=q * signs)


@dataclass(frozen=True)
class DGSConfig:
    """Smoothing radius, quadrature rule and direction basis for one estimate."""

    sigma: float
    rule: GHRule
    basis: DirectionBasis

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def directional_derivative_gh(
    f: Objective,
    x: np.ndarray,
    xi: np.ndarray,
    sigma: float,
    rule: GHRule,
) -> float:
    """Gauss-Hermite estimate of the smoothed directional derivative at x.

    Computes (1 / (sqrt(pi) * sigma)) * sum_m w_m F(x + sqrt(2) sigma v_m xi)
    * sqrt(2) v_m, using exactly ``rule.order`` objective evaluations.
    """
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-10:
        raise ValueError("direction must be a unit vector (1e-10 tolerance)")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    points = x[None, :] + _SQRT2 * sigma * rule.nodes[:, None] * xi[None, :]
    values = f.eval_batch(points)
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values)))
        raise EvaluationError(points[bad])
    return float(np.dot(rule.weights * values, _SQRT2 * rule.nodes) / (_SQRT_PI * sigma))


def dgs_gradient(f: Objective, x: np.ndarray, config: DGSConfig) -> np.ndarray:
    """DGS gradient estimate at x: the d directional GH derivatives along the
    basis directions, mapped back to standard coordinates.

    Uses exactly M * d objective evaluations; evaluation and reduction order
    are fixed, so the result is bit-reproducible.
    """
    x = np.asarray(x, dtype=float)
    d = config.basis.dimension
    if x.shape != (d,):
        raise ValueError(f"point has shape {x.shape}, expected ({d},)")
    rule = config.rule
    sigma = config.sigma
    # points[i, m] = x + sqrt(2) sigma v_m xi_i
    directions = config.basis.columns.T  # rows are xi_i
    points = (
        x[None, None, :]
        + _SQRT2 * sigma * rule.nodes[None, :, None] * directions[:, None, :]
    )
    values = f.eval_batch(points.reshape(d * rule.order, d)).reshape(d, rule.order)
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values.ravel())))
        raise EvaluationError(points.reshape(d * rule.order, d)[bad])
    derivs = values @ (rule.weights * _SQRT2 * rule.nodes) / (_SQRT_PI * sigma)
    return config.basis.columns @ derivs


def gs_gradient_mc(
    f: Objective,
    x: np.ndarray,
    sigma: float,
    samples: int,
    seed: int,
) -> np.ndarray:
    """Monte Carlo estimate of the globally-smoothed gradient:
    (1 / (N sigma)) * sum_k F(x + sigma u_k) u_k with u_k standard Gaussian.

    Plain (no antithetic pairing) estimator; exactly ``samples`` objective
    evaluations; deterministic given the seed.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((samples, x.shape[0]))
    values = f.eval_batch(x[None, :] + sigma * u)
    if not np.all(np.isfinite(values)):
        bad = int(np.argmax(~np.isfinite(values)))
        raise EvaluationError(x + sigma * u[bad])
    return (values @ u) / (samples * sigma)
