"""Closed-form bounds on the noise part of the DGS gradient, optimal
smoothing-radius selection rules, and the contraction-rate formulas used to
check optimization runs against theory."""
from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class ConvexityConstants:
    """Gradient Lipschitz constant L and strong-convexity parameter tau."""

    L: float
    tau: float

    def __post_init__(self):
        if not (self.L > 0 and self.tau > 0):
            raise ValueError("L and tau must be positive")
        if self.tau > self.L:
            raise ValueError(f"tau ({self.tau}) cannot exceed L ({self.L})")


@dataclass(frozen=True)
class BoundReport:
    """Evaluated bound values for one noise model at one configuration."""

    noise_gradient_bound: float
    delta_sigma: float
    recommended_sigma: float
    branch: str


def periodic_noise_grad_bound(
    gamma_n: float, n: int, alpha: float, sigma: float, d: int
) -> float:
    """Norm bound on the DGS gradient of a periodic noise whose cross-sections
    have period 1/alpha and n-th derivative bounded by gamma_n."""
    if not (gamma_n > 0 and alpha > 0 and sigma > 0 and d >= 1 and n >= 1):
        raise ValueError("all parameters must be positive")
    att = math.exp(-2.0 * math.pi**2 * alpha**2 * sigma**2)
    sd = math.sqrt(d)
    if n == 1:
        return (
            gamma_n * sd / 2.0 * att * (1.0 + 1.0 / (2.0 * alpha * sigma * math.sqrt(2.0 * math.pi)))
        )
    if n == 2:
        return (
            gamma_n
            * sd
            / (4.0 * math.pi * alpha)
            * att
            * (1.0 + 0.5 * math.log1p(1.0 / (2.0 * math.pi**2 * alpha**2 * sigma**2)))
        )
    return (
        gamma_n
        * sd
        / (2.0 * (2.0 * math.pi * alpha) ** (n - 1))
        * att
        * (1.0 + 1.0 / (4.0 * math.pi**2 * alpha**2 * sigma**2))
    )


def bandlimited_noise_grad_bound(
    gamma: float, alpha0: float, sigma: float, d: int
) -> float:
    """Norm bound for noise whose cross-section spectra vanish below alpha0
    and are bounded by gamma."""
    if not (gamma > 0 and alpha0 > 0 and sigma > 0 and d >= 1):
        raise ValueError("all parameters must be positive")
    return (
        gamma
        * math.sqrt(d)
        / (math.pi * sigma**2)
        * math.exp(-2.0 * math.pi**2 * alpha0**2 * sigma**2)
    )


def diminishing_noise_grad_bound(
    beta: float, sigma: float, dist: float, d: int
) -> float:
    """Norm bound for noise enveloped by beta * ||x - x*||^2, at distance
    dist from the minimizer."""
    if not (beta > 0 and sigma > 0 and d >= 1 and dist >= 0):
        raise ValueError("beta, sigma must be positive; dist nonnegative")
    return beta * math.sqrt(2.0 * d / math.pi) * (2.0 * sigma + dist**2 / sigma)


def recommend_sigma_periodic(
    constants: ConvexityConstants, gamma1: float, alpha: float
) -> tuple[float, str]:
    """Smoothing radius minimizing the periodic-noise convergence radius.

    High-frequency branch when alpha > 2 L sqrt(2) / (pi gamma1), otherwise
    sigma = 1/alpha.
    """
    if not (gamma1 > 0 and alpha > 0):
        raise ValueError("gamma1 and alpha must be positive")
    threshold = 2.0 * constants.L * math.sqrt(2.0) / (math.pi * gamma1)
    if alpha > threshold:
        arg = math.pi * alpha * gamma1 / (2.0 * constants.L * math.sqrt(2.0))
        assert arg > 1.0  # implied by the branch condition
        sigma = math.sqrt(math.log(arg)) / (math.pi * alpha * math.sqrt(2.0))
        return sigma, "high-frequency"
    return 1.0 / alpha, "low-frequency"


def recommend_sigma_bandlimited(
    constants: ConvexityConstants, gamma: float, alpha0: float
) -> tuple[float, str]:
    """Smoothing radius minimizing the bandlimited-noise convergence radius.

    High-frequency branch when alpha0 > L^(1/3) / (pi gamma^(1/3)), otherwise
    sigma = 1/alpha0.
    """
    if not (gamma > 0 and alpha0 > 0):
        raise ValueError("gamma and alpha0 must be positive")
    threshold = constants.L ** (1.0 / 3.0) / (math.pi * gamma ** (1.0 / 3.0))
    if alpha0 > threshold:
        arg = math.pi * alpha0 * gamma ** (1.0 / 3.0) / constants.L ** (1.0 / 3.0)
        assert arg > 1.0
        sigma = (
            math.sqrt(3.0)
            / (math.pi * alpha0 * math.sqrt(2.0))
            * math.sqrt(math.log(arg))
        )
        return sigma, "high-frequency"
    return 1.0 / alpha0, "low-frequency"


def gh_error_term(d: int, sigma: float, order: int, C: float = 1.0) -> float:
    """Quadrature contribution to the estimator-discrepancy bound:
    C pi (M!)^2 d / (4^M ((2M)!)^2) * sigma^(4M - 2)."""
    m = order
    return (
        C
        * math.pi
        * math.factorial(m) ** 2
        * d
        / (4.0**m * math.factorial(2 * m) ** 2)
        * sigma ** (4 * m - 2)
    )


def delta_sigma_periodic(
    constants: ConvexityConstants,
    gamma1: float,
    alpha: float,
    sigma: float,
    d: int,
    order: int,
    C: float = 1.0,
) -> float:
    """Squared radius of the neighborhood of convergence under periodic noise.

    The constant C in the quadrature term is not determined by theory and
    defaults to 1; use this function for shape comparisons, not absolute
    thresholds.
    """
    L, tau = constants.L, constants.tau
    lead = 4.0 / tau**2 + 1.0 / (4.0 * L * tau)
    noise = (
        3.0
        * gamma1**2
        * d
        / 2.0
        * math.exp(-4.0 * math.pi**2 * alpha**2 * sigma**2)
        * (1.0 + 1.0 / (8.0 * math.pi * alpha**2 * sigma**2))
    )
    return lead * (
        gh_error_term(d, sigma, order, C) + 48.0 * L**2 * d * sigma**2 + noise
    )


def contraction_rate(constants: ConvexityConstants, lam: float) -> float:
    """Per-step multiplicative bound on the squared distance to the optimum:
    1 - (lambda tau - 8 lambda^2 tau L), valid for lambda <= 1/(8L).
    At lambda = 1/(16L) this equals 1 - tau/(32L)."""
    if lam > 1.0 / (8.0 * constants.L):
        raise ValueError(
            f"step size {lam} exceeds 1/(8L) = {1.0 / (8.0 * constants.L)}"
        )
    return 1.0 - (lam * constants.tau - 8.0 * lam**2 * constants.tau * constants.L)


def diminishing_rate(constants: ConvexityConstants, beta: float, d: int) -> float:
    """Per-step squared-distance factor of the decaying-radius scheme:
    (1 - tau/(32L)) + (6/(tau L) + 3/(8 L^2)) d beta sqrt(2 L^2 pi + beta^2) / pi.
    Below 1 exactly when the diminishing-noise smallness condition holds."""
    L, tau = constants.L, constants.tau
    return (1.0 - tau / (32.0 * L)) + (
        6.0 / (tau * L) + 3.0 / (8.0 * L**2)
    ) * d * beta * math.sqrt(2.0 * L**2 * math.pi + beta**2) / math.pi


def diminishing_beta_condition(
    constants: ConvexityConstants, beta: float, d: int
) -> bool:
    """Smallness condition on the noise envelope curvature required for the
    exact-convergence guarantee:
    beta sqrt(2 L^2 pi + beta^2) < (pi / (32 d)) * 8 tau^2 L / (48 L + 3 tau)."""
    L, tau = constants.L, constants.tau
    lhs = beta * math.sqrt(2.0 * L**2 * math.pi + beta**2)
    rhs = (math.pi / (32.0 * d)) * 8.0 * tau**2 * L / (48.0 * L + 3.0 * tau)
    return lhs < rhs
