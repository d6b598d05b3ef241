"""Gradient descent driven by the DGS gradient estimate, with fixed or
scheduled smoothing radius and full per-iteration trajectory records."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .smoothing import DGSConfig, EvaluationError, Objective, dgs_gradient
from .theory import ConvexityConstants, diminishing_rate

# Schedules whose radius decays below this stop the run: the estimator would
# only amplify floating-point noise.
SIGMA_FLOOR = 1e-14

# Iterates beyond this norm abort the run before NaN cascades set in.
DIVERGENCE_NORM = 1e12


@dataclass(frozen=True)
class SigmaSchedule:
    """Smoothing radius as a function of the iteration index.

    kinds:
      constant        -- sigma0 at every step.
      two-phase-decay -- sigma0 until switch_iteration, then geometric decay
                         by ``contraction`` per iteration.
      theorem3        -- the exact-convergence schedule
                         sqrt(beta) / (8 L^2 pi + 4 beta^2)^(1/4)
                         * rho^(t/2) * r0_tilde,
                         with rho the diminishing-noise per-step rate.
    """

    kind: str
    sigma0: float = 1.0
    switch_iteration: int = 5000
    contraction: float = 0.999
    beta: float = 1.0
    L: float = 2.0
    tau: float = 2.0
    r0_tilde: float = 1.0
    dimension: int = 5

    def __post_init__(self):
        if self.kind not in ("constant", "two-phase-decay", "theorem3"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind != "theorem3" and not self.sigma0 > 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")
        if not 0.0 < self.contraction < 1.0:
            raise ValueError(f"contraction must be in (0,1), got {self.contraction}")
        if self.switch_iteration < 0:
            raise ValueError("switch_iteration must be nonnegative")


def sigma_at(schedule: SigmaSchedule, t: int) -> float:
    """Smoothing radius used at iteration t (t >= 0)."""
    if t < 0:
        raise ValueError(f"iteration index must be nonnegative, got {t}")
    if schedule.kind == "constant":
        return schedule.sigma0
    if schedule.kind == "two-phase-decay":
        if t < schedule.switch_iteration:
            return schedule.sigma0
        return schedule.sigma0 * schedule.contraction ** (t - schedule.switch_iteration)
    # theorem3
    rho = diminishing_rate(
        ConvexityConstants(L=schedule.L, tau=schedule.tau),
        schedule.beta,
        schedule.dimension,
    )
    scale = np.sqrt(schedule.beta) / (
        8.0 * schedule.L**2 * np.pi + 4.0 * schedule.beta**2
    ) ** 0.25
    return float(scale * rho ** (t / 2.0) * schedule.r0_tilde)


def gd_step(
    x: np.ndarray, f: Objective, config: DGSConfig, lam: float
) -> np.ndarray:
    """One unconstrained descent step: x - lam * dgs_gradient(f, x, config)."""
    return np.asarray(x, dtype=float) - lam * dgs_gradient(f, x, config)


@dataclass(frozen=True)
class RunConfig:
    objective: Objective
    dgs: DGSConfig  # sigma field is superseded by the schedule each step
    step_size: float
    max_iterations: int
    schedule: SigmaSchedule
    seed: int
    initial_point: Union[str, np.ndarray] = "uniform-in-box"
    box: Optional[tuple[float, float]] = None

    def __post_init__(self):
        if not self.step_size > 0:
            raise ValueError(f"step_size must be positive, got {self.step_size}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if isinstance(self.initial_point, str):
            if self.initial_point != "uniform-in-box":
                raise ValueError(f"unknown initial_point {self.initial_point!r}")
            if self.box is None:
                raise ValueError("uniform-in-box initialization requires a box")


@dataclass
class TrialRecord:
    """Per-iteration trace of one seeded run.

    Row t holds the iterate before step t; the final row is the last iterate.
    ``cosine_similarities`` compares the DGS estimate at x_t with the true
    gradient (NaN when either is unavailable, including the final row).
    ``evaluation_count`` counts estimator evaluations only: M * d per step.
    """

    iterates: np.ndarray
    distances: np.ndarray
    objective_values: np.ndarray
    cosine_similarities: np.ndarray
    sigmas: np.ndarray
    evaluation_count: int
    iterations_run: int
    status: str  # "ok" | "diverged"

    @property
    def final_distance(self) -> float:
        return float(self.distances[-1])


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return np.nan
    return float(np.dot(a, b) / (na * nb))


def run(config: RunConfig) -> TrialRecord:
    """Iterate the DGS descent scheme, recording every step.

    Deterministic given the config (the seed fixes the initial point). Stops
    at max_iterations, when the scheduled radius underflows SIGMA_FLOOR, or
    with a diverged status when an iterate blows up; the returned record
    always ends at the last finite iterate.
    """
    f = config.objective
    d = f.dimension
    if isinstance(config.initial_point, str):
        rng = np.random.default_rng(config.seed)
        lo, hi = config.box
        x = rng.uniform(lo, hi, size=d)
    else:
        x = np.array(config.initial_point, dtype=float)
        if x.shape != (d,):
            raise ValueError(f"initial point has shape {x.shape}, expected ({d},)")

    minimizer = f.minimizer
    m_order = config.dgs.rule.order

    iterates = [x.copy()]
    distances = [
        float(np.linalg.norm(x - minimizer)) if minimizer is not None else np.nan
    ]
    values = [float(f.evaluate(x))]
    cosines: list[float] = []
    sigmas: list[float] = []

    status = "ok"
    steps = 0
    for t in range(config.max_iterations):
        sigma = sigma_at(config.schedule, t)
        if sigma < SIGMA_FLOOR:
            break
        step_cfg = dataclasses.replace(config.dgs, sigma=sigma)
        try:
            estimate = dgs_gradient(f, x, step_cfg)
        except EvaluationError:
            status = "diverged"
            break
        if f.true_gradient is not None:
            cosines.append(_cosine(estimate, f.true_gradient(x)))
        else:
            cosines.append(np.nan)
        sigmas.append(sigma)

        x_next = x - config.step_size * estimate
        steps += 1
        if not np.all(np.isfinite(x_next)) or np.linalg.norm(x_next) > DIVERGENCE_NORM:
            status = "diverged"
            break
        x = x_next
        iterates.append(x.copy())
        distances.append(
            float(np.linalg.norm(x - minimizer)) if minimizer is not None else np.nan
        )
        values.append(float(f.evaluate(x)))

    n = len(iterates)
    cos_arr = np.full(n, np.nan)
    cos_arr[: min(len(cosines), n - 1)] = cosines[: n - 1]
    sig_arr = np.empty(n)
    sig_arr[: min(len(sigmas), n - 1)] = sigmas[: n - 1]
    sig_arr[n - 1] = sigma_at(config.schedule, n - 1)
    return TrialRecord(
        iterates=np.array(iterates),
        distances=np.array(distances),
        objective_values=np.array(values),
        cosine_similarities=cos_arr,
        sigmas=sig_arr,
        evaluation_count=steps * m_order * d,
        iterations_run=steps,
        status=status,
    )
