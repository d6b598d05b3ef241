"""Experiment front-end: JSON configs, seeded multi-trial sigma sweeps,
aggregation, and CSV emission.

A config fixes everything: objective, noise, step size, sigma grid (as
multipliers of the noise wavelength), schedule, trial count, and master
seed. A sweep is then fully deterministic end to end, including the bytes
of every CSV it writes.
"""
from __future__ import annotations

import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import noise as noise_mod
from .optimizer import RunConfig, SigmaSchedule, TrialRecord, run
from .quadrature import build_gh_rule
from .smoothing import DGSConfig, identity_basis, random_orthonormal_basis

EXPERIMENT_IDS = ("periodic-sweep", "bandlimited-sweep", "diminishing-two-phase", "custom")

SUMMARY_HEADER = "sigma,mean_final_dist,std_final_dist,mean_final_objective,trials_ok"
TRACE_HEADER = "trial,iteration,sigma_t,dist,objective,cosine_sim"


class ConfigError(ValueError):
    """Config file failed to parse or validate."""


class OutputError(OSError):
    """Result files could not be written."""


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"missing required field {key!r} in {where}")
    return mapping[key]


def _reject_unknown(mapping: dict, allowed: set[str], where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} in {where}")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    objective_kind: str
    dimension: int
    box: tuple[float, float]
    noise_kind: str
    noise_params: dict
    step_size: float
    sigma_grid: tuple[float, ...]  # multipliers of the noise wavelength
    trials: int
    max_iterations: int
    schedule_kind: str
    schedule_params: dict
    quadrature_order: int
    basis: str
    master_seed: int
    output_dir: Optional[str] = None

    @property
    def wavelength(self) -> float:
        """Base length scale the sigma multipliers refer to."""
        if self.noise_kind == "periodic":
            return 1.0 / self.noise_params["alpha"]
        if self.noise_kind == "bandlimited":
            return 1.0 / self.noise_params["alpha0"]
        if self.noise_kind == "diminishing":
            return 1.0 / self.noise_params.get("carrier_frequency", 1.0)
        return 1.0

    @property
    def sigma_values(self) -> tuple[float, ...]:
        return tuple(m * self.wavelength for m in self.sigma_grid)


def parse_config(doc: dict, where: str = "config") -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be a JSON object")
    _reject_unknown(
        doc,
        {
            "experiment", "objective", "noise", "step_size", "sigma_grid",
            "trials", "max_iterations", "schedule", "quadrature_order",
            "basis", "master_seed", "output_dir",
        },
        where,
    )
    experiment = _require(doc, "experiment", where)
    if experiment not in EXPERIMENT_IDS:
        raise ConfigError(f"experiment must be one of {EXPERIMENT_IDS}, got {experiment!r}")

    obj = _require(doc, "objective", where)
    _reject_unknown(obj, {"kind", "dimension", "box"}, "objective")
    obj_kind = _require(obj, "kind", "objective")
    if obj_kind not in ("power-sum-sqrt", "quadratic"):
        raise ConfigError(f"objective.kind must be power-sum-sqrt or quadratic, got {obj_kind!r}")
    dimension = int(obj.get("dimension", 5))
    if dimension < 1:
        raise ConfigError("objective.dimension must be >= 1")
    box = _require(obj, "box", "objective")
    if not (isinstance(box, (list, tuple)) and len(box) == 2 and box[0] < box[1]):
        raise ConfigError("objective.box must be [lo, hi] with lo < hi")

    noi = _require(doc, "noise", where)
    noise_kind = _require(noi, "kind", "noise")
    if noise_kind == "periodic":
        _reject_unknown(noi, {"kind", "alpha", "amplitude"}, "noise")
        params = {"alpha": float(_require(noi, "alpha", "noise")),
                  "amplitude": float(noi.get("amplitude", 1.0))}
        if params["alpha"] <= 0:
            raise ConfigError("noise.alpha must be positive")
    elif noise_kind == "bandlimited":
        _reject_unknown(noi, {"kind", "alpha0", "num_components"}, "noise")
        params = {"alpha0": float(_require(noi, "alpha0", "noise")),
                  "num_components": int(noi.get("num_components", 20))}
        if params["alpha0"] <= 0:
            raise ConfigError("noise.alpha0 must be positive")
    elif noise_kind == "diminishing":
        _reject_unknown(noi, {"kind", "beta", "carrier_frequency"}, "noise")
        params = {"beta": float(noi.get("beta", 1.0)),
                  "carrier_frequency": float(noi.get("carrier_frequency", 1.0))}
    elif noise_kind == "none":
        _reject_unknown(noi, {"kind"}, "noise")
        params = {}
    else:
        raise ConfigError(f"noise.kind must be periodic/bandlimited/diminishing/none, got {noise_kind!r}")

    if "step_size" not in doc:
        raise ConfigError("missing required field 'step_size' in config")
    step_size = float(doc["step_size"])
    if step_size <= 0:
        raise ConfigError("step_size must be positive")

    grid = tuple(float(s) for s in _require(doc, "sigma_grid", where))
    if not grid or any(s <= 0 for s in grid):
        raise ConfigError("sigma_grid values must be positive")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("sigma_grid must be strictly increasing")

    trials = int(_require(doc, "trials", where))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    max_iterations = int(_require(doc, "max_iterations", where))
    if max_iterations < 1:
        raise ConfigError("max_iterations must be >= 1")

    sched = _require(doc, "schedule", where)
    sched_kind = _require(sched, "kind", "schedule")
    if sched_kind == "constant":
        _reject_unknown(sched, {"kind"}, "schedule")
        sched_params = {}
    elif sched_kind == "two-phase-decay":
        _reject_unknown(sched, {"kind", "switch_iteration", "contraction"}, "schedule")
        sched_params = {
            "switch_iteration": int(sched.get("switch_iteration", 5000)),
            "contraction": float(sched.get("contraction", 0.999)),
        }
    elif sched_kind == "theorem3":
        _reject_unknown(sched, {"kind", "beta", "L", "tau", "r0_tilde"}, "schedule")
        sched_params = {
            "beta": float(_require(sched, "beta", "schedule")),
            "L": float(_require(sched, "L", "schedule")),
            "tau": float(_require(sched, "tau", "schedule")),
            "r0_tilde": float(_require(sched, "r0_tilde", "schedule")),
        }
    else:
        raise ConfigError(f"schedule.kind must be constant/two-phase-decay/theorem3, got {sched_kind!r}")

    order = int(doc.get("quadrature_order", 5))
    basis = doc.get("basis", "identity")
    if basis not in ("identity", "random"):
        raise ConfigError(f"basis must be 'identity' or 'random', got {basis!r}")

    return ExperimentConfig(
        experiment=experiment,
        objective_kind=obj_kind,
        dimension=dimension,
        box=(float(box[0]), float(box[1])),
        noise_kind=noise_kind,
        noise_params=params,
        step_size=step_size,
        sigma_grid=grid,
        trials=trials,
        max_iterations=max_iterations,
        schedule_kind=sched_kind,
        schedule_params=sched_params,
        quadrature_order=order,
        basis=basis,
        master_seed=int(_require(doc, "master_seed", where)),
        output_dir=doc.get("output_dir"),
    )


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"parse error in {path} at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    return parse_config(doc, where=str(path))


# --- seeding -----------------------------------------------------------------

_MASK64 = (1 << 64) - 1


def mix_seed(*parts: int) -> int:
    """SplitMix64-style mixer turning (master seed, grid index, trial index)
    into an independent 64-bit stream seed. Documented so sequences can be
    reproduced; cross-implementation byte-equality is a non-goal."""
    state = 0
    for p in parts:
        state = (state + (int(p) & _MASK64) + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        state = z ^ (z >> 31)
    return state


_NOISE_SEED_TAG = 0x6E6F6973  # distinguishes the shared-noise stream
_BASIS_SEED_TAG = 0xB4515


def build_noise(config: ExperimentConfig):
    if config.noise_kind == "periodic":
        return noise_mod.PeriodicNoise(**config.noise_params)
    if config.noise_kind == "bandlimited":
        return noise_mod.sample_bandlimited(
            d=config.dimension,
            alpha0=config.noise_params["alpha0"],
            num_components=config.noise_params["num_components"],
            seed=mix_seed(config.master_seed, _NOISE_SEED_TAG),
        )
    if config.noise_kind == "diminishing":
        return noise_mod.DiminishingNoise(
            beta=config.noise_params["beta"],
            carrier_frequency=config.noise_params["carrier_frequency"],
        )
    return None


def build_objective(config: ExperimentConfig):
    noise = build_noise(config)
    if config.objective_kind == "power-sum-sqrt":
        return noise_mod.power_sum_sqrt_objective(config.dimension, noise, config.box)
    return noise_mod.quadratic_objective(config.dimension, noise, config.box)


def _build_schedule(config: ExperimentConfig, sigma0: float) -> SigmaSchedule:
    if config.schedule_kind == "constant":
        return SigmaSchedule(kind="constant", sigma0=sigma0)
    if config.schedule_kind == "two-phase-decay":
        return SigmaSchedule(kind="two-phase-decay", sigma0=sigma0, **config.schedule_params)
    return SigmaSchedule(
        kind="theorem3", dimension=config.dimension, **config.schedule_params
    )


def run_trial(config: ExperimentConfig, grid_index: int, trial_index: int) -> TrialRecord:
    """One seeded run at one sigma grid point. Safe to call from workers."""
    seed = mix_seed(config.master_seed, grid_index, trial_index)
    objective = build_objective(config)
    if config.basis == "identity":
        basis = identity_basis(config.dimension)
    else:
        basis = random_orthonormal_basis(config.dimension, mix_seed(seed, _BASIS_SEED_TAG))
    sigma0 = config.sigma_values[grid_index]
    run_config = RunConfig(
        objective=objective,
        dgs=DGSConfig(sigma=sigma0, rule=build_gh_rule(config.quadrature_order), basis=basis),
        step_size=config.step_size,
        max_iterations=config.max_iterations,
        schedule=_build_schedule(config, sigma0),
        seed=seed,
        initial_point="uniform-in-box",
        box=config.box,
    )
    return run(run_config)


@dataclass
class SweepSummary:
    """Aggregates over the trials at each sigma grid point.

    Grid points where every trial diverged are invalid: trials_ok is 0 and
    the mean fields are NaN. Aggregation is order-insensitive in the trial
    index.
    """

    sigmas: tuple[float, ...]
    mean_final_dist: np.ndarray
    std_final_dist: np.ndarray
    mean_final_objective: np.ndarray
    trials_ok: np.ndarray
    mean_dist_traces: list  # per grid point: (max_iterations + 1,) or None
    mean_cosine_traces: list
    evaluation_counts: np.ndarray  # summed over ok trials
    trials: int
    max_iterations: int

    def valid(self, g: int) -> bool:
        return int(self.trials_ok[g]) > 0


def _pad_trace(trace: np.ndarray, length: int) -> np.ndarray:
    if len(trace) >= length:
        return trace[:length]
    return np.concatenate([trace, np.full(length - len(trace), trace[-1])])


def _fmt(x: float) -> str:
    if np.isnan(x):
        return "nan"
    return format(float(x), ".17g")


def write_trace_csv(records: list[tuple[int, TrialRecord]], path) -> None:
    """Per-trial trace CSV, rows sorted by (trial, iteration)."""
    try:
        with open(path, "w") as fh:
            fh.write(TRACE_HEADER + "\n")
            for trial, rec in sorted(records, key=lambda tr: tr[0]):
                n = len(rec.distances)
                for t in range(n):
                    fh.write(
                        f"{trial},{t},{_fmt(rec.sigmas[t])},{_fmt(rec.distances[t])},"
                        f"{_fmt(rec.objective_values[t])},{_fmt(rec.cosine_similarities[t])}\n"
                    )
    except OSError as e:
        raise OutputError(f"cannot write trace CSV {path}: {e}") from e


def emit_csv(summary: SweepSummary, path) -> None:
    """Summary CSV: one row per sigma grid point, 17-significant-digit floats."""
    try:
        with open(path, "w") as fh:
            fh.write(SUMMARY_HEADER + "\n")
            for g, sigma in enumerate(summary.sigmas):
                fh.write(
                    f"{_fmt(sigma)},{_fmt(summary.mean_final_dist[g])},"
                    f"{_fmt(summary.std_final_dist[g])},"
                    f"{_fmt(summary.mean_final_objective[g])},"
                    f"{int(summary.trials_ok[g])}\n"
                )
    except OSError as e:
        raise OutputError(f"cannot write summary CSV {path}: {e}") from e


def run_experiment(
    config: ExperimentConfig, jobs: int = 1, out_dir=None
) -> SweepSummary:
    """Run the full sigma sweep: config.trials seeded runs per grid point.

    Diverged trials are recorded but excluded from the means; a grid point
    where all trials diverge is marked invalid. With ``out_dir`` set, writes
    ``summary.csv`` plus one trace CSV per grid point. Deterministic for a
    fixed config regardless of ``jobs``.
    """
    n_grid = len(config.sigma_grid)
    results: dict[tuple[int, int], TrialRecord] = {}
    tasks = [(g, t) for g in range(n_grid) for t in range(config.trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {
                (g, t): pool.submit(run_trial, config, g, t) for g, t in tasks
            }
            for key, fut in futures.items():
                results[key] = fut.result()
    else:
        for g, t in tasks:
            results[(g, t)] = run_trial(config, g, t)

    length = config.max_iterations + 1
    mean_final = np.full(n_grid, np.nan)
    std_final = np.full(n_grid, np.nan)
    mean_obj = np.full(n_grid, np.nan)
    ok_counts = np.zeros(n_grid, dtype=int)
    eval_counts = np.zeros(n_grid, dtype=np.int64)
    dist_traces: list = []
    cos_traces: list = []

    out_path = Path(out_dir) if out_dir is not None else None
    if out_path is not None:
        try:
            out_path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise OutputError(f"cannot create output directory {out_path}: {e}") from e

    for g in range(n_grid):
        grid_records = [(t, results[(g, t)]) for t in range(config.trials)]
        if out_path is not None:
            write_trace_csv(grid_records, out_path / f"trace_grid{g:02d}.csv")
        ok = [rec for _, rec in grid_records if rec.status == "ok"]
        ok_counts[g] = len(ok)
        eval_counts[g] = sum(rec.evaluation_count for _, rec in grid_records)
        if not ok:
            dist_traces.append(None)
            cos_traces.append(None)
            continue
        finals = np.array([rec.final_distance for rec in ok])
        mean_final[g] = finals.mean()
        std_final[g] = finals.std()
        mean_obj[g] = np.mean([rec.objective_values[-1] for rec in ok])
        dist_traces.append(
            np.mean([_pad_trace(rec.distances, length) for rec in ok], axis=0)
        )
        with warnings.catch_warnings():
            # the final row is NaN in every trial; the all-NaN mean is fine
            warnings.simplefilter("ignore", RuntimeWarning)
            cos_traces.append(
                np.nanmean(
                    [_pad_trace(rec.cosine_similarities, length) for rec in ok], axis=0
                )
            )

    summary = SweepSummary(
        sigmas=config.sigma_values,
        mean_final_dist=mean_final,
        std_final_dist=std_final,
        mean_final_objective=mean_obj,
        trials_ok=ok_counts,
        mean_dist_traces=dist_traces,
        mean_cosine_traces=cos_traces,
        evaluation_counts=eval_counts,
        trials=config.trials,
        max_iterations=config.max_iterations,
    )
    if out_path is not None:
        emit_csv(summary, out_path / "summary.csv")
    return summary
