"""Covariance-matrix-adaptation evolution strategy and the target-matching
experiment.

The optimizer is the standard (mu/mu_w, lambda) strategy with cumulative
step-size adaptation and rank-one plus rank-mu covariance updates, using
the usual population-size and learning-rate defaults. Target matching
minimizes end-effector distance to each of a set of points, searching
either the raw genome space (logistic-squashed so the search stays
unbounded) or a frozen decoder's latent space.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .arm import ArmConfig, evaluate, forward_kinematics, genome_to_angles
from .vae import DecoderNet, _sigmoid

_EIG_FLOOR_RATIO = 1e-14


@dataclass(frozen=True)
class CmaResult:
    best_x: np.ndarray
    best_f: float
    trace: list[float]  # best-ever value after each generation
    evaluations: int


def cma_minimize(objective: Callable[[np.ndarray], float], dim: int, budget: int,
                 seed: int, x0: np.ndarray | None = None, sigma0: float = 1.0,
                 callback: Callable[[int, int, np.ndarray, float], None] | None = None,
                 ) -> CmaResult:
    """Minimize a black-box function with CMA-ES.

    Runs budget // lambda generations. Non-finite objective values rank
    worst but never crash the run or become the best-ever point. The
    covariance eigendecomposition is refreshed every generation, with
    eigenvalues floored at 1e-14 times the largest for numerical safety.

    callback(generation, evaluations_used, best_x, best_f) fires after
    each generation.
    """
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    lam = 4 + int(3 * np.log(dim))
    if budget < lam:
        raise ValueError(f"budget {budget} is below one population of {lam}")

    mu = lam // 2
    weights = np.log((lam + 1) / 2) - np.log(np.arange(1, mu + 1))
    weights /= weights.sum()
    mueff = 1.0 / np.sum(weights**2)

    cs = (mueff + 2) / (dim + mueff + 5)
    ds = 1 + 2 * max(0.0, np.sqrt((mueff - 1) / (dim + 1)) - 1) + cs
    cc = (4 + mueff / dim) / (dim + 4 + 2 * mueff / dim)
    c1 = 2 / ((dim + 1.3) ** 2 + mueff)
    cmu = min(1 - c1, 2 * (mueff - 2 + 1 / mueff) / ((dim + 2) ** 2 + mueff))
    chi_n = np.sqrt(dim) * (1 - 1 / (4 * dim) + 1 / (21 * dim**2))

    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 3]))
    mean = np.zeros(dim) if x0 is None else np.asarray(x0, dtype=float).copy()
    sigma = float(sigma0)
    cov = np.eye(dim)
    p_sigma = np.zeros(dim)
    p_cov = np.zeros(dim)

    best_x = mean.copy()
    best_f = np.inf
    trace: list[float] = []
    evaluations = 0

    generations = budget // lam
    for gen in range(generations):
        eigvals, basis = np.linalg.eigh(cov)
        floor = _EIG_FLOOR_RATIO * float(eigvals.max())
        eigvals = np.maximum(eigvals, floor)
        scales = np.sqrt(eigvals)

        z = rng.standard_normal((lam, dim))
        y = (z * scales) @ basis.T
        x = mean + sigma * y
        values = np.empty(lam)
        for k in range(lam):
            v = objective(x[k])
            values[k] = v if np.isfinite(v) else np.inf
        evaluations += lam

        order = np.argsort(values, kind="stable")
        if values[order[0]] < best_f:
            best_f = float(values[order[0]])
            best_x = x[order[0]].copy()

        y_sel = y[order[:mu]]
        y_w = weights @ y_sel
        mean = mean + sigma * y_w

        inv_sqrt_y = basis @ ((basis.T @ y_w) / scales)
        p_sigma = (1 - cs) * p_sigma + np.sqrt(cs * (2 - cs) * mueff) * inv_sqrt_y
        ps_norm = float(np.linalg.norm(p_sigma))
        h_sigma = float(
            ps_norm / np.sqrt(1 - (1 - cs) ** (2 * (gen + 1))) / chi_n
            < 1.4 + 2 / (dim + 1)
        )
        p_cov = (1 - cc) * p_cov + h_sigma * np.sqrt(cc * (2 - cc) * mueff) * y_w

        rank_mu = y_sel.T @ (weights[:, None] * y_sel)
        cov = ((1 - c1 - cmu) * cov
               + c1 * (np.outer(p_cov, p_cov) + (1 - h_sigma) * cc * (2 - cc) * cov)
               + cmu * rank_mu)
        cov = 0.5 * (cov + cov.T)
        sigma *= np.exp((cs / ds) * (ps_norm / chi_n - 1))

        trace.append(best_f)
        if callback is not None:
            callback(gen + 1, evaluations, best_x, best_f)

    return CmaResult(best_x, best_f, trace, evaluations)


def default_targets() -> np.ndarray:
    """18 target points: 9 evenly spaced on each of two rings (r=0.5, 0.9)."""
    angles = 2.0 * np.pi * np.arange(9) / 9
    rings = [r * np.stack([np.cos(angles), np.sin(angles)], axis=1) for r in (0.5, 0.9)]
    return np.concatenate(rings)


@dataclass(frozen=True)
class TargetTask:
    """Target-matching setup: where to reach, with what budget, and through
    which encoding ("direct" genome space or "dde" latent space)."""

    targets: np.ndarray = field(default_factory=default_targets)
    budget_per_target: int = 10_000
    mode: str = "direct"

    def __post_init__(self):
        targets = np.atleast_2d(np.asarray(self.targets, dtype=float))
        object.__setattr__(self, "targets", targets)
        if targets.shape[1] != 2:
            raise ValueError(f"targets must be (m, 2), got {targets.shape}")
        if np.any(np.linalg.norm(targets, axis=1) > 1.0 + 1e-9):
            raise ValueError("all targets must lie within the unit disk")
        if self.mode not in ("direct", "dde"):
            raise ValueError(f"mode must be 'direct' or 'dde', got {self.mode!r}")


@dataclass(frozen=True)
class TargetResult:
    target_index: int
    distance: float
    genome: np.ndarray  # phenotype genome of the best solution
    joint_variance: float
    trace: list[tuple[int, float, float]]  # (evaluations, distance, joint_variance)


def _point_to_genome(point: np.ndarray, mode: str,
                     decoder: DecoderNet | None) -> np.ndarray:
    if mode == "direct":
        return _sigmoid(np.asarray(point, dtype=float))
    return decoder.decode(point)


# initial step for target matching: spans roughly the central half of the
# squashed genome range (and the latent prior's core) while leaving CMA-ES
# room to grow; large initial steps strand direct-mode runs in arm folds
_TARGET_SIGMA0 = 0.5


def _solve_target(args) -> TargetResult:
    index, target, arm_cfg, mode, decoder, budget, seed, log_every = args
    dim = arm_cfg.n_joints if mode == "direct" else decoder.latent_dim

    def objective(point: np.ndarray) -> float:
        genome = _point_to_genome(point, mode, decoder)
        behavior = forward_kinematics(genome_to_angles(genome, arm_cfg), arm_cfg)
        return float(np.linalg.norm(behavior - target))

    trace: list[tuple[int, float, float]] = []

    def log(gen: int, evals: int, best_x: np.ndarray, best_f: float) -> None:
        if gen % log_every == 0:
            genome = _point_to_genome(best_x, mode, decoder)
            trace.append((evals, best_f, -evaluate(genome, arm_cfg).fitness))

    result = cma_minimize(objective, dim, budget, seed, sigma0=_TARGET_SIGMA0,
                          callback=log)
    genome = _point_to_genome(result.best_x, mode, decoder)
    variance = -evaluate(genome, arm_cfg).fitness
    if not trace or trace[-1][0] != result.evaluations:
        trace.append((result.evaluations, result.best_f, variance))
    return TargetResult(index, result.best_f, genome, variance, trace)


def run_target_matching(task: TargetTask, arm_cfg: ArmConfig,
                        decoder: DecoderNet | None = None, seed: int = 0,
                        workers: int = 1, log_every: int = 10) -> list[TargetResult]:
    """Independent CMA-ES run per target; results ordered by target index.

    Direct mode searches n-dim space squashed by the logistic into [0,1]
    genomes; dde mode searches the decoder's latent space unsquashed. The
    per-target runs share nothing and may execute in parallel.
    """
    if task.mode == "dde":
        if decoder is None:
            raise ValueError("dde mode requires a decoder")
        if decoder.output_dim != arm_cfg.n_joints:
            raise ValueError(
                f"decoder produces {decoder.output_dim}-dim genomes, "
                f"domain needs {arm_cfg.n_joints}"
            )
    jobs = [
        (i, task.targets[i], arm_cfg, task.mode, decoder,
         task.budget_per_target, int(seed) + 7919 * i, log_every)
        for i in range(len(task.targets))
    ]
    if workers <= 1:
        return [_solve_target(job) for job in jobs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_solve_target, jobs))


def write_targets_csv(path: str | Path, results: list[TargetResult], mode: str) -> None:
    lines = ["target_index,mode,evaluations,distance,joint_variance"]
    for r in results:
        for evals, dist, var in r.trace:
            lines.append(
                f"{r.target_index},{mode},{evals},"
                f"{format(dist, '.17g')},{format(var, '.17g')}"
            )
    Path(path).write_text("\n".join(lines) + "\n")
