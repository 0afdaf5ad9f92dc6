"""Planar n-joint arm benchmark.

Genomes are vectors in [0,1]^n mapped linearly to joint angles. The
behavior descriptor is the (x, y) position of the end effector, fitness is
the negative variance of the joint angles (0 is best: all joints equal, a
maximally smooth configuration).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_TOTAL_REACH_TOL = 1e-12


@dataclass(frozen=True)
class ArmConfig:
    """Geometry of a planar arm with unit total reach.

    Link lengths must sum to 1 so the end effector stays inside the unit
    disk, which is the space the archive tessellates.
    """

    n_joints: int
    link_lengths: np.ndarray
    angle_range: tuple[float, float] = (-np.pi, np.pi)

    def __post_init__(self):
        lengths = np.asarray(self.link_lengths, dtype=float)
        object.__setattr__(self, "link_lengths", lengths)
        if self.n_joints < 1:
            raise ValueError(f"n_joints must be >= 1, got {self.n_joints}")
        if lengths.shape != (self.n_joints,):
            raise ValueError(
                f"expected {self.n_joints} link lengths, got shape {lengths.shape}"
            )
        if np.any(lengths <= 0):
            raise ValueError("link lengths must be strictly positive")
        if abs(lengths.sum() - 1.0) > _TOTAL_REACH_TOL:
            raise ValueError(f"link lengths must sum to 1, got {lengths.sum()!r}")
        lo, hi = self.angle_range
        if not lo < hi:
            raise ValueError(f"angle_range lower must be < upper, got ({lo}, {hi})")

    @classmethod
    def uniform(cls, n_joints: int) -> "ArmConfig":
        """Arm with n equal links of length 1/n (the default benchmark)."""
        return cls(n_joints, np.full(n_joints, 1.0 / n_joints))


@dataclass(frozen=True)
class Evaluation:
    """Fitness (negative joint variance, <= 0) and end-effector behavior."""

    fitness: float
    behavior: np.ndarray = field(repr=False)


def _check_length(values: np.ndarray, cfg: ArmConfig, what: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.shape != (cfg.n_joints,):
        raise ValueError(
            f"{what} has shape {values.shape}, expected ({cfg.n_joints},)"
        )
    return values


def genome_to_angles(genome: np.ndarray, cfg: ArmConfig) -> np.ndarray:
    """Map [0,1] genes linearly onto the configured angle range."""
    genome = _check_length(genome, cfg, "genome")
    lo, hi = cfg.angle_range
    return lo + genome * (hi - lo)


def forward_kinematics(angles: np.ndarray, cfg: ArmConfig) -> np.ndarray:
    """End-effector (x, y) via one cumulative-sum pass over the joints."""
    angles = _check_length(angles, cfg, "angle vector")
    heading = np.cumsum(angles)
    return np.array(
        [np.dot(cfg.link_lengths, np.cos(heading)), np.dot(cfg.link_lengths, np.sin(heading))]
    )


def evaluate(genome: np.ndarray, cfg: ArmConfig) -> Evaluation:
    """Evaluate one genome: negative joint variance and end-effector position."""
    angles = genome_to_angles(genome, cfg)
    fitness = -float(np.var(angles))
    return Evaluation(fitness + 0.0, forward_kinematics(angles, cfg))


def evaluate_batch(genomes: np.ndarray, cfg: ArmConfig) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized evaluate() over a (batch, n_joints) array.

    Returns (fitness (batch,), behavior (batch, 2)); identical values to
    per-row evaluate() calls.
    """
    genomes = np.asarray(genomes, dtype=float)
    if genomes.ndim != 2 or genomes.shape[1] != cfg.n_joints:
        raise ValueError(
            f"genome batch has shape {genomes.shape}, expected (m, {cfg.n_joints})"
        )
    lo, hi = cfg.angle_range
    angles = lo + genomes * (hi - lo)
    heading = np.cumsum(angles, axis=1)
    behavior = np.stack(
        [np.cos(heading) @ cfg.link_lengths, np.sin(heading) @ cfg.link_lengths], axis=1
    )
    fitness = -np.var(angles, axis=1)
    fitness += 0.0  # normalizes -0.0 so emitted values are sign-consistent
    return fitness, behavior
