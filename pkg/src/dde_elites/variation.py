"""Child-generating operators and ratio-driven batch creation.

Three ways to produce a child from archive elites: isometric Gaussian
mutation, line mutation (adds a directional component scaled by the
difference to a second elite, one shared scalar draw), and reconstructive
crossover (midpoint of a parent and its model reconstruction, which pulls
solutions toward what the learned encoding can express).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .archive import Archive
from .errors import ConfigError
from .vae import VaeModel

_RATIO_SUM_TOL = 1e-12

# operator codes used by batch creation
OP_XOVER, OP_LINE, OP_ISO = 0, 1, 2


@dataclass(frozen=True)
class OperatorRatios:
    """Per-child probabilities of (crossover, line, isometric)."""

    xover: float
    line: float
    iso: float

    def __post_init__(self):
        for name, p in (("xover", self.xover), ("line", self.line), ("iso", self.iso)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"ratio {name}={p} outside [0, 1]")
        total = self.xover + self.line + self.iso
        if abs(total - 1.0) > _RATIO_SUM_TOL:
            raise ValueError(f"ratios must sum to 1, got {total!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.xover, self.line, self.iso])


@dataclass
class VariationConfig:
    """Operator strengths; sigma_latent applies when searching a decoder's
    latent space instead of the direct genome space."""

    sigma_iso: float = 0.003
    sigma_line_iso: float = 0.003
    sigma_line_dir: float = 0.1
    sigma_latent: float = 0.15

    def __post_init__(self):
        for name in ("sigma_iso", "sigma_latent"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        # zero is allowed here so line mutation can degenerate to the
        # purely isometric case
        for name in ("sigma_line_iso", "sigma_line_dir"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def isometric_mutation(x: np.ndarray, sigma: float, rng: np.random.Generator,
                       bounds: tuple[float, float] | None = (0.0, 1.0)) -> np.ndarray:
    """x + sigma * N(0, I), clamped to bounds (pass None when unbounded)."""
    if sigma <= 0:
        raise ValueError(f"sigma must be strictly positive, got {sigma}")
    x = np.asarray(x, dtype=float)
    child = x + sigma * rng.standard_normal(x.shape)
    if bounds is not None:
        np.clip(child, bounds[0], bounds[1], out=child)
    return child


def line_mutation(x: np.ndarray, y: np.ndarray, cfg: VariationConfig,
                  rng: np.random.Generator) -> np.ndarray:
    """Isometric noise plus a directional term along (x - y).

    The directional spread of each gene scales with how much it differs
    between the two elites; the scalar normal draw is shared across genes.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"parent shapes differ: {x.shape} vs {y.shape}")
    child = x + cfg.sigma_line_iso * rng.standard_normal(x.shape)
    child += cfg.sigma_line_dir * (x - y) * rng.standard_normal()
    return np.clip(child, 0.0, 1.0)


def reconstructive_crossover(x: np.ndarray, model: VaeModel) -> np.ndarray:
    """Element-wise mean of a parent and its mean-latent reconstruction.

    Deterministic given (x, model); the midpoint of two in-range vectors
    needs no clamping.
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (model.input_dim,):
        raise ValueError(f"genome has shape {x.shape}, expected ({model.input_dim},)")
    return 0.5 * (x + model.reconstruct(x))


def draw_operator_indices(ratios: OperatorRatios, batch_size: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Independent per-child operator draws (codes OP_XOVER/OP_LINE/OP_ISO)."""
    return rng.choice(3, size=batch_size, p=ratios.as_array())


def make_batch(archive: Archive, ratios: OperatorRatios, batch_size: int,
               model: VaeModel | None, cfg: VariationConfig,
               rng: np.random.Generator) -> np.ndarray:
    """Create batch_size children from archive elites.

    Each child's operator is drawn independently with the given
    probabilities; parents (and the line operator's second elite) are drawn
    uniformly from occupied cells. Draw order is fixed: the operator vector
    first, then per child its parent draw(s) and mutation noise.
    """
    if ratios.xover > 0 and model is None:
        raise ConfigError("crossover ratio > 0 requires a trained model")
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    ops = draw_operator_indices(ratios, batch_size, rng)
    children = np.empty((batch_size, archive.genome_dim))
    for i, op in enumerate(ops):
        parent, _ = archive.random_elite(rng)
        if op == OP_XOVER:
            children[i] = reconstructive_crossover(parent, model)
        elif op == OP_LINE:
            other, _ = archive.random_elite(rng)
            children[i] = line_mutation(parent, other, cfg, rng)
        else:
            children[i] = isometric_mutation(parent, cfg.sigma_iso, rng)
    return children
