"""Deterministic random-stream derivation.

Every stochastic component of a run draws from its own generator, derived
from the master seed and a fixed label. Adding or removing one component
(e.g. disabling the VAE) therefore never perturbs the draws of another.
"""

from __future__ import annotations

import numpy as np


def rng_stream(seed: int, label: str) -> np.random.Generator:
    """Return a generator keyed by (seed, label), stable across platforms."""
    entropy = [int(seed)] + list(label.encode("utf8"))
    return np.random.default_rng(np.random.SeedSequence(entropy))
