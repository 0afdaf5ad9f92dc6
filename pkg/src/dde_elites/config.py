"""Run configuration: defaults, validation, JSON save/load.

Defaults correspond to the standard benchmark setup: 1950-cell archive
over the unit disk, batches of 100 evaluations, sigma_iso 0.003, line
strength 0.1, latent mutation 0.15, 5 training epochs per generation, the
nine-action bandit with a 1000-record window, and latent size 10 for the
20-joint arm (32 for the larger arms).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .bandit import DEFAULT_ACTIONS, DEFAULT_WINDOW_LENGTH
from .errors import ConfigError
from .vae import DEFAULT_RECON_WEIGHT
from .variation import VariationConfig


def default_latent_dim(n_joints: int) -> int:
    return 10 if n_joints <= 20 else 32


@dataclass
class DomainConfig:
    n_joints: int = 20

    def __post_init__(self):
        if self.n_joints < 1:
            raise ConfigError(f"n_joints must be >= 1, got {self.n_joints}")


@dataclass
class ArchiveConfig:
    bins: int = 1950
    centroid_seed: int = 1
    layout: str = "ring"

    def __post_init__(self):
        if self.bins < 1:
            raise ConfigError(f"bins must be >= 1, got {self.bins}")
        if self.layout not in ("ring", "lloyd"):
            raise ConfigError(f"layout must be 'ring' or 'lloyd', got {self.layout!r}")


@dataclass
class VaeConfig:
    latent_dim: int = 10
    hidden_dim: int = 128
    epochs: int = 5
    recon_weight: float = DEFAULT_RECON_WEIGHT

    def __post_init__(self):
        if self.latent_dim < 1 or self.hidden_dim < 1:
            raise ConfigError("latent_dim and hidden_dim must be >= 1")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0, got {self.epochs}")
        if self.recon_weight <= 0:
            raise ConfigError(f"recon_weight must be > 0, got {self.recon_weight}")


@dataclass
class BanditConfig:
    actions: list[list[float]] = field(
        default_factory=lambda: [list(a) for a in DEFAULT_ACTIONS]
    )
    window_length: int = DEFAULT_WINDOW_LENGTH

    def __post_init__(self):
        self.actions = [list(map(float, a)) for a in self.actions]
        if not self.actions:
            raise ConfigError("bandit needs at least one action")
        if self.window_length < 1:
            raise ConfigError(f"window_length must be >= 1, got {self.window_length}")


@dataclass
class RunConfig:
    batch_size: int = 100
    budget: int = 100_000
    seed: int = 1
    replicates: int = 1

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.budget < 1:
            raise ConfigError(f"budget must be >= 1, got {self.budget}")
        if self.replicates < 1:
            raise ConfigError(f"replicates must be >= 1, got {self.replicates}")


@dataclass
class ExperimentConfig:
    domain: DomainConfig = field(default_factory=DomainConfig)
    archive: ArchiveConfig = field(default_factory=ArchiveConfig)
    operators: VariationConfig = field(default_factory=VariationConfig)
    vae: VaeConfig = field(default_factory=VaeConfig)
    bandit: BanditConfig = field(default_factory=BanditConfig)
    run: RunConfig = field(default_factory=RunConfig)
    out_dir: str = "runs"

    @classmethod
    def default(cls, n_joints: int = 20, **run_overrides) -> "ExperimentConfig":
        """Standard configuration for an n-joint arm (latent size by rule)."""
        return cls(
            domain=DomainConfig(n_joints=n_joints),
            vae=VaeConfig(latent_dim=default_latent_dim(n_joints)),
            run=RunConfig(**run_overrides) if run_overrides else RunConfig(),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid config file {path}: {exc}") from exc
        try:
            return cls(
                domain=DomainConfig(**raw["domain"]),
                archive=ArchiveConfig(**raw["archive"]),
                operators=VariationConfig(**raw["operators"]),
                vae=VaeConfig(**raw["vae"]),
                bandit=BanditConfig(**raw["bandit"]),
                run=RunConfig(**raw["run"]),
                out_dir=raw["out_dir"],
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"config file {path} is missing or mistypes a key: {exc}") from exc
