"""Run orchestration: the elite-map loop, bandit-mixed variation, and
latent-space search through a frozen decoder.

Four variants share one loop. `map-elites` mutates isometrically,
`me-line` uses line mutation, `dde-xover` reconstructive crossover (with
per-generation model training), and `dde-elites` lets a UCB1 bandit pick
the operator mix each generation, rewarded by the fraction of children
that earned an archive cell. Runs are bit-reproducible from (config,
seed): every component draws from its own labeled stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .archive import Archive, generate_centroids
from .arm import ArmConfig, evaluate_batch
from .bandit import BanditState
from .config import ExperimentConfig
from .errors import ConfigError
from .rng import rng_stream
from .vae import DecoderNet, VaeModel
from .variation import OperatorRatios, VariationConfig, make_batch

VARIANT_RATIOS: dict[str, tuple[float, float, float] | None] = {
    "map-elites": (0.0, 0.0, 1.0),
    "me-line": (0.0, 1.0, 0.0),
    "dde-xover": (1.0, 0.0, 0.0),
    "dde-elites": None,  # bandit-driven
}

INIT_ACTION = -1  # history action code for non-bandit generations


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    evaluations: int
    coverage: float
    mean_fitness: float
    action: int
    reward: float


@dataclass
class RunState:
    """Mutable state owned by the engine during one run."""

    archive: Archive
    vae: VaeModel | None
    bandit: BanditState | None
    evaluations_used: int
    history: list[GenerationRecord]


@dataclass(frozen=True)
class RunResult:
    archive: Archive
    decoder: DecoderNet | None
    history: list[GenerationRecord]
    evaluations_used: int


def map_elites_generation(archive: Archive, ratios: OperatorRatios, batch_size: int,
                          model: VaeModel | None, var_cfg: VariationConfig,
                          arm_cfg: ArmConfig, rng: np.random.Generator) -> int:
    """One generation: variation, evaluation, sequential offers.

    Returns how many children were accepted (new cell or strict
    improvement). Offers are applied in child-index order.
    """
    if archive.filled_count == 0:
        raise ConfigError("archive must be seeded before running generations")
    children = make_batch(archive, ratios, batch_size, model, var_cfg, rng)
    fitness, behavior = evaluate_batch(children, arm_cfg)
    improved = 0
    for i in range(batch_size):
        if archive.offer(children[i], float(fitness[i]), behavior[i]):
            improved += 1
    return improved


def _record(state: RunState, generation: int, action: int, reward: float) -> None:
    stats = state.archive.metrics()
    state.history.append(GenerationRecord(
        generation, state.evaluations_used, stats.coverage, stats.mean_fitness,
        action, reward,
    ))


def run_variant(config: ExperimentConfig, variant: str,
                centroids: np.ndarray | None = None) -> RunResult:
    """Run one algorithm variant to its evaluation budget.

    Generation 1 is the uniform-random seed batch; each later generation
    trains the model (when the variant has one), picks ratios, runs one
    batch, and updates the bandit (when present). The budget buys exactly
    budget // batch_size generations, seed batch included.
    """
    if variant not in VARIANT_RATIOS:
        raise ConfigError(f"unknown variant {variant!r}; expected one of {sorted(VARIANT_RATIOS)}")
    batch = config.run.batch_size
    if config.run.budget < batch:
        raise ConfigError(
            f"budget {config.run.budget} is smaller than one batch of {batch}"
        )
    generations = config.run.budget // batch
    seed = config.run.seed
    n = config.domain.n_joints

    arm_cfg = ArmConfig.uniform(n)
    if centroids is None:
        centroids = generate_centroids(config.archive.bins, config.archive.centroid_seed,
                                       config.archive.layout)
    archive = Archive(centroids, genome_dim=n)

    uses_model = variant in ("dde-xover", "dde-elites")
    model = VaeModel(n, config.vae.latent_dim, config.vae.hidden_dim, seed=seed,
                     recon_weight=config.vae.recon_weight) if uses_model else None
    bandit = BanditState(config.bandit.actions, config.bandit.window_length) \
        if variant == "dde-elites" else None
    fixed_ratios = None
    if VARIANT_RATIOS[variant] is not None:
        fixed_ratios = OperatorRatios(*VARIANT_RATIOS[variant])

    init_rng = rng_stream(seed, "init")
    var_rng = rng_stream(seed, "variation")
    vae_rng = rng_stream(seed, "vae")

    state = RunState(archive, model, bandit, 0, [])

    # generation 1: uniform random seed batch
    seeds = init_rng.uniform(size=(batch, n))
    fitness, behavior = evaluate_batch(seeds, arm_cfg)
    improved = sum(
        archive.offer(seeds[i], float(fitness[i]), behavior[i]) for i in range(batch)
    )
    state.evaluations_used += batch
    _record(state, 1, INIT_ACTION, improved / batch)

    for gen in range(2, generations + 1):
        if model is not None:
            model.train(archive.elite_genomes(), config.vae.epochs, vae_rng)
        if bandit is not None:
            action = bandit.select()
            ratios = bandit.actions[action]
        else:
            action = INIT_ACTION
            ratios = fixed_ratios
        improved = map_elites_generation(archive, ratios, batch, model,
                                         config.operators, arm_cfg, var_rng)
        if bandit is not None:
            bandit.update(action, improved, batch)
        state.evaluations_used += batch
        _record(state, gen, action, improved / batch)

    decoder = None
    if model is not None:
        # export with whitening folded in: downstream consumers treat the
        # latent space as standard normal
        decoder = model.decoder(whitening_data=archive.elite_genomes())
    return RunResult(archive, decoder, state.history, state.evaluations_used)


def run_dde_elites(config: ExperimentConfig) -> RunResult:
    """Full bandit-driven run; the result carries the trained decoder."""
    return run_variant(config, "dde-elites")


def run_dde_search(decoder: DecoderNet, config: ExperimentConfig,
                   centroids: np.ndarray | None = None) -> RunResult:
    """Elite-map search over the decoder's latent space.

    Genomes are latent vectors (unbounded, isometric mutation with
    sigma_latent, no clamping); evaluation decodes a latent to a phenotype
    genome first. The archive stores latent genomes with decoded behaviors.
    No model is trained: the decoder is frozen.
    """
    n = config.domain.n_joints
    if decoder.output_dim != n:
        raise ValueError(
            f"decoder produces {decoder.output_dim}-dim genomes, domain needs {n}"
        )
    batch = config.run.batch_size
    if config.run.budget < batch:
        raise ConfigError(
            f"budget {config.run.budget} is smaller than one batch of {batch}"
        )
    generations = config.run.budget // batch
    seed = config.run.seed
    d = decoder.latent_dim
    sigma = config.operators.sigma_latent

    arm_cfg = ArmConfig.uniform(n)
    if centroids is None:
        centroids = generate_centroids(config.archive.bins, config.archive.centroid_seed,
                                       config.archive.layout)
    archive = Archive(centroids, genome_dim=d)
    init_rng = rng_stream(seed, "init")
    var_rng = rng_stream(seed, "variation")
    state = RunState(archive, None, None, 0, [])

    def offer_batch(latents: np.ndarray) -> int:
        phenotypes = decoder.decode_batch(latents)
        fitness, behavior = evaluate_batch(phenotypes, arm_cfg)
        improved = 0
        for i in range(len(latents)):
            if archive.offer(latents[i], float(fitness[i]), behavior[i]):
                improved += 1
        return improved

    improved = offer_batch(init_rng.standard_normal((batch, d)))
    state.evaluations_used += batch
    _record(state, 1, INIT_ACTION, improved / batch)

    for gen in range(2, generations + 1):
        children = np.empty((batch, d))
        for i in range(batch):
            parent, _ = archive.random_elite(var_rng)
            children[i] = parent + sigma * var_rng.standard_normal(d)
        improved = offer_batch(children)
        state.evaluations_used += batch
        _record(state, gen, INIT_ACTION, improved / batch)

    return RunResult(archive, decoder, state.history, state.evaluations_used)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def write_history_csv(path: str | Path, history: list[GenerationRecord]) -> None:
    lines = ["generation,evaluations,coverage,mean_fitness,action,reward"]
    for r in history:
        lines.append(
            f"{r.generation},{r.evaluations},{_fmt(r.coverage)},"
            f"{_fmt(r.mean_fitness)},{r.action},{_fmt(r.reward)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def write_bandit_csv(path: str | Path, history: list[GenerationRecord]) -> None:
    lines = ["generation,action,reward"]
    lines += [f"{r.generation},{r.action},{_fmt(r.reward)}" for r in history]
    Path(path).write_text("\n".join(lines) + "\n")


def read_history_csv(path: str | Path) -> list[GenerationRecord]:
    lines = Path(path).read_text().strip().splitlines()
    if lines[0] != "generation,evaluations,coverage,mean_fitness,action,reward":
        raise ValueError(f"bad history CSV header: {lines[0]!r}")
    out = []
    for line in lines[1:]:
        g, e, cov, mf, a, rw = line.split(",")
        out.append(GenerationRecord(int(g), int(e), float(cov), float(mf),
                                    int(a), float(rw)))
    return out
