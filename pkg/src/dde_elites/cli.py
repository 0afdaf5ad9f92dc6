"""Command-line front end.

Subcommands: `illuminate` (archive-filling run of one algorithm variant),
`recreate` (archive search through a saved decoder at a tenth of the
budget), `targets` (per-target CMA-ES with direct or learned encoding),
and `verify` (fast invariant suite). Exit codes: 0 success, 1 verification
failure, 2 configuration error, 3 I/O error. Identical (config, seed)
produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import cma as cma_mod
from .archive import Archive, generate_centroids, write_archive_csv, write_centroids_csv
from .arm import ArmConfig, evaluate_batch
from .bandit import BanditState
from .config import ExperimentConfig, default_latent_dim
from .engine import (VARIANT_RATIOS, map_elites_generation, run_dde_search,
                     run_variant, write_bandit_csv, write_history_csv)
from .errors import ConfigError
from .rng import rng_stream
from .vae import VaeModel, load_decoder
from .variation import (OperatorRatios, VariationConfig, isometric_mutation,
                        line_mutation, reconstructive_crossover)


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON config file (flags override its keys)")
    sub.add_argument("--arm", type=int, choices=[20, 200, 1000],
                     help="arm size preset (sets n_joints and latent size)")
    sub.add_argument("--budget", type=int, help="evaluation budget")
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--replicates", type=int,
                     help="replicate count (seeds seed, seed+1, ...)")
    sub.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                     help="worker processes for per-target runs")
    sub.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dde-elites",
        description="Quality-diversity runs on the planar-arm benchmark",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_illum = subs.add_parser("illuminate", help="fill an archive with one variant")
    p_illum.add_argument("--variant", default="dde-elites",
                         choices=sorted(VARIANT_RATIOS), help="algorithm variant")
    _add_common_flags(p_illum)
    p_illum.set_defaults(func=cmd_illuminate)

    p_rec = subs.add_parser("recreate", help="search a saved decoder's latent space")
    p_rec.add_argument("decoder", help="decoder .npz produced by illuminate")
    _add_common_flags(p_rec)
    p_rec.set_defaults(func=cmd_recreate)

    p_tgt = subs.add_parser("targets", help="CMA-ES target matching")
    p_tgt.add_argument("--mode", default="direct", choices=["direct", "dde"])
    p_tgt.add_argument("--decoder", help="decoder .npz (required for --mode dde)")
    _add_common_flags(p_tgt)
    p_tgt.set_defaults(func=cmd_targets)

    p_ver = subs.add_parser("verify", help="run the fast invariant suite")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.set_defaults(func=cmd_verify)

    return parser


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file (or defaults) with CLI flags layered on top."""
    if args.config:
        cfg = ExperimentConfig.load(args.config)
    else:
        cfg = ExperimentConfig.default()
    if args.arm is not None:
        cfg.domain.n_joints = args.arm
        cfg.vae.latent_dim = default_latent_dim(args.arm)
    if args.budget is not None:
        cfg.run.budget = args.budget
    if args.seed is not None:
        cfg.run.seed = args.seed
    if args.replicates is not None:
        cfg.run.replicates = args.replicates
    if args.out is not None:
        cfg.out_dir = args.out
    return cfg


def _replicate_dirs(cfg: ExperimentConfig) -> list[tuple[int, Path]]:
    base = Path(cfg.out_dir)
    if cfg.run.replicates == 1:
        return [(cfg.run.seed, base)]
    return [(cfg.run.seed + r, base / f"rep{r:02d}") for r in range(cfg.run.replicates)]


def _mkdir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {path}: {exc}") from exc


def cmd_illuminate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    variant = args.variant
    for seed, out in _replicate_dirs(cfg):
        _mkdir(out)
        cfg.run.seed = seed
        result = run_variant(cfg, variant)
        write_history_csv(out / "history.csv", result.history)
        write_archive_csv(out / "archive.csv", result.archive)
        write_centroids_csv(out / "centroids.csv", result.archive.centroids)
        if result.decoder is not None:
            result.decoder.save(out / "decoder.npz")
        if variant == "dde-elites":
            write_bandit_csv(out / "bandit.csv", result.history)
        stats = result.archive.metrics()
        print(f"{variant} seed={seed}: coverage={stats.coverage:.4f} "
              f"mean_fitness={stats.mean_fitness:.6f} "
              f"evaluations={result.evaluations_used}")
    return 0


def cmd_recreate(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    decoder = load_decoder(args.decoder)
    if decoder.output_dim != cfg.domain.n_joints:
        raise ValueError(
            f"decoder produces {decoder.output_dim}-dim genomes, "
            f"configured domain needs {cfg.domain.n_joints}"
        )
    if decoder.latent_dim != cfg.vae.latent_dim:
        raise ValueError(
            f"decoder latent size {decoder.latent_dim} does not match "
            f"configured latent size {cfg.vae.latent_dim}"
        )
    if args.budget is None:
        cfg.run.budget = max(cfg.run.batch_size, cfg.run.budget // 10)
    for seed, out in _replicate_dirs(cfg):
        _mkdir(out)
        cfg.run.seed = seed
        result = run_dde_search(decoder, cfg)
        write_history_csv(out / "history.csv", result.history)
        write_archive_csv(out / "archive.csv", result.archive)
        stats = result.archive.metrics()
        print(f"recreate seed={seed}: coverage={stats.coverage:.4f} "
              f"mean_fitness={stats.mean_fitness:.6f} "
              f"evaluations={result.evaluations_used}")
    return 0


def cmd_targets(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    decoder = None
    if args.mode == "dde":
        if not args.decoder:
            raise ConfigError("--mode dde requires --decoder")
        decoder = load_decoder(args.decoder)
    arm_cfg = ArmConfig.uniform(cfg.domain.n_joints)
    budget = args.budget if args.budget is not None else 10_000
    task = cma_mod.TargetTask(budget_per_target=budget, mode=args.mode)
    for seed, out in _replicate_dirs(cfg):
        _mkdir(out)
        results = cma_mod.run_target_matching(task, arm_cfg, decoder, seed,
                                              workers=args.threads)
        cma_mod.write_targets_csv(out / "targets.csv", results, args.mode)
        med_dist = float(np.median([r.distance for r in results]))
        med_var = float(np.median([r.joint_variance for r in results]))
        (out / "targets_summary.csv").write_text(
            "mode,median_distance,median_joint_variance\n"
            f"{args.mode},{format(med_dist, '.17g')},{format(med_var, '.17g')}\n"
        )
        print(f"targets mode={args.mode} seed={seed}: "
              f"median_distance={med_dist:.6g} median_joint_variance={med_var:.6g}")
    return 0


# --------------------------------------------------------------- verification


def _check_vae_gradient(seed: int) -> tuple[bool, str]:
    rng = rng_stream(seed, "verify-grad")
    worst = 0.0
    for _ in range(3):
        model = VaeModel(6, 2, 8, seed=int(rng.integers(2**31)))
        x = rng.uniform(size=6)
        worst = max(worst, model.gradient_check(x, noise=rng.standard_normal(2)))
    return worst < 1e-4, f"max rel err {worst:.2e}"


def _check_line_reduction(seed: int) -> tuple[bool, str]:
    cfg = VariationConfig(sigma_line_iso=0.003, sigma_line_dir=0.0)
    rng_a = rng_stream(seed, "verify-line")
    rng_b = rng_stream(seed, "verify-line")
    x = rng_stream(seed, "verify-line-x").uniform(size=16)
    y = rng_stream(seed, "verify-line-y").uniform(size=16)
    a = line_mutation(x, y, cfg, rng_a)
    b = isometric_mutation(x, cfg.sigma_line_iso, rng_b)
    ok = np.array_equal(a, b)
    return ok, "line(sigma_dir=0) == isometric" if ok else "outputs differ"


def _check_xover_midpoint(seed: int) -> tuple[bool, str]:
    rng = rng_stream(seed, "verify-xover")
    model = VaeModel(12, 3, 16, seed=int(rng.integers(2**31)))
    x = rng.uniform(size=12)
    child = reconstructive_crossover(x, model)
    gap = abs(np.linalg.norm(child - x) - np.linalg.norm(child - model.reconstruct(x)))
    return gap < 1e-12, f"midpoint gap {gap:.2e}"


def _check_bandit_cache(seed: int) -> tuple[bool, str]:
    rng = rng_stream(seed, "verify-bandit")
    state = BanditState(window_length=100)
    for _ in range(500):
        state.update(int(rng.integers(9)), int(rng.integers(101)), 100)
    records = state.records()
    if len(records) != 100:
        return False, f"window length {len(records)} != 100"
    counts = np.zeros(9, dtype=int)
    sums = np.zeros(9)
    for action, reward in records:
        counts[action] += 1
        sums[action] += reward
    ok = np.array_equal(counts, state._counts) and np.allclose(
        sums, state._sums, rtol=1e-9, atol=1e-12
    )
    return ok, "cached stats match recount" if ok else "cached stats diverge"


def _check_untried_first(seed: int) -> tuple[bool, str]:
    state = BanditState()
    seen = []
    for _ in range(len(state.actions)):
        action = state.select()
        seen.append(action)
        state.update(action, 1, 100)
    ok = seen == list(range(len(state.actions)))
    return ok, f"first selections {seen}"


def _check_archive_monotone(seed: int) -> tuple[bool, str]:
    arm_cfg = ArmConfig.uniform(20)
    centroids = generate_centroids(300, seed)
    archive = Archive(centroids, genome_dim=20)
    rng = rng_stream(seed, "verify-archive")
    seeds = rng.uniform(size=(100, 20))
    fitness, behavior = evaluate_batch(seeds, arm_cfg)
    for i in range(100):
        archive.offer(seeds[i], float(fitness[i]), behavior[i])
    ratios = OperatorRatios(0.0, 0.0, 1.0)
    prev_fit = archive.fitness.copy()
    prev_cov = archive.metrics().coverage
    for _ in range(4):
        map_elites_generation(archive, ratios, 100, None, VariationConfig(),
                              arm_cfg, rng)
        if np.any(archive.fitness < prev_fit):
            return False, "a cell's fitness decreased"
        cov = archive.metrics().coverage
        if cov < prev_cov:
            return False, "coverage decreased"
        prev_fit = archive.fitness.copy()
        prev_cov = cov
    for cell in archive.occupied_cells():
        if archive.index.query(archive.behavior[cell]) != cell:
            return False, f"cell {cell} stores a behavior mapping elsewhere"
    return True, "fitness and coverage monotone over 500 evaluations"


VERIFY_CHECKS = [
    ("vae-gradient", _check_vae_gradient),
    ("line-reduction", _check_line_reduction),
    ("xover-midpoint", _check_xover_midpoint),
    ("bandit-cache", _check_bandit_cache),
    ("untried-first", _check_untried_first),
    ("archive-monotone", _check_archive_monotone),
]


def run_verification(seed: int = 0) -> list[tuple[str, bool, str]]:
    return [(name, *check(seed)) for name, check in VERIFY_CHECKS]


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_verification(args.seed)
    width = max(len(name) for name, _, _ in results)
    for name, ok, detail in results:
        print(f"[{'PASS' if ok else 'FAIL'}] {name:<{width}}  {detail}")
    return 0 if all(ok for _, ok, _ in results) else 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
