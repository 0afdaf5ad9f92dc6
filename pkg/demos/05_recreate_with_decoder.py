"""Recreating an archive by searching the learned encoding.

After a full bandit-driven run, the trained decoder is kept and everything
else is thrown away. Running the elite-map loop over the decoder's latent
space (isometric mutation only, no clamping) rebuilds the archive with a
tenth of the evaluations: the encoding already "knows" what good arm
configurations look like.
"""

import numpy as np

from dde_elites import ExperimentConfig, generate_centroids, run_dde_search, \
    run_variant

BINS = 300
centroids = generate_centroids(BINS, seed=1)

# full run with the direct encoding, learning the decoder along the way
cfg = ExperimentConfig.default(20, budget=20_000, seed=4)
cfg.archive.bins = BINS
cfg.vae.latent_dim = 5
source = run_variant(cfg, "dde-elites", centroids=centroids)
src_stats = source.archive.metrics()
print(f"source run: 20000 evaluations -> coverage {src_stats.coverage:.3f}, "
      f"mean fitness {src_stats.mean_fitness:.4f}")

# rebuild from latent space with a tenth of the budget
cfg2 = ExperimentConfig.default(20, budget=2000, seed=99)
cfg2.archive.bins = BINS
rebuilt = run_dde_search(source.decoder, cfg2, centroids=centroids)

print("\nlatent-space search progress (5-gene latent vs 20-gene direct):")
for rec in rebuilt.history[::2]:
    print(f"  {rec.evaluations:5d} evaluations: coverage {rec.coverage:.3f} "
          f"mean fitness {rec.mean_fitness:.4f}")

rb = rebuilt.archive.metrics()
print(f"\nrebuilt with 2000 evaluations: coverage {rb.coverage:.3f} "
      f"({rb.coverage / src_stats.coverage:.0%} of the source) "
      f"mean fitness {rb.mean_fitness:.4f}")

# compare to searching the direct 20-gene space with the same tiny budget
direct = run_variant(
    ExperimentConfig.default(20, budget=2000, seed=99), "map-elites",
    centroids=centroids,
)
print(f"direct encoding with the same 2000 evaluations: "
      f"coverage {direct.archive.metrics().coverage:.3f}")
