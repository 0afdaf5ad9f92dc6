"""Quality-diversity optimization with learned genotype encodings.

A MAP-Elites loop over a centroidal-Voronoi archive feeds a small VAE
trained on the archive's elites; the decoder becomes a learned encoding
whose latent space can itself be searched, by the elite-map loop or by
CMA-ES. A UCB1 bandit balances the learned crossover against classic
mutation operators. The benchmark domain is planar-arm inverse kinematics.
"""

from .archive import (Archive, ArchiveStats, CentroidIndex, generate_centroids,
                      read_archive_csv, read_centroids_csv, write_archive_csv,
                      write_centroids_csv)
from .arm import ArmConfig, Evaluation, evaluate, evaluate_batch, forward_kinematics, \
    genome_to_angles
from .bandit import DEFAULT_ACTIONS, DEFAULT_WINDOW_LENGTH, BanditState
from .cma import (CmaResult, TargetResult, TargetTask, cma_minimize, default_targets,
                  run_target_matching, write_targets_csv)
from .config import (ArchiveConfig, BanditConfig, DomainConfig, ExperimentConfig,
                     RunConfig, VaeConfig, default_latent_dim)
from .engine import (GenerationRecord, RunResult, map_elites_generation,
                     read_history_csv, run_dde_elites, run_dde_search, run_variant,
                     write_bandit_csv, write_history_csv)
from .errors import ConfigError, DecoderFormatError, EmptyArchiveError
from .rng import rng_stream
from .vae import DecoderNet, TrainReport, VaeModel, kl_divergence, load_decoder
from .variation import (OperatorRatios, VariationConfig, draw_operator_indices,
                        isometric_mutation, line_mutation, make_batch,
                        reconstructive_crossover)

__version__ = "0.1.0"

__all__ = [
    "Archive", "ArchiveStats", "CentroidIndex", "generate_centroids",
    "read_archive_csv", "read_centroids_csv", "write_archive_csv",
    "write_centroids_csv",
    "ArmConfig", "Evaluation", "evaluate", "evaluate_batch",
    "forward_kinematics", "genome_to_angles",
    "DEFAULT_ACTIONS", "DEFAULT_WINDOW_LENGTH", "BanditState",
    "CmaResult", "TargetResult", "TargetTask", "cma_minimize",
    "default_targets", "run_target_matching", "write_targets_csv",
    "ArchiveConfig", "BanditConfig", "DomainConfig", "ExperimentConfig",
    "RunConfig", "VaeConfig", "default_latent_dim",
    "GenerationRecord", "RunResult", "map_elites_generation",
    "read_history_csv", "run_dde_elites", "run_dde_search", "run_variant",
    "write_bandit_csv", "write_history_csv",
    "ConfigError", "DecoderFormatError", "EmptyArchiveError",
    "rng_stream",
    "DecoderNet", "TrainReport", "VaeModel", "kl_divergence", "load_decoder",
    "OperatorRatios", "VariationConfig", "draw_operator_indices",
    "isometric_mutation", "line_mutation", "make_batch",
    "reconstructive_crossover",
    "__version__",
]
