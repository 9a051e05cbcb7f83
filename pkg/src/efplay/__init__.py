"""Entropic fictitious play for entropy-regularised mean-field optimisation."""

from .datasets import make_sine_dataset
from .diagnostics import (EntropyEstimate, MetricsSnapshot, entropy_relative_to_g,
                          fixed_point_residual_1d, knn_entropy, snapshot, validation_error,
                          wasserstein1_1d)
from .efp import outer_step, replacement_count, run_efp, run_mfld_baseline
from .objective import (NnObjective, QuadraticPotential, ToyLinearObjective, reference_gradient,
                        reference_potential, toy_linear_objective)
from .rng import rng_stream
from .sampler import (ExactGibbsSampler1D, InnerState, drift, gibbs_log_density_unnormalized,
                      run_inner, ula_step)
from .types import (ConfigError, Dataset, DivergenceError, EfpConfig, EpochRecord, ParticleCloud,
                    RunTrace, gaussian_cloud)

__version__ = "0.1.0"
