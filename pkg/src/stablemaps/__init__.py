"""Peeling explorations of critical planar maps and their scaling limits.

The package has four layers:

- model: weight sequences and the partition-function solver
  (`make_weight_sequence`, `solve_partition_function`, `PartitionTable`);
- peeling: boundary processes, single explorations and branching cell
  systems (`run_exploration`, `run_cell_system`, `ball_perimeters`);
- continuum lab: Lévy paths, Lamperti transforms, conditioned Cauchy
  processes and growth-fragmentations (`sample_xi`, `lamperti`,
  `sample_upsilon_up`, `growth_fragmentation`);
- verification harness: Monte-Carlo experiments matching rescaled
  discrete observables against continuum ensembles (`run_experiment`,
  `default_config`, `EXPERIMENTS`).
"""

from .boundary import LayeredBoundary, PeelEvent, StepOutcome, peel_step
from .cells import Cell, CellSystem, ball_perimeters, decorate_o2, \
    run_cell_system
from .experiments import EXPERIMENTS, EnsembleSummary, ExperimentConfig, \
    default_config, load_config, qnd_mean, run_experiment, self_similarity_ks
from .exploration import ExplorationTrace, run_exploration
from .gf import GFState, growth_fragmentation
from .jumppath import JumpPath
from .lamperti import LampertiResult, lamperti, lamperti_distance, \
    qnd_estimator
from .levy import XI_DRIFT, extend_xi, lambda_density, phi_antiderivative, \
    sample_cauchy, sample_xi, xi_jump_rate
from .partition import PartitionTable, f_up, h_up, harmonicity_defect, \
    solve_partition_function
from .stats import bootstrap_ks_ci, kendall_trend, ks_two_sample, \
    weighted_quantiles
from .steplaw import StepLaw, sample_steps, transition_law
from .upsilon import WeightedEnsemble, doob_pair_ensemble, sample_upsilon_up
from .weights import PRESET_NAME, WeightSequence, make_weight_sequence

__version__ = "0.1.0"

__all__ = [
    "PRESET_NAME", "WeightSequence", "make_weight_sequence",
    "PartitionTable", "solve_partition_function", "harmonicity_defect",
    "h_up", "f_up",
    "LayeredBoundary", "PeelEvent", "StepOutcome", "peel_step",
    "StepLaw", "transition_law", "sample_steps",
    "ExplorationTrace", "run_exploration",
    "Cell", "CellSystem", "run_cell_system", "ball_perimeters",
    "decorate_o2",
    "JumpPath", "XI_DRIFT", "sample_xi", "extend_xi", "sample_cauchy",
    "lambda_density", "phi_antiderivative", "xi_jump_rate",
    "LampertiResult", "lamperti", "lamperti_distance", "qnd_estimator",
    "WeightedEnsemble", "sample_upsilon_up", "doob_pair_ensemble",
    "GFState", "growth_fragmentation",
    "ks_two_sample", "bootstrap_ks_ci", "kendall_trend",
    "weighted_quantiles",
    "EXPERIMENTS", "ExperimentConfig", "EnsembleSummary", "default_config",
    "load_config", "run_experiment", "qnd_mean", "self_similarity_ks",
    "__version__",
]
