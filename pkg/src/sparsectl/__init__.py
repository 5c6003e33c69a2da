"""sparsectl: feedback synthesis and Monte Carlo certification for
control loops that measure a random subset of the state at each step."""

__version__ = "0.1.0"

from .errors import (AssumptionError, DimensionError, InfeasibilityError,
                     InvalidInputError, PlantFormatError,
                     RankDeficiencyError, ToolkitError)
from .linops import (is_positive_definite, projected_dynamics, rank_of,
                     spectral_norm)
from .models import (ModelSpec, converter, interconnected_chain, load_plant,
                     parse_model_uri, plant_sha256, power_grid, save_plant)
from .sim import (DecayReport, EnsembleStats, SimConfig, decay_report,
                  run_ensemble, step, sweep_p)
from .sparsify import (Mask, MaskSampler, expected_sparsity, sample_mask,
                       second_moment_matrix)
from .synth import (GainCertificate, Plant, SparsificationPlan,
                    check_assumptions, contraction_adaptive,
                    contraction_uniform, design_adaptive, design_uniform,
                    family_certificate, family_norm, gain_for_gamma,
                    lmi_feasible, make_plant, threshold_adaptive,
                    threshold_uniform)

__all__ = [
    "AssumptionError", "DecayReport", "DimensionError", "EnsembleStats",
    "GainCertificate", "InfeasibilityError", "InvalidInputError", "Mask",
    "MaskSampler", "ModelSpec", "Plant", "PlantFormatError",
    "RankDeficiencyError", "SimConfig", "SparsificationPlan", "ToolkitError",
    "check_assumptions", "contraction_adaptive", "contraction_uniform",
    "converter", "decay_report", "design_adaptive", "design_uniform",
    "expected_sparsity", "family_certificate", "family_norm",
    "gain_for_gamma", "interconnected_chain",
    "is_positive_definite", "lmi_feasible", "load_plant", "make_plant",
    "parse_model_uri", "plant_sha256", "power_grid", "projected_dynamics",
    "rank_of", "run_ensemble", "sample_mask", "save_plant",
    "second_moment_matrix", "spectral_norm", "step", "sweep_p",
    "threshold_adaptive", "threshold_uniform",
]
