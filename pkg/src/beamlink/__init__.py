"""beamlink: link-level Monte Carlo simulator for beam-domain multi-user
interference channels with zero-forcing precoding and beam selection."""

from ._core import BACKEND
from .config import BeamConfig, GeometryConfig, ScenarioConfig, load_config
from .errors import (BeamlinkError, CombinatorialExplosionError,
                     ConfigurationError, EmitError, GeometryError,
                     IllConditionedChannelError, NormalizationError,
                     NoValidCombinationError)
from .geometry import (MATCHED_AVERAGE_POWER, OMNI, UNIT_PEAK, BeamCombination,
                       BeamPattern, ChannelMatrix, SceneGeometry,
                       ScattererField, TransmitBeamSet, apply_normalization,
                       beam_gain, draw_scatterers, estimate_normalization,
                       synthesize_beam_bank, synthesize_channel)
from .metrics import (CsitErrorModel, LinkReport, NoiseModel, TransmissionSample,
                      apply_csit_error, simulate_symbol_transmission,
                      sinr_linear_precoded, sinr_nonprecoded, sum_rate,
                      sum_rate_zf_imperfect, transmit)
from .overhead import FeedbackBudget, feedback_budget
from .precoding import (CONDITION_LIMIT, PrecodeResult, pseudo_inverse,
                        zf_erp, zf_etp)
from .protocol import (ALL_SCHEMES, PERFECT_CSIT_SCHEMES, CombinationScore,
                       Realization, SchemeOutcome, enumerate_combinations,
                       evaluate_realization, realize, rule1_scores,
                       rule2_scores, run_protocol, select_rule1, select_rule2)
from .sweep import SweepRecord, SweepResult, emit_results, run_sweep

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "__version__",
    # config
    "ScenarioConfig", "GeometryConfig", "BeamConfig", "load_config",
    # errors
    "BeamlinkError", "ConfigurationError", "GeometryError",
    "NormalizationError", "IllConditionedChannelError",
    "CombinatorialExplosionError", "NoValidCombinationError", "EmitError",
    # geometry
    "OMNI", "SceneGeometry", "ScattererField", "BeamPattern",
    "TransmitBeamSet", "BeamCombination", "ChannelMatrix",
    "MATCHED_AVERAGE_POWER", "UNIT_PEAK", "draw_scatterers", "beam_gain",
    "synthesize_channel", "synthesize_beam_bank", "estimate_normalization",
    "apply_normalization",
    # precoding
    "CONDITION_LIMIT", "PrecodeResult", "pseudo_inverse", "zf_erp", "zf_etp",
    # metrics
    "NoiseModel", "LinkReport", "CsitErrorModel", "TransmissionSample",
    "sinr_nonprecoded", "sinr_linear_precoded", "sum_rate",
    "apply_csit_error", "sum_rate_zf_imperfect", "transmit",
    "simulate_symbol_transmission",
    # protocol
    "ALL_SCHEMES", "PERFECT_CSIT_SCHEMES", "CombinationScore",
    "SchemeOutcome", "Realization", "enumerate_combinations", "rule1_scores",
    "rule2_scores", "select_rule1", "select_rule2", "realize",
    "evaluate_realization", "run_protocol",
    # overhead
    "FeedbackBudget", "feedback_budget",
    # sweep
    "SweepRecord", "SweepResult", "run_sweep", "emit_results",
]
