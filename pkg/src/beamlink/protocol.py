"""Learning/selection/transmission protocol over the beam combinations.

The learning phase is abstracted as perfect feedback of either per-user
SINRs (Rule #1) or full channel matrices (Rule #2) for every beam
combination.  Selection is the exhaustive argmax over all L**K
combinations; transmission-phase reports are produced for each enabled
scheme on one channel realization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np
from numpy.random import Generator

from .errors import (CombinatorialExplosionError, ConfigurationError,
                     IllConditionedChannelError, NoValidCombinationError)
from .geometry import (OMNI, BeamCombination, ChannelMatrix,
                       combination_channels, draw_scatterers,
                       estimate_normalization, synthesize_beam_bank,
                       synthesize_channel)
from .metrics import LinkReport, NoiseModel, sinr_nonprecoded, sum_rate
from .precoding import CONDITION_LIMIT, zf_erp, zf_etp

if TYPE_CHECKING:
    from .config import ScenarioConfig

__all__ = [
    "SCHEME_OMNI_NP", "SCHEME_OMNI_ZF_ERP", "SCHEME_OMNI_ZF_ETP",
    "SCHEME_BEAM_NP", "SCHEME_BEAM_ZF_ERP", "SCHEME_BEAM_ZF_ETP",
    "SCHEME_BEAM_ZF_IMPERFECT", "ALL_SCHEMES", "PERFECT_CSIT_SCHEMES",
    "RULE2_ERP_SUM_RATE", "RULE2_DETERMINANT", "RULE2_SCALARIZATIONS",
    "COMBINATION_GUARD", "CombinationScore", "SchemeOutcome", "Realization",
    "enumerate_combinations", "rule1_scores", "rule2_scores",
    "select_rule1", "select_rule2", "realize", "draw_csit_errors",
    "evaluate_realization", "run_protocol",
]

SCHEME_OMNI_NP = "omni-np"
SCHEME_OMNI_ZF_ERP = "omni-zf-erp"
SCHEME_OMNI_ZF_ETP = "omni-zf-etp"
SCHEME_BEAM_NP = "beam-np"
SCHEME_BEAM_ZF_ERP = "beam-zf-erp"
SCHEME_BEAM_ZF_ETP = "beam-zf-etp"
SCHEME_BEAM_ZF_IMPERFECT = "beam-zf-imperfect"

PERFECT_CSIT_SCHEMES = (SCHEME_OMNI_NP, SCHEME_OMNI_ZF_ERP, SCHEME_OMNI_ZF_ETP,
                        SCHEME_BEAM_NP, SCHEME_BEAM_ZF_ERP, SCHEME_BEAM_ZF_ETP)
ALL_SCHEMES = PERFECT_CSIT_SCHEMES + (SCHEME_BEAM_ZF_IMPERFECT,)

RULE2_ERP_SUM_RATE = "erp-sum-rate"
RULE2_DETERMINANT = "determinant"
RULE2_SCALARIZATIONS = (RULE2_ERP_SUM_RATE, RULE2_DETERMINANT)

# Enumeration guard: L**K combinations beyond this are refused outright.
COMBINATION_GUARD = 10**6


@dataclass(frozen=True)
class CombinationScore:
    """Selection-phase score of one combination; rejected combinations
    (ill-conditioned beyond the inversion limit) carry no score."""

    combination: BeamCombination
    channel: ChannelMatrix
    score: float | None
    rejected: bool = False


@dataclass(frozen=True)
class SchemeOutcome:
    """Transmission-phase result of one scheme on one realization."""

    report: LinkReport | None
    combination: BeamCombination | None = None
    beta: float | None = None
    rejected: bool = False


@dataclass(frozen=True)
class Realization:
    """One normalized channel realization: every combination plus omni."""

    combinations: tuple
    beam_channels: np.ndarray      # (C, K, K), normalized
    omni_channel: np.ndarray       # (K, K), normalized
    normalization_constant: float


def enumerate_combinations(k: int, l: int) -> list[BeamCombination]:
    """All L**K beam combinations in lexicographic order."""
    if k < 1 or l < 1:
        raise ConfigurationError(f"need k >= 1 and l >= 1, got k={k}, l={l}")
    total = l**k
    if total > COMBINATION_GUARD:
        raise CombinatorialExplosionError(
            f"L**K = {total} combinations exceed the {COMBINATION_GUARD} guard")
    return [BeamCombination(ix) for ix in itertools.product(range(l), repeat=k)]


def _rule1_score_array(channels: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """Sum of non-precoded SINRs per combination, vectorized over (C, K, K)."""
    s2 = noise.symbol_variance
    k = channels.shape[1]
    diag = np.abs(channels[:, np.arange(k), np.arange(k)]) ** 2 * s2
    interference = np.sum(np.abs(channels) ** 2, axis=2) * s2 - diag
    return np.sum(diag / (interference + noise.noise_variance), axis=1)


def _rule2_score_arrays(channels: np.ndarray, scalarization: str):
    """(scores, rejected) per combination for the full-CSI selection rule."""
    if scalarization not in RULE2_SCALARIZATIONS:
        raise ConfigurationError(
            f"rule2_scalarization must be one of {RULE2_SCALARIZATIONS}, "
            f"got {scalarization!r}")
    s = np.linalg.svd(channels, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = s[:, 0] / s[:, -1]
        rejected = ~np.isfinite(cond) | (cond > CONDITION_LIMIT)
        if scalarization == RULE2_ERP_SUM_RATE:
            scores = 1.0 / np.sum(1.0 / s**2, axis=1)
        else:
            scores = np.abs(np.linalg.det(channels)) ** 2
    scores = np.where(rejected, -np.inf, scores)
    return scores, rejected


def _argmax_lex(scores: np.ndarray, rejected: np.ndarray,
                combinations: Sequence[BeamCombination]) -> int:
    """Index of the best score; ties go to the lexicographically smallest
    combination, independent of input order."""
    best = -1
    for i, combo in enumerate(combinations):
        if rejected[i]:
            continue
        if best < 0 or scores[i] > scores[best] or (
                scores[i] == scores[best] and combo < combinations[best]):
            best = i
    if best < 0:
        raise NoValidCombinationError("every beam combination was rejected")
    return best


def rule1_scores(combinations: Sequence[BeamCombination],
                 channels: Sequence[ChannelMatrix],
                 noise: NoiseModel) -> list[CombinationScore]:
    """Score each combination by its sum of non-precoded SINRs (Rule #1)."""
    arr = np.stack([c.entries for c in channels])
    scores = _rule1_score_array(arr, noise)
    return [CombinationScore(combo, chan, float(score))
            for combo, chan, score in zip(combinations, channels, scores)]


def rule2_scores(combinations: Sequence[BeamCombination],
                 channels: Sequence[ChannelMatrix],
                 scalarization: str = RULE2_ERP_SUM_RATE) -> list[CombinationScore]:
    """Score each combination from full CSI (Rule #2).

    The default scalarization of "largest H H^H" maximizes the resulting
    ZF-ERP power factor beta; "determinant" maximizes det(H H^H) instead.
    Ill-conditioned combinations are marked rejected.
    """
    arr = np.stack([c.entries for c in channels])
    scores, rejected = _rule2_score_arrays(arr, scalarization)
    return [CombinationScore(combo, chan, None if rej else float(score), bool(rej))
            for combo, chan, score, rej in zip(combinations, channels, scores, rejected)]


def _select(scored: Sequence[CombinationScore]) -> BeamCombination:
    combos = [s.combination for s in scored]
    scores = np.array([-np.inf if s.rejected else s.score for s in scored])
    rejected = np.array([s.rejected for s in scored])
    return combos[_argmax_lex(scores, rejected, combos)]


def select_rule1(scored: Sequence[CombinationScore]) -> BeamCombination:
    """Combination with the largest SINR sum; lexicographic tie-break."""
    return _select(scored)


def select_rule2(scored: Sequence[CombinationScore]) -> BeamCombination:
    """Combination with the best full-CSI score; lexicographic tie-break."""
    return _select(scored)


def realize(config: "ScenarioConfig", rng: Generator) -> Realization:
    """Draw one channel realization under the scenario's shared normalization.

    A single constant is estimated from omni-channel sub-runs and applied
    to the omni channel and every beam combination of the realization's own
    scatterer field, preserving the relative gains between combinations.
    The rng is consumed in a fixed order: normalization sub-runs first,
    then the realization field.
    """
    geometry = config.scene_geometry()
    beam_set = config.beam_set()
    a = estimate_normalization(geometry, OMNI, config.normalization_subruns,
                               rng, scatterer_count=config.scatterer_count)
    field = draw_scatterers(geometry, config.scatterer_count, rng)
    bank = synthesize_beam_bank(geometry, field, beam_set)
    omni = synthesize_channel(geometry, field, OMNI).entries
    combinations = tuple(enumerate_combinations(config.K, config.L))
    channels = combination_channels(bank, combinations)
    return Realization(combinations, a * channels, a * omni, a)


def draw_csit_errors(realization: Realization, error_variance: float,
                     rng: Generator) -> np.ndarray:
    """Imperfect-CSIT view H_e of every combination channel, (C, K, K)."""
    shape = realization.beam_channels.shape
    scale = np.sqrt(error_variance / 2.0)
    e = scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return realization.beam_channels + e


def _zf_outcome(channel: np.ndarray, scheme: str, noise: NoiseModel,
                combination: BeamCombination | None) -> SchemeOutcome:
    try:
        if scheme in (SCHEME_OMNI_ZF_ERP, SCHEME_BEAM_ZF_ERP):
            result = zf_erp(channel)
            gamma = result.beta * noise.symbol_variance / noise.noise_variance
            report = sum_rate(np.full(channel.shape[0], gamma), scheme)
            return SchemeOutcome(report, combination, beta=result.beta)
        result = zf_etp(channel)
        gamma = noise.symbol_variance / (noise.noise_variance
                                         * result.column_norms**2)
        return SchemeOutcome(sum_rate(gamma, scheme), combination)
    except IllConditionedChannelError:
        return SchemeOutcome(None, combination, rejected=True)


def evaluate_realization(
        realization: Realization, config: "ScenarioConfig",
        csit_views: Mapping[float, np.ndarray] | None = None,
) -> dict[tuple, SchemeOutcome]:
    """Reports for every enabled (scheme, SNR point, error variance) cell.

    Keys are (scheme, snr_db, error_variance) with error_variance None for
    perfect-CSIT schemes.  Selection that does not depend on the noise
    level (Rule #2, and Rule #2 on each imperfect view) runs once.
    """
    combos = realization.combinations
    channels = realization.beam_channels
    outcomes: dict[tuple, SchemeOutcome] = {}
    schemes = config.schemes

    rule2_idx = None
    if SCHEME_BEAM_ZF_ERP in schemes or SCHEME_BEAM_ZF_ETP in schemes:
        scores, rejected = _rule2_score_arrays(channels, config.rule2_scalarization)
        try:
            rule2_idx = _argmax_lex(scores, rejected, combos)
        except NoValidCombinationError:
            rule2_idx = -1

    imperfect_sel: dict[float, tuple] = {}
    if SCHEME_BEAM_ZF_IMPERFECT in schemes:
        for variance, views in (csit_views or {}).items():
            scores, rejected = _rule2_score_arrays(views, config.rule2_scalarization)
            try:
                idx = _argmax_lex(scores, rejected, combos)
                imperfect_sel[variance] = (idx, zf_erp(views[idx]).beta)
            except NoValidCombinationError:
                imperfect_sel[variance] = (-1, None)

    for snr_db in config.snr_grid_db:
        noise = config.noise_for(snr_db)
        for scheme in schemes:
            if scheme == SCHEME_BEAM_ZF_IMPERFECT:
                for variance, (idx, beta) in imperfect_sel.items():
                    key = (scheme, snr_db, variance)
                    if idx < 0:
                        outcomes[key] = SchemeOutcome(None, rejected=True)
                        continue
                    p = noise.resolved_total_power(config.K)
                    gamma = beta / (p * variance + noise.noise_variance)
                    report = sum_rate(np.full(config.K, gamma), scheme)
                    outcomes[key] = SchemeOutcome(report, combos[idx], beta=beta)
                continue
            key = (scheme, snr_db, None)
            if scheme == SCHEME_OMNI_NP:
                sinrs = sinr_nonprecoded(realization.omni_channel, noise)
                outcomes[key] = SchemeOutcome(sum_rate(sinrs, scheme))
            elif scheme in (SCHEME_OMNI_ZF_ERP, SCHEME_OMNI_ZF_ETP):
                outcomes[key] = _zf_outcome(realization.omni_channel, scheme,
                                            noise, None)
            elif scheme == SCHEME_BEAM_NP:
                idx = _argmax_lex(_rule1_score_array(channels, noise),
                                  np.zeros(len(combos), dtype=bool), combos)
                sinrs = sinr_nonprecoded(channels[idx], noise)
                outcomes[key] = SchemeOutcome(sum_rate(sinrs, scheme), combos[idx])
            elif scheme in (SCHEME_BEAM_ZF_ERP, SCHEME_BEAM_ZF_ETP):
                if rule2_idx < 0:
                    outcomes[key] = SchemeOutcome(None, rejected=True)
                else:
                    outcomes[key] = _zf_outcome(channels[rule2_idx], scheme,
                                                noise, combos[rule2_idx])
            else:
                raise ConfigurationError(f"unknown scheme {scheme!r}")
    return outcomes


def run_protocol(config: "ScenarioConfig", rng: Generator,
                 snr_db: float | None = None) -> dict[str, LinkReport | None]:
    """Full protocol on one fresh realization at one SNR point.

    Returns {scheme: report} for the schemes enabled in the scenario; the
    imperfect-CSIT scheme appears once per configured error variance as
    "beam-zf-imperfect@<variance>".  Rejected schemes map to None.  CSIT
    error draws follow the realization on the same stream, one block per
    configured variance.
    """
    if snr_db is None:
        snr_db = config.snr_grid_db[0]
    realization = realize(config, rng)
    views = {variance: draw_csit_errors(realization, variance, rng)
             for variance in config.csit_error_variances} \
        if SCHEME_BEAM_ZF_IMPERFECT in config.schemes else None
    narrowed = config.with_updates(snr_grid_db=(snr_db,))
    outcomes = evaluate_realization(realization, narrowed, views)
    reports: dict[str, LinkReport | None] = {}
    for (scheme, _, variance), outcome in outcomes.items():
        key = scheme if variance is None else f"{scheme}@{variance:g}"
        reports[key] = outcome.report
    return reports
