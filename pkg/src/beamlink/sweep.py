"""Monte Carlo sweep engine and result emission.

Realizations are indexed by run number and shared across every (scheme,
SNR, error-variance) cell, so the whole sweep sees common random numbers.
Each run draws from its own substream derived from (seed, run index),
which makes results byte-identical under any worker count: a realization's
value never depends on which worker computed it, and the reduction walks
run indices in order.

Rejected realizations (ill-conditioned beyond the inversion limit) are
skipped per cell and replacements generated until every cell holds exactly
`runs` accepted samples; rejection counts are reported per cell.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .errors import ConfigurationError, EmitError
from .overhead import feedback_budget
from .protocol import (SCHEME_BEAM_ZF_IMPERFECT, draw_csit_errors,
                       evaluate_realization, realize)

__all__ = ["SweepRecord", "SweepResult", "run_sweep", "emit_results",
           "run_rng", "csit_rng"]

CSV_COLUMNS = ("scheme", "snr_db", "error_variance", "sum_rate_mean",
               "sum_rate_std", "runs", "rejected", "feedback_real",
               "feedback_complex")

# Hard stop for pathological scenarios where cells keep rejecting.
_MAX_OVERDRAW_FACTOR = 10


@dataclass(frozen=True)
class SweepRecord:
    """Aggregated statistics of one (scheme, SNR, error variance) cell."""

    scheme: str
    snr_db: float
    error_variance: float | None
    sum_rate_mean: float
    sum_rate_std: float
    runs: int
    rejected: int
    feedback_real: int
    feedback_complex: int


@dataclass(frozen=True)
class SweepResult:
    records: tuple
    config: ScenarioConfig


def run_rng(seed: int, run_index: int) -> np.random.Generator:
    """Channel substream of one run: seeded by (seed, run index)."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(run_index, 0)))


def csit_rng(seed: int, run_index: int, variance_index: int) -> np.random.Generator:
    """CSIT-error substream, independent of the channel substream."""
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed,
                               spawn_key=(run_index, 1, variance_index)))


def _cells(config: ScenarioConfig) -> list[tuple]:
    cells = []
    for scheme in config.schemes:
        variances = config.csit_error_variances \
            if scheme == SCHEME_BEAM_ZF_IMPERFECT else (None,)
        for snr_db in config.snr_grid_db:
            for variance in variances:
                cells.append((scheme, snr_db, variance))
    return cells


def _realization_values(config: ScenarioConfig, run_index: int) -> dict[tuple, float | None]:
    """Sum-rate per cell for one realization; None marks a rejected cell."""
    rng = run_rng(config.seed, run_index)
    realization = realize(config, rng)
    views = None
    if SCHEME_BEAM_ZF_IMPERFECT in config.schemes:
        views = {variance: draw_csit_errors(
                     realization, variance, csit_rng(config.seed, run_index, j))
                 for j, variance in enumerate(config.csit_error_variances)}
    outcomes = evaluate_realization(realization, config, views)
    return {key: (None if outcome.report is None else outcome.report.sum_rate)
            for key, outcome in outcomes.items()}


def _realization_batch(config: ScenarioConfig, indices) -> list[dict]:
    return [_realization_values(config, i) for i in indices]


def run_sweep(config: ScenarioConfig, workers: int = 1) -> SweepResult:
    """Run the full Monte Carlo sweep described by the scenario.

    `workers` > 1 distributes realizations over processes; the result is
    byte-identical for any worker count.
    """
    if workers < 1:
        raise ConfigurationError(f"workers must be >= 1, got {workers}")
    cells = _cells(config)
    accepted: dict[tuple, list[float]] = {c: [] for c in cells}
    rejected: dict[tuple, int] = {c: 0 for c in cells}
    target = config.runs
    next_index = 0
    limit = _MAX_OVERDRAW_FACTOR * target + 100

    while True:
        open_cells = [c for c in cells if len(accepted[c]) < target]
        if not open_cells:
            break
        if next_index >= limit:
            raise ConfigurationError(
                f"could not collect {target} accepted realizations per cell "
                f"within {limit} draws; the scenario rejects too often")
        shortfall = max(target - len(accepted[c]) for c in open_cells)
        batch = range(next_index, min(next_index + shortfall, limit))
        next_index = batch.stop
        for values in _compute_batch(config, batch, workers):
            for cell in cells:
                if len(accepted[cell]) >= target:
                    continue
                value = values[cell]
                if value is None:
                    rejected[cell] += 1
                else:
                    accepted[cell].append(value)

    records = []
    for cell in cells:
        scheme, snr_db, variance = cell
        values = np.asarray(accepted[cell])
        std = float(np.std(values, ddof=1)) if target > 1 else 0.0
        budget = feedback_budget(config.K, config.L, scheme)
        records.append(SweepRecord(
            scheme=scheme, snr_db=snr_db, error_variance=variance,
            sum_rate_mean=float(np.mean(values)), sum_rate_std=std,
            runs=target, rejected=rejected[cell],
            feedback_real=budget.real_scalars,
            feedback_complex=budget.complex_scalars))
    return SweepResult(records=tuple(records), config=config)


def _compute_batch(config: ScenarioConfig, indices: range, workers: int):
    if workers == 1 or len(indices) < 2:
        return _realization_batch(config, indices)
    chunk = (len(indices) + workers - 1) // workers
    spans = [range(indices[i], min(indices[i] + chunk, indices.stop))
             for i in range(0, len(indices), chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_realization_batch, [config] * len(spans), spans))
    return [values for part in parts for values in part]


def _format_real(value: float | None) -> str:
    return "" if value is None else format(value, ".6g")


def emit_results(result: SweepResult, format: str = "csv",
                 destination=None) -> None:
    """Write sweep records as CSV or JSON to a path (None = stdout).

    CSV reals carry 6 significant digits; an empty error_variance marks a
    perfect-CSIT cell.  JSON keeps full float precision and includes the
    resolved scenario under "config".
    """
    if format == "csv":
        text = _to_csv(result)
    elif format == "json":
        text = _to_json(result)
    else:
        raise ConfigurationError(f"format must be csv or json, got {format!r}")
    if destination is None or destination == "-":
        sys.stdout.write(text)
        return
    path = Path(destination)
    try:
        path.write_text(text)
    except OSError as exc:
        raise EmitError(f"cannot write results to {path}: {exc}") from exc


def _to_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in result.records:
        writer.writerow([
            r.scheme, _format_real(r.snr_db), _format_real(r.error_variance),
            _format_real(r.sum_rate_mean), _format_real(r.sum_rate_std),
            r.runs, r.rejected, r.feedback_real, r.feedback_complex,
        ])
    return buf.getvalue()


def _to_json(result: SweepResult) -> str:
    payload = {
        "config": result.config.to_dict(),
        "records": [asdict(r) for r in result.records],
    }
    return json.dumps(payload, indent=2) + "\n"
