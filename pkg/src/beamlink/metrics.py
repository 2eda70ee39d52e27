"""Per-user SINRs, rates, and sum-rates, plus a symbol-level oracle.

Analytic expressions cover non-precoded, linearly precoded, and
imperfect-CSIT zero-forcing transmission; ``simulate_symbol_transmission``
estimates the same SINRs empirically from generated symbols and serves as
an independent check on every formula.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.random import Generator

from .errors import ConfigurationError
from .geometry import ChannelMatrix
from .precoding import zf_erp

__all__ = [
    "NoiseModel", "LinkReport", "CsitErrorModel", "TransmissionSample",
    "sinr_nonprecoded", "sinr_linear_precoded", "sum_rate",
    "apply_csit_error", "sum_rate_zf_imperfect",
    "transmit", "simulate_symbol_transmission",
]


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise variance and the symbol power convention.

    Every transmitted symbol has variance ``symbol_variance`` = P/K, so the
    defaults (symbol variance 1, total power K) describe the standard
    setup.  ``total_power`` left as None resolves to symbol_variance * K
    once the user count is known.
    """

    noise_variance: float
    symbol_variance: float = 1.0
    total_power: float | None = None

    def __post_init__(self):
        if not self.noise_variance > 0:
            raise ConfigurationError("noise_variance must be positive")
        if not self.symbol_variance > 0:
            raise ConfigurationError("symbol_variance must be positive")

    @classmethod
    def from_snr_db(cls, snr_db: float, **kwargs) -> "NoiseModel":
        """Target receive SNR in dB -> noise variance 10**(-snr/10)."""
        return cls(noise_variance=10.0 ** (-snr_db / 10.0), **kwargs)

    def resolved_total_power(self, k: int) -> float:
        return self.total_power if self.total_power is not None \
            else self.symbol_variance * k


@dataclass(frozen=True)
class LinkReport:
    """Per-user SINRs and rates plus the sum-rate for one realization."""

    scheme: str
    sinrs: tuple
    rates: tuple
    sum_rate: float


@dataclass(frozen=True)
class CsitErrorModel:
    """Additive i.i.d. complex Gaussian error on the channel fed back."""

    error_variance: float

    def __post_init__(self):
        if self.error_variance < 0:
            raise ConfigurationError("error_variance must be >= 0")


@dataclass(frozen=True)
class TransmissionSample:
    """One batch of symbol-level transmissions: y = H s' + n exactly."""

    sent: np.ndarray
    precoded: np.ndarray
    received: np.ndarray
    noise: np.ndarray


def _entries(h) -> np.ndarray:
    arr = h.entries if isinstance(h, ChannelMatrix) else np.asarray(h)
    return np.asarray(arr, dtype=np.complex128)


def sinr_nonprecoded(h, noise: NoiseModel) -> np.ndarray:
    """gamma_k = |h_kk|^2 s2 / (sum_{m != k} |h_km|^2 s2 + noise_variance)."""
    arr = _entries(h)
    s2 = noise.symbol_variance
    direct = np.abs(np.diag(arr)) ** 2 * s2
    interference = np.sum(np.abs(arr) ** 2, axis=1) * s2 - direct
    return direct / (interference + noise.noise_variance)


def sinr_linear_precoded(h, w: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """SINR through the composite channel HW; MUI is the off-diagonal power."""
    g = _entries(h) @ np.asarray(w, dtype=np.complex128)
    s2 = noise.symbol_variance
    direct = np.abs(np.diag(g)) ** 2 * s2
    interference = np.sum(np.abs(g) ** 2, axis=1) * s2 - direct
    return direct / (interference + noise.noise_variance)


def sum_rate(sinrs: Sequence[float], scheme: str = "") -> LinkReport:
    """Rates R_k = log2(1 + gamma_k) and their sum, packed into a report."""
    gammas = np.asarray(sinrs, dtype=np.float64)
    if np.any(gammas < 0):
        raise ConfigurationError("SINRs must be nonnegative")
    rates = np.log2(1.0 + gammas)
    return LinkReport(scheme=scheme, sinrs=tuple(gammas.tolist()),
                      rates=tuple(rates.tolist()), sum_rate=float(rates.sum()))


def apply_csit_error(h, model: CsitErrorModel, rng: Generator) -> ChannelMatrix:
    """Imperfect feedback H_e = H + E, E i.i.d. CN(0, error_variance)."""
    if isinstance(h, ChannelMatrix) and not h.is_normalized:
        raise ConfigurationError("CSIT error applies to the normalized channel")
    arr = _entries(h)
    scale = np.sqrt(model.error_variance / 2.0)
    e = scale * (rng.standard_normal(arr.shape) + 1j * rng.standard_normal(arr.shape))
    return ChannelMatrix(arr + e, is_normalized=True)


def sum_rate_zf_imperfect(h_e, noise: NoiseModel,
                          model: CsitErrorModel) -> LinkReport:
    """ERP-style ZF designed on the imperfect channel H_e.

    beta comes from H_e's singular values and each user sees
    gamma = beta / (P * error_variance + noise_variance); residual
    interference enters through the error-power term rather than through
    explicit cross-channel gains.
    """
    arr = _entries(h_e)
    result = zf_erp(arr)
    p = noise.resolved_total_power(arr.shape[0])
    gamma = result.beta / (p * model.error_variance + noise.noise_variance)
    return sum_rate(np.full(arr.shape[0], gamma), scheme="zf-imperfect")


def transmit(h, w: np.ndarray | None, noise: NoiseModel, count: int,
             rng: Generator) -> TransmissionSample:
    """Generate `count` symbol vectors and push them through y = H W s + n."""
    arr = _entries(h)
    k = arr.shape[0]
    s_scale = np.sqrt(noise.symbol_variance / 2.0)
    s = s_scale * (rng.standard_normal((k, count)) + 1j * rng.standard_normal((k, count)))
    precoded = s if w is None else np.asarray(w, dtype=np.complex128) @ s
    n_scale = np.sqrt(noise.noise_variance / 2.0)
    n = n_scale * (rng.standard_normal((k, count)) + 1j * rng.standard_normal((k, count)))
    return TransmissionSample(sent=s, precoded=precoded,
                              received=arr @ precoded + n, noise=n)


def simulate_symbol_transmission(h, w: np.ndarray | None, noise: NoiseModel,
                                 symbol_count: int, rng: Generator) -> np.ndarray:
    """Empirical per-user SINR measured from simulated transmissions.

    The desired sample for user k is its own symbol through the composite
    diagonal; everything else in the received sample (cross-talk plus
    noise) counts as impairment.  Agrees with the analytic SINR formulas to
    Monte Carlo accuracy; keep symbol_count >= 1000 for stable estimates.
    """
    if symbol_count < 1000:
        raise ConfigurationError("symbol_count must be >= 1000")
    sample = transmit(h, w, noise, symbol_count, rng)
    arr = _entries(h)
    g = arr if w is None else arr @ np.asarray(w, dtype=np.complex128)
    desired = np.diag(g)[:, None] * sample.sent
    impairment = sample.received - desired
    sig_power = np.mean(np.abs(desired) ** 2, axis=1)
    imp_power = np.mean(np.abs(impairment) ** 2, axis=1)
    return sig_power / imp_power
