"""Zero-forcing precoding: channel inversion plus ERP/ETP normalization.

ERP (equal receive power) scales the whole pseudo-inverse by sqrt(beta) so
every user sees the same receive power; ETP (equal transmit power) instead
normalizes each precoder column to unit norm.  Both null multi-user
interference exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedChannelError
from .geometry import ChannelMatrix

__all__ = ["CONDITION_LIMIT", "PrecodeResult", "pseudo_inverse", "zf_erp", "zf_etp"]

# Condition-number cutoff for channel inversion; combinations beyond it are
# rejected by callers rather than precoded with amplified noise.
CONDITION_LIMIT = 1e12

ERP = "erp"
ETP = "etp"


@dataclass(frozen=True)
class PrecodeResult:
    """Precoding matrix plus the scheme scalars the rate formulas consume.

    ``beta`` is the ERP power factor (None for ETP); ``column_norms`` holds
    the norms of the raw pseudo-inverse columns (None for ERP);
    ``singular_values`` are the channel's singular values, descending.
    """

    matrix: np.ndarray
    scheme: str
    singular_values: np.ndarray
    beta: float | None = None
    column_norms: np.ndarray | None = None


def _entries(h) -> np.ndarray:
    arr = h.entries if isinstance(h, ChannelMatrix) else np.asarray(h)
    return np.asarray(arr, dtype=np.complex128)


def _svd_accepted(h: np.ndarray):
    u, s, vh = np.linalg.svd(h)
    if s[-1] == 0.0 or s[0] / s[-1] > CONDITION_LIMIT:
        raise IllConditionedChannelError(
            f"channel condition number exceeds {CONDITION_LIMIT:.0e} "
            f"(singular values {s.min():.3e} .. {s.max():.3e})")
    return u, s, vh


def pseudo_inverse(h) -> np.ndarray:
    """Right Moore-Penrose pseudo-inverse H^+ = H^H (H H^H)^-1.

    For the square nonsingular channels accepted here this is the plain
    inverse.  Raises IllConditionedChannelError when the condition number
    exceeds CONDITION_LIMIT.
    """
    arr = _entries(h)
    u, s, vh = _svd_accepted(arr)
    return (vh.conj().T / s) @ u.conj().T


def zf_erp(h, total_power: float = 1.0) -> PrecodeResult:
    """Equal-receive-power ZF: W = sqrt(beta) H^+ with beta = P / sum(1/s_k^2).

    The default ``total_power=1`` takes the power factor literally as
    beta = 1/Tr((H H^H)^-1), which leaves Tr(W W^H) = 1; pass
    ``total_power=K`` to normalize the precoded transmit power to K
    instead.  The rate formulas downstream consume the literal form.
    """
    arr = _entries(h)
    u, s, vh = _svd_accepted(arr)
    beta = total_power / float(np.sum(1.0 / s**2))
    w = np.sqrt(beta) * ((vh.conj().T / s) @ u.conj().T)
    return PrecodeResult(matrix=w, scheme=ERP, singular_values=s, beta=beta)


def zf_etp(h) -> PrecodeResult:
    """Equal-transmit-power ZF: columns of H^+ scaled to unit norm.

    Column phases are fixed by rotating each column so its largest-magnitude
    entry is real positive, making the output deterministic under channel
    scaling.
    """
    arr = _entries(h)
    u, s, vh = _svd_accepted(arr)
    f = (vh.conj().T / s) @ u.conj().T
    norms = np.linalg.norm(f, axis=0)
    w = f / norms
    anchor = np.argmax(np.abs(w), axis=0)
    pivots = w[anchor, np.arange(w.shape[1])]
    w = w * (np.abs(pivots) / pivots)
    return PrecodeResult(matrix=w, scheme=ETP, singular_values=s, column_norms=norms)
