"""Pure-numpy channel synthesis kernels.

Reference implementation of the hot kernels; the compiled extension in
``_kernels.pyx`` mirrors these signatures exactly.  Results agree with the
compiled backend to floating-point accumulation order (use one backend per
reproducible experiment; see the package README).
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def _path_factors(positions: np.ndarray, scat_pos: np.ndarray,
                  wavelength: float, d_ref: float) -> np.ndarray:
    """Per (antenna, scatterer) complex sub-path factor (d_ref/d)*exp(-2j*pi*d/wl).

    positions: (K, 3), scat_pos: (..., N, 3) -> (..., K, N) complex128.
    """
    d = np.linalg.norm(scat_pos[..., None, :, :] - positions[:, None, :], axis=-1)
    return (d_ref / d) * np.exp(-2j * np.pi / wavelength * d)


def beam_channel_tensor(scat_pos: np.ndarray, scat_gain: np.ndarray,
                        tx_pos: np.ndarray, rx_pos: np.ndarray,
                        tx_weight: np.ndarray, wavelength: float,
                        d_ref: float) -> np.ndarray:
    """Single-bounce channels for a bank of per-transmitter weight profiles.

    out[w, k, m] = sum_s gain[s] * tx_weight[w, m, s]
                   * (d_ref/d_tx[m,s]) * exp(-2j*pi*d_tx[m,s]/wl)
                   * (d_ref/d_rx[k,s]) * exp(-2j*pi*d_rx[k,s]/wl)

    scat_pos (N,3) f8, scat_gain (N,) c16, tx_pos/rx_pos (K,3) f8,
    tx_weight (W,K,N) f8 -> (W,K,K) c16.
    """
    t = _path_factors(tx_pos, scat_pos, wavelength, d_ref)  # (K=m, N)
    r = _path_factors(rx_pos, scat_pos, wavelength, d_ref)  # (K=k, N)
    return np.einsum("s,wms,ms,ks->wkm", scat_gain, tx_weight, t, r)


def omni_channel_batch(scat_pos: np.ndarray, scat_gain: np.ndarray,
                       tx_pos: np.ndarray, rx_pos: np.ndarray,
                       wavelength: float, d_ref: float) -> np.ndarray:
    """Unit-weight (omnidirectional) channels for a batch of scatterer fields.

    scat_pos (B,N,3) f8, scat_gain (B,N) c16 -> (B,K,K) c16.
    """
    t = _path_factors(tx_pos, scat_pos, wavelength, d_ref)  # (B, K=m, N)
    r = _path_factors(rx_pos, scat_pos, wavelength, d_ref)  # (B, K=k, N)
    return np.einsum("bs,bms,bks->bkm", scat_gain, t, r)
