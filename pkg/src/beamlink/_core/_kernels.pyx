# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled channel synthesis kernels (hot path of the Monte Carlo sweep).

Signatures mirror ``_numpy_backend``; see that module for the math.
"""

import numpy as np

cimport cython
from libc.math cimport cos, sin, sqrt

NAME = "cython"


cdef inline void _fill_path_factors(const double[:, ::1] positions,
                                    const double[:, ::1] scat_pos,
                                    double inv_wl_2pi, double d_ref,
                                    double complex[:, ::1] out) noexcept nogil:
    # out[a, s] = (d_ref/d) * exp(-2j*pi*d/wavelength), d = |positions[a] - scat_pos[s]|
    cdef Py_ssize_t n_ant = positions.shape[0]
    cdef Py_ssize_t n_s = scat_pos.shape[0]
    cdef Py_ssize_t a, s
    cdef double dx, dy, dz, d, amp, ph
    for a in range(n_ant):
        for s in range(n_s):
            dx = positions[a, 0] - scat_pos[s, 0]
            dy = positions[a, 1] - scat_pos[s, 1]
            dz = positions[a, 2] - scat_pos[s, 2]
            d = sqrt(dx * dx + dy * dy + dz * dz)
            amp = d_ref / d
            ph = -inv_wl_2pi * d
            out[a, s] = amp * cos(ph) + 1j * (amp * sin(ph))


def beam_channel_tensor(scat_pos, scat_gain, tx_pos, rx_pos, tx_weight,
                        double wavelength, double d_ref):
    """See ``_numpy_backend.beam_channel_tensor``."""
    cdef const double[:, ::1] sp = np.ascontiguousarray(scat_pos, dtype=np.float64)
    cdef const double complex[::1] g = np.ascontiguousarray(scat_gain, dtype=np.complex128)
    cdef const double[:, ::1] tp = np.ascontiguousarray(tx_pos, dtype=np.float64)
    cdef const double[:, ::1] rp = np.ascontiguousarray(rx_pos, dtype=np.float64)
    cdef const double[:, :, ::1] wt = np.ascontiguousarray(tx_weight, dtype=np.float64)

    cdef Py_ssize_t n_s = sp.shape[0]
    cdef Py_ssize_t n_tx = tp.shape[0]
    cdef Py_ssize_t n_rx = rp.shape[0]
    cdef Py_ssize_t n_w = wt.shape[0]
    cdef double inv_wl_2pi = 2.0 * np.pi / wavelength

    t_arr = np.empty((n_tx, n_s), dtype=np.complex128)
    r_arr = np.empty((n_rx, n_s), dtype=np.complex128)
    out_arr = np.zeros((n_w, n_rx, n_tx), dtype=np.complex128)
    cdef double complex[:, ::1] t = t_arr
    cdef double complex[:, ::1] r = r_arr
    cdef double complex[:, :, ::1] out = out_arr

    cdef Py_ssize_t w, k, m, s
    cdef double complex acc, rg
    with nogil:
        _fill_path_factors(tp, sp, inv_wl_2pi, d_ref, t)
        _fill_path_factors(rp, sp, inv_wl_2pi, d_ref, r)
        for w in range(n_w):
            for k in range(n_rx):
                for m in range(n_tx):
                    acc = 0
                    for s in range(n_s):
                        acc = acc + g[s] * wt[w, m, s] * t[m, s] * r[k, s]
                    out[w, k, m] = acc
    return out_arr


def omni_channel_batch(scat_pos, scat_gain, tx_pos, rx_pos,
                       double wavelength, double d_ref):
    """See ``_numpy_backend.omni_channel_batch``."""
    cdef const double[:, :, ::1] sp = np.ascontiguousarray(scat_pos, dtype=np.float64)
    cdef const double complex[:, ::1] g = np.ascontiguousarray(scat_gain, dtype=np.complex128)
    cdef const double[:, ::1] tp = np.ascontiguousarray(tx_pos, dtype=np.float64)
    cdef const double[:, ::1] rp = np.ascontiguousarray(rx_pos, dtype=np.float64)

    cdef Py_ssize_t n_b = sp.shape[0]
    cdef Py_ssize_t n_s = sp.shape[1]
    cdef Py_ssize_t n_tx = tp.shape[0]
    cdef Py_ssize_t n_rx = rp.shape[0]
    cdef double inv_wl_2pi = 2.0 * np.pi / wavelength

    t_arr = np.empty((n_tx, n_s), dtype=np.complex128)
    r_arr = np.empty((n_rx, n_s), dtype=np.complex128)
    out_arr = np.zeros((n_b, n_rx, n_tx), dtype=np.complex128)
    cdef double complex[:, ::1] t = t_arr
    cdef double complex[:, ::1] r = r_arr
    cdef double complex[:, :, ::1] out = out_arr

    cdef Py_ssize_t b, k, m, s
    cdef double complex acc
    with nogil:
        for b in range(n_b):
            _fill_path_factors(tp, sp[b], inv_wl_2pi, d_ref, t)
            _fill_path_factors(rp, sp[b], inv_wl_2pi, d_ref, r)
            for k in range(n_rx):
                for m in range(n_tx):
                    acc = 0
                    for s in range(n_s):
                        acc = acc + g[b, s] * t[m, s] * r[k, s]
                    out[b, k, m] = acc
    return out_arr
