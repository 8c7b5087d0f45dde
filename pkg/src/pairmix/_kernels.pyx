# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled spectrogram kernel: fused framing + windowing + radix-2 FFT + mel projection.

One pass per frame with no intermediate arrays; the FFT size must be a
power of two (the dispatcher routes anything else to the numpy kernel).
"""

from libc.math cimport log

import numpy as np

BACKEND_NAME = "cython"


cdef void _fft(double* re, double* im, int n, const int* rev,
               const double* wr, const double* wi) noexcept nogil:
    # iterative decimation-in-time Cooley-Tukey with precomputed tables
    cdef int i, j, size, half, step, start, k, a, b
    cdef double ur, ui, vr, vi, t
    for i in range(n):
        j = rev[i]
        if j > i:
            t = re[i]; re[i] = re[j]; re[j] = t
            t = im[i]; im[i] = im[j]; im[j] = t
    size = 2
    while size <= n:
        half = size >> 1
        step = n / size
        start = 0
        while start < n:
            for k in range(half):
                a = start + k
                b = a + half
                vr = re[b] * wr[k * step] - im[b] * wi[k * step]
                vi = re[b] * wi[k * step] + im[b] * wr[k * step]
                ur = re[a]; ui = im[a]
                re[a] = ur + vr; im[a] = ui + vi
                re[b] = ur - vr; im[b] = ui - vi
            start += size
        size <<= 1


def log_mel(const double[::1] padded, int hop, int win, int nfft,
            const double[::1] window, const double[:, ::1] filterbank,
            const int[::1] band_start, const int[::1] band_stop,
            double log_floor):
    """Log-mel grid of a pre-padded signal; same contract as the numpy kernel.

    ``band_start``/``band_stop`` delimit each filter's contiguous support so
    the projection only touches nonzero weights.
    """
    if nfft <= 0 or (nfft & (nfft - 1)) != 0:
        raise ValueError("compiled kernel requires a power-of-two FFT size")
    if win > nfft:
        raise ValueError("window longer than FFT size")

    cdef int n_frames = 1 + (padded.shape[0] - win) // hop
    cdef int n_mels = filterbank.shape[0]
    cdef int n_bins = nfft // 2 + 1

    out = np.empty((n_frames, n_mels), dtype=np.float32)
    cdef float[:, ::1] out_v = out

    # bit-reversal permutation and twiddle tables, shared across frames
    bits = nfft.bit_length() - 1
    idx = np.arange(nfft, dtype=np.uint32)
    rev_np = np.zeros(nfft, dtype=np.int32)
    for _ in range(bits):
        rev_np = (rev_np << 1) | (idx & 1).astype(np.int32)
        idx >>= 1
    ang = -2.0 * np.pi * np.arange(nfft // 2, dtype=np.float64) / nfft
    wr_np = np.cos(ang)
    wi_np = np.sin(ang)

    cdef int[::1] rev = rev_np
    cdef double[::1] wr = wr_np
    cdef double[::1] wi = wi_np
    cdef double[::1] re = np.empty(nfft, dtype=np.float64)
    cdef double[::1] im = np.empty(nfft, dtype=np.float64)
    cdef double[::1] power = np.empty(n_bins, dtype=np.float64)

    cdef int f, t, k, m, off
    cdef double acc
    with nogil:
        for f in range(n_frames):
            off = f * hop
            for t in range(win):
                re[t] = padded[off + t] * window[t]
                im[t] = 0.0
            for t in range(win, nfft):
                re[t] = 0.0
                im[t] = 0.0
            _fft(&re[0], &im[0], nfft, &rev[0], &wr[0], &wi[0])
            for k in range(n_bins):
                power[k] = re[k] * re[k] + im[k] * im[k]
            for m in range(n_mels):
                acc = 0.0
                for k in range(band_start[m], band_stop[m]):
                    acc += filterbank[m, k] * power[k]
                if acc < log_floor:
                    acc = log_floor
                out_v[f, m] = <float>log(acc)
    return out
