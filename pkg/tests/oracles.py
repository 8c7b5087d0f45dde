"""Independent reference implementations used to check the library.

These deliberately avoid the library's kernels: the spectrogram reference
uses an explicit O(n^2) DFT matrix and its own filterbank construction, and
the TTA references compute aggregation definitions directly.
"""

from __future__ import annotations

import numpy as np


def hz_to_mel(f: float) -> float:
    if f < 1000.0:
        return f * 3.0 / 200.0
    return 15.0 + 27.0 * np.log(f / 1000.0) / np.log(6.4)


def mel_to_hz(m: float) -> float:
    if m < 15.0:
        return m * 200.0 / 3.0
    return 1000.0 * 6.4 ** ((m - 15.0) / 27.0)


def triangle_filterbank(sample_rate, fft_size, n_mels, f_min, f_max) -> np.ndarray:
    mel_lo, mel_hi = hz_to_mel(f_min), hz_to_mel(f_max)
    edges = [mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1)) for i in range(n_mels + 2)]
    n_bins = fft_size // 2 + 1
    fb = np.zeros((n_mels, n_bins))
    for m in range(n_mels):
        lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
        for k in range(n_bins):
            f = k * sample_rate / fft_size
            if lo <= f <= mid and mid > lo:
                fb[m, k] = (f - lo) / (mid - lo)
            elif mid < f <= hi and hi > mid:
                fb[m, k] = (hi - f) / (hi - mid)
        fb[m] *= 2.0 / (hi - lo)
    return fb


def filter_center_frequencies(n_mels, f_min, f_max) -> np.ndarray:
    mel_lo, mel_hi = hz_to_mel(f_min), hz_to_mel(f_max)
    return np.array(
        [mel_to_hz(mel_lo + (mel_hi - mel_lo) * (i + 1) / (n_mels + 1)) for i in range(n_mels)]
    )


def brute_force_log_mel(samples: np.ndarray, p) -> np.ndarray:
    """Direct-DFT log-mel grid following the declared framing contract:
    reflect pad by window//2, hop-strided frames, periodic Hann window."""
    pad = p.window_size // 2
    x = np.pad(np.asarray(samples, dtype=np.float64), pad, mode="reflect")
    n = np.arange(p.window_size)
    window = 0.5 * (1.0 - np.cos(2.0 * np.pi * n / p.window_size))
    n_frames = 1 + (x.size - p.window_size) // p.hop_size
    n_bins = p.fft_size // 2 + 1
    k = np.arange(n_bins)[:, None]
    t = np.arange(p.fft_size)[None, :]
    dft = np.exp(-2j * np.pi * k * t / p.fft_size)  # (bins, fft)
    fb = triangle_filterbank(p.sample_rate, p.fft_size, p.n_mels, p.f_min, p.f_max)
    out = np.zeros((n_frames, p.n_mels))
    for f in range(n_frames):
        frame = np.zeros(p.fft_size)
        frame[: p.window_size] = x[f * p.hop_size : f * p.hop_size + p.window_size] * window
        spectrum = dft @ frame
        power = np.abs(spectrum) ** 2
        out[f] = np.log(np.maximum(fb @ power, p.log_floor))
    return out


def mean_of_forward_passes(model, inputs) -> np.ndarray:
    """Conventional-TTA reference: full forward per view, then average."""
    layers = getattr(model, "layers", model)
    outs = []
    for x in inputs:
        value = x
        for f in layers:
            value = f(value)
        outs.append(np.asarray(value, dtype=np.float64))
    return np.mean(np.stack(outs), axis=0)


def mid_aggregation(model, inputs, split_layer: int) -> np.ndarray:
    """Mid-TTA reference: aggregation at layer split_layer+1 means that
    layer is applied to every surviving view and its outputs are averaged
    into one value, which then flows through the remaining layers alone."""
    layers = tuple(getattr(model, "layers", model))
    partial = []
    for x in inputs:
        value = x
        for f in layers[: split_layer + 1]:
            value = f(value)
        partial.append(np.asarray(value, dtype=np.float64))
    value = np.mean(np.stack(partial), axis=0)
    for f in layers[split_layer + 1 :]:
        value = f(value)
    return np.asarray(value, dtype=np.float64)
