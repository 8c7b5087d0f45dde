"""Pure-numpy spectrogram kernel, the fallback when the compiled one is absent."""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"


def log_mel(
    padded: np.ndarray,
    hop: int,
    win: int,
    nfft: int,
    window: np.ndarray,
    filterbank: np.ndarray,
    log_floor: float,
) -> np.ndarray:
    """Windowed power STFT of a pre-padded signal projected onto a mel filterbank.

    Frames start at multiples of ``hop``; each frame is ``win`` samples,
    zero-extended at the end to ``nfft`` before the transform. Returns the
    natural log of the floored mel powers as float32, shape (frames, mels).
    """
    frames = np.lib.stride_tricks.sliding_window_view(padded, win)[::hop]
    spectrum = np.fft.rfft(frames * window, n=nfft, axis=1)
    power = spectrum.real**2 + spectrum.imag**2
    mel_power = power @ filterbank.T
    return np.log(np.maximum(mel_power, log_floor)).astype(np.float32)
