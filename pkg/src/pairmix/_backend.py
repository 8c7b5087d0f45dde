"""Kernel dispatch: compiled extension when available, numpy otherwise.

Set ``PAIRMIX_PURE_PYTHON=1`` to force the numpy kernel even when the
extension is built (used by the benchmark and for debugging).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("PAIRMIX_PURE_PYTHON", "") in ("", "0"):
    try:
        from . import _kernels  # type: ignore[attr-defined]
    except ImportError:
        _kernels = None
else:
    _kernels = None

BACKEND = "cython" if _kernels is not None else "python"


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


def log_mel(
    padded: np.ndarray,
    hop: int,
    win: int,
    nfft: int,
    window: np.ndarray,
    filterbank: np.ndarray,
    band_start: np.ndarray,
    band_stop: np.ndarray,
    log_floor: float,
) -> np.ndarray:
    """Route one spectrogram computation to the active kernel."""
    if _kernels is not None and _is_pow2(nfft):
        return _kernels.log_mel(
            padded, hop, win, nfft, window, filterbank, band_start, band_stop, log_floor
        )
    return _kernels_py.log_mel(padded, hop, win, nfft, window, filterbank, log_floor)
