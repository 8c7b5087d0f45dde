"""Log-mel spectrogram front end.

The transform is: reflect-pad by half a window so frames are centered,
Hann-window each frame, take the power spectrum, project onto a triangular
mel filterbank (Slaney frequency spacing, area-normalized), and take the
natural log of the floored result. Deterministic; float32 output.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _backend
from .audio import Waveform

__all__ = [
    "MelParams",
    "MelSpectrogram",
    "mel_filterbank",
    "mel_center_frequencies",
    "mel_transform",
    "write_mels",
    "read_mels",
]

# Slaney mel scale: linear below 1 kHz, logarithmic above
_BREAK_HZ = 1000.0
_BREAK_MEL = 15.0
_LINEAR_HZ_PER_MEL = 200.0 / 3.0
_LOG_STEP = np.log(6.4) / 27.0

MELS_MAGIC = b"MELS"
MELS_VERSION = 1


@dataclass(frozen=True)
class MelParams:
    """Parameters of the waveform-to-mel transformation."""

    sample_rate: int = 32000
    fft_size: int = 1024
    hop_size: int = 320
    window_size: int = 1024
    n_mels: int = 64
    f_min: float = 50.0
    f_max: float = 14000.0
    log_floor: float = 1e-10

    def __post_init__(self) -> None:
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        if not (0 < self.hop_size <= self.window_size <= self.fft_size):
            raise ValueError("need 0 < hop_size <= window_size <= fft_size")
        if not (0 <= self.f_min < self.f_max <= self.sample_rate / 2):
            raise ValueError("need 0 <= f_min < f_max <= sample_rate/2")
        if self.n_mels < 1:
            raise ValueError("n_mels must be >= 1")
        if self.log_floor <= 0:
            raise ValueError("log_floor must be positive")

    def n_frames(self, n_samples: int) -> int:
        padded = n_samples + 2 * (self.window_size // 2)
        return 1 + (padded - self.window_size) // self.hop_size


@dataclass(frozen=True, eq=False)
class MelSpectrogram:
    """Log-power mel grid, shape (n_frames, n_mels) float32."""

    data: np.ndarray
    params: MelParams

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=np.float32)
        if data.ndim != 2:
            raise ValueError("mel data must be 2-D (frames x mels)")
        if data.shape[1] != self.params.n_mels:
            raise ValueError("mel bin count does not match params")
        if not np.isfinite(data).all():
            raise ValueError("mel data contains non-finite values")
        object.__setattr__(self, "data", data)

    @property
    def n_frames(self) -> int:
        return self.data.shape[0]


def hz_to_mel(freq_hz):
    freq_hz = np.asarray(freq_hz, dtype=np.float64)
    mel = freq_hz / _LINEAR_HZ_PER_MEL
    above = freq_hz >= _BREAK_HZ
    mel = np.where(above, _BREAK_MEL + np.log(np.maximum(freq_hz, _BREAK_HZ) / _BREAK_HZ) / _LOG_STEP, mel)
    return mel


def mel_to_hz(mel):
    mel = np.asarray(mel, dtype=np.float64)
    hz = mel * _LINEAR_HZ_PER_MEL
    above = mel >= _BREAK_MEL
    return np.where(above, _BREAK_HZ * np.exp(_LOG_STEP * (mel - _BREAK_MEL)), hz)


def mel_edge_frequencies(p: MelParams) -> np.ndarray:
    """n_mels + 2 triangle edge frequencies, equally spaced on the mel scale."""
    mel_pts = np.linspace(hz_to_mel(p.f_min), hz_to_mel(p.f_max), p.n_mels + 2)
    return mel_to_hz(mel_pts)


def mel_center_frequencies(p: MelParams) -> np.ndarray:
    return mel_edge_frequencies(p)[1:-1]


def mel_filterbank(p: MelParams) -> np.ndarray:
    """Triangular, area-normalized filterbank, shape (n_mels, fft_size//2 + 1)."""
    edges = mel_edge_frequencies(p)
    bin_freqs = np.linspace(0.0, p.sample_rate / 2.0, p.fft_size // 2 + 1)
    fb = np.zeros((p.n_mels, bin_freqs.size), dtype=np.float64)
    for m in range(p.n_mels):
        lo, mid, hi = edges[m], edges[m + 1], edges[m + 2]
        rising = (bin_freqs - lo) / (mid - lo)
        falling = (hi - bin_freqs) / (hi - mid)
        fb[m] = np.maximum(0.0, np.minimum(rising, falling))
        fb[m] *= 2.0 / (hi - lo)  # equal-area normalization
    return fb


def _hann_periodic(n: int) -> np.ndarray:
    return 0.5 - 0.5 * np.cos(2.0 * np.pi * np.arange(n) / n)


_PLAN_CACHE: dict[MelParams, tuple] = {}


def _plan(p: MelParams) -> tuple:
    plan = _PLAN_CACHE.get(p)
    if plan is None:
        fb = mel_filterbank(p)
        starts = np.zeros(p.n_mels, dtype=np.int32)
        stops = np.zeros(p.n_mels, dtype=np.int32)
        for m in range(p.n_mels):
            nz = np.nonzero(fb[m])[0]
            if nz.size:
                starts[m], stops[m] = nz[0], nz[-1] + 1
        plan = (_hann_periodic(p.window_size), fb, starts, stops)
        _PLAN_CACHE[p] = plan
    return plan


def mel_transform(w: Waveform, p: MelParams) -> MelSpectrogram:
    """Log-mel spectrogram of a waveform; the caller resamples first."""
    if w.sample_rate != p.sample_rate:
        raise ValueError(
            f"waveform rate {w.sample_rate} != transform rate {p.sample_rate}; resample first"
        )
    window, fb, starts, stops = _plan(p)
    pad = p.window_size // 2
    padded = np.pad(w.samples.astype(np.float64), pad, mode="reflect")
    data = _backend.log_mel(
        padded, p.hop_size, p.window_size, p.fft_size, window, fb, starts, stops, p.log_floor
    )
    return MelSpectrogram(data, p)


def write_mels(path: str | Path, mel: MelSpectrogram | np.ndarray) -> None:
    """Serialize a mel grid: magic, u32 version, u32 frames, u32 mels, f32 cells."""
    data = mel.data if isinstance(mel, MelSpectrogram) else np.asarray(mel, dtype=np.float32)
    n_frames, n_mels = data.shape
    header = MELS_MAGIC + struct.pack("<III", MELS_VERSION, n_frames, n_mels)
    body = np.ascontiguousarray(data, dtype="<f4").tobytes()
    Path(path).write_bytes(header + body)


def read_mels(path: str | Path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < 16 or raw[:4] != MELS_MAGIC:
        raise ValueError(f"not a MELS file: {path}")
    version, n_frames, n_mels = struct.unpack_from("<III", raw, 4)
    if version != MELS_VERSION:
        raise ValueError(f"unsupported MELS version {version}")
    expected = 16 + 4 * n_frames * n_mels
    if len(raw) != expected:
        raise ValueError(f"MELS payload size mismatch: {len(raw)} != {expected}")
    flat = np.frombuffer(raw, dtype="<f4", offset=16)
    return flat.reshape(n_frames, n_mels).astype(np.float32)
