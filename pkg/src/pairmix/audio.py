"""Waveform container and audio I/O.

WAV reading is hand-rolled over the RIFF chunk layout because the stdlib
``wave`` module cannot decode 24-bit or IEEE-float files. Supported
encodings: PCM 8/16/24/32-bit integer and 32-bit float, mono or
multi-channel (averaged to mono on load).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.signal import resample_poly

__all__ = [
    "Waveform",
    "load_wav",
    "save_wav",
    "resample",
    "fix_length",
]

_FORMAT_PCM = 1
_FORMAT_IEEE_FLOAT = 3
_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass(frozen=True, eq=False)
class Waveform:
    """Mono float32 sample sequence with its sample rate in Hz.

    Samples are nominally in [-1, 1]; mixing may exceed that range and the
    spectrogram front end is scale-aware, so no clamping happens here.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float32)
        if samples.ndim != 1:
            raise ValueError("waveform must be single-channel (1-D)")
        if samples.size == 0:
            raise ValueError("waveform must contain at least one sample")
        if not np.isfinite(samples).all():
            raise ValueError("waveform contains non-finite samples")
        if self.sample_rate <= 0:
            raise ValueError("sample rate must be positive")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def _decode_pcm(raw: bytes, bits: int, fmt: int) -> np.ndarray:
    """Decode interleaved PCM payload bytes to float64 in [-1, 1]."""
    if fmt == _FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise ValueError(f"unsupported float WAV bit depth: {bits}")
        return np.frombuffer(raw, dtype="<f4").astype(np.float64)
    if fmt != _FORMAT_PCM:
        raise ValueError(f"unsupported WAV format tag: {fmt}")
    if bits == 8:
        # 8-bit WAV is unsigned with a 128 offset
        return (np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
    if bits == 16:
        return np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if bits == 24:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        vals = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        vals = np.where(vals >= 1 << 23, vals - (1 << 24), vals)
        return vals.astype(np.float64) / float(1 << 23)
    if bits == 32:
        return np.frombuffer(raw, dtype="<i4").astype(np.float64) / float(1 << 31)
    raise ValueError(f"unsupported PCM bit depth: {bits}")


def load_wav(path: str | Path) -> Waveform:
    """Read a RIFF/WAVE file as a mono float32 waveform.

    Multi-channel audio is averaged to a single channel; integer PCM is
    scaled by 1/2^(bits-1) so full-scale maps near [-1, 1].
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise ValueError(f"not a RIFF/WAVE file: {path}")

    fmt_tag = channels = sample_rate = bits = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + chunk_size]
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise ValueError("malformed fmt chunk")
            fmt_tag, channels, sample_rate, _, _, bits = struct.unpack_from("<HHIIHH", body, 0)
            if fmt_tag == _FORMAT_EXTENSIBLE:
                if chunk_size < 40:
                    raise ValueError("malformed WAVE_FORMAT_EXTENSIBLE fmt chunk")
                # sub-format GUID starts with the effective format tag
                (fmt_tag,) = struct.unpack_from("<H", body, 24)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + chunk_size + (chunk_size & 1)  # chunks are word-aligned

    if fmt_tag is None or payload is None:
        raise ValueError(f"missing fmt/data chunk: {path}")
    if channels < 1:
        raise ValueError("channel count must be >= 1")

    flat = _decode_pcm(payload, bits, fmt_tag)
    if flat.size == 0:
        raise ValueError(f"zero-length audio: {path}")
    frames = flat[: (flat.size // channels) * channels].reshape(-1, channels)
    mono = frames.mean(axis=1)
    return Waveform(mono.astype(np.float32), int(sample_rate))


def save_wav(path: str | Path, w: Waveform, bits: int = 16) -> None:
    """Write a mono WAV file (16-bit PCM or 32-bit float)."""
    if bits == 16:
        fmt, sampwidth = _FORMAT_PCM, 2
        scaled = np.round(w.samples.astype(np.float64) * 32768.0)
        payload = np.clip(scaled, -32768, 32767).astype("<i2").tobytes()
    elif bits == 32:
        fmt, sampwidth = _FORMAT_IEEE_FLOAT, 4
        payload = w.samples.astype("<f4").tobytes()
    else:
        raise ValueError("save_wav supports 16-bit PCM or 32-bit float only")

    byte_rate = w.sample_rate * sampwidth
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(payload),
        b"WAVE",
        b"fmt ",
        16,
        fmt,
        1,
        w.sample_rate,
        byte_rate,
        sampwidth,
        8 * sampwidth,
        b"data",
        len(payload),
    )
    Path(path).write_bytes(header + payload)


def resample(w: Waveform, target_rate: int) -> Waveform:
    """Band-limited resampling via a polyphase filter.

    Identity (same object, bit-exact) when the rates already match.
    """
    if target_rate <= 0:
        raise ValueError("target rate must be positive")
    if target_rate == w.sample_rate:
        return w
    ratio = Fraction(target_rate, w.sample_rate)
    out = resample_poly(w.samples.astype(np.float64), ratio.numerator, ratio.denominator)
    return Waveform(out.astype(np.float32), target_rate)


def fix_length(w: Waveform, seconds: float) -> Waveform:
    """Truncate from the end or zero-pad at the end to an exact duration."""
    if seconds <= 0:
        raise ValueError("duration must be positive")
    target = int(round(seconds * w.sample_rate))
    n = w.samples.size
    if n == target:
        return w
    if n > target:
        return Waveform(w.samples[:target], w.sample_rate)
    padded = np.zeros(target, dtype=np.float32)
    padded[:n] = w.samples
    return Waveform(padded, w.sample_rate)


def measure_snr_db(reference: np.ndarray, noise: np.ndarray) -> float:
    """Power ratio of reference to noise, in dB."""
    p_ref = float(np.mean(np.square(reference, dtype=np.float64)))
    p_noise = float(np.mean(np.square(noise, dtype=np.float64)))
    if p_noise == 0.0:
        return math.inf
    return 10.0 * math.log10(p_ref / p_noise)
