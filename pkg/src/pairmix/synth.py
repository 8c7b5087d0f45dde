"""Deterministic synthetic audio, used by the simulator and the test suite."""

from __future__ import annotations

import numpy as np

from .audio import Waveform

__all__ = ["sine_wave", "noise_burst", "synthesize_clips"]


def sine_wave(freq_hz: float, seconds: float, sample_rate: int, amplitude: float = 0.5) -> Waveform:
    t = np.arange(int(round(seconds * sample_rate))) / sample_rate
    return Waveform((amplitude * np.sin(2 * np.pi * freq_hz * t)).astype(np.float32), sample_rate)


def noise_burst(seconds: float, sample_rate: int, rng_seed: int, amplitude: float = 0.3) -> Waveform:
    rng = np.random.default_rng(rng_seed)
    n = int(round(seconds * sample_rate))
    return Waveform((amplitude * rng.standard_normal(n)).astype(np.float32), sample_rate)


def synthesize_clips(count: int, seconds: float, sample_rate: int, rng_seed: int) -> list[Waveform]:
    """A few tonal-plus-noise clips with per-clip seeded content."""
    rng = np.random.default_rng(rng_seed)
    clips = []
    for _ in range(count):
        freq = float(rng.uniform(150.0, min(4000.0, sample_rate / 2.5)))
        tone = sine_wave(freq, seconds, sample_rate, amplitude=float(rng.uniform(0.2, 0.5)))
        noise = noise_burst(seconds, sample_rate, int(rng.integers(2**63)), amplitude=0.05)
        clips.append(Waveform(tone.samples + noise.samples, sample_rate))
    return clips
