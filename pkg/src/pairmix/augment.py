"""Uni-modal augmentations: Gaussian noise, synthetic reverb, spectrogram
masking, and the EDA text operations, plus the halving rule that derives
test-time settings from train-time ones.

Every operation is a pure function of (input, spec, seed). Waveform
augmentations gate on one uniform draw taken before any other draw, so the
applied/identity decision is reproducible from the seed alone. The optional
``trace`` list collects tags describing what was actually applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.signal import fftconvolve

from .audio import Waveform
from .mel import MelSpectrogram

__all__ = [
    "NoiseSpec",
    "ReverbSpec",
    "SpecAugmentSpec",
    "EdaSpec",
    "AugmentSpecs",
    "add_gaussian_noise",
    "apply_reverb",
    "spec_augment",
    "eda_augment",
    "halve_for_test_time",
    "load_lexicon",
    "default_lexicon",
]

# exponential decay reaching -60 dB (1e-3 amplitude) at decay_seconds
_DECAY_60DB = math.log(1000.0)


@dataclass(frozen=True)
class NoiseSpec:
    snr_db_range: tuple[float, float] = (20.0, 40.0)
    probability: float = 0.5

    def __post_init__(self) -> None:
        low, high = self.snr_db_range
        if low > high:
            raise ValueError("snr range low must be <= high")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must be in [0, 1]")
        object.__setattr__(self, "snr_db_range", (float(low), float(high)))


@dataclass(frozen=True)
class ReverbSpec:
    decay_seconds: float = 0.3
    wet_mix: float = 0.5
    probability: float = 0.5

    def __post_init__(self) -> None:
        if self.decay_seconds <= 0:
            raise ValueError("decay_seconds must be positive")
        if not 0.0 <= self.wet_mix <= 1.0:
            raise ValueError("wet_mix must be in [0, 1]")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must be in [0, 1]")


@dataclass(frozen=True)
class SpecAugmentSpec:
    n_time_masks: int = 2
    max_time_width: int = 64
    n_freq_masks: int = 2
    max_freq_width: int = 8
    mask_value: float = math.log(1e-10)

    def __post_init__(self) -> None:
        if min(self.n_time_masks, self.max_time_width, self.n_freq_masks, self.max_freq_width) < 0:
            raise ValueError("mask counts and widths must be >= 0")


@dataclass(frozen=True)
class EdaSpec:
    alpha_sr: float = 0.1
    alpha_ri: float = 0.1
    alpha_rs: float = 0.1
    p_rd: float = 0.1
    lexicon: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for rate in (self.alpha_sr, self.alpha_ri, self.alpha_rs, self.p_rd):
            if not 0.0 <= rate <= 1.0:
                raise ValueError("EDA rates must be in [0, 1]")


@dataclass(frozen=True)
class AugmentSpecs:
    """The three audio augmentation specs handled by the halving rule."""

    noise: NoiseSpec = NoiseSpec()
    reverb: ReverbSpec = ReverbSpec()
    specaug: SpecAugmentSpec = SpecAugmentSpec()


def add_gaussian_noise(
    w: Waveform, spec: NoiseSpec, rng_seed: int, trace: list[str] | None = None
) -> Waveform:
    """Add white Gaussian noise at an SNR drawn uniformly from the spec range.

    The noise is scaled against the measured signal power so the realized
    SNR matches the draw exactly. Silent input passes through unchanged.
    """
    rng = np.random.default_rng(rng_seed)
    if rng.random() >= spec.probability:
        return w
    signal_power = float(np.mean(np.square(w.samples, dtype=np.float64)))
    if signal_power == 0.0:
        if trace is not None:
            trace.append("noise_skipped_silent")
        return w
    snr_db = rng.uniform(*spec.snr_db_range)
    noise = rng.standard_normal(w.samples.size)
    noise_power = float(np.mean(noise**2))
    target_power = signal_power / (10.0 ** (snr_db / 10.0))
    noise *= math.sqrt(target_power / noise_power)
    if trace is not None:
        trace.append("noise")
    out = w.samples.astype(np.float64) + noise
    return Waveform(out.astype(np.float32), w.sample_rate)


def _impulse_response(rng: np.random.Generator, sample_rate: int, decay_seconds: float) -> np.ndarray:
    length = max(8, int(round(sample_rate * decay_seconds)))
    k = np.arange(length, dtype=np.float64)
    envelope = np.exp(-_DECAY_60DB * k / (sample_rate * decay_seconds))
    ir = rng.standard_normal(length) * envelope
    return ir / np.max(np.abs(ir))


def apply_reverb(
    w: Waveform, spec: ReverbSpec, rng_seed: int, trace: list[str] | None = None
) -> Waveform:
    """Convolve with a peak-normalized exponentially decaying noise impulse
    response (-60 dB at decay_seconds) and blend wet/dry."""
    rng = np.random.default_rng(rng_seed)
    if rng.random() >= spec.probability:
        return w
    ir = _impulse_response(rng, w.sample_rate, spec.decay_seconds)
    wet = fftconvolve(w.samples.astype(np.float64), ir)[: w.samples.size]
    out = (1.0 - spec.wet_mix) * w.samples.astype(np.float64) + spec.wet_mix * wet
    peak = float(np.max(np.abs(out)))
    if peak > 1.0:
        out /= peak
    if trace is not None:
        trace.append("reverb")
    return Waveform(out.astype(np.float32), w.sample_rate)


def spec_augment(
    s: MelSpectrogram, spec: SpecAugmentSpec, rng_seed: int, trace: list[str] | None = None
) -> MelSpectrogram:
    """Mask random time and frequency stripes with the spec's mask value.

    Per mask, the width is drawn from U{0..max} and the start uniformly so
    the stripe fits the axis. Cells outside stripes are untouched.
    """
    n_frames, n_mels = s.data.shape
    if spec.max_time_width > n_frames:
        raise ValueError("max_time_width exceeds frame count")
    if spec.max_freq_width > n_mels:
        raise ValueError("max_freq_width exceeds mel bin count")
    rng = np.random.default_rng(rng_seed)
    out = s.data.copy()
    applied = False
    for _ in range(spec.n_time_masks):
        width = int(rng.integers(0, spec.max_time_width + 1))
        start = int(rng.integers(0, n_frames - width + 1))
        if width:
            out[start : start + width, :] = spec.mask_value
            applied = True
    for _ in range(spec.n_freq_masks):
        width = int(rng.integers(0, spec.max_freq_width + 1))
        start = int(rng.integers(0, n_mels - width + 1))
        if width:
            out[:, start : start + width] = spec.mask_value
            applied = True
    if applied and trace is not None:
        trace.append("specaugment")
    return MelSpectrogram(out, s.params)


def halve_for_test_time(specs: AugmentSpecs) -> AugmentSpecs:
    """Test-time settings: halve mask widths, reverb decay, and the
    waveform-augmentation probabilities; everything else is unchanged."""
    return AugmentSpecs(
        noise=replace(specs.noise, probability=specs.noise.probability * 0.5),
        reverb=replace(
            specs.reverb,
            decay_seconds=specs.reverb.decay_seconds * 0.5,
            probability=specs.reverb.probability * 0.5,
        ),
        specaug=replace(
            specs.specaug,
            max_time_width=specs.specaug.max_time_width // 2,
            max_freq_width=specs.specaug.max_freq_width // 2,
        ),
    )


# --- text augmentation -------------------------------------------------------


def load_lexicon(path: str | Path) -> dict[str, tuple[str, ...]]:
    """Parse a synonym table: one ``word<TAB>syn1,syn2`` line per entry."""
    lexicon: dict[str, tuple[str, ...]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        word, _, syns = line.partition("\t")
        entries = tuple(s.strip() for s in syns.split(",") if s.strip())
        if word and entries:
            lexicon[word.strip().lower()] = entries
    return lexicon


def default_lexicon() -> dict[str, tuple[str, ...]]:
    with resources.as_file(resources.files("pairmix").joinpath("data/synonyms.txt")) as p:
        return load_lexicon(p)


def _synonym_replacement(words: list[str], count: int, lexicon, rng) -> list[str]:
    eligible = [i for i, word in enumerate(words) if word.lower() in lexicon]
    if not eligible or count == 0:
        return words
    picked = rng.choice(len(eligible), size=min(count, len(eligible)), replace=False)
    out = list(words)
    for j in sorted(int(i) for i in picked):
        idx = eligible[j]
        syns = lexicon[out[idx].lower()]
        out[idx] = syns[int(rng.integers(len(syns)))]
    return out


def _random_insertion(words: list[str], count: int, lexicon, rng) -> list[str]:
    out = list(words)
    for _ in range(count):
        eligible = [word for word in out if word.lower() in lexicon]
        if not eligible:
            break
        word = eligible[int(rng.integers(len(eligible)))]
        syns = lexicon[word.lower()]
        syn = syns[int(rng.integers(len(syns)))]
        out.insert(int(rng.integers(len(out) + 1)), syn)
    return out


def _random_swap(words: list[str], count: int, rng) -> list[str]:
    out = list(words)
    if len(out) < 2:
        return out
    for _ in range(count):
        i, j = rng.choice(len(out), size=2, replace=False)
        out[int(i)], out[int(j)] = out[int(j)], out[int(i)]
    return out


def _random_deletion(words: list[str], p_rd: float, rng) -> list[str]:
    kept = [word for word in words if rng.random() >= p_rd]
    if kept:
        return kept
    # never return an empty caption
    return [words[int(rng.integers(len(words)))]]


def eda_augment(caption: str, spec: EdaSpec, rng_seed: int) -> str:
    """Apply one EDA operation (chosen uniformly) to a caption.

    Operations: synonym replacement, random insertion, random swap, random
    deletion. Counts are round(rate * word_count); deletion keeps each word
    with probability 1 - p_rd but never empties the caption. Output tokens
    are re-joined with single spaces.
    """
    words = caption.split()
    if not words:
        raise ValueError("caption is empty after whitespace tokenization")
    rng = np.random.default_rng(rng_seed)
    n = len(words)
    op = int(rng.integers(4))
    if op == 0:
        words = _synonym_replacement(words, int(spec.alpha_sr * n + 0.5), spec.lexicon, rng)
    elif op == 1:
        words = _random_insertion(words, int(spec.alpha_ri * n + 0.5), spec.lexicon, rng)
    elif op == 2:
        words = _random_swap(words, int(spec.alpha_rs * n + 0.5), rng)
    else:
        words = _random_deletion(words, spec.p_rd, rng)
    return " ".join(words)
