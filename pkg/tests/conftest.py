import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pairmix import MelParams, Waveform, save_wav
from pairmix.manifest import ManifestEntry, save_manifest
from pairmix.synth import sine_wave


@pytest.fixture
def small_params():
    """Cheap transform settings for fast tests."""
    return MelParams(
        sample_rate=16000, fft_size=512, hop_size=160, window_size=512,
        n_mels=32, f_min=50.0, f_max=7500.0,
    )


def make_tiny_dataset(root: Path, n_clips: int = 32, seconds: float = 1.0, rate: int = 16000):
    """Synthesize a small train manifest with audible, distinct clips."""
    root.mkdir(parents=True, exist_ok=True)
    (root / "audio").mkdir(exist_ok=True)
    entries = []
    rng = np.random.default_rng(1234)
    for i in range(n_clips):
        freq = 200.0 + 37.0 * i
        clip = sine_wave(freq, seconds, rate, amplitude=0.4)
        noisy = Waveform(
            clip.samples + (0.02 * rng.standard_normal(clip.samples.size)).astype(np.float32),
            rate,
        )
        path = root / "audio" / f"clip{i:03d}.wav"
        save_wav(path, noisy)
        entries.append(
            ManifestEntry(
                id=f"clip{i:03d}",
                audio_path=f"audio/clip{i:03d}.wav",
                captions=(f"a tone at {int(freq)} hertz plays", "a steady tone hums"),
                split="train",
            )
        )
    manifest_path = root / "manifest.jsonl"
    save_manifest(entries, manifest_path)
    return manifest_path, entries


@pytest.fixture
def tiny_dataset(tmp_path):
    return make_tiny_dataset(tmp_path / "data")
