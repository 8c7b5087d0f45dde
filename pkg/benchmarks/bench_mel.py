#!/usr/bin/env python3
"""Benchmark the compiled spectrogram kernel against the numpy fallback.

Runs the same fused log-mel computation through both code paths on
synthetic clips and reports per-clip wall time. Example:

    python benchmarks/bench_mel.py --seconds 10 --repeats 20
"""

import argparse
import time

import numpy as np

from pairmix import MelParams
from pairmix import _kernels_py
from pairmix import mel as mel_mod
from pairmix.synth import noise_burst

try:
    from pairmix import _kernels
except ImportError:
    _kernels = None


def time_kernel(fn, repeats):
    fn()  # warm up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seconds", type=float, default=10.0, help="clip duration")
    parser.add_argument("--repeats", type=int, default=20, help="timed repetitions")
    args = parser.parse_args()

    p = MelParams()
    clip = noise_burst(args.seconds, p.sample_rate, rng_seed=1)
    window, fb, starts, stops = mel_mod._plan(p)
    padded = np.pad(clip.samples.astype(np.float64), p.window_size // 2, mode="reflect")
    n_frames = p.n_frames(clip.samples.size)
    print(f"clip: {args.seconds:g} s @ {p.sample_rate} Hz -> {n_frames} frames x {p.n_mels} mels")

    runs = []
    if _kernels is not None:
        runs.append(
            (
                "cython",
                lambda: _kernels.log_mel(
                    padded, p.hop_size, p.window_size, p.fft_size, window, fb, starts, stops, p.log_floor
                ),
            )
        )
    else:
        print("compiled kernel not built; benchmarking the fallback only")
    runs.append(
        (
            "numpy",
            lambda: _kernels_py.log_mel(
                padded, p.hop_size, p.window_size, p.fft_size, window, fb, p.log_floor
            ),
        )
    )

    results = {}
    for name, fn in runs:
        per_call = time_kernel(fn, args.repeats)
        results[name] = per_call
        print(f"{name:>8}: {per_call * 1000:8.2f} ms/clip  ({n_frames / per_call:,.0f} frames/s)")

    if len(results) == 2:
        outputs = [fn() for _, fn in runs]
        gap = float(np.max(np.abs(outputs[0] - outputs[1])))
        print(f"max |cython - numpy| = {gap:.2e}")
        print(f"speedup: {results['numpy'] / results['cython']:.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
