"""A small deterministic two-layer model for exercising the TTA engine.

Layer 1 (the encoder stage): mean-pool the mel grid over frames, apply a
fixed seeded random projection, then tanh. Layer 2 (the head): a fixed
seeded linear map followed by softmax. In affine mode both nonlinearities
become the identity, which makes every aggregation strategy equivalent and
gives the engine a strong invariance check. The model is untrained on
purpose; experiments report prediction variance and strategy divergence,
which are meaningful without training.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .audio import Waveform
from .augment import AugmentSpecs
from .mel import MelParams, MelSpectrogram
from .seeds import derive_seed
from .tta import Strategy, augment_inputs, conventional_tta, execute, mid_tta, multi_tta_uniform

__all__ = [
    "ToyModel",
    "build_toy_model",
    "default_strategy_factories",
    "tta_experiment",
    "write_experiment_csv",
    "DEFAULT_TAUS",
    "DEFAULT_GROUP_TUPLES",
    "EXPERIMENT_COLUMNS",
]

DEFAULT_TAUS = (10, 25, 50, 100)
DEFAULT_GROUP_TUPLES = ((2, 5), (5, 5), (5, 10), (5, 20))
EXPERIMENT_COLUMNS = ("strategy", "tau", "repeat", "mean_l2", "variance_trace")

StrategyFactory = Callable[[int, int], "Strategy | None"]


@dataclass(frozen=True, eq=False)
class ToyModel:
    w_encode: np.ndarray  # (n_mels, embed_dim)
    w_head: np.ndarray  # (embed_dim, n_classes)
    affine_mode: bool

    @property
    def n_layers(self) -> int:
        return 2

    def _encode(self, x):
        grid = np.asarray(x.data if isinstance(x, MelSpectrogram) else x, dtype=np.float64)
        pooled = grid.mean(axis=0)
        z = pooled @ self.w_encode
        return z if self.affine_mode else np.tanh(z)

    def _head(self, z):
        scores = np.asarray(z, dtype=np.float64) @ self.w_head
        if self.affine_mode:
            return scores
        shifted = scores - scores.max()
        e = np.exp(shifted)
        return e / e.sum()

    @property
    def layers(self):
        return (self._encode, self._head)


def build_toy_model(
    rng_seed: int, embed_dim: int = 32, n_classes: int = 10, affine_mode: bool = False, n_mels: int = 64
) -> ToyModel:
    """Fixed random weights from the seed; same seed, same model."""
    if embed_dim < 1 or n_classes < 1:
        raise ValueError("dimensions must be >= 1")
    rng = np.random.default_rng(rng_seed)
    w_encode = rng.normal(0.0, 1.0, (n_mels, embed_dim)) / n_mels
    w_head = rng.normal(0.0, 1.0, (embed_dim, n_classes)) / np.sqrt(embed_dim)
    return ToyModel(w_encode, w_head, affine_mode)


def default_strategy_factories(encoder_layer: int = 1) -> list[tuple[str, StrategyFactory]]:
    """Named strategies for the experiment grid: the single-point schemes
    plus the two-level group tuples, each active only at its own tau."""

    def conventional(tau: int, n_layers: int) -> Strategy:
        return conventional_tta(tau, n_layers)

    def mid(tau: int, n_layers: int) -> Strategy | None:
        if encoder_layer >= n_layers:
            return None
        return mid_tta(tau, encoder_layer, n_layers)

    factories: list[tuple[str, StrategyFactory]] = [
        ("conventional", conventional),
        ("mid", mid),
    ]
    for inner, outer in DEFAULT_GROUP_TUPLES:

        def tuple_factory(tau: int, n_layers: int, inner=inner, outer=outer) -> Strategy | None:
            if tau != inner * outer:
                return None
            return multi_tta_uniform((inner, outer), (encoder_layer, n_layers), n_layers)

        factories.append((f"{inner}x{outer}", tuple_factory))
    return factories


def tta_experiment(
    model: ToyModel,
    clean_inputs: Sequence[Waveform],
    specs: AugmentSpecs,
    taus: Sequence[int],
    strategies: Sequence[tuple[str, StrategyFactory]],
    repeats: int,
    rng_seed: int,
    params: MelParams,
) -> list[dict]:
    """Prediction statistics across repeated seeded augmentation draws.

    One row per applicable (strategy, tau): ``repeat`` is the number of
    draws, ``mean_l2`` the norm of the mean prediction, ``variance_trace``
    the summed per-component variance across draws (each averaged over the
    clean inputs). View seeds depend on (tau, input, repeat) but not on the
    strategy, so strategies with the same tau are compared on identical
    augmented views.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    rows = []
    for tau in taus:
        active = [
            (label, strategy)
            for label, factory in strategies
            for strategy in (factory(tau, model.n_layers),)
            if strategy is not None
        ]
        if not active:
            continue
        # predictions[label][input] is the stack of per-repeat outputs
        preds: dict[str, list[list[np.ndarray]]] = {
            label: [[] for _ in clean_inputs] for label, _ in active
        }
        for i, clip in enumerate(clean_inputs):
            for r in range(repeats):
                views = augment_inputs(clip, tau, specs, params, derive_seed(rng_seed, tau, i, r))
                for label, strategy in active:
                    preds[label][i].append(execute(model, strategy, views).prediction)
        for label, _ in active:
            mean_norms = []
            var_traces = []
            for per_input in preds[label]:
                stacked = np.stack(per_input)
                mean_norms.append(float(np.linalg.norm(stacked.mean(axis=0))))
                var_traces.append(float(stacked.var(axis=0).sum()))
            rows.append(
                {
                    "strategy": label,
                    "tau": tau,
                    "repeat": repeats,
                    "mean_l2": float(np.mean(mean_norms)),
                    "variance_trace": float(np.mean(var_traces)),
                }
            )
    return rows


def write_experiment_csv(rows: Sequence[dict], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=EXPERIMENT_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
