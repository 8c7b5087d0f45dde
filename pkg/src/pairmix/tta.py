"""Multi-level test-time augmentation.

A strategy describes, for every model layer, how that layer's outputs are
grouped and averaged before feeding the next layer. Layer h consumes the
|P_{h-1}| surviving values (|P_0| = tau, the number of augmented input
views), applies the layer function to each, and arithmetic-means each group
of results. The final layer must collapse to a single prediction.

Classic single-point schemes are special cases: averaging only at the
output layer (conventional TTA) or only at one intermediate layer
(mid-level TTA). The general form aggregates at several layers at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .augment import AugmentSpecs, add_gaussian_noise, apply_reverb, spec_augment
from .audio import Waveform
from .mel import MelParams, MelSpectrogram, mel_transform
from .seeds import derive_seed

__all__ = [
    "Strategy",
    "LayeredModel",
    "TtaOutput",
    "validate_strategy",
    "conventional_tta",
    "mid_tta",
    "multi_tta_uniform",
    "execute",
    "forward",
    "stabilized_predict",
    "augment_inputs",
    "strategy_to_json",
    "strategy_from_json",
]

Partition = tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class Strategy:
    """Aggregation plan: one partition per model layer, over the surviving
    value indices (0-based) of the previous layer."""

    tau: int
    partitions: tuple[Partition, ...]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "partitions",
            tuple(tuple(tuple(int(i) for i in group) for group in layer) for layer in self.partitions),
        )
        if self.tau < 1:
            raise ValueError("tau must be >= 1")


@dataclass(frozen=True)
class LayeredModel:
    """An ordered stack of pure layer functions."""

    layers: tuple[Callable, ...]

    @property
    def n_layers(self) -> int:
        return len(self.layers)


@dataclass(frozen=True, eq=False)
class TtaOutput:
    prediction: np.ndarray
    intermediate_counts: tuple[int, ...]
    stabilized: bool = False

    def __post_init__(self) -> None:
        pred = np.asarray(self.prediction)
        if not np.isfinite(pred).all():
            raise ValueError("prediction contains non-finite values")
        if self.intermediate_counts and self.intermediate_counts[-1] != 1:
            raise ValueError("aggregation must end with a single output")
        object.__setattr__(self, "prediction", pred)


def _layers_of(model) -> Sequence[Callable]:
    layers = getattr(model, "layers", model)
    return tuple(layers)


def validate_strategy(s: Strategy, n_layers: int) -> str | None:
    """Check the partition laws; returns None if valid, else the first
    violation as a human-readable message."""
    if len(s.partitions) != n_layers:
        return f"strategy declares {len(s.partitions)} partition layers but the model has {n_layers}"
    prev = s.tau
    for h, layer in enumerate(s.partitions, start=1):
        if not layer:
            return f"layer {h} has no groups"
        seen: set[int] = set()
        for group in layer:
            if not group:
                return f"layer {h} contains an empty group"
            for idx in group:
                if idx < 0 or idx >= prev:
                    return f"layer {h} references index {idx} outside 0..{prev - 1}"
                if idx in seen:
                    return f"layer {h} assigns index {idx} to more than one group"
                seen.add(idx)
        if len(seen) != prev:
            return f"layer {h} covers {len(seen)} of {prev} inputs"
        prev = len(layer)
    if prev != 1:
        return "final layer must yield one output"
    return None


def _uniform_partitions(tau: int, sizes_by_layer: dict[int, int], n_layers: int) -> tuple[Partition, ...]:
    """Consecutive uniform groups at the listed layers, singletons elsewhere.

    Raises ValueError when a listed group size does not divide the live
    value count at that layer.
    """
    layers: list[Partition] = []
    n = tau
    for h in range(1, n_layers + 1):
        size = sizes_by_layer.get(h)
        if size is None:
            layers.append(tuple((i,) for i in range(n)))
            continue
        if size < 1:
            raise ValueError(f"group size must be >= 1 at layer {h}")
        if n % size != 0:
            raise ValueError(f"group size {size} does not divide {n}")
        layers.append(tuple(tuple(range(g * size, (g + 1) * size)) for g in range(n // size)))
        n //= size
    return tuple(layers)


def conventional_tta(tau: int, n_layers: int) -> Strategy:
    """Keep all views separate until the output layer, then average them."""
    if tau < 1 or n_layers < 1:
        raise ValueError("tau and layer count must be >= 1")
    return Strategy(tau, _uniform_partitions(tau, {n_layers: tau}, n_layers))


def mid_tta(tau: int, split_layer: int, n_layers: int) -> Strategy:
    """Average all views once, right after ``split_layer``."""
    if not 1 <= split_layer < n_layers:
        raise ValueError("split layer must satisfy 1 <= split < layer count")
    return Strategy(tau, _uniform_partitions(tau, {split_layer + 1: tau}, n_layers))


def multi_tta_uniform(
    group_sizes: Sequence[int], layer_indices: Sequence[int], n_layers: int
) -> Strategy:
    """Aggregate in uniform groups at several layers; tau is the product of
    the group sizes, so the plan always collapses to one prediction."""
    if len(group_sizes) != len(layer_indices):
        raise ValueError("one group size per aggregation layer required")
    if not group_sizes:
        raise ValueError("at least one aggregation layer required")
    if list(layer_indices) != sorted(set(int(i) for i in layer_indices)):
        raise ValueError("layer indices must be strictly increasing")
    if layer_indices[-1] != n_layers:
        raise ValueError("the last aggregation layer must be the output layer")
    if layer_indices[0] < 1:
        raise ValueError("layer indices are 1-based")
    tau = 1
    for g in group_sizes:
        if g < 1:
            raise ValueError("group sizes must be >= 1")
        tau *= int(g)
    sizes = dict(zip((int(i) for i in layer_indices), (int(g) for g in group_sizes)))
    return Strategy(tau, _uniform_partitions(tau, sizes, n_layers))


def execute(model, s: Strategy, inputs: Sequence) -> TtaOutput:
    """Run the layer-wise aggregated forward pass over tau augmented views.

    Within each group, layer outputs are summed in ascending index order and
    divided by the group size, so results are bit-reproducible.
    """
    layers = _layers_of(model)
    problem = validate_strategy(s, len(layers))
    if problem is not None:
        raise ValueError(f"invalid strategy: {problem}")
    if len(inputs) != s.tau:
        raise ValueError(f"expected {s.tau} augmented inputs, got {len(inputs)}")

    values: list = list(inputs)
    counts: list[int] = []
    for f, layer_partition in zip(layers, s.partitions):
        outs = [np.asarray(f(v), dtype=np.float64) for v in values]
        merged: list[np.ndarray] = []
        for group in layer_partition:
            ordered = sorted(group)
            first = outs[ordered[0]]
            acc = first.copy()
            for j in ordered[1:]:
                if outs[j].shape != first.shape:
                    raise ValueError(
                        f"dimension mismatch between layer boundary values: "
                        f"{outs[j].shape} vs {first.shape}"
                    )
                acc += outs[j]
            merged.append(acc / len(ordered))
        values = merged
        counts.append(len(layer_partition))
    return TtaOutput(values[0], tuple(counts), stabilized=False)


def forward(model, x):
    """Plain single-input forward pass."""
    value = x
    for f in _layers_of(model):
        value = f(value)
    return np.asarray(value, dtype=np.float64)


def stabilized_predict(model, s: Strategy, clean, views: Sequence) -> TtaOutput:
    """Average the clean-input prediction with the aggregated-views one."""
    aggregated = execute(model, s, views)
    prediction = 0.5 * forward(model, clean) + 0.5 * aggregated.prediction
    return TtaOutput(prediction, aggregated.intermediate_counts, stabilized=True)


def augment_inputs(
    x: Waveform,
    tau: int,
    test_specs: AugmentSpecs,
    params: MelParams,
    rng_seed: int,
) -> list[MelSpectrogram]:
    """tau independently augmented views of one clip: noise and reverb on
    the waveform, then the mel transform, then spectrogram masking. The
    caller passes already-halved test-time specs; no pair generation here."""
    if tau < 1:
        raise ValueError("tau must be >= 1")
    views = []
    for i in range(tau):
        view_seed = derive_seed(rng_seed, "view", i)
        w = add_gaussian_noise(x, test_specs.noise, derive_seed(view_seed, "noise"))
        w = apply_reverb(w, test_specs.reverb, derive_seed(view_seed, "reverb"))
        mel = mel_transform(w, params)
        views.append(spec_augment(mel, test_specs.specaug, derive_seed(view_seed, "specaug")))
    return views


# --- JSON form ---------------------------------------------------------------


def strategy_to_json(s: Strategy) -> str:
    obj = {"tau": s.tau, "partitions": [[list(g) for g in layer] for layer in s.partitions]}
    return json.dumps(obj, sort_keys=True)


def strategy_from_json(text: str | dict) -> Strategy:
    """Parse either form: {"tau", "partitions": [...]} with explicit 0-based
    groups, or {"tau", "layers": [{"index", "group_size"}, ...]} for uniform
    aggregation (layer indices 1-based; the model depth is the largest
    index mentioned)."""
    obj = json.loads(text) if isinstance(text, str) else text
    if not isinstance(obj, dict) or "tau" not in obj:
        raise ValueError("strategy JSON must be an object with a 'tau' field")
    tau = int(obj["tau"])
    if "partitions" in obj:
        partitions = tuple(
            tuple(tuple(int(i) for i in group) for group in layer) for layer in obj["partitions"]
        )
        return Strategy(tau, partitions)
    if "layers" in obj:
        sizes = {int(e["index"]): int(e["group_size"]) for e in obj["layers"]}
        if not sizes:
            raise ValueError("'layers' must list at least one aggregation layer")
        n_layers = max(sizes)
        return Strategy(tau, _uniform_partitions(tau, sizes, n_layers))
    raise ValueError("strategy JSON needs either 'partitions' or 'layers'")
