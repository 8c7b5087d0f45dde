"""Paired audio-text sample generation.

A generated pair mixes N source clips into one spectrogram and joins their
captions. The audio mix happens at one of two levels, chosen per sample:
waveform level (mix the signals, then transform) or spectrogram level (mix
the transformed grids cellwise). Batch composition appends round(K * B)
generated pairs to a mini-batch, drawing sources from the wider pool while
excluding ids already present in the batch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .audio import Waveform, fix_length
from .mel import MelParams, MelSpectrogram, mel_transform
from .seeds import derive_seed

__all__ = [
    "MixWeights",
    "PairMixConfig",
    "GeneratedPair",
    "PairPlan",
    "sample_mix_weights",
    "sample_mix_level",
    "generate_pair",
    "concat_pair",
    "plan_batch",
    "compose_batch",
    "join_captions",
]

VARIANTS = ("pairmix", "concat_audio", "waveform_only", "spectrogram_only")
LAMBDA_MODES = ("fixed", "beta")

# concentration of the Beta / Dirichlet the mix weights are drawn from
BETA_CONCENTRATION = 0.1

_SUM_TOL = 1e-9
_TERMINAL_PUNCT = ".,;:!?"


@dataclass(frozen=True)
class MixWeights:
    """Convex combination weights over the N mixed sources."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("weights must be nonempty")
        if any(v < 0.0 or v > 1.0 for v in vals):
            raise ValueError("each weight must be in [0, 1]")
        if abs(sum(vals) - 1.0) > _SUM_TOL:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class PairMixConfig:
    n_sources: int = 2
    k_ratio: float = 0.25
    lambda_mode: str = "beta"
    waveform_level_prob: float = 0.5
    variant: str = "pairmix"
    text_joiner: str = " "
    log_domain_mix: bool = True

    def __post_init__(self) -> None:
        if self.n_sources < 2:
            raise ValueError("n_sources must be >= 2")
        if not 0.0 <= self.k_ratio < 1.0:
            raise ValueError("k_ratio must be in [0, 1)")
        if self.lambda_mode not in LAMBDA_MODES:
            raise ValueError(f"lambda_mode must be one of {LAMBDA_MODES}")
        if not 0.0 <= self.waveform_level_prob <= 1.0:
            raise ValueError("waveform_level_prob must be in [0, 1]")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}")


@dataclass(frozen=True, eq=False)
class GeneratedPair:
    """An augmented (spectrogram, caption) sample plus its provenance."""

    mel: MelSpectrogram
    caption: str
    source_ids: tuple[str, ...]
    weights: MixWeights
    waveform_level: int  # 1 = mixed as waveforms, 0 = mixed as spectrograms
    variant: str
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class PairPlan:
    """Deferred generation decision: which sources, weights, and mix level.

    Planning is separate from materialization so source audio is only
    loaded for pairs that will actually be generated.
    """

    source_ids: tuple[str, ...]
    weights: MixWeights
    waveform_level: int
    seed: int
    exclusion_relaxed: bool = False


def _draw_weights(rng: np.random.Generator, mode: str, n: int) -> MixWeights:
    if mode == "fixed":
        return MixWeights(tuple(1.0 / n for _ in range(n)))
    if n == 2:
        lam = float(rng.beta(BETA_CONCENTRATION, BETA_CONCENTRATION))
        return MixWeights((lam, 1.0 - lam))
    draw = rng.dirichlet([BETA_CONCENTRATION] * n)
    return MixWeights(tuple(float(v) for v in draw))


def sample_mix_weights(mode: str, n: int, rng_seed: int) -> MixWeights:
    """Draw mix weights: all-equal in fixed mode, Beta(0.1, 0.1) for two
    sources in beta mode, Dirichlet(0.1, ..., 0.1) beyond two."""
    if n < 2:
        raise ValueError("need at least two sources")
    if mode not in LAMBDA_MODES:
        raise ValueError(f"unknown lambda mode: {mode}")
    return _draw_weights(np.random.default_rng(rng_seed), mode, n)


def sample_mix_level(waveform_prob: float, rng_seed: int) -> int:
    """Bernoulli choice of mix level: 1 = waveform, 0 = spectrogram."""
    rng = np.random.default_rng(rng_seed)
    return int(rng.random() < waveform_prob)


def _strip_terminal_punct(caption: str) -> str:
    stripped = caption.strip().rstrip(_TERMINAL_PUNCT)
    return stripped if stripped else caption.strip()


def join_captions(captions: Sequence[str], joiner: str = " ") -> str:
    """Concatenate captions in order; non-final captions lose terminal
    punctuation so the combined caption stays well-formed."""
    if not captions:
        raise ValueError("no captions to join")
    parts = [_strip_terminal_punct(c) for c in captions[:-1]]
    parts.append(captions[-1].strip())
    return joiner.join(parts)


def _mix_waveforms(waveforms: Sequence[Waveform], weights: MixWeights) -> Waveform:
    acc = np.zeros(waveforms[0].samples.size, dtype=np.float64)
    for lam, w in zip(weights, waveforms):
        if lam == 0.0:
            continue  # keeps one-hot weights bit-exact
        acc += lam * w.samples.astype(np.float64)
    return Waveform(acc.astype(np.float32), waveforms[0].sample_rate)


def _mix_grids(grids: Sequence[np.ndarray], weights: MixWeights) -> np.ndarray:
    acc = np.zeros(grids[0].shape, dtype=np.float64)
    for lam, g in zip(weights, grids):
        if lam == 0.0:
            continue
        acc += lam * g.astype(np.float64)
    return acc.astype(np.float32)


def generate_pair(
    sources: Sequence[tuple[Waveform, str]],
    weights: MixWeights,
    waveform_level: int,
    params: MelParams,
    joiner: str = " ",
    source_ids: Sequence[str] | None = None,
    log_domain_mix: bool = True,
) -> GeneratedPair:
    """Mix N same-length sources into one (spectrogram, caption) pair.

    waveform_level selects the path: 1 transforms the weighted waveform sum;
    0 combines the per-source log-mel grids cellwise (or their linear powers
    when log_domain_mix is off). Captions are joined in source order.
    """
    if len(sources) != len(weights):
        raise ValueError("one weight per source required")
    if len(sources) < 2:
        raise ValueError("need at least two sources")
    waveforms = [w for w, _ in sources]
    rate = waveforms[0].sample_rate
    length = waveforms[0].samples.size
    for w in waveforms[1:]:
        if w.sample_rate != rate:
            raise ValueError("sources must share a sample rate")
        if w.samples.size != length:
            raise ValueError("sources must share a length (fix_length upstream)")
    if waveform_level not in (0, 1):
        raise ValueError("waveform_level must be 0 or 1")

    flags: list[str] = []
    if waveform_level == 1:
        mixed = _mix_waveforms(waveforms, weights)
        if float(np.max(np.abs(mixed.samples))) > 1.0:
            flags.append("waveform_peak_exceeded")
        mel = mel_transform(mixed, params)
    else:
        grids = [mel_transform(w, params).data for w in waveforms]
        if log_domain_mix:
            data = _mix_grids(grids, weights)
        else:
            powers = [np.exp(g.astype(np.float64)) for g in grids]
            mixed_power = np.zeros_like(powers[0])
            for lam, p in zip(weights, powers):
                if lam == 0.0:
                    continue
                mixed_power += lam * p
            data = np.log(np.maximum(mixed_power, params.log_floor)).astype(np.float32)
        mel = MelSpectrogram(data, params)

    caption = join_captions([c for _, c in sources], joiner)
    ids = tuple(source_ids) if source_ids is not None else tuple(str(i) for i in range(len(sources)))
    return GeneratedPair(mel, caption, ids, weights, waveform_level, "pairmix", tuple(flags))


def concat_pair(
    sources: Sequence[tuple[Waveform, str]],
    params: MelParams,
    clip_seconds: float,
    joiner: str = " ",
    source_ids: Sequence[str] | None = None,
    recorded_level: int = 0,
) -> GeneratedPair:
    """Concatenate source audio in time instead of mixing, then cut or pad
    back to the nominal clip duration before the transform.

    Material past the clip boundary is dropped; that loss is recorded in the
    provenance flags. Weights are recorded as all-equal for bookkeeping.
    """
    if len(sources) < 2:
        raise ValueError("need at least two sources")
    rate = sources[0][0].sample_rate
    for w, _ in sources[1:]:
        if w.sample_rate != rate:
            raise ValueError("sources must share a sample rate")
    joined = np.concatenate([w.samples for w, _ in sources])
    target = int(round(clip_seconds * rate))
    flags: list[str] = []
    if joined.size > target:
        flags.append("concat_truncated")
    clip = fix_length(Waveform(joined, rate), clip_seconds)
    mel = mel_transform(clip, params)
    caption = join_captions([c for _, c in sources], joiner)
    n = len(sources)
    ids = tuple(source_ids) if source_ids is not None else tuple(str(i) for i in range(n))
    weights = MixWeights(tuple(1.0 / n for _ in range(n)))
    return GeneratedPair(mel, caption, ids, weights, recorded_level, "concat_audio", tuple(flags))


def plan_batch(
    batch_ids: Sequence[str],
    pool_ids: Iterable[str],
    cfg: PairMixConfig,
    rng_seed: int,
) -> list[PairPlan]:
    """Decide the round(K * B) generated pairs for one mini-batch.

    Sources are drawn uniformly without replacement from the pool minus the
    ids already in the batch; weights and the mix level are drawn per pair
    from a seed derived from (rng_seed, pair index). When the batch covers
    so much of the pool that exclusion leaves too few sources, the draw
    falls back to the whole pool and the plans are flagged.
    """
    count = int(cfg.k_ratio * len(batch_ids) + 0.5)
    if count == 0:
        return []
    excluded = set(batch_ids)
    eligible = [i for i in pool_ids if i not in excluded]
    relaxed = False
    if len(eligible) < cfg.n_sources:
        eligible = list(pool_ids)
        relaxed = True
        if len(eligible) < cfg.n_sources:
            raise ValueError(
                f"pool too small after exclusion: {len(eligible)} ids available, "
                f"{cfg.n_sources} sources per pair needed"
            )
    plans = []
    for k in range(count):
        pair_seed = derive_seed(rng_seed, "pair", k)
        rng = np.random.default_rng(pair_seed)
        picked = rng.choice(len(eligible), size=cfg.n_sources, replace=False)
        ids = tuple(eligible[int(i)] for i in picked)
        weights = _draw_weights(rng, cfg.lambda_mode, cfg.n_sources)
        if cfg.variant == "waveform_only":
            level = 1
        elif cfg.variant == "spectrogram_only":
            level = 0
        else:
            # drawn for concat_audio too: recorded even though unused
            level = int(rng.random() < cfg.waveform_level_prob)
        plans.append(PairPlan(ids, weights, level, pair_seed, relaxed))
    return plans


def compose_batch(
    batch: Sequence[tuple[str, Waveform, str]],
    pool_ids: Iterable[str],
    load_source: Callable[[str], tuple[Waveform, str]],
    cfg: PairMixConfig,
    params: MelParams,
    clip_seconds: float,
    rng_seed: int,
) -> tuple[list[tuple[str, Waveform, str]], list[GeneratedPair]]:
    """Materialize one mini-batch: the originals unchanged plus the planned
    generated pairs.

    ``load_source`` maps a manifest id to (waveform at the transform rate,
    caption); mixing variants fix each source to the clip duration first,
    the concat variant fixes the concatenation instead.
    """
    plans = plan_batch([item[0] for item in batch], pool_ids, cfg, rng_seed)
    generated = []
    for plan in plans:
        sources = [load_source(sid) for sid in plan.source_ids]
        if cfg.variant == "concat_audio":
            pair = concat_pair(
                sources,
                params,
                clip_seconds,
                joiner=cfg.text_joiner,
                source_ids=plan.source_ids,
                recorded_level=plan.waveform_level,
            )
        else:
            fixed = [(fix_length(w, clip_seconds), cap) for w, cap in sources]
            pair = generate_pair(
                fixed,
                plan.weights,
                plan.waveform_level,
                params,
                joiner=cfg.text_joiner,
                source_ids=plan.source_ids,
                log_domain_mix=cfg.log_domain_mix,
            )
            if cfg.variant in ("waveform_only", "spectrogram_only"):
                pair = GeneratedPair(
                    pair.mel, pair.caption, pair.source_ids, pair.weights,
                    pair.waveform_level, cfg.variant, pair.flags,
                )
        if plan.exclusion_relaxed:
            pair = GeneratedPair(
                pair.mel, pair.caption, pair.source_ids, pair.weights,
                pair.waveform_level, pair.variant, pair.flags + ("exclusion_relaxed",),
            )
        generated.append(pair)
    return list(batch), generated
