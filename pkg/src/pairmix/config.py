"""Pipeline configuration, serialized as a single JSON object.

Every section is optional; missing fields fall back to the documented
defaults. The EDA section takes a ``lexicon_path`` (null selects the
packaged synonym table).
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

from .augment import AugmentSpecs, EdaSpec, NoiseSpec, ReverbSpec, SpecAugmentSpec, default_lexicon, load_lexicon
from .mel import MelParams
from .mixing import PairMixConfig

__all__ = ["PipelineConfig", "load_config", "save_config"]


@dataclass(frozen=True)
class PipelineConfig:
    mel: MelParams = MelParams()
    noise: NoiseSpec = NoiseSpec()
    reverb: ReverbSpec = ReverbSpec()
    specaug: SpecAugmentSpec = SpecAugmentSpec()
    eda: EdaSpec = field(default_factory=lambda: EdaSpec(lexicon=default_lexicon()))
    pairmix: PairMixConfig = PairMixConfig()
    seed: int = 0
    batch_size: int = 32
    clip_seconds: float = 10.0
    apply_eda: bool = False  # off by default: rewriting captions can harm ground truth

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.clip_seconds <= 0:
            raise ValueError("clip_seconds must be positive")

    @property
    def train_specs(self) -> AugmentSpecs:
        return AugmentSpecs(self.noise, self.reverb, self.specaug)


def _build(cls, obj: dict, **extra):
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(obj) - known - set(extra)
    if unknown:
        raise ValueError(f"unknown {cls.__name__} fields: {sorted(unknown)}")
    kwargs = dict(obj)
    kwargs.update(extra)
    if "snr_db_range" in kwargs:
        kwargs["snr_db_range"] = tuple(kwargs["snr_db_range"])
    return cls(**kwargs)


def config_from_dict(obj: dict) -> PipelineConfig:
    obj = dict(obj)
    eda_section = dict(obj.pop("eda", {}))
    lexicon_path = eda_section.pop("lexicon_path", None)
    lexicon = load_lexicon(lexicon_path) if lexicon_path else default_lexicon()
    sections = {
        "mel": _build(MelParams, obj.pop("mel", {})),
        "noise": _build(NoiseSpec, obj.pop("noise", {})),
        "reverb": _build(ReverbSpec, obj.pop("reverb", {})),
        "specaug": _build(SpecAugmentSpec, obj.pop("specaug", {})),
        "eda": _build(EdaSpec, eda_section, lexicon=lexicon),
        "pairmix": _build(PairMixConfig, obj.pop("pairmix", {})),
    }
    return _build(PipelineConfig, obj, **sections)


def config_to_dict(cfg: PipelineConfig) -> dict:
    eda = dataclasses.asdict(cfg.eda)
    eda.pop("lexicon")
    eda["lexicon_path"] = None
    return {
        "mel": dataclasses.asdict(cfg.mel),
        "noise": {"snr_db_range": list(cfg.noise.snr_db_range), "probability": cfg.noise.probability},
        "reverb": dataclasses.asdict(cfg.reverb),
        "specaug": dataclasses.asdict(cfg.specaug),
        "eda": eda,
        "pairmix": dataclasses.asdict(cfg.pairmix),
        "seed": cfg.seed,
        "batch_size": cfg.batch_size,
        "clip_seconds": cfg.clip_seconds,
        "apply_eda": cfg.apply_eda,
    }


def load_config(path: str | Path) -> PipelineConfig:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    return config_from_dict(obj)


def save_config(cfg: PipelineConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")
