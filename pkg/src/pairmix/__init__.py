"""Paired audio-text augmentation and multi-level test-time augmentation.

Two mechanisms drive the package: generating new (spectrogram, caption)
training pairs by mixing source clips at a per-sample random level
(waveform or spectrogram) while concatenating their captions, and
aggregating test-time augmented views inside the model at several layers
instead of only at the output. Everything is deterministic given a seed.
"""

from ._backend import BACKEND
from .audio import Waveform, fix_length, load_wav, resample, save_wav
from .augment import (
    AugmentSpecs,
    EdaSpec,
    NoiseSpec,
    ReverbSpec,
    SpecAugmentSpec,
    add_gaussian_noise,
    apply_reverb,
    default_lexicon,
    eda_augment,
    halve_for_test_time,
    load_lexicon,
    spec_augment,
)
from .config import PipelineConfig, load_config, save_config
from .manifest import ManifestEntry, load_manifest, save_manifest
from .mel import (
    MelParams,
    MelSpectrogram,
    mel_center_frequencies,
    mel_filterbank,
    mel_transform,
    read_mels,
    write_mels,
)
from .mixing import (
    GeneratedPair,
    MixWeights,
    PairMixConfig,
    PairPlan,
    compose_batch,
    concat_pair,
    generate_pair,
    join_captions,
    plan_batch,
    sample_mix_level,
    sample_mix_weights,
)
from .pipeline import augment_dataset
from .seeds import derive_seed
from .toy import ToyModel, build_toy_model, tta_experiment
from .tta import (
    LayeredModel,
    Strategy,
    TtaOutput,
    augment_inputs,
    conventional_tta,
    execute,
    forward,
    mid_tta,
    multi_tta_uniform,
    stabilized_predict,
    strategy_from_json,
    strategy_to_json,
    validate_strategy,
)

__version__ = "0.1.0"
