"""Command-line entry points.

Subcommands: augment, mel, tta-sim, validate-strategy, stats. Exit codes:
0 success, 1 validation or data failure, 2 usage error. The PAIRMIX_LOG
environment variable sets the log level.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import _backend
from .audio import fix_length, load_wav, resample
from .augment import halve_for_test_time
from .config import PipelineConfig, load_config
from .mel import mel_transform, write_mels
from .pipeline import augment_dataset, summarize_path
from .seeds import derive_seed
from .toy import (
    DEFAULT_TAUS,
    build_toy_model,
    default_strategy_factories,
    tta_experiment,
    write_experiment_csv,
)
from .tta import strategy_from_json, validate_strategy
from .synth import synthesize_clips

logger = logging.getLogger("pairmix")


def _load_config(path: str | None) -> PipelineConfig:
    return load_config(path) if path else PipelineConfig()


def _cmd_augment(args) -> int:
    cfg = _load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.k_ratio is not None or args.variant is not None:
        pm = dataclasses.asdict(cfg.pairmix)
        if args.k_ratio is not None:
            pm["k_ratio"] = args.k_ratio
        if args.variant is not None:
            pm["variant"] = args.variant
        overrides["pairmix"] = type(cfg.pairmix)(**pm)
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
    summary = augment_dataset(args.manifest, cfg, args.out)
    print(
        f"wrote {summary['originals']} originals + {summary['generated']} generated "
        f"({summary['skipped_missing']} skipped) to {summary['output']}"
    )
    return 0


def _cmd_mel(args) -> int:
    cfg = _load_config(args.config)
    w = resample(load_wav(args.input), cfg.mel.sample_rate)
    if args.seconds is not None:
        w = fix_length(w, args.seconds)
    mel = mel_transform(w, cfg.mel)
    write_mels(args.out, mel)
    print(f"{args.out}: {mel.n_frames} frames x {mel.params.n_mels} mels [{_backend.BACKEND} kernel]")
    return 0


def _cmd_tta_sim(args) -> int:
    cfg = _load_config(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    taus = [args.tau] if args.tau is not None else [int(t) for t in args.taus.split(",") if t.strip()]
    if not taus:
        raise SystemExit(2)
    wanted = [s.strip() for s in args.strategies.split(",") if s.strip()]
    if not wanted:
        print("error: empty strategy list", file=sys.stderr)
        return 2
    available = dict(default_strategy_factories())
    unknown = [name for name in wanted if name not in available]
    if unknown:
        print(f"error: unknown strategies {unknown}; choose from {sorted(available)}", file=sys.stderr)
        return 2

    model = build_toy_model(derive_seed(cfg.seed, "toy-model"), n_mels=cfg.mel.n_mels)
    clips = synthesize_clips(args.inputs, args.clip_seconds, cfg.mel.sample_rate, derive_seed(cfg.seed, "clips"))
    specs = halve_for_test_time(cfg.train_specs)

    strategies = [(name, available[name]) for name in wanted]
    any_built = False
    for name, factory in strategies:
        for tau in taus:
            strategy = factory(tau, model.n_layers)
            if strategy is None:
                continue
            any_built = True
            problem = validate_strategy(strategy, model.n_layers)
            verdict = "ok" if problem is None else problem
            print(f"strategy {name} tau {tau}: {verdict}")
            if problem is not None:
                return 1
    if not any_built:
        print("error: no strategy applies to the requested tau values", file=sys.stderr)
        return 1

    rows = tta_experiment(
        model, clips, specs, taus, strategies, args.repeats, derive_seed(cfg.seed, "tta-sim"), cfg.mel
    )
    write_experiment_csv(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_validate_strategy(args) -> int:
    try:
        text = Path(args.strategy).read_text(encoding="utf-8")
        obj = json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot parse strategy file: {exc}", file=sys.stderr)
        return 2
    try:
        strategy = strategy_from_json(obj)
        n_layers = args.layers if args.layers is not None else len(strategy.partitions)
        problem = validate_strategy(strategy, n_layers)
    except ValueError as exc:
        print(str(exc))
        return 1
    if problem is None:
        print("ok")
        return 0
    print(problem)
    return 1


def _cmd_stats(args) -> int:
    for line in summarize_path(args.path):
        print(line)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pairmix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="generate an augmented training set from a manifest")
    p.add_argument("manifest", help="manifest JSONL path")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--variant", help="override the generation variant")
    p.add_argument("--k-ratio", type=float, help="override the generated-to-batch ratio")
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("mel", help="compute one mel spectrogram binary from a WAV file")
    p.add_argument("input", help="input WAV path")
    p.add_argument("--out", required=True, help="output .mels path")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--seconds", type=float, help="fix the clip duration first")
    p.set_defaults(func=_cmd_mel)

    p = sub.add_parser("tta-sim", help="run the toy-model TTA experiment grid")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--config", help="pipeline config JSON")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--taus", default=",".join(str(t) for t in DEFAULT_TAUS), help="comma-separated tau values")
    p.add_argument("--tau", type=int, help="run a single tau value")
    p.add_argument("--strategies", default="conventional,mid,2x5,5x5,5x10,5x20", help="comma-separated strategy names")
    p.add_argument("--repeats", type=int, default=3, help="augmentation draws per cell")
    p.add_argument("--inputs", type=int, default=2, help="number of synthetic clean clips")
    p.add_argument("--clip-seconds", type=float, default=0.5, help="duration of the synthetic clips")
    p.set_defaults(func=_cmd_tta_sim)

    p = sub.add_parser("validate-strategy", help="check a strategy JSON against the partition laws")
    p.add_argument("strategy", help="strategy JSON path")
    p.add_argument("--layers", type=int, help="model layer count (default: inferred)")
    p.set_defaults(func=_cmd_validate_strategy)

    p = sub.add_parser("stats", help="summarize a manifest or an augmented dataset JSONL")
    p.add_argument("path")
    p.set_defaults(func=_cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("PAIRMIX_LOG", "WARNING").upper())
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
