"""Dataset generation: walk the train split in seeded batches, write every
original and generated sample as a MELS binary plus one JSONL line.

Reproducibility contract: every random decision is keyed by
``derive_seed(config seed, split, batch index, position or stage)``, so two
runs with the same manifest and config produce byte-identical output. File
writes go to a temp name first and are renamed into place.
"""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from pathlib import Path

import numpy as np

from .audio import Waveform, fix_length, load_wav, resample
from .augment import add_gaussian_noise, apply_reverb, eda_augment, spec_augment
from .config import PipelineConfig
from .manifest import ManifestEntry, load_manifest
from .mel import mel_transform, write_mels
from .mixing import compose_batch
from .seeds import derive_seed

__all__ = ["augment_dataset", "summarize_path"]

logger = logging.getLogger("pairmix.pipeline")

_SAFE_NAME = re.compile(r"[^A-Za-z0-9_.-]")


def _mel_filename(sample_id: str) -> str:
    safe = _SAFE_NAME.sub("_", sample_id)
    if safe != sample_id:
        safe = f"{safe}-{derive_seed('melname', sample_id) & 0xFFFFFFFF:08x}"
    return f"{safe}.mels"


def _atomic_write_mels(path: Path, mel) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    os.close(fd)
    try:
        write_mels(tmp, mel)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_line(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _pick_caption(entry: ManifestEntry, global_seed: int) -> tuple[str, int]:
    rng = np.random.default_rng(derive_seed(global_seed, "caption", entry.id))
    idx = int(rng.integers(len(entry.captions)))
    return entry.captions[idx], idx


def augment_dataset(manifest_path: str | Path, cfg: PipelineConfig, out_dir: str | Path) -> dict:
    """Run the augmentation pipeline over the manifest's train split.

    Returns a summary dict with sample counts; raises on unwritable output
    or a pool too small to honor the duplication-avoidance rule.
    """
    manifest_path = Path(manifest_path)
    out_dir = Path(out_dir)
    mel_dir = out_dir / "mels"
    mel_dir.mkdir(parents=True, exist_ok=True)
    audio_root = manifest_path.parent

    entries = load_manifest(manifest_path)
    train: list[ManifestEntry] = []
    skipped = 0
    for entry in entries:
        if entry.split != "train":
            continue
        if not (audio_root / entry.audio_path).exists():
            logger.warning("skipping %s: missing audio %s", entry.id, entry.audio_path)
            skipped += 1
            continue
        train.append(entry)

    by_id = {e.id: e for e in train}
    pool_ids = [e.id for e in train]
    cache: dict[str, Waveform] = {}

    def load_clean(sample_id: str) -> tuple[Waveform, str]:
        w = cache.get(sample_id)
        if w is None:
            entry = by_id[sample_id]
            w = resample(load_wav(audio_root / entry.audio_path), cfg.mel.sample_rate)
            cache[sample_id] = w
        caption, _ = _pick_caption(by_id[sample_id], cfg.seed)
        return w, caption

    lines: list[str] = []
    n_original = 0
    n_generated = 0
    batches = [train[i : i + cfg.batch_size] for i in range(0, len(train), cfg.batch_size)]
    for batch_index, batch_entries in enumerate(batches):
        batch: list[tuple[str, Waveform, str]] = []
        for position, entry in enumerate(batch_entries):
            clean, _ = load_clean(entry.id)
            caption, caption_index = _pick_caption(entry, cfg.seed)
            sample_seed = derive_seed(cfg.seed, "train", batch_index, position)
            trace: list[str] = []
            w = fix_length(clean, cfg.clip_seconds)
            w = add_gaussian_noise(w, cfg.noise, derive_seed(sample_seed, "noise"), trace)
            w = apply_reverb(w, cfg.reverb, derive_seed(sample_seed, "reverb"), trace)
            mel = mel_transform(w, cfg.mel)
            mel = spec_augment(mel, cfg.specaug, derive_seed(sample_seed, "specaug"), trace)
            if cfg.apply_eda:
                caption = eda_augment(caption, cfg.eda, derive_seed(sample_seed, "eda"))
                trace.append("eda")
            mel_name = _mel_filename(entry.id)
            _atomic_write_mels(mel_dir / mel_name, mel)
            lines.append(
                _dump_line(
                    {
                        "id": entry.id,
                        "kind": "original",
                        "split": "train",
                        "caption": caption,
                        "mel": f"mels/{mel_name}",
                        "provenance": {"augments": trace, "caption_index": caption_index},
                    }
                )
            )
            batch.append((entry.id, clean, caption))
            n_original += 1

        gen_seed = derive_seed(cfg.seed, "train", batch_index, "generated")
        _, generated = compose_batch(
            batch, pool_ids, load_clean, cfg.pairmix, cfg.mel, cfg.clip_seconds, gen_seed
        )
        for pair_index, pair in enumerate(generated):
            trace = []
            mel = spec_augment(
                pair.mel, cfg.specaug, derive_seed(gen_seed, "specaug", pair_index), trace
            )
            gen_id = f"gen-{batch_index:05d}-{pair_index:02d}"
            mel_name = _mel_filename(gen_id)
            _atomic_write_mels(mel_dir / mel_name, mel)
            lines.append(
                _dump_line(
                    {
                        "id": gen_id,
                        "kind": "generated",
                        "split": "train",
                        "caption": pair.caption,
                        "mel": f"mels/{mel_name}",
                        "provenance": {
                            "source_ids": list(pair.source_ids),
                            "mix_weights": [float(v) for v in pair.weights],
                            "waveform_level": pair.waveform_level,
                            "variant": pair.variant,
                            "augments": trace,
                            "flags": list(pair.flags),
                        },
                    }
                )
            )
            n_generated += 1

    jsonl_path = out_dir / "dataset.jsonl"
    fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".tmp")
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
    os.replace(tmp, jsonl_path)

    summary = {
        "originals": n_original,
        "generated": n_generated,
        "skipped_missing": skipped,
        "batches": len(batches),
        "output": str(jsonl_path),
    }
    logger.info("augment summary: %s", summary)
    return summary


def summarize_path(path: str | Path) -> list[str]:
    """Human-readable stats for a manifest or an augmented-dataset JSONL."""
    path = Path(path)
    rows = []
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        if line.strip():
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
    if not rows:
        return ["empty file"]
    out = [f"records: {len(rows)}"]
    if "audio_path" in rows[0]:
        per_split: dict[str, int] = {}
        caption_total = 0
        for r in rows:
            per_split[r.get("split", "?")] = per_split.get(r.get("split", "?"), 0) + 1
            caption_total += len(r.get("captions", []))
        for split in sorted(per_split):
            out.append(f"split {split}: {per_split[split]}")
        out.append(f"captions: {caption_total}")
    elif "kind" in rows[0]:
        kinds: dict[str, int] = {}
        variants: dict[str, int] = {}
        augments: dict[str, int] = {}
        for r in rows:
            kinds[r["kind"]] = kinds.get(r["kind"], 0) + 1
            prov = r.get("provenance", {})
            if r["kind"] == "generated":
                variants[prov.get("variant", "?")] = variants.get(prov.get("variant", "?"), 0) + 1
            for tag in prov.get("augments", []):
                augments[tag] = augments.get(tag, 0) + 1
        for kind in sorted(kinds):
            out.append(f"kind {kind}: {kinds[kind]}")
        for variant in sorted(variants):
            out.append(f"variant {variant}: {variants[variant]}")
        for tag in sorted(augments):
            out.append(f"augment {tag}: {augments[tag]}")
    else:
        out.append("unrecognized record layout")
    return out
