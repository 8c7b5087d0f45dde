"""Dataset manifest: one JSON object per line with an id, a relative audio
path, 1-5 captions, and a split tag."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

__all__ = ["ManifestEntry", "load_manifest", "save_manifest"]

SPLITS = ("train", "val", "test")


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    audio_path: str
    captions: tuple[str, ...]
    split: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("entry id must be nonempty")
        captions = tuple(str(c) for c in self.captions)
        if not 1 <= len(captions) <= 5:
            raise ValueError(f"entry {self.id}: need 1..5 captions, got {len(captions)}")
        if any(not c.strip() for c in captions):
            raise ValueError(f"entry {self.id}: captions must be nonempty")
        if self.split not in SPLITS:
            raise ValueError(f"entry {self.id}: split must be one of {SPLITS}")
        object.__setattr__(self, "captions", captions)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "audio_path": self.audio_path,
            "captions": list(self.captions),
            "split": self.split,
        }


def load_manifest(path: str | Path) -> list[ManifestEntry]:
    entries = []
    seen: set[str] = set()
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{lineno}: invalid JSON ({exc})") from exc
        entry = ManifestEntry(
            id=str(obj["id"]),
            audio_path=str(obj["audio_path"]),
            captions=tuple(obj["captions"]),
            split=str(obj["split"]),
        )
        if entry.id in seen:
            raise ValueError(f"{path}:{lineno}: duplicate id {entry.id!r}")
        seen.add(entry.id)
        entries.append(entry)
    return entries


def save_manifest(entries: list[ManifestEntry], path: str | Path) -> None:
    lines = [json.dumps(e.to_dict(), sort_keys=True, separators=(",", ":")) for e in entries]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
