"""Stable seed derivation for reproducible augmentation pipelines.

Every random decision in the library is driven by a 64-bit seed derived
from a global seed plus structural coordinates (split name, batch index,
position within the batch, stage name). The mix is a keyed hash, so it is
stable across processes, platforms and Python versions, unlike ``hash()``.
"""

from __future__ import annotations

import hashlib

__all__ = ["derive_seed"]


def derive_seed(*parts: int | str) -> int:
    """Mix arbitrary components into a stable 64-bit seed.

    Components are encoded as their decimal / utf-8 text form separated by
    an 0x1f byte, then hashed with BLAKE2b (8-byte digest). Two distinct
    component tuples collide with probability ~2**-64.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")
