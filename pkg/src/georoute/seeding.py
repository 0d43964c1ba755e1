"""Stable per-trial seed derivation."""
from __future__ import annotations

import hashlib


def derive_seed(master_seed: int, label: str, index: int) -> int:
    """64-bit seed from ``(master_seed, label, index)``.

    Keyed on the experiment label so adding experiments never shifts the
    streams of existing ones, and independent of worker scheduling.
    """
    key = f"{int(master_seed)}\x1f{label}\x1f{int(index)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
