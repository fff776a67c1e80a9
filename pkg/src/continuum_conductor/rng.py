"""Deterministic seed derivation.

Python's built-in hash() is salted per process, so all seeding goes through
a digest: the same label parts yield the same RNG on every run and machine.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(*parts) -> int:
    label = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(*parts) -> random.Random:
    return random.Random(derive_seed(*parts))
