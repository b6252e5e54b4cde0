"""Deterministic per-unit RNG seed derivation.

Work units (transcripts, folds, permutation replicates) each get a seed
derived from the master seed and a unit label, so results do not depend
on the order units are processed in.
"""

from __future__ import annotations

import hashlib


def derive_seed(master: int, unit: str) -> int:
    """A stable 63-bit seed for the (master, unit) pair."""
    digest = hashlib.sha256(f"{master}:{unit}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1
