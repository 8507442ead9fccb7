"""Deterministic seed derivation for experiment cells.

Every repeated experiment in this package (calibration cells, benchmark
cells, noise draws) gets its own RNG seeded from a master seed plus a
label tuple, so that individual cells are reproducible in isolation and
safe to evaluate in any order.
"""
from __future__ import annotations

import hashlib

__all__ = ["derive_seed"]

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed: int, *labels: object) -> int:
    """Derive a 64-bit sub-seed from a master seed and a label tuple.

    The labels (strings, ints, floats) are rendered to a canonical text
    form and hashed with SHA-256 together with the master seed; the first
    8 bytes of the digest become the sub-seed.  Identical inputs always
    map to the same output, and distinct label tuples are independent
    for all practical purposes.
    """
    h = hashlib.sha256()
    h.update(str(int(master_seed)).encode("ascii"))
    for label in labels:
        h.update(b"\x1f")
        if isinstance(label, float) and float(label).is_integer():
            label = int(label)
        h.update(repr(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little") & _MASK64
