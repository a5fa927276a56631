"""Deterministic seed derivation.

Every random stream in the library is seeded from one global seed through
``derive_seed``, so partial pipelines reproduce exactly what a full run
would have done for the same component.  The rule: the child seed is the
low 8 bytes (little-endian) of ``SHA-256("<seed>/<label>/<label>/...")``.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(global_seed: int, *labels: object) -> int:
    """Derive a stable 64-bit child seed from a global seed and path labels."""
    text = "/".join([str(int(global_seed))] + [str(lab) for lab in labels])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def rng_for(global_seed: int, *labels: object) -> np.random.Generator:
    """Generator seeded via :func:`derive_seed` for the given component path."""
    return np.random.default_rng(derive_seed(global_seed, *labels))
