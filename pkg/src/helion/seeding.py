"""Stable per-stage seed derivation."""

import hashlib


def derive_seed(seed: int, label: str) -> int:
    """Expand a global seed into an independent stream for ``label``.

    Uses SHA-256 so the result does not depend on ``PYTHONHASHSEED``.
    """
    digest = hashlib.sha256(f"{int(seed)}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")
