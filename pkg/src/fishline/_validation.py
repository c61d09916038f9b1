"""Small input checks shared across modules."""

from __future__ import annotations

import numpy as np


def check_vector(x, name: str = "x", min_length: int = 1) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValueError(f"{name} must have at least {min_length} element(s)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_production_levels(levels) -> np.ndarray:
    if levels is None:
        raise ValueError("production_levels is required")
    arr = np.asarray(levels)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("production_levels must be a non-empty 1-d sequence")
    if not np.all(np.equal(np.mod(arr, 1), 0)):
        raise ValueError("production_levels must be integers")
    arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise ValueError("production_levels must be non-negative")
    return arr


def check_permutation(perm, n: int) -> np.ndarray:
    """Return ``perm`` as a 0-based int array after checking it covers 1..n."""
    arr = np.asarray(perm)
    if arr.shape != (n,) or sorted(arr.tolist()) != list(range(1, n + 1)):
        raise ValueError(f"expected a permutation of 1..{n}, got {arr.tolist()}")
    return arr.astype(np.int64) - 1
