"""Input validation helpers for the estimator-facing API."""

from __future__ import annotations

import numpy as np

from .griddsl import GRID, N_SYMBOLS, SYMBOL_NAMES


def check_coords(X) -> np.ndarray:
    """Validate an (n, 2) array of grid coordinates."""
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ValueError(f"X must have shape (n, 2), got {X.shape}")
    if not np.issubdtype(X.dtype, np.integer):
        rounded = np.rint(np.asarray(X, dtype=float))
        if not np.array_equal(rounded, np.asarray(X, dtype=float)):
            raise ValueError("coordinates must be integers")
        X = rounded.astype(np.int64)
    if X.size and (X.min() < 0 or X.max() >= GRID):
        raise ValueError(f"coordinates must lie in 0..{GRID - 1}")
    return X.astype(np.int64)


def check_symbols(y, n: int) -> np.ndarray:
    """Validate n symbol labels given as codes 0..6 or names."""
    y = np.asarray(y)
    if y.shape != (n,):
        raise ValueError(f"y must have shape ({n},), got {y.shape}")
    if y.dtype.kind in ("U", "S", "O"):
        codes = np.empty(n, dtype=np.int64)
        for i, name in enumerate(y):
            if name not in SYMBOL_NAMES:
                raise ValueError(f"unknown symbol {name!r}; choose from {SYMBOL_NAMES}")
            codes[i] = SYMBOL_NAMES.index(name)
        return codes
    if not np.issubdtype(y.dtype, np.integer):
        raise ValueError("symbols must be integer codes or symbol names")
    if y.size and (y.min() < 0 or y.max() >= N_SYMBOLS):
        raise ValueError(f"symbol codes must lie in 0..{N_SYMBOLS - 1}")
    return y.astype(np.int64)


def check_examples(X, y) -> tuple[np.ndarray, np.ndarray]:
    """Validate an observed example set: coordinates, symbols, no repeat cells."""
    coords = check_coords(X)
    codes = check_symbols(y, len(coords))
    seen: dict[tuple[int, int], int] = {}
    for (x, yy), s in zip(coords.tolist(), codes.tolist()):
        if (x, yy) in seen:
            what = "repeated" if seen[(x, yy)] == s else "contradictory"
            raise ValueError(f"{what} observation at cell ({x},{yy})")
        seen[(x, yy)] = s
    return coords, codes
