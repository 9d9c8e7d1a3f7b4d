"""Input validation for element arrays and candidate maps."""
from __future__ import annotations

import numpy as np

from .exceptions import ConfigError, StructuralError


def check_elements(X, dim: int | None = None) -> np.ndarray:
    """Coerce X to a complex batch of shape (k, n, n).

    A 1-D array is read as k scalars (n = 1); a single (n, n) matrix is
    promoted to a batch of one when ``dim`` says matrices are expected.
    """
    try:
        arr = np.asarray(X, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"elements must be numeric: {exc}") from exc
    if arr.ndim == 0:
        arr = arr.reshape(1, 1, 1)
    elif arr.ndim == 1:
        arr = arr[:, None, None]
    elif arr.ndim == 2 and dim is not None and dim > 1 and arr.shape == (dim, dim):
        arr = arr[None]
    elif arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[1] != arr.shape[2]:
        raise StructuralError(f"expected square elements of shape (k, n, n), got {np.shape(X)}")
    if dim is not None and arr.shape[1] != dim:
        raise StructuralError(f"expected {dim}x{dim} elements, got {arr.shape[1]}x{arr.shape[2]}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError("elements must be finite")
    return arr


def check_map(f):
    if not callable(f):
        raise ConfigError(f"expected a callable map, got {type(f).__name__}")
    return f
