"""JSON-compatible encoding of complex scalars and matrices.

A complex value is written as a plain number when its imaginary part is zero
and as a Python-style string such as ``"(1+1j)"`` otherwise; matrices are
nested lists of such values.
"""
from __future__ import annotations

import numpy as np

from .exceptions import ConfigError


def decode_complex(v) -> complex:
    if isinstance(v, bool):
        raise ConfigError(f"expected a number, got {v!r}")
    if isinstance(v, (int, float, complex)):
        return complex(v)
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            raise ConfigError(f"cannot parse complex number {v!r}") from None
    if isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(p, (int, float)) for p in v):
        return complex(v[0], v[1])
    raise ConfigError(f"cannot parse complex number {v!r}")


def encode_complex(z: complex):
    z = complex(z)
    if z.imag == 0:
        return z.real
    return repr(z)


def decode_value(v):
    """Scalar -> complex; list of rows -> tuple of tuples of complex."""
    if isinstance(v, (list, tuple)) and v and isinstance(v[0], (list, tuple)):
        rows = tuple(tuple(decode_complex(e) for e in row) for row in v)
        if any(len(row) != len(rows) for row in rows):
            raise ConfigError("matrix coefficients must be square")
        return rows
    return decode_complex(v)


def encode_value(v):
    if isinstance(v, tuple) and v and isinstance(v[0], tuple):
        return [[encode_complex(e) for e in row] for row in v]
    return encode_complex(v)


def freeze(v):
    """Hashable canonical form of a scalar or square matrix coefficient."""
    if isinstance(v, np.ndarray) and v.ndim == 0:
        v = v.item()
    if isinstance(v, (int, float, complex, np.number)):
        return complex(v)
    arr = np.asarray(v, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"coefficient must be a scalar or square matrix, got shape {arr.shape}")
    return tuple(tuple(complex(e) for e in row) for row in arr)
