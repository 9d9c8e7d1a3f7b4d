"""Evaluable maps f: A -> X built from an exact base plus a perturbation.

A :class:`MapSpec` is immutable and callable on stacks of elements. The scaled
evaluation ``a**(m*n) * f(x / a**n)`` (and its mirror ``f(a**n x) / a**(m*n)``)
is computed directly, so iterating the corrector operator never tabulates maps.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ._codec import decode_complex, decode_value, encode_complex, encode_value, freeze
from .algebra import TernaryAlgebra, frobenius
from .exceptions import ConfigError, StructuralError

BASES = ("zero", "monomial", "polynomial", "inner_derivation")
DIRECTIONS = ("shrink", "expand")


def check_scale(a) -> int:
    """The scale must be an integer other than 0 and +-1."""
    if isinstance(a, bool) or not isinstance(a, (int, np.integer)) or a in (0, 1, -1):
        raise ConfigError(f"scale a must be an integer with a != 0, +-1; got {a!r}")
    return int(a)


def check_degree(m) -> int:
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or not 1 <= m <= 4:
        raise ConfigError(f"degree m must be an integer in 1..4; got {m!r}")
    return int(m)


def check_direction(direction: str) -> str:
    if direction not in DIRECTIONS:
        raise ConfigError(f"direction must be one of {DIRECTIONS}; got {direction!r}")
    return direction


@lru_cache(maxsize=256)
def unit_direction(dim: int, seed: int) -> np.ndarray:
    """Seeded element of unit Frobenius norm (complex Gaussian entries, normalized)."""
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    u = u / frobenius(u)
    u.setflags(write=False)
    return u


def _as_matrix(coeff, dim: int) -> np.ndarray | complex:
    if isinstance(coeff, complex):
        return coeff
    c = np.asarray(coeff, dtype=complex)
    if c.shape != (dim, dim):
        raise StructuralError(f"coefficient of shape {c.shape} used on a {dim}x{dim} algebra")
    return c


def _apply_coeff(coeff, xm: np.ndarray) -> np.ndarray:
    c = _as_matrix(coeff, xm.shape[-1])
    return c * xm if isinstance(c, complex) else c @ xm


def _mpow(x: np.ndarray, k: int) -> np.ndarray:
    out = x
    for _ in range(k - 1):
        out = out @ x
    return out


@dataclass(frozen=True)
class Radial:
    """g(x) = eps * ||x||**r * u with u a seeded unit element or x/||x||."""

    eps: float
    r: float
    direction: str = "fixed"
    seed: int = 0

    def __post_init__(self):
        if not self.eps >= 0:
            raise ConfigError(f"radial eps must be nonnegative, got {self.eps!r}")
        if not self.r > 0:
            raise ConfigError(f"radial exponent r must be positive, got {self.r!r}")
        if self.direction not in ("fixed", "along_x"):
            raise ConfigError(f"radial direction must be 'fixed' or 'along_x', got {self.direction!r}")

    def __call__(self, x: np.ndarray) -> np.ndarray:
        nx = frobenius(x)
        mag = self.eps * nx**self.r
        if self.direction == "fixed":
            u = unit_direction(x.shape[-1], self.seed)
            return mag[..., None, None] * u
        safe = np.where(nx > 0, nx, 1.0)
        return (mag / safe)[..., None, None] * x

    def decay(self, x: np.ndarray, a: int, m: int, n: int, direction: str = "shrink") -> np.ndarray:
        """Closed-form size of what survives n corrector steps: eps ||x||^r |a|^((m-r)n)."""
        expo = (m - self.r) * n if direction == "shrink" else (self.r - m) * n
        return self.eps * frobenius(x) ** self.r * float(abs(a)) ** expo

    def to_dict(self) -> dict:
        return {"kind": "radial", "eps": self.eps, "r": self.r, "direction": self.direction, "seed": self.seed}


@dataclass(frozen=True)
class Defect:
    """A mutation: adds eps * x/||x|| wherever ||x|| > threshold (optionally only along one direction).

    Used to build maps that look homogeneous on a bounded grid but break
    homogeneity further out.
    """

    eps: float
    threshold: float
    direction: tuple | None = None

    def __post_init__(self):
        if not self.threshold > 0:
            raise ConfigError("defect threshold must be positive")
        if self.direction is not None:
            object.__setattr__(self, "direction", freeze(self.direction))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        nx = frobenius(x)
        safe = np.where(nx > 0, nx, 1.0)
        xhat = x / safe[..., None, None]
        active = nx > self.threshold
        if self.direction is not None:
            n = x.shape[-1]
            d = np.asarray(self.direction, dtype=complex).reshape(n, n)
            d = d / frobenius(d)
            near = np.minimum(frobenius(xhat - d), frobenius(xhat + d)) < 1e-9
            active = active & near
        return np.where(active[..., None, None], self.eps * xhat, 0.0)

    def to_dict(self) -> dict:
        d = None if self.direction is None else encode_value(self.direction)
        return {"kind": "defect", "eps": self.eps, "threshold": self.threshold, "direction": d}


Perturbation = Radial | Defect


@dataclass(frozen=True)
class MapSpec:
    """f(x) = factor * (base(x) + perturbation(x)).

    Bases: ``zero``; ``monomial`` x -> c x^degree; ``polynomial`` sum of
    c_k x^k over ``terms``; ``inner_derivation`` x -> x c - c x.
    A matrix coefficient multiplies from the left.
    """

    base: str = "zero"
    coeff: complex | tuple = 1.0
    degree: int = 1
    terms: tuple = ()
    perturbation: Perturbation | None = None
    factor: complex = 1.0

    def __post_init__(self):
        if self.base not in BASES:
            raise ConfigError(f"unknown map base {self.base!r}; expected one of {BASES}")
        object.__setattr__(self, "coeff", freeze(self.coeff))
        object.__setattr__(self, "factor", complex(self.factor))
        if self.base == "monomial":
            check_degree(self.degree)
        terms = tuple((freeze(c), check_degree(k)) for c, k in self.terms)
        object.__setattr__(self, "terms", terms)
        if self.base == "polynomial" and not terms:
            raise ConfigError("polynomial base needs at least one term")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, perturbation=None) -> "MapSpec":
        return cls("zero", perturbation=perturbation)

    @classmethod
    def monomial(cls, coeff, degree: int, perturbation=None) -> "MapSpec":
        return cls("monomial", coeff=coeff, degree=degree, perturbation=perturbation)

    @classmethod
    def polynomial(cls, terms, perturbation=None) -> "MapSpec":
        return cls("polynomial", terms=tuple(terms), perturbation=perturbation)

    @classmethod
    def inner_derivation(cls, coeff, perturbation=None) -> "MapSpec":
        return cls("inner_derivation", coeff=coeff, degree=1, perturbation=perturbation)

    def with_perturbation(self, perturbation) -> "MapSpec":
        return replace(self, perturbation=perturbation)

    def base_only(self) -> "MapSpec":
        return replace(self, perturbation=None)

    def scaled(self, lam) -> "MapSpec":
        return replace(self, factor=self.factor * complex(lam))

    # -- evaluation -----------------------------------------------------------

    @property
    def homogeneous_degree(self) -> int | None:
        if self.base == "monomial":
            return self.degree
        if self.base == "inner_derivation":
            return 1
        if self.base == "polynomial" and len({k for _, k in self.terms}) == 1:
            return self.terms[0][1]
        return None

    def validate_for(self, alg: TernaryAlgebra, m: int | None = None) -> None:
        """Raise StructuralError if this map cannot live on ``alg`` as an m-map."""
        for c in [self.coeff] + [c for c, _ in self.terms]:
            if not isinstance(c, complex) and len(c) != alg.dim:
                raise StructuralError(f"coefficient dimension {len(c)} does not match algebra dim {alg.dim}")
        if self.base == "inner_derivation":
            if m is not None and m != 1:
                raise StructuralError("an inner derivation is an additive (m = 1) base only")
            if alg.product != "derived":
                raise StructuralError("inner derivation bases require the derived product")
        if isinstance(self.perturbation, Defect) and self.perturbation.direction is not None:
            if len(self.perturbation.direction) != alg.dim:
                raise StructuralError("defect direction does not match algebra dim")

    def base_value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if self.base == "zero":
            out = np.zeros_like(x)
        elif self.base == "monomial":
            out = _apply_coeff(self.coeff, _mpow(x, self.degree))
        elif self.base == "polynomial":
            out = np.zeros_like(x)
            for c, k in self.terms:
                out = out + _apply_coeff(c, _mpow(x, k))
        else:
            c = _as_matrix(self.coeff, x.shape[-1])
            out = x @ c - c @ x if not isinstance(c, complex) else np.zeros_like(x)
        return out if self.factor == 1 else self.factor * out

    def perturbation_value(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if self.perturbation is None:
            return np.zeros_like(x)
        out = self.perturbation(x)
        return out if self.factor == 1 else self.factor * out

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if self.perturbation is None:
            return self.base_value(x)
        return self.base_value(x) + self.perturbation_value(x)

    # -- canonical text form --------------------------------------------------

    def to_dict(self) -> dict:
        d: dict = {"base": self.base}
        if self.base in ("monomial", "inner_derivation"):
            d["coeff"] = encode_value(self.coeff)
        if self.base == "monomial":
            d["degree"] = self.degree
        if self.base == "polynomial":
            d["terms"] = [[encode_value(c), k] for c, k in self.terms]
        if self.factor != 1:
            d["factor"] = encode_complex(self.factor)
        d["perturbation"] = None if self.perturbation is None else self.perturbation.to_dict()
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "MapSpec":
        allowed = {"base", "coeff", "degree", "terms", "factor", "perturbation"}
        _reject_unknown(data, allowed, "map")
        kwargs: dict = {"base": data.get("base", "zero")}
        if "coeff" in data:
            kwargs["coeff"] = decode_value(data["coeff"])
        if "degree" in data:
            kwargs["degree"] = data["degree"]
        if "terms" in data:
            kwargs["terms"] = tuple((decode_value(c), k) for c, k in data["terms"])
        if "factor" in data:
            kwargs["factor"] = decode_complex(data["factor"])
        kwargs["perturbation"] = perturbation_from_dict(data.get("perturbation"))
        return cls(**kwargs)


def perturbation_from_dict(data) -> Perturbation | None:
    if data is None:
        return None
    kind = data.get("kind")
    if kind == "radial":
        _reject_unknown(data, {"kind", "eps", "r", "direction", "seed"}, "radial perturbation")
        return Radial(float(data["eps"]), float(data["r"]), data.get("direction", "fixed"), int(data.get("seed", 0)))
    if kind == "defect":
        _reject_unknown(data, {"kind", "eps", "threshold", "direction"}, "defect perturbation")
        d = data.get("direction")
        return Defect(float(data["eps"]), float(data["threshold"]), None if d is None else decode_value(d))
    raise ConfigError(f"unknown perturbation kind {kind!r}")


def _reject_unknown(data: dict, allowed: set, what: str) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{what} must be a mapping, got {type(data).__name__}")
    extra = set(data) - allowed
    if extra:
        raise ConfigError(f"unknown {what} keys: {sorted(extra)}")


def evaluate(f, x) -> np.ndarray:
    return f(np.asarray(x, dtype=complex))


def evaluate_scaled(f, x, a: int, m: int, n: int, direction: str = "shrink") -> np.ndarray:
    """shrink: a^(mn) f(x / a^n); expand: f(a^n x) / a^(mn)."""
    a = check_scale(a)
    check_direction(direction)
    if n < 0:
        raise ConfigError("n must be nonnegative")
    x = np.asarray(x, dtype=complex)
    if n == 0:
        return f(x)
    an = float(a**n)
    amn = float(a ** (m * n))
    if direction == "shrink":
        return amn * f(x / an)
    return f(an * x) / amn


@dataclass(frozen=True)
class EvalGrid:
    """Points rho * a^-j * d for j = 0..shells and seeded unit directions d.

    Radii form a geometric ladder in ``a``, so x -> x/a maps shell j onto
    shell j+1 and the grid is closed under the corrector up to its innermost
    shell.
    """

    rho: float = 1.0
    shells: int = 9
    a: int = 2
    n_directions: int = 4
    seed: int = 0
    dim: int = 1
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        check_scale(self.a)
        if not self.rho > 0:
            raise ConfigError("grid rho must be positive")
        if self.shells < 0 or self.n_directions < 1:
            raise ConfigError("grid needs shells >= 0 and at least one direction")

    @property
    def directions(self) -> np.ndarray:
        if "dirs" not in self._cache:
            rng = np.random.default_rng(self.seed)
            d = rng.standard_normal((self.n_directions, self.dim, self.dim)) + 1j * rng.standard_normal(
                (self.n_directions, self.dim, self.dim)
            )
            self._cache["dirs"] = d / frobenius(d)[:, None, None]
        return self._cache["dirs"]

    @property
    def shell_index(self) -> np.ndarray:
        return np.repeat(np.arange(self.shells + 1), self.n_directions)

    @property
    def direction_index(self) -> np.ndarray:
        return np.tile(np.arange(self.n_directions), self.shells + 1)

    @property
    def points(self) -> np.ndarray:
        if "pts" not in self._cache:
            j = self.shell_index
            scale = np.array([self.rho / float(self.a**k) for k in j])
            self._cache["pts"] = scale[:, None, None] * self.directions[self.direction_index]
        return self._cache["pts"]

    @property
    def radii(self) -> np.ndarray:
        return frobenius(self.points)

    def with_zero(self) -> np.ndarray:
        """Grid points plus the zero element (last)."""
        return np.concatenate([self.points, np.zeros((1, self.dim, self.dim), dtype=complex)])

    def to_dict(self) -> dict:
        return {"rho": self.rho, "shells": self.shells, "directions": self.n_directions, "seed": self.seed}
