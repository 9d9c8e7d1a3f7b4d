"""Residual operators for the unified additive/quadratic/cubic/quartic equation.

Every operator takes a map ``f`` (anything callable on stacks of elements) and
returns the left-minus-right side of the identity it encodes. The ``*_terms``
variants also return a local scale: the largest magnitude among the summands,
which is what "approximately zero" is measured against.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np

from .algebra import TernaryAlgebra, frobenius
from .exceptions import ConfigError
from .maps import EvalGrid, check_degree, check_scale

CLASSICAL = ("quadratic", "cubic", "quartic")


def coeff_c(m: int) -> Fraction:
    """Coefficient of f(y): (m-2)(1-(m-2)^2)/6, exactly."""
    check_degree(m)
    k = m - 2
    return Fraction(k * (1 - k * k), 6)


def _amp(a: int, m: int) -> float:
    return float(Fraction(a) ** (m - 2))


def delta_m_terms(f, x, y, a: int, m: int) -> tuple[np.ndarray, np.ndarray]:
    a = check_scale(a)
    m = check_degree(m)
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    am2 = _amp(a, m)
    c = float(coeff_c(m))
    terms = [
        f(a * x + y),
        f(a * x - y),
        -am2 * f(x + y),
        -am2 * f(x - y),
        -2.0 * (a * a - 1) * am2 * f(x),
    ]
    if c != 0.0:
        terms.append(-2.0 * (a * a - 1) * c * f(y))
    residual = terms[0] + terms[1] + terms[2] + terms[3] + terms[4]
    if len(terms) == 6:
        residual = residual + terms[5]
    scale = np.max([frobenius(t) for t in terms], axis=0)
    return residual, scale


def delta_m(f, x, y, a: int, m: int) -> np.ndarray:
    """f(ax+y) + f(ax-y) - a^(m-2)[f(x+y) + f(x-y)] - 2(a^2-1)[a^(m-2) f(x) + c_m f(y)]."""
    return delta_m_terms(f, x, y, a, m)[0]


def classical_terms(eq: str, f, x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if eq == "quadratic":
        terms = [f(x + y), f(x - y), -2.0 * f(x), -2.0 * f(y)]
    elif eq == "cubic":
        terms = [f(2 * x + y), f(2 * x - y), -2.0 * f(x + y), -2.0 * f(x - y), -12.0 * f(x)]
    elif eq == "quartic":
        terms = [f(2 * x + y), f(2 * x - y), -4.0 * f(x + y), -4.0 * f(x - y), -24.0 * f(x), 6.0 * f(y)]
    else:
        raise ConfigError(f"unknown classical equation {eq!r}; expected one of {CLASSICAL}")
    residual = terms[0]
    for t in terms[1:]:
        residual = residual + t
    return residual, np.max([frobenius(t) for t in terms], axis=0)


def classical_residual(eq: str, f, x, y) -> np.ndarray:
    return classical_terms(eq, f, x, y)[0]


def derivation_terms(f, x, y, z, m: int, alg: TernaryAlgebra) -> tuple[np.ndarray, np.ndarray]:
    m = check_degree(m)
    x, y, z = (np.asarray(v, dtype=complex) for v in (x, y, z))
    br = alg.ternary_product
    xm, ym, zm = alg.power(x, m), alg.power(y, m), alg.power(z, m)
    terms = [f(br(x, y, z)), -br(f(x), ym, zm), -br(xm, f(y), zm), -br(xm, ym, f(z))]
    residual = terms[0] + terms[1] + terms[2] + terms[3]
    return residual, np.max([frobenius(t) for t in terms], axis=0)


def derivation_residual(f, x, y, z, m: int, alg: TernaryAlgebra) -> np.ndarray:
    """f([x,y,z]) - [f(x), y^m, z^m] - [x^m, f(y), z^m] - [x^m, y^m, f(z)]."""
    return derivation_terms(f, x, y, z, m, alg)[0]


@dataclass(frozen=True)
class Permutation3:
    """A permutation of {1, 2, 3} given by its images (sigma(1), sigma(2), sigma(3))."""

    images: tuple[int, int, int] = (1, 2, 3)

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != [1, 2, 3]:
            raise ConfigError(f"{self.images!r} is not a permutation of (1, 2, 3)")
        object.__setattr__(self, "images", images)

    def apply(self, seq):
        return [seq[i - 1] for i in self.images]

    @classmethod
    def all(cls) -> list["Permutation3"]:
        return [cls(p) for p in permutations((1, 2, 3))]

    @classmethod
    def cycle(cls) -> "Permutation3":
        # 1 -> 2 -> 3 -> 1
        return cls((2, 3, 1))


def sigma_hom_terms(f, x1, x2, x3, sigma: Permutation3, alg_a: TernaryAlgebra, alg_b: TernaryAlgebra | None = None):
    alg_b = alg_a if alg_b is None else alg_b
    xs = [np.asarray(v, dtype=complex) for v in (x1, x2, x3)]
    fx = [f(v) for v in xs]
    lhs = f(alg_a.ternary_product(*xs))
    rhs = alg_b.ternary_product(*sigma.apply(fx))
    return lhs - rhs, np.maximum(frobenius(lhs), frobenius(rhs))


def sigma_hom_residual(f, x1, x2, x3, sigma: Permutation3, alg_a: TernaryAlgebra, alg_b: TernaryAlgebra | None = None):
    """f([x1,x2,x3]) - [f(x_s1), f(x_s2), f(x_s3)]."""
    return sigma_hom_terms(f, x1, x2, x3, sigma, alg_a, alg_b)[0]


# -- grid sweeps -----------------------------------------------------------------

TRIPLE_BUDGET = 10_000


def grid_tuples(grid: EvalGrid, arity: int, budget: int = TRIPLE_BUDGET, seed: int = 0) -> list[np.ndarray]:
    """All arity-tuples of (grid points + zero), subsampled with a seed above ``budget``."""
    pts = grid.with_zero()
    n = len(pts)
    total = n**arity
    if total <= budget:
        flat = np.arange(total)
    else:
        flat = np.sort(np.random.default_rng(seed).choice(total, size=budget, replace=False))
    idx = np.unravel_index(flat, (n,) * arity)
    return [pts[i] for i in idx]


RESIDUAL_KINDS = ("delta", "derivation", "sigma_hom", "quadratic", "cubic", "quartic")


def residual_terms(kind: str, f, args, *, a=None, m=None, alg=None, sigma=None, alg_b=None):
    if kind == "delta":
        return delta_m_terms(f, *args, a, m)
    if kind == "derivation":
        return derivation_terms(f, *args, m, alg)
    if kind == "sigma_hom":
        return sigma_hom_terms(f, *args, sigma, alg, alg_b)
    if kind in CLASSICAL:
        return classical_terms(kind, f, *args)
    raise ConfigError(f"unknown residual kind {kind!r}")


def residual_arity(kind: str) -> int:
    if kind not in RESIDUAL_KINDS:
        raise ConfigError(f"unknown residual kind {kind!r}; expected one of {RESIDUAL_KINDS}")
    return 3 if kind in ("derivation", "sigma_hom") else 2


@dataclass
class ResidualSup:
    """Largest residual over a grid sweep, absolute and relative to local scale."""

    sup: float
    point: tuple
    sup_relative: float
    point_relative: tuple
    n_tuples: int

    def to_dict(self) -> dict:
        from ._codec import encode_value

        def enc(pt):
            return [encode_value(tuple(map(tuple, p))) for p in pt]

        return {
            "sup": self.sup,
            "sup_relative": self.sup_relative,
            "point": enc(self.point),
            "point_relative": enc(self.point_relative),
            "n_tuples": self.n_tuples,
        }


def relative(norms: np.ndarray, scale: np.ndarray) -> np.ndarray:
    """norm/scale with 0/0 -> 0."""
    return np.divide(norms, scale, out=np.zeros_like(norms), where=scale > 0)


def residual_sup(kind: str, f, grid: EvalGrid, *, budget: int = TRIPLE_BUDGET, seed: int = 0, **params) -> ResidualSup:
    args = grid_tuples(grid, residual_arity(kind), budget, seed)
    res, scale = residual_terms(kind, f, args, **params)
    norms = frobenius(res)
    rel = relative(norms, scale)
    rel = np.where((scale == 0) & (norms > 0), np.inf, rel)
    i = int(np.argmax(norms))
    j = int(np.argmax(rel))
    return ResidualSup(
        sup=float(norms[i]),
        point=tuple(arg[i] for arg in args),
        sup_relative=float(rel[j]),
        point_relative=tuple(arg[j] for arg in args),
        n_tuples=len(norms),
    )
