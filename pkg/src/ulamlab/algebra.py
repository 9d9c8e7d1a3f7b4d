"""Concrete ternary Banach algebras over complex scalars and small matrices.

Elements are plain complex numpy arrays of shape ``(..., n, n)``; the leading
axes are a batch, so every operation here works on stacks of elements at once.
The scalar case is ``n == 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, StructuralError, UnsupportedOperation

PRODUCT_RULES = ("derived", "star", "trivial")
MUTATIONS = (None, "sign_flip")


def _adjoint(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def frobenius(x: np.ndarray) -> np.ndarray:
    """Frobenius norm over the last two axes (complex modulus when n == 1)."""
    x = np.asarray(x)
    return np.sqrt(np.sum(x.real**2 + x.imag**2, axis=(-2, -1)))


@dataclass(frozen=True)
class TernaryAlgebra:
    """An n x n complex matrix space with one of three ternary products.

    ``derived``  [x, y, z] = x y z
    ``star``     [x, y, z] = x y* z   (conjugate-linear in the middle slot)
    ``trivial``  [x, y, z] = 0

    ``mutation="sign_flip"`` deliberately corrupts the product (the sign of the
    result depends on the first argument); it exists so that the axiom checkers
    can be shown to detect a broken product.
    """

    dim: int = 1
    product: str = "derived"
    mutation: str | None = None

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ConfigError(f"dim must be a positive integer, got {self.dim!r}")
        if self.product not in PRODUCT_RULES:
            raise ConfigError(f"unknown product rule {self.product!r}; expected one of {PRODUCT_RULES}")
        if self.mutation not in MUTATIONS:
            raise ConfigError(f"unknown mutation {self.mutation!r}")

    # -- element construction -------------------------------------------------

    def element(self, value) -> np.ndarray:
        """Coerce a scalar, matrix or stack into elements of this algebra."""
        arr = np.asarray(value, dtype=complex)
        if arr.ndim == 0:
            arr = arr * np.eye(self.dim, dtype=complex) if self.dim > 1 else arr.reshape(1, 1)
        elif self.dim == 1 and arr.shape[-2:] != (1, 1):
            arr = arr[..., None, None]
        self.check(arr)
        return arr

    def zero(self) -> np.ndarray:
        return np.zeros((self.dim, self.dim), dtype=complex)

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def random(self, rng: np.random.Generator, size: int | tuple = ()) -> np.ndarray:
        """Entries independent and uniform on the complex unit square [0,1) + i[0,1)."""
        size = (size,) if isinstance(size, (int, np.integer)) else tuple(size)
        shape = size + (self.dim, self.dim)
        out = rng.random(shape) + 1j * rng.random(shape)
        self.check(out)
        return out

    def random_unit(self, rng: np.random.Generator, size: int | tuple = ()) -> np.ndarray:
        """Random elements rescaled to unit Frobenius norm."""
        x = self.random(rng, size)
        return x / frobenius(x)[..., None, None]

    def check(self, *xs: np.ndarray) -> None:
        for x in xs:
            if x.ndim < 2 or x.shape[-2:] != (self.dim, self.dim):
                raise StructuralError(
                    f"element of shape {x.shape} does not belong to a {self.dim}x{self.dim} algebra"
                )
            if not np.all(np.isfinite(x)):
                raise StructuralError("element has non-finite entries")

    # -- algebra operations ---------------------------------------------------

    def ternary_product(self, x, y, z) -> np.ndarray:
        x, y, z = (np.asarray(v, dtype=complex) for v in (x, y, z))
        self.check(x, y, z)
        if self.product == "trivial":
            out = np.zeros(np.broadcast_shapes(x.shape, y.shape, z.shape), dtype=complex)
        elif self.product == "star":
            out = x @ _adjoint(y) @ z
        else:
            out = x @ y @ z
        if self.mutation == "sign_flip":
            flip = np.where(x[..., 0, 0].real > 0.5, -1.0, 1.0)
            out = out * flip[..., None, None]
        return out

    def power(self, x, m: int) -> np.ndarray:
        """m-fold binary matrix product of x with itself (1 <= m <= 4)."""
        if self.product == "star":
            raise UnsupportedOperation("powers are not canonically defined for the star product")
        if m not in (1, 2, 3, 4):
            raise ConfigError(f"power degree must be in 1..4, got {m!r}")
        x = np.asarray(x, dtype=complex)
        self.check(x)
        out = x
        for _ in range(m - 1):
            out = out @ x
        return out

    def norm(self, x) -> np.ndarray | float:
        x = np.asarray(x, dtype=complex)
        self.check(x)
        out = frobenius(x)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ModuleStructure:
    """Ternary module X over an algebra A; at desk scale X is A itself."""

    over: TernaryAlgebra = field(default_factory=TernaryAlgebra)

    @property
    def carrier(self) -> TernaryAlgebra:
        return self.over

    def bracket(self, p, q, r) -> np.ndarray:
        return self.over.ternary_product(p, q, r)


@dataclass
class AxiomReport:
    """Per-axiom maximum relative violation over seeded samples."""

    violations: dict[str, float]
    samples: int
    seed: int
    report_only: tuple[str, ...] = ()

    @property
    def max_violation(self) -> float:
        return max(self.violations.values(), default=0.0)

    def passed(self, tol: float = 1e-12) -> bool:
        return all(v <= tol for k, v in self.violations.items() if k not in self.report_only)

    def to_dict(self) -> dict:
        return {
            "violations": dict(self.violations),
            "samples": self.samples,
            "seed": self.seed,
            "report_only": list(self.report_only),
        }


def _rel_gap(lhs: np.ndarray, rhs: np.ndarray) -> float:
    """Max over the batch of ||lhs - rhs|| / max(||lhs||, ||rhs||); 0/0 counts as 0."""
    gap = frobenius(lhs - rhs)
    scale = np.maximum(frobenius(lhs), frobenius(rhs))
    rel = np.divide(gap, scale, out=np.zeros_like(gap), where=scale > 0)
    rel = np.where((scale == 0) & (gap > 0), np.inf, rel)
    return float(np.max(rel))


def _norm_excess(prod: np.ndarray, *factors: np.ndarray) -> float:
    bound = np.prod([frobenius(f) for f in factors], axis=0)
    excess = np.maximum(frobenius(prod) - bound, 0.0)
    rel = np.divide(excess, bound, out=np.zeros_like(excess), where=bound > 0)
    return float(np.max(rel))


def check_algebra_axioms(alg: TernaryAlgebra, samples: int = 100, seed: int = 0) -> AxiomReport:
    """Associativity chain and norm inequality on seeded random quintuples.

    The derived and trivial rules are checked against the plain chain
    ``[[x,y,z],u,v] = [x,[y,z,u],v] = [x,y,[z,u,v]]``; the star rule against the
    conjugate chain ``[x,y,[z,w,v]] = [x,[w,z,y],v] = [[x,y,z],w,v]``.
    """
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    x, y, z, u, v = (alg.random(rng, samples) for _ in range(5))
    t = alg.ternary_product
    if alg.product == "star":
        a = t(x, y, t(z, u, v))
        b = t(x, t(u, z, y), v)
        c = t(t(x, y, z), u, v)
    else:
        a = t(t(x, y, z), u, v)
        b = t(x, t(y, z, u), v)
        c = t(x, y, t(z, u, v))
    violations = {
        "associativity_outer": _rel_gap(a, c),
        "associativity_middle": _rel_gap(a, b),
        "norm_submultiplicative": _norm_excess(t(x, y, z), x, y, z),
    }
    return AxiomReport(violations, samples, seed)


def check_module_axioms(mod: ModuleStructure, samples: int = 100, seed: int = 0) -> AxiomReport:
    """Left/middle/right/two-sided module axioms with X = A.

    The six-element middle identity ``[a,[b,[c,x,d],e],f] = [[a,b,c],x,[d,e,f]]``
    is evaluated exactly as written; it is reported but not asserted for
    non-commutative algebras (no reference module exists to calibrate against).
    """
    if samples < 1:
        raise ConfigError("samples must be >= 1")
    alg = mod.over
    rng = np.random.default_rng(seed)
    a, b, c, d, e, f, x, x2 = (alg.random(rng, samples) for _ in range(8))
    alpha = rng.random((samples, 1, 1)) + 1j * rng.random((samples, 1, 1))
    beta = rng.random((samples, 1, 1)) + 1j * rng.random((samples, 1, 1))
    br = mod.bracket

    def linear(fn, p, q):
        return _rel_gap(fn(alpha * p + beta * q), alpha * fn(p) + beta * fn(q))

    v: dict[str, float] = {}
    v["LTM1"] = linear(lambda s: br(a, b, s), x, x2)
    v["LTM2"] = max(linear(lambda s: br(s, b, x), a, c), linear(lambda s: br(a, s, x), b, c))
    left = br(a, b, br(c, d, x))
    v["LTM3"] = max(_rel_gap(left, br(br(a, b, c), d, x)), _rel_gap(left, br(a, br(b, c, d), x)))

    v["MTM1"] = linear(lambda s: br(a, s, b), x, x2)
    v["MTM2"] = max(linear(lambda s: br(s, x, b), a, c), linear(lambda s: br(a, x, s), b, c))
    v["MTM3"] = _rel_gap(br(a, br(b, br(c, x, d), e), f), br(br(a, b, c), x, br(d, e, f)))

    v["RTM1"] = linear(lambda s: br(s, a, b), x, x2)
    v["RTM2"] = max(linear(lambda s: br(x, s, b), a, c), linear(lambda s: br(x, a, s), b, c))
    right = br(br(x, a, b), c, d)
    v["RTM3"] = max(_rel_gap(right, br(x, br(a, b, c), d)), _rel_gap(right, br(x, a, br(b, c, d))))

    # the module element may sit in any of the five positions
    tm = 0.0
    for pos in range(5):
        seq = [a, b, c, d]
        seq.insert(pos, x)
        p, q, r, s, w = seq
        lhs = br(br(p, q, r), s, w)
        tm = max(tm, _rel_gap(lhs, br(p, br(q, r, s), w)), _rel_gap(lhs, br(p, q, br(r, s, w))))
    v["TM"] = tm

    v["NLTM"] = _norm_excess(br(a, b, x), a, b, x)
    v["NMTM"] = _norm_excess(br(a, x, b), a, x, b)
    v["NRTM"] = _norm_excess(br(x, a, b), x, a, b)

    report_only: tuple[str, ...] = ()
    if alg.dim > 1 and alg.product != "trivial":
        report_only = ("MTM3",)
    if alg.product == "star":
        # conjugate-linear middle slot: the linear module axioms are not expected to hold
        report_only = tuple(k for k in v if not k.startswith("N"))
    return AxiomReport(v, samples, seed, report_only)


def ternary_product(alg: TernaryAlgebra, x, y, z) -> np.ndarray:
    return alg.ternary_product(x, y, z)


def power(alg: TernaryAlgebra, x, m: int) -> np.ndarray:
    return alg.power(x, m)


def norm(alg: TernaryAlgebra, x):
    return alg.norm(x)
