"""Control-function families, contraction certificates and Hyers-Ulam bounds.

The families are norm-power majorants. Their behaviour under x -> x/a (or
x -> a x) is an exact power of |a|, so contraction factors are computed in
closed form rather than estimated.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .algebra import frobenius
from .exceptions import ConfigError, StructuralError
from .funceq import TRIPLE_BUDGET, grid_tuples, residual_arity, residual_terms
from .maps import EvalGrid, check_degree, check_direction, check_scale

FAMILIES = {
    "power_sum": 2,
    "power_product": 3,
    "power_sum3": 3,
    "const_plus_power": 2,
    "single_arg": 2,
}


@dataclass(frozen=True)
class ControlFunction:
    """A majorant phi(x, y) or psi(x, y, z) evaluated on element norms.

    ``power_sum``         theta (|x|^r + |y|^r)
    ``power_product``     theta |x|^p |y|^p |z|^p
    ``power_sum3``        theta (|x|^s + |y|^s + |z|^s)
    ``const_plus_power``  delta + theta (|x|^r + |y|^r)
    ``single_arg``        theta |y|^r
    """

    family: str
    exponent: float
    theta: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown control family {self.family!r}; expected one of {sorted(FAMILIES)}")
        if not self.exponent > 0:
            raise ConfigError(f"control exponent must be positive, got {self.exponent!r}")
        if not (self.theta >= 0 and self.delta >= 0):
            raise ConfigError("control constants theta and delta must be nonnegative")
        if self.delta and self.family != "const_plus_power":
            raise ConfigError(f"family {self.family!r} has no constant term")

    @property
    def arity(self) -> int:
        return FAMILIES[self.family]

    def with_theta(self, theta: float) -> "ControlFunction":
        return replace(self, theta=float(theta))

    def from_norms(self, *norms) -> np.ndarray:
        if len(norms) != self.arity:
            raise StructuralError(f"{self.family} takes {self.arity} arguments, got {len(norms)}")
        e = self.exponent
        n = [np.asarray(v, dtype=float) for v in norms]
        if self.family in ("power_sum", "const_plus_power"):
            val = n[0] ** e + n[1] ** e
        elif self.family == "single_arg":
            val = n[1] ** e
        elif self.family == "power_product":
            val = (n[0] * n[1] * n[2]) ** e
        else:
            val = n[0] ** e + n[1] ** e + n[2] ** e
        return self.delta + self.theta * val

    def __call__(self, *points) -> np.ndarray:
        return self.from_norms(*(frobenius(np.asarray(p, dtype=complex)) for p in points))

    def shape(self, *points) -> np.ndarray:
        """The family with theta = 1 and no constant term."""
        return replace(self, theta=1.0, delta=0.0)(*points)

    def at_x0(self, x) -> np.ndarray:
        """phi(x, 0)."""
        nx = frobenius(np.asarray(x, dtype=complex))
        return self.from_norms(nx, np.zeros_like(nx))

    def to_dict(self) -> dict:
        d = {"family": self.family, "exponent": self.exponent, "theta": self.theta}
        if self.family == "const_plus_power":
            d["delta"] = self.delta
        return d


def eval_control(c: ControlFunction, *points) -> np.ndarray:
    return c(*points)


# -- contraction ----------------------------------------------------------------


def _phi_factor(phi: ControlFunction, a: float, m: int, direction: str) -> float:
    if phi.arity != 2:
        raise StructuralError(f"{phi.family} is ternary and cannot control the two-variable residual")
    r = phi.exponent
    if direction == "shrink":
        if phi.delta > 0:
            return np.inf  # constant term cannot shrink under x -> x/a
        return a ** (m - r)
    factor = a ** (r - m)
    if phi.delta > 0:
        factor = max(factor, a ** (-m))
    return factor


def _psi_factor(psi: ControlFunction, a: float, m: int, direction: str) -> float:
    if psi.arity != 3:
        raise StructuralError(f"{psi.family} is binary and cannot control the three-variable residual")
    e = psi.exponent
    expo = 3 * m - 3 * e if psi.family == "power_product" else 3 * m - e
    return a**expo if direction == "shrink" else a ** (-expo)


def closed_form_conditions(phi: ControlFunction, psi: ControlFunction | None, m: int, direction: str) -> dict[str, bool]:
    """Parameter conditions under which the closed-form power bounds are stated.

    Reproduced verbatim per (direction, family pair), including the differing
    product-form and sum-form conditions in the expansive direction.
    """
    r = phi.exponent
    pf = None if psi is None else psi.family
    p = None if psi is None else psi.exponent
    if direction == "shrink":
        if phi.family == "power_sum" and pf == "power_product":
            return {"r > m": r > m, "p > m": p > m, "(3p - r)/2 >= m": (3 * p - r) / 2 >= m}
        if phi.family == "single_arg" and pf == "power_sum3":
            return {"r > m": r > m, "s > 3m": p > 3 * m}
        if phi.family == "power_sum" and pf is None:
            return {"r > m": r > m}
        return {}
    if phi.family in ("power_sum", "const_plus_power") and pf == "power_product":
        return {"0 < r < m": 0 < r < m, "0 < p < m": 0 < p < m, "(3p - r)/2 <= m": (3 * p - r) / 2 <= m}
    if phi.family == "power_sum" and pf == "power_sum3":
        return {"0 < r < m": 0 < r < m, "0 < p < 3m": 0 < p < 3 * m, "(p - r)/2 <= m": (p - r) / 2 <= m}
    if phi.family == "single_arg":
        return {"r < m": r < m}
    if phi.family in ("power_sum", "const_plus_power") and pf is None:
        return {"0 < r < m": 0 < r < m}
    return {}


@dataclass
class ContractionCertificate:
    """Minimal analytic L for which both scaling inequalities hold."""

    L: float
    direction: str
    factors: dict[str, float]
    feasible: bool
    binding: str
    conditions: dict[str, bool] = field(default_factory=dict)
    reason: str = ""

    @property
    def closed_form_ok(self) -> bool:
        return bool(self.conditions) and all(self.conditions.values())

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "direction": self.direction,
            "factors": dict(self.factors),
            "feasible": self.feasible,
            "binding": self.binding,
            "conditions": dict(self.conditions),
            "closed_form_ok": self.closed_form_ok,
            "reason": self.reason,
        }


def contraction_factor(
    phi: ControlFunction, psi: ControlFunction | None, a: int, m: int, direction: str = "shrink"
) -> ContractionCertificate:
    """Shrink: phi(x/a, y/a) <= L |a|^-m phi and psi(x/a, ...) <= L |a|^-3m psi.

    Expand mirrors this with phi(ax, ay) <= |a|^m L phi. For the power families
    the factor is |a| to the exponent gap, e.g. |a|^(m - r) for power_sum.
    """
    a = check_scale(a)
    m = check_degree(m)
    check_direction(direction)
    aa = float(abs(a))
    factors = {"phi": float(_phi_factor(phi, aa, m, direction))}
    if psi is not None:
        factors["psi"] = float(_psi_factor(psi, aa, m, direction))
    binding = max(factors, key=factors.get)
    L = factors[binding]
    feasible = 0.0 < L < 1.0
    reason = ""
    if not feasible:
        if np.isinf(L):
            reason = f"{binding}: constant term cannot contract in the shrink direction"
        else:
            fam = phi if binding == "phi" else psi
            reason = f"{binding} ({fam.family}, exponent {fam.exponent:g}) gives L = {L:g} >= 1 for m = {m}, {direction}"
    return ContractionCertificate(
        L=L,
        direction=direction,
        factors=factors,
        feasible=feasible,
        binding=binding,
        conditions=closed_form_conditions(phi, psi, m, direction),
        reason=reason,
    )


# -- bounds ---------------------------------------------------------------------


def bound_value(phi: ControlFunction, L: float, a: int, m: int, x, variant: str = "shrink") -> np.ndarray:
    """shrink: L / (2|a|^m (1-L)) phi(x, 0); expand: 1 / (2|a|^m (1-L)) phi(x, 0)."""
    if not 0.0 < L < 1.0:
        raise ConfigError(f"bound needs 0 < L < 1, got L = {L!r}")
    check_direction(variant)
    am = float(abs(check_scale(a))) ** check_degree(m)
    num = L if variant == "shrink" else 1.0
    return num / (2.0 * am * (1.0 - L)) * phi.at_x0(x)


def closed_form_bound(phi: ControlFunction, a: int, m: int, x, variant: str = "shrink") -> np.ndarray:
    """Power-family bounds obtained by substituting L = |a|^(+-(m - r)).

    shrink:  theta / (2(|a|^r - |a|^m)) |x|^r
    expand:  delta / (2(|a|^m - |a|^r)) + theta / (2(|a|^m - |a|^r)) |x|^r
    """
    if phi.family not in ("power_sum", "const_plus_power"):
        raise ConfigError(f"no closed-form bound for family {phi.family!r}")
    aa = float(abs(check_scale(a)))
    r = phi.exponent
    nx = frobenius(np.asarray(x, dtype=complex))
    if variant == "shrink":
        if phi.delta > 0:
            raise ConfigError("constant-plus-power control has no shrink-direction bound")
        return phi.theta / (2.0 * (aa**r - aa**m)) * nx**r
    check_direction(variant)
    denom = 2.0 * (aa**m - aa**r)
    return phi.delta / denom + phi.theta / denom * nx**r


# -- fitting --------------------------------------------------------------------


@dataclass
class ThetaFit:
    """Smallest theta making the residual <= control on every grid tuple."""

    theta: float
    feasible: bool
    witness: tuple | None
    witness_residual: float
    n_tuples: int

    def to_dict(self) -> dict:
        from ._codec import encode_value

        w = None if self.witness is None else [encode_value(tuple(map(tuple, p))) for p in self.witness]
        return {
            "theta": self.theta,
            "feasible": self.feasible,
            "witness": w,
            "witness_residual": self.witness_residual,
            "n_tuples": self.n_tuples,
        }


def fit_majorant(norms, scales, shapes, args, delta: float = 0.0, noise_rtol: float = 1e-10) -> ThetaFit:
    """theta = max residual/shape over residuals above the noise floor; residual where shape = 0 -> infeasible."""
    norms = np.asarray(norms, dtype=float)
    excess = np.maximum(norms - delta, 0.0)
    zero_shape = shapes <= 0
    live = excess > noise_rtol * scales
    bad = zero_shape & live
    if np.any(bad):
        k = int(np.argmax(np.where(bad, excess, -1.0)))
        return ThetaFit(np.inf, False, tuple(arg[k] for arg in args), float(norms[k]), len(norms))
    ratio = np.divide(excess, shapes, out=np.zeros_like(excess), where=~zero_shape & live)
    k = int(np.argmax(ratio))
    return ThetaFit(float(ratio[k]), True, tuple(arg[k] for arg in args), float(norms[k]), len(norms))


def fit_theta(
    f,
    family: ControlFunction,
    grid: EvalGrid,
    a: int,
    m: int,
    *,
    kind: str = "delta",
    budget: int = TRIPLE_BUDGET,
    seed: int = 0,
    noise_rtol: float = 1e-10,
    **residual_params,
) -> ThetaFit:
    """Empirical theta so that ||residual|| <= family(theta) over the grid.

    ``kind`` selects the residual: ``delta`` for pairs, ``derivation`` or
    ``sigma_hom`` for triples (pass ``alg``/``sigma`` through ``residual_params``).
    """
    arity = residual_arity(kind)
    if family.arity != arity:
        raise StructuralError(f"{family.family} has arity {family.arity}, residual {kind!r} needs {arity}")
    args = grid_tuples(grid, arity, budget, seed)
    res, scale = residual_terms(kind, f, args, a=a, m=m, **residual_params)
    shapes = family.shape(*args)
    return fit_majorant(frobenius(res), scale, shapes, args, family.delta, noise_rtol)
