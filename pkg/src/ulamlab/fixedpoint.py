"""Corrector operator, fixed-point extraction and Picard diagnostics.

The corrector is ``T g(x) = a^m g(x/a)`` (shrink) or ``a^-m g(a x)`` (expand).
Its iterates have a closed form, so ``T^n f`` is a lazy :class:`ScaledMap`
view and extracting the fixed point costs one evaluation per point.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import frobenius
from .control import ContractionCertificate, ControlFunction
from .exceptions import ConfigError
from .funceq import residual_sup
from .maps import EvalGrid, MapSpec, Radial, check_degree, check_direction, check_scale, evaluate_scaled
from .verdict import Verdict, pointwise

MAX_DEPTH = 40


@dataclass(frozen=True)
class ScaledMap:
    """x -> a^(mn) f(x / a^n), or f(a^n x) / a^(mn) in the expand direction."""

    f: object
    a: int
    m: int
    n: int
    direction: str = "shrink"

    def __call__(self, x) -> np.ndarray:
        return evaluate_scaled(self.f, x, self.a, self.m, self.n, self.direction)


def apply_T(g, a: int, m: int, direction: str = "shrink"):
    """One corrector step, collapsing repeated steps into a single scaled view."""
    a = check_scale(a)
    m = check_degree(m)
    check_direction(direction)
    if isinstance(g, ScaledMap) and (g.a, g.m, g.direction) == (a, m, direction):
        return ScaledMap(g.f, a, m, g.n + 1, direction)
    return ScaledMap(g, a, m, 1, direction)


def iterate_T(g, a: int, m: int, n: int, direction: str = "shrink"):
    if n == 0:
        return g
    return ScaledMap(g, check_scale(a), check_degree(m), n, check_direction(direction))


def closed_form_T(spec: MapSpec, a: int, m: int) -> MapSpec | None:
    """T applied symbolically in the shrink direction, when the result is again a MapSpec.

    An m-homogeneous base is fixed; a radial perturbation keeps its shape with
    eps scaled by |a|^(m - r). Returns None when a sign would have to be
    absorbed (negative a with odd parity), leaving the lazy view as the answer.
    """
    a = check_scale(a)
    deg = spec.homogeneous_degree
    if spec.base != "zero" and deg != m:
        return None
    p = spec.perturbation
    if p is None:
        return spec
    if not isinstance(p, Radial):
        return None
    parity = m if p.direction == "fixed" else m + 1
    if a < 0 and parity % 2:
        return None
    return spec.with_perturbation(Radial(p.eps * float(abs(a)) ** (m - p.r), p.r, p.direction, p.seed))


@dataclass(frozen=True)
class ExtractionConfig:
    a: int = 2
    m: int = 1
    depth: int = 20
    direction: str = "shrink"
    rtol: float = 1e-9
    window: int = 5

    def __post_init__(self):
        check_scale(self.a)
        check_degree(self.m)
        check_direction(self.direction)
        if not 1 <= self.depth <= MAX_DEPTH:
            raise ConfigError(f"extraction depth must be in 1..{MAX_DEPTH}, got {self.depth!r}")


@dataclass
class ExtractionResult:
    """The extracted map T^N f plus the per-iterate convergence record.

    ``increments[n]`` is the grid sup of ||T^n f - T^(n+1) f||; ``residuals[n]``
    is the grid sup of the relative equation residual of T^n f.
    """

    extracted: ScaledMap
    increments: list[float]
    residuals: list[float]
    status: str
    config: ExtractionConfig

    @property
    def diverged(self) -> bool:
        return self.status in ("diverged", "stagnated")

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "depth": self.config.depth,
            "direction": self.config.direction,
            "increments": list(self.increments),
            "residuals": list(self.residuals),
        }


def extract(f, cfg: ExtractionConfig, grid: EvalGrid) -> ExtractionResult:
    """Realize the limit of T^n f at depth N and classify its convergence."""
    a, m, N, d = cfg.a, cfg.m, cfg.depth, cfg.direction
    pts = grid.points
    increments, residuals = [], []
    prev = f(pts)
    residuals.append(residual_sup("delta", f, grid, a=a, m=m).sup_relative)
    for n in range(1, N + 1):
        g = iterate_T(f, a, m, n, d)
        cur = g(pts)
        increments.append(float(np.max(frobenius(cur - prev))))
        residuals.append(residual_sup("delta", g, grid, a=a, m=m).sup_relative)
        prev = cur
    w = cfg.window
    if not (np.all(np.isfinite(increments)) and np.all(np.isfinite(residuals))):
        status = "diverged"
    elif residuals[-1] <= cfg.rtol:
        status = "converged"
    elif N > w and increments[-1] > increments[-1 - w]:
        status = "diverged"
    elif N >= w and residuals[-1] >= residuals[-1 - w] * (1 - 1e-6):
        status = "stagnated"
    else:
        status = "not_converged"
    return ExtractionResult(iterate_T(f, a, m, N, d), increments, residuals, status, cfg)


@dataclass
class MetricEstimate:
    """Grid estimate of inf{K : ||g - h|| <= K phi(x, 0)}; a lower bound of the true value."""

    K: float
    point: np.ndarray | None
    unbounded: bool
    shell_max: list[float] = field(default_factory=list)


def generalized_metric(g, h, phi: ControlFunction, grid: EvalGrid, floor: float = 1e-10) -> MetricEstimate:
    """max ||g(x) - h(x)|| / phi(x, 0) over the grid.

    Differences below ``floor`` times the local value scale are rounding and
    count as zero; 0/0 is 0 and positive/0 is infinite. If the per-shell maxima
    grow geometrically toward the origin the ratio is unbounded and K is
    reported as infinite.
    """
    pts = grid.points
    gv, hv = g(pts), h(pts)
    diff = frobenius(gv - hv)
    scale = np.maximum(frobenius(gv), frobenius(hv))
    live = diff > floor * scale
    ph = phi.at_x0(pts)
    if np.any(live & (ph <= 0)):
        k = int(np.argmax(live & (ph <= 0)))
        return MetricEstimate(np.inf, pts[k], True)
    ratio = np.where(live, np.divide(diff, ph, out=np.zeros_like(diff), where=ph > 0), 0.0)
    shell = grid.shell_index
    q = [float(np.max(ratio[shell == j])) for j in range(grid.shells + 1)]
    k = int(np.argmax(ratio))
    growth = len(q) >= 3 and all(q[j] > 0 for j in range(len(q))) and all(
        q[j + 1] >= q[j] * (1 + 1e-6) for j in range(len(q) - 1)
    )
    if growth:
        return MetricEstimate(np.inf, pts[-1], True, q)
    return MetricEstimate(float(ratio[k]), pts[k], False, q)


@dataclass
class ConvergenceReport:
    distances: list[float]
    ratios: list[float]
    rho_hat: float | None
    L: float
    L_phi: float
    d_f_Tf: float
    checks: list[Verdict]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "distances": list(self.distances),
            "ratios": list(self.ratios),
            "rho_hat": self.rho_hat,
            "L": self.L,
            "L_phi": self.L_phi,
            "d_f_Tf": self.d_f_Tf,
            "checks": [c.to_dict() for c in self.checks],
            "passed": self.passed,
        }


def picard_diagnostics(
    f,
    phi: ControlFunction,
    cert: ContractionCertificate,
    cfg: ExtractionConfig,
    grid: EvalGrid,
    *,
    rtol: float = 1e-9,
    round_tol: float = 1e-12,
) -> ConvergenceReport:
    """Check the contraction mechanism on the grid.

    (i)   ||2 f(ax) - 2 a^m f(x)|| <= phi(x, 0)
    (ii)  ||T^n f - T^(n+1) f|| <= L^n d(f, Tf) phi(x, 0) for n < N
    (iii) ||f - T^N f|| <= d(f, Tf) / (1 - L) phi(x, 0)
    plus the a-priori step bound d(f, Tf) <= L / (2|a|^m) (shrink) or 1 / (2|a|^m) (expand).
    All are checked pointwise with an allowance of ``round_tol`` times the local value scale.
    """
    if not cert.feasible:
        raise ConfigError(f"picard diagnostics need a feasible certificate: {cert.reason}")
    a, m, N, d = cfg.a, cfg.m, cfg.depth, cfg.direction
    L = cert.L
    am = float(abs(a)) ** m
    pts = grid.points
    ph = phi.at_x0(pts)
    checks = []

    fx, fax = f(pts), f(a * pts)
    lhs = frobenius(2 * fax - 2 * a**m * fx)
    scale = np.maximum(2 * frobenius(fax), 2 * am * frobenius(fx))
    checks.append(pointwise("picard.step_inequality", "||2f(ax) - 2a^m f(x)|| <= phi(x,0)", lhs, ph, scale, pts, rtol=rtol, round_tol=round_tol))

    Tf = apply_T(f, a, m, d)
    d0 = generalized_metric(f, Tf, phi, grid, floor=1e-13).K
    step = (L if d == "shrink" else 1.0) / (2 * am)
    tfx = Tf(pts)
    checks.append(
        pointwise(
            "picard.first_step",
            "||f(x) - Tf(x)|| <= c phi(x,0), c = L/(2|a|^m) (shrink) or 1/(2|a|^m) (expand)",
            frobenius(fx - tfx), step * ph, np.maximum(frobenius(fx), frobenius(tfx)), pts, rtol=rtol, round_tol=round_tol,
        )
    )

    distances = []
    worst = None
    prev = fx
    for n in range(N):
        nxt = iterate_T(f, a, m, n + 1, d)
        cur = nxt(pts)
        distances.append(generalized_metric(iterate_T(f, a, m, n, d), nxt, phi, grid).K)
        v = pointwise(
            "picard.contraction",
            "||T^n f - T^(n+1) f|| <= L^n d(f,Tf) phi(x,0)",
            frobenius(prev - cur), L**n * d0 * ph, np.maximum(frobenius(prev), frobenius(cur)), pts, rtol=rtol, round_tol=round_tol,
        )
        v.info["n"] = n
        if worst is None or (not v.passed and worst.passed) or (v.passed == worst.passed and v.margin > worst.margin):
            worst = v
        prev = cur
    if worst is not None:
        checks.append(worst)

    fN = prev
    checks.append(
        pointwise(
            "picard.distance_to_fixed_point",
            "||f - T^N f|| <= d(f,Tf)/(1-L) phi(x,0)",
            frobenius(fx - fN), d0 / (1 - L) * ph, np.maximum(frobenius(fx), frobenius(fN)), pts, rtol=rtol, round_tol=round_tol,
        )
    )

    ratios = [
        distances[n + 1] / distances[n]
        for n in range(len(distances) - 1)
        if distances[n] > 0 and distances[n + 1] > 0 and np.isfinite(distances[n])
    ]
    rho_hat = float(np.mean(ratios)) if ratios else None
    return ConvergenceReport(distances, ratios, rho_hat, L, cert.factors["phi"], float(d0), checks)
