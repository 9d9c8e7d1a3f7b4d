"""Pass/fail records for checked inequalities."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._codec import encode_value


def _encode_point(p):
    if p is None:
        return None
    if isinstance(p, tuple):
        return [_encode_point(q) for q in p]
    arr = np.asarray(p)
    return encode_value(tuple(map(tuple, arr))) if arr.ndim == 2 else float(arr)


@dataclass
class Verdict:
    """One checked claim.

    ``value`` and ``threshold`` are taken at the witness (the worst point);
    ``margin`` is value / threshold, so a pass means margin <= 1.
    """

    claim: str
    inequality: str
    passed: bool
    value: float
    threshold: float
    witness: object = None
    info: dict = field(default_factory=dict)

    @property
    def margin(self) -> float:
        if self.threshold > 0:
            return self.value / self.threshold
        return 0.0 if self.value <= 0 else np.inf

    def to_dict(self) -> dict:
        return {
            "claim": self.claim,
            "inequality": self.inequality,
            "passed": bool(self.passed),
            "value": float(self.value),
            "threshold": float(self.threshold),
            "margin": float(self.margin),
            "witness": _encode_point(self.witness),
            "info": self.info,
        }


def pointwise(claim, inequality, lhs, rhs, scale, points, *, rtol=1e-9, round_tol=1e-12) -> Verdict:
    """lhs <= rhs (1 + rtol) + round_tol * scale at every point; the witness maximizes lhs / allowance."""
    lhs = np.asarray(lhs, dtype=float)
    allowed = np.asarray(rhs, dtype=float) * (1.0 + rtol) + round_tol * np.asarray(scale, dtype=float)
    allowed = np.broadcast_to(allowed, lhs.shape)
    ratio = np.divide(lhs, allowed, out=np.where(lhs > 0, np.inf, 0.0), where=allowed > 0)
    ok = bool(np.all(np.isfinite(lhs)) and np.all(lhs <= allowed))
    k = int(np.argmax(ratio)) if ratio.size else 0
    wit = None
    if ratio.size:
        wit = tuple(p[k] for p in points) if isinstance(points, (tuple, list)) else points[k]
    return Verdict(
        claim,
        inequality,
        ok,
        float(lhs.flat[k]) if lhs.size else 0.0,
        float(allowed.flat[k]) if lhs.size else 0.0,
        wit,
        {"n_points": int(lhs.size)},
    )


def scalar(claim, inequality, value, threshold, witness=None, **info) -> Verdict:
    value = float(value)
    return Verdict(claim, inequality, bool(np.isfinite(value) and value <= threshold), value, float(threshold), witness, info)
