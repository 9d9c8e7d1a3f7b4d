"""scikit-learn style wrapper around fixed-point extraction.

``fit`` takes the perturbed map itself (any callable on element batches),
fits the control constant on the evaluation grid, certifies contraction and
extracts the exact solution; ``transform`` then evaluates that solution.

    >>> from ulamlab import MapSpec, Radial
    >>> f = MapSpec.monomial(2, 4).with_perturbation(Radial(1e-3, 6, seed=7))
    >>> est = StabilityExtractor(m=4, phi_exponent=6).fit(f)
    >>> round(est.certificate_.L, 4)
    0.25
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .algebra import frobenius
from .control import ControlFunction, bound_value, contraction_factor, fit_theta
from .exceptions import ConfigError
from .fixedpoint import ExtractionConfig, extract, picard_diagnostics
from .maps import EvalGrid
from .validation import check_elements, check_map


class StabilityExtractor(TransformerMixin, BaseEstimator):
    def __init__(
        self,
        a=2,
        m=1,
        depth=20,
        direction="shrink",
        phi_family="power_sum",
        phi_exponent=2.0,
        delta=0.0,
        dim=1,
        rho=1.0,
        shells=9,
        n_directions=4,
        seed=0,
        rtol=1e-9,
    ):
        self.a = a
        self.m = m
        self.depth = depth
        self.direction = direction
        self.phi_family = phi_family
        self.phi_exponent = phi_exponent
        self.delta = delta
        self.dim = dim
        self.rho = rho
        self.shells = shells
        self.n_directions = n_directions
        self.seed = seed
        self.rtol = rtol

    def fit(self, f, y=None):
        """Fit theta, certify L and extract. ``y`` is ignored."""
        f = check_map(f)
        grid = EvalGrid(self.rho, self.shells, self.a, self.n_directions, self.seed, self.dim)
        shape = ControlFunction(self.phi_family, float(self.phi_exponent), delta=float(self.delta))
        cert = contraction_factor(shape, None, self.a, self.m, self.direction)
        if not cert.feasible:
            raise ConfigError(f"infeasible control: {cert.reason}")
        fit = fit_theta(f, shape, grid, self.a, self.m)
        if not fit.feasible:
            raise ConfigError("map is not controlled by the chosen family on the grid")
        cfg = ExtractionConfig(self.a, self.m, self.depth, self.direction, rtol=self.rtol)
        self.f_ = f
        self.grid_ = grid
        self.theta_ = fit.theta
        self.phi_ = shape.with_theta(fit.theta)
        self.certificate_ = cert
        self.extraction_ = extract(f, cfg, grid)
        self.extracted_ = self.extraction_.extracted
        self.picard_ = picard_diagnostics(f, self.phi_, cert, cfg, grid, rtol=self.rtol)
        return self

    def transform(self, X):
        """Values of the extracted exact map at X, shape (k, n, n)."""
        check_is_fitted(self, "extracted_")
        return self.extracted_(check_elements(X, self.dim))

    predict = transform

    def error(self, X):
        """Measured ||f(x) - F(x)|| at X."""
        check_is_fitted(self, "extracted_")
        x = check_elements(X, self.dim)
        return frobenius(self.f_(x) - self.extracted_(x))

    def error_bound(self, X):
        """Hyers-Ulam guarantee for ||f(x) - F(x)|| at X."""
        check_is_fitted(self, "extracted_")
        x = check_elements(X, self.dim)
        return bound_value(self.phi_, self.certificate_.L, self.a, self.m, x, self.direction)

    def score(self, X, y=None):
        """Fraction of points where the measured error respects the bound."""
        err, bnd = self.error(X), self.error_bound(X)
        return float(np.mean(err <= bnd * (1 + self.rtol) + 1e-12 * frobenius(self.f_(check_elements(X, self.dim)))))
