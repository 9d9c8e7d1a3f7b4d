import numpy as np
import pytest

from ulamlab import (
    ConfigError,
    ControlFunction,
    EvalGrid,
    ExtractionConfig,
    MapSpec,
    Radial,
    apply_T,
    contraction_factor,
    extract,
    generalized_metric,
    iterate_T,
    picard_diagnostics,
)
from ulamlab.fixedpoint import MAX_DEPTH, ScaledMap, closed_form_T

GRID = EvalGrid(shells=9)
F_REF = MapSpec.monomial(2, 4, Radial(1e-3, 6, seed=7))


def test_apply_T_formula_and_collapse():
    g = apply_T(F_REF, 2, 4)
    x = GRID.points
    np.testing.assert_allclose(g(x), 16 * F_REF(x / 2))
    gg = apply_T(g, 2, 4)
    assert isinstance(gg, ScaledMap) and gg.n == 2 and gg.f is F_REF
    # a different scale does not collapse
    assert apply_T(g, 3, 4).f is g
    assert iterate_T(F_REF, 2, 4, 0) is F_REF


def test_expand_operator():
    x = GRID.points
    np.testing.assert_allclose(apply_T(F_REF, 2, 4, "expand")(x), F_REF(2 * x) / 16)


def test_closed_form_T_matches_lazy():
    x = GRID.points
    sym = closed_form_T(F_REF, 2, 4)
    np.testing.assert_allclose(sym(x), apply_T(F_REF, 2, 4)(x), rtol=1e-14)
    assert closed_form_T(MapSpec.monomial(1, 3, Radial(1e-3, 5)), -2, 3) is None
    assert closed_form_T(MapSpec.monomial(1, 3), 2, 4) is None
    assert closed_form_T(MapSpec.monomial(1, 4), 2, 4) == MapSpec.monomial(1, 4)


def test_extraction_config_validation():
    with pytest.raises(ConfigError):
        ExtractionConfig(depth=0)
    with pytest.raises(ConfigError):
        ExtractionConfig(depth=MAX_DEPTH + 1)
    with pytest.raises(ConfigError):
        ExtractionConfig(a=1)


def test_extract_converges_to_base():
    res = extract(F_REF, ExtractionConfig(2, 4, 20), GRID)
    assert res.status == "converged" and not res.diverged
    x = GRID.points
    np.testing.assert_allclose(res.extracted(x), 2 * x**4, rtol=1e-12)
    inc = np.array(res.increments)
    np.testing.assert_allclose(inc[1:10] / inc[:9], 0.25, rtol=1e-6)
    assert res.to_dict()["depth"] == 20


def test_extract_flags_growth():
    # r < m in the shrink direction: T^n g grows like |a|^((m - r) n)
    res = extract(MapSpec.monomial(1, 4, Radial(1e-3, 2)), ExtractionConfig(2, 4, 20), GRID)
    assert res.status == "diverged" and res.diverged


def test_extract_flags_stagnation_at_r_equal_m():
    # r = m leaves the perturbation fixed by T; |x|^3 is not a cubic form, so the residual never drops
    res = extract(MapSpec.monomial(1, 3, Radial(1e-3, 3)), ExtractionConfig(2, 3, 20), GRID)
    assert res.status == "stagnated" and res.diverged


def test_real_quartic_form_is_a_genuine_solution():
    # |x|^4 = (x conj(x))^2 solves the quartic equation, so r = m = 4 converges at once
    res = extract(MapSpec.monomial(1, 4, Radial(1e-3, 4)), ExtractionConfig(2, 4, 20), GRID)
    assert res.status == "converged" and max(res.increments) < 1e-15


def test_extract_not_converged_when_too_shallow():
    res = extract(F_REF, ExtractionConfig(2, 4, 3), GRID)
    assert res.status == "not_converged"


def test_generalized_metric_basic():
    phi = ControlFunction("power_sum", 6)
    assert generalized_metric(F_REF, F_REF, phi, GRID).K == 0.0
    est = generalized_metric(F_REF, MapSpec.monomial(2, 4), phi, GRID)
    assert est.K == pytest.approx(1e-3, rel=1e-6) and not est.unbounded


def test_generalized_metric_unbounded():
    # ||g - h|| ~ |x|^2 against phi ~ |x|^6 blows up toward the origin
    est = generalized_metric(MapSpec.monomial(1, 4, Radial(1e-3, 2)), MapSpec.monomial(1, 4), ControlFunction("power_sum", 6), GRID)
    assert est.unbounded and np.isinf(est.K)
    # positive difference where phi(x, 0) = 0
    est = generalized_metric(F_REF, MapSpec.monomial(2, 4), ControlFunction("single_arg", 6), GRID)
    assert est.unbounded


def test_picard_diagnostics_reference():
    phi = ControlFunction("power_sum", 6, 0.228)
    cert = contraction_factor(phi, None, 2, 4)
    rep = picard_diagnostics(F_REF, phi, cert, ExtractionConfig(2, 4, 20), GRID)
    assert rep.passed
    assert rep.rho_hat == pytest.approx(0.25, rel=1e-6)
    assert rep.d_f_Tf == pytest.approx(0.75e-3 / 0.228, rel=1e-6)
    d = rep.to_dict()
    assert d["passed"] and len(d["distances"]) == 20
    assert {c["claim"] for c in d["checks"]} == {
        "picard.step_inequality", "picard.first_step", "picard.contraction", "picard.distance_to_fixed_point",
    }


def test_picard_detects_undersized_theta():
    phi = ControlFunction("power_sum", 6, 0.01)
    cert = contraction_factor(phi, None, 2, 4)
    rep = picard_diagnostics(F_REF, phi, cert, ExtractionConfig(2, 4, 20), GRID)
    assert not rep.passed
    assert not next(c for c in rep.checks if c.claim == "picard.step_inequality").passed


def test_picard_requires_feasible_certificate():
    phi = ControlFunction("power_sum", 4)
    with pytest.raises(ConfigError):
        picard_diagnostics(F_REF, phi, contraction_factor(phi, None, 2, 4), ExtractionConfig(2, 4, 5), GRID)
