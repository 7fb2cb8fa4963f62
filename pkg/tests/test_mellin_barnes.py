import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fraclevy import mellin_barnes as mb
from fraclevy import densities as dn
from fraclevy.core_special import MLParams, ml_prabhakar
from fraclevy.errors import ContourError, DomainError, ResidueError, StripError, StructureError
from oracles import GML_DENSITY


def levy_half(x):
    x = np.asarray(x, float)
    return x**-1.5 * np.exp(-0.25 / x) / (2 * math.sqrt(math.pi))


def gengamma_closed(alpha, gamma, x):
    x = np.asarray(x, float)
    return alpha * gamma**gamma / math.gamma(gamma) * x ** (alpha * gamma - 1) * np.exp(-gamma * x**alpha)


# -- contour_eval ----------------------------------------------------------


def test_gamma_inverts_to_exponential():
    f = mb.exponential_integrand()
    assert mb.contour_eval(f, mb.ContourSpec(1.0), 2.0) == pytest.approx(math.exp(-2), rel=1e-12)


def test_levy_half_example():
    f = mb.levy_integrand(0.5)
    v = mb.contour_eval(f, mb.default_contour(f, 0.25), 1.0)
    assert v == pytest.approx(0.21969564473386122, rel=1e-10)


def test_gml_integrand_matches_density_oracle():
    f = mb.gml_integrand(0.7, 2.0)
    v = mb.contour_eval(f, mb.default_contour(f), 1.0)
    assert v == pytest.approx(GML_DENSITY[(0.7, 2, 1)], rel=1e-10)


@pytest.mark.parametrize("x", [0.3, 1.0, 4.0])
def test_cauchy_line_invariance_levy(x):
    f = mb.levy_integrand(0.5)
    vals = [mb.contour_eval(f, mb.default_contour(f, c), x) for c in (0.1, 0.25, 0.4)]
    ref = levy_half(x)
    for v in vals:
        assert abs(v - vals[1]) <= 1e-9 * abs(vals[1])
        assert v == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("f, line", [(mb.levy_integrand(0.5), 0.25), (mb.gml_integrand(0.6, 2.0), None)])
def test_node_doubling_self_convergence(f, line):
    spec = mb.default_contour(f, line)
    x = np.array([0.5, 1.0, 2.0])
    a = mb.contour_eval(f, spec, x)
    b = mb.contour_eval(f, spec.refined(), x)
    assert np.max(np.abs(a - b) / np.abs(a)) < 1e-9


@pytest.mark.parametrize("alpha, gamma", [(0.5, 2.0), (0.7, 1.5), (0.9, 3.0)])
def test_residue_and_contour_agree_gml_family(alpha, gamma):
    f = mb.gml_integrand(alpha, gamma)
    x = np.linspace(0.5, 2.0, 7)
    c = mb.contour_eval(f, mb.default_contour(f), x)
    r = mb.residue_series_eval(f, x)
    assert np.max(np.abs(c - r) / np.abs(c)) <= 1e-8


def test_contour_rejects_line_outside_strip():
    f = mb.levy_integrand(0.5)
    with pytest.raises(StripError):
        mb.contour_eval(f, mb.ContourSpec(1.5), 1.0)
    with pytest.raises(DomainError):
        mb.contour_eval(mb.exponential_integrand(), mb.ContourSpec(1.0), -1.0)


def test_non_decaying_integrand_is_rejected():
    f = mb.MellinIntegrand([(1.0, 0.0)], [(1.0, 0.5)])
    with pytest.raises(ContourError):
        mb.contour_eval(f, mb.ContourSpec(1.0), 1.0)


def test_contour_spec_validation():
    with pytest.raises(DomainError):
        mb.ContourSpec(0.1, nodes=32)
    with pytest.raises(DomainError):
        mb.ContourSpec(0.1, nodes=31)
    with pytest.raises(DomainError):
        mb.ContourSpec(0.1, half_height=0.0)


def test_truncation_estimate_reports_height():
    f = mb.levy_integrand(0.5)
    est = mb.truncation_estimate(f, mb.default_contour(f, 0.25))
    assert est["half_height"] >= 4.0
    assert est["decay_rate"] == pytest.approx(math.pi / 2)


# -- residues ----------------------------------------------------------------


@pytest.mark.parametrize(
    "alpha, gamma, expected", [(1.0, 1.0, math.exp(-1)), (0.5, 2.0, 2 * math.exp(-2))]
)
def test_gengamma_residue_examples(alpha, gamma, expected):
    assert mb.residue_series_eval(mb.gengamma_integrand(alpha, gamma), 1.0) == pytest.approx(expected, rel=1e-13)


def test_gamma_residues_give_exponential():
    assert mb.residue_series_eval(mb.exponential_integrand(), 0.5) == pytest.approx(math.exp(-0.5), rel=1e-14)


def test_residue_errors():
    with pytest.raises(ResidueError):
        mb.residue_series_eval(mb.levy_integrand(0.5), 1.0)
    two_left = mb.MellinIntegrand([(1.0, 0.0), (1.0, 0.5)])
    with pytest.raises(ResidueError):
        mb.residue_series_eval(two_left, 1.0)


def test_residue_sum_of_ml_integrand():
    # left poles of Gamma(s) reproduce the power series of E^gamma_{alpha,beta}(-w)
    w = np.array([0.3, 1.0, 2.0])
    r = mb.residue_series_eval(mb.ml_integrand(0.6, 1.2, 1.5), w)
    assert np.allclose(r, ml_prabhakar(MLParams(0.6, 1.2, 1.5), -w), rtol=1e-12)


# -- Levy structure -------------------------------------------------------


def test_has_levy_structure_examples():
    assert mb.has_levy_structure(mb.gml_integrand(0.7, 2.0), 0.7)
    assert not mb.has_levy_structure(mb.gml_integrand(0.7, 2.0), 0.6)
    assert not mb.has_levy_structure(mb.gamma_density_integrand(2.0), 0.7)
    assert not mb.has_levy_structure(mb.MellinIntegrand(), 0.5)


def test_strip_gives_gengamma_integrand():
    stripped = mb.strip_levy_structure(mb.gml_integrand(0.7, 2.0), 0.7)
    assert stripped.isclose(mb.gengamma_integrand(0.7, 2.0))


def test_strip_twice_fails():
    once = mb.strip_levy_structure(mb.gml_integrand(0.7, 2.0), 0.7)
    with pytest.raises(StructureError):
        mb.strip_levy_structure(once, 0.7)


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(0.05, 0.99), gamma=st.floats(0.1, 50.0))
def test_attach_strip_round_trip(alpha, gamma):
    f = mb.gamma_density_integrand(gamma)
    g = mb.with_levy_structure(f, alpha)
    assert mb.has_levy_structure(g, alpha)
    assert mb.strip_levy_structure(g, alpha).isclose(f)
    h = mb.gml_integrand(alpha, gamma)
    assert mb.with_levy_structure(mb.strip_levy_structure(h, alpha), alpha).isclose(h)


@pytest.mark.parametrize("alpha, gamma", [(0.5, 2.0), (0.7, 2.0), (0.3, 2.0)])
def test_stripped_residues_are_gengamma(alpha, gamma):
    x = np.array([0.3, 0.7, 1.0, 1.5, 2.5])
    stripped = mb.strip_levy_structure(mb.gml_integrand(alpha, gamma), alpha)
    assert np.allclose(mb.residue_series_eval(stripped, x), gengamma_closed(alpha, gamma, x), rtol=1e-10, atol=0)


# -- integrand plumbing ---------------------------------------------------------


def test_json_round_trip():
    f = mb.gml_integrand(0.6, 2.5)
    g = mb.MellinIntegrand.from_json(json.loads(json.dumps(f.to_json())))
    assert g == f


def test_isclose_ignores_factor_order():
    a = mb.MellinIntegrand([(1.0, 0.0), (-2.0, 1.0)])
    b = mb.MellinIntegrand([(-2.0, 1.0), (1.0, 1e-14)])
    assert a.isclose(b)
    assert not a.isclose(mb.MellinIntegrand([(1.0, 0.0)]))


def test_integrand_validation():
    with pytest.raises(DomainError):
        mb.MellinIntegrand([(1.0, 0.0)], scalar=0.0)
    with pytest.raises(DomainError):
        mb.MellinIntegrand(base_powers=[(-1.0, 1.0, 0.0)])


def test_strip_of_gml_integrand():
    lo, hi = mb.gml_integrand(0.5, 2.0).strip()
    assert lo == pytest.approx(1 - 0.5 * 2.0)
    assert hi == pytest.approx(1.0)


def test_denominator_pole_on_line_is_zero_not_nan():
    f = mb.MellinIntegrand([(1.0, 2.0)], [(1.0, 0.0)])  # Gamma(s+2)/Gamma(s)
    v = f(np.array([-1.0 + 0j, 0.0 + 0j]))
    assert np.all(v == 0)


@pytest.mark.parametrize("x", [1e-2, 0.1, 1.0, 10.0, 1e3])
def test_auto_contour_on_levy_half(x):
    v = mb.auto_contour_eval(mb.levy_integrand(0.5), x)
    assert v == pytest.approx(levy_half(x), rel=1e-11)


def test_moment_then_attach_gives_ml_kernel():
    # Mellin transform of x^(1/alpha) for exp(-x), with the Levy factor attached,
    # sums to E_{alpha,alpha}(-1) at x = 1
    f = mb.with_levy_structure(mb.moment_integrand(mb.exponential_integrand(), 0.5), 0.5)
    assert mb.residue_series_eval(f, 1.0) == pytest.approx(ml_prabhakar(MLParams(0.5, 0.5, 1.0), -1.0), rel=1e-12)


def test_resolvent_kernel_integrand():
    alpha, rate = 0.6, 1.3
    x = np.array([0.4, 1.0, 1.7])
    f = mb.resolvent_kernel_integrand(alpha, rate)
    ref = rate * x ** (alpha - 1) * ml_prabhakar(MLParams(alpha, alpha, 1.0), -rate * x**alpha)
    assert np.allclose(mb.auto_contour_eval(f, x), ref, rtol=1e-10)


def test_density_eval_uses_mb_levy():
    x = np.geomspace(0.1, 10, 9)
    assert np.allclose(dn.density_eval(dn.LevyDensity(0.5), x), levy_half(x), rtol=1e-10)
