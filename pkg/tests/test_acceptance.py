"""One test per acceptance criterion; conftest prints a PASS/FAIL line for each.

Criterion 7 is expected to fail: the literal transform converges, but to a
different limit than the catalog value (see the decisions ledger).
"""
import math

import numpy as np
import pytest
from scipy import special

from fraclevy import densities as dn
from fraclevy import frac_solver as fs
from fraclevy import mathai as ma
from fraclevy import mellin_barnes as mb
from fraclevy.cli import run
from fraclevy.core_special import MLParams, ml_prabhakar

GAMMAS = [16.0, 64.0, 256.0]


def test_criterion_1():
    z = np.linspace(-5, 5, 21)
    got = ml_prabhakar(MLParams(1.0, 1.0, 1.0), z)
    assert np.max(np.abs(got - np.exp(z)) / np.exp(z)) <= 1e-12
    for t in (0.5, 1.0, 2.0):
        want = math.exp(t * t) * special.erfc(t)
        assert ml_prabhakar(MLParams(0.5, 1.0, 1.0), -t) == pytest.approx(want, rel=1e-9)


def test_criterion_2():
    for alpha, gamma in [(0.5, 2.0), (0.7, 3.0)]:
        d = dn.GMLDensity(alpha, gamma)
        for s in (0.5, 1.0, 2.0):
            want = (1 + s**alpha / gamma) ** -gamma
            assert dn.laplace_numeric(d, s) == pytest.approx(want, rel=1e-6)
        for s in (alpha / 4, alpha / 2, 3 * alpha / 4):
            assert dn.mellin_numeric(d, s) == pytest.approx(dn.mellin_closed_gml(alpha, gamma, s), rel=1e-6)


def test_criterion_3():
    x = np.geomspace(0.1, 10, 20)
    want = x**-1.5 * np.exp(-0.25 / x) / (2 * math.sqrt(math.pi))
    got = dn.density_eval(dn.LevyDensity(0.5), x)
    assert np.max(np.abs(got - want) / want) <= 1e-8


def test_criterion_4():
    rows = dn.levy_limit_study(0.5, [4, 16, 64, 256], dn.Grid(0.2, 5.0, 100))
    dist = [d for _, d in rows]
    assert all(b < a for a, b in zip(dist, dist[1:]))
    gaps = [dn.laplace_limit_gap(0.5, g, 1.0) for g in (4, 16, 64, 256)]
    assert all(a / b >= 3 for a, b in zip(gaps, gaps[1:]))


def test_criterion_5():
    grid = dn.Grid(0.05, 2.0, 40)
    worst = 0.0
    for alpha in (0.5, 0.8):
        forcings = [
            fs.One(), fs.Linear(), fs.ExpNeg(), fs.ExpNegPowAlpha(1.0), fs.PowerOverGamma(1.5),
            fs.PrabhakarForcing(alpha, 1.5, 2.0, 1.0), fs.LevyPower(), fs.LevyPrabhakar(2.0, 1.0),
        ]
        for forcing in forcings:
            spec = fs.FracEqSpec.from_c(alpha, 1.0, 1.0, forcing)
            rep = fs.residual_check(fs.solve_catalog(spec), spec, grid, n_steps=2048)
            worst = max(worst, rep.relative)
    assert worst <= 1e-5
    spec = fs.FracEqSpec.from_c(0.5, 1.0, 1.0, fs.One())
    assert fs.residual_check(fs.wrong_solution(spec), spec, grid).relative > 1e-2


def test_criterion_6():
    grid = dn.Grid(0.05, 2.0, 40)
    for alpha, gamma in [(0.5, 2.0), (0.7, 1.5)]:
        assert fs.gml_equation_check(alpha, gamma, grid).relative <= 1e-4


def test_criterion_7():
    f = ma.catalog_function("exp")
    failures = []
    for alpha in (0.4, 0.6, 0.8):
        target = ml_prabhakar(MLParams(alpha, alpha, 1.0), -1.0)
        vals = [ma.mathai_transform_finite(ma.TransformSpec(alpha, g, f, 1.0)) for g in GAMMAS]
        errs = [abs(v - target) for v in vals]
        ratios = [errs[0] / errs[1], errs[1] / errs[2]]
        extrap = ma.mathai_transform_limit(f, alpha, 1.0, GAMMAS).value
        rel = abs(extrap - target) / abs(target)
        if min(ratios) < 2 or rel > 1e-3:
            failures.append(f"alpha={alpha}: ratios={ratios[0]:.3g},{ratios[1]:.3g} extrapolated rel err={rel:.3g}")
    assert not failures, "; ".join(failures)


def test_criterion_8():
    x = np.array([0.3, 0.7, 1.0, 1.5, 2.5])
    for alpha, gamma in [(0.5, 2.0), (0.7, 2.0)]:
        h = mb.gml_integrand(alpha, gamma)
        assert mb.has_levy_structure(h, alpha)
        stripped = mb.strip_levy_structure(h, alpha)
        assert not mb.has_levy_structure(stripped, alpha)
        assert mb.with_levy_structure(stripped, alpha).isclose(h)
        want = alpha * gamma**gamma / math.gamma(gamma) * x ** (alpha * gamma - 1) * np.exp(-gamma * x**alpha)
        got = mb.residue_series_eval(stripped, x)
        assert np.max(np.abs(got - want) / want) <= 1e-10


def test_criterion_9():
    r = []
    for beta in (8.0, 32.0, 128.0):
        p = dn.PathwayParams(alpha=0.5, delta=1.0, eta=1.0, q=2.0, a=1.0, beta=beta)
        r.append(dn.pathway_limit_ratio(p, 1.0, 2.0))
    assert dn.pathway_target_ratio(p, 1.0, 2.0) == pytest.approx(1.5)
    gaps = [abs(v - 1.5) for v in r]
    assert gaps[0] > gaps[1] > gaps[2]


def test_criterion_10(tmp_path):
    for which in ("gengamma-ml", "frac-catalog-levy"):
        outs = []
        for i in range(2):
            path = tmp_path / f"{which}-{i}.csv"
            assert run(["verify-tables", "--which", which, "--output", str(path)]) == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] and outs[0]
