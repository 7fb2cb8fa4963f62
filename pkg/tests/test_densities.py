import math

import numpy as np
import pytest
from scipy import integrate

from fraclevy import densities as dn
from fraclevy.errors import DomainError
from oracles import GML_DENSITY

# sup-distance column of the alpha = 0.5 limit study on [0.2, 5], n = 50,
# frozen from the first run of this implementation
LIMIT_STUDY_GOLDEN = [
    (4.0, 0.1356),
    (16.0, 0.04524),
    (64.0, 0.01251),
    (256.0, 0.003216),
]


def levy_half(x):
    x = np.asarray(x, float)
    return x**-1.5 * np.exp(-0.25 / x) / (2 * math.sqrt(math.pi))


@pytest.mark.parametrize(
    "d, expected",
    [
        (dn.GammaDensity(1.0), math.exp(-1)),
        (dn.GMLDensity(1.0, 2.0), 4 * math.exp(-2)),
        (dn.LevyDensity(0.5), 0.21969564473386122),
        (dn.WeibullDensity(2.0, 1.0), 2 * math.exp(-1)),
    ],
)
def test_density_examples(d, expected):
    assert dn.density_eval(d, 1.0) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("case", sorted(GML_DENSITY))
def test_gml_density_against_mpmath(case):
    a, g, x = case
    assert dn.density_eval(dn.GMLDensity(a, g), x) == pytest.approx(GML_DENSITY[case], rel=1e-12)


def test_gml_alpha_one_is_gamma():
    x = np.linspace(0.1, 10, 60)
    for g in (0.5, 2.0, 7.0):
        a = dn.density_eval(dn.GMLDensity(1.0, g), x)
        b = dn.density_eval(dn.GammaDensity(g), x)
        assert np.max(np.abs(a - b) / b) <= 1e-12


def test_gengamma_alpha_one_is_gamma():
    x = np.linspace(0.1, 10, 60)
    a = dn.density_eval(dn.GenGammaDensity(1.0, 3.0), x)
    b = dn.density_eval(dn.GammaDensity(3.0), x)
    assert np.allclose(a, b, rtol=1e-13)


def test_gml_large_gamma_does_not_overflow():
    v = dn.density_eval(dn.GMLDensity(0.5, 256.0), np.array([0.5, 1.0, 2.0]))
    assert np.all(np.isfinite(v)) and np.all(v > 0)


@pytest.mark.parametrize(
    "d",
    [
        dn.GammaDensity(0.5), dn.GammaDensity(2.0), dn.GammaDensity(9.0),
        dn.GMLDensity(0.5, 2.0), dn.GMLDensity(0.7, 3.0), dn.GMLDensity(0.9, 0.5),
        dn.GenGammaDensity(0.5, 2.0), dn.GenGammaDensity(1.5, 0.7), dn.GenGammaDensity(3.0, 4.0),
        dn.WeibullDensity(0.7, 1.0), dn.WeibullDensity(2.0, 3.0), dn.WeibullDensity(5.0, 0.5),
        dn.LevyDensity(0.3), dn.LevyDensity(0.5), dn.LevyDensity(0.8),
    ],
    ids=repr,
)
def test_normalization(d):
    assert dn.normalization(d) == pytest.approx(1.0, abs=1e-6)


def test_levy_half_normalization_against_quad():
    # independent check: the closed form integrates to 1 with scipy alone
    v = integrate.quad(levy_half, 0, 1)[0] + integrate.quad(levy_half, 1, np.inf, limit=200)[0]
    assert v == pytest.approx(1.0, abs=1e-8)
    assert dn.normalization(dn.LevyDensity(0.5)) == pytest.approx(v, abs=1e-8)


@pytest.mark.parametrize(
    "d, s, expected",
    [
        (dn.GammaDensity(2.0), 1.0, 1.5**-2),
        (dn.GMLDensity(0.5, 2.0), 1.0, 1.5**-2),
        (dn.LevyDensity(0.5), 1.0, math.exp(-1)),
    ],
)
def test_laplace_closed_examples(d, s, expected):
    assert dn.laplace_closed(d, s) == pytest.approx(expected, rel=1e-14)


def test_laplace_closed_domain():
    with pytest.raises(DomainError):
        dn.laplace_closed(dn.WeibullDensity(2.0, 1.0), 1.0)


@pytest.mark.parametrize(
    "d, s",
    [
        (dn.GammaDensity(1.0), 0.0),
        (dn.GammaDensity(3.0), 0.7),
        (dn.GMLDensity(0.7, 2.0), 1.0),
        (dn.GMLDensity(0.5, 2.0), 0.5),
        (dn.GMLDensity(0.3, 5.0), 2.0),
        (dn.LevyDensity(0.5), 2.0),
        (dn.LevyDensity(0.8), 0.5),
    ],
    ids=repr,
)
def test_laplace_numeric_matches_closed(d, s):
    assert dn.laplace_numeric(d, s) == pytest.approx(dn.laplace_closed(d, s), rel=1e-6)


def test_levy_laplace_example():
    assert dn.laplace_numeric(dn.LevyDensity(0.5), 2.0) == pytest.approx(0.2431167344342142, rel=1e-8)


@pytest.mark.parametrize("alpha, gamma", [(0.5, 2.0), (0.7, 3.0), (0.4, 3.0)])
def test_mellin_closed_matches_numeric(alpha, gamma):
    for s in (0.25 * alpha, 0.5 * alpha, 0.75 * alpha):
        num = dn.mellin_numeric(dn.GMLDensity(alpha, gamma), s)
        assert num == pytest.approx(dn.mellin_closed_gml(alpha, gamma, s), rel=1e-6)


def test_mellin_closed_strip():
    with pytest.raises(DomainError):
        dn.mellin_closed_gml(0.5, 2.0, 0.6)
    with pytest.raises(DomainError):
        dn.mellin_closed_gml(0.5, 2.0, 0.0)
    assert dn.mellin_closed_gml(0.5, 2.0, 1.0, strict=False) == pytest.approx(1.0)
    # below 1 - alpha gamma the moment itself diverges
    with pytest.raises(DomainError):
        dn.mellin_closed_gml(0.4, 1.0, 0.1)


def test_gengamma_redundancy():
    assert dn.gengamma_redundancy_check(0.5, 7.0, 1.0) == pytest.approx(1.0, abs=1e-14)
    seq = [dn.gengamma_redundancy_check(0.5, g, 0.25) for g in (10.0, 100.0, 1000.0)]
    gaps = [abs(v - 1) for v in seq]
    # O(1/gamma): one decade in gamma buys about one decade in the gap
    assert gaps[0] / gaps[1] >= 9 and gaps[1] / gaps[2] >= 9


def test_limit_study_golden_and_monotone():
    rows = dn.levy_limit_study(0.5, [4, 16, 64, 256], dn.Grid(0.2, 5.0, 50))
    dist = [d for _, d in rows]
    assert all(b < a for a, b in zip(dist, dist[1:]))
    for (g, d), (g0, d0) in zip(rows, LIMIT_STUDY_GOLDEN):
        assert g == g0
        assert d == pytest.approx(d0, rel=1e-3)


def test_limit_study_single_gamma():
    assert len(dn.levy_limit_study(0.5, [16], dn.Grid(0.2, 5.0, 10))) == 1


def test_limit_study_other_alpha():
    rows = dn.levy_limit_study(0.7, [4, 16, 64], dn.Grid(0.2, 5.0, 25))
    dist = [d for _, d in rows]
    assert dist[0] > dist[1] > dist[2]


def test_laplace_limit_gap_rate():
    gaps = [dn.laplace_limit_gap(0.5, g, 1.0) for g in (4, 16, 64, 256)]
    ratios = [a / b for a, b in zip(gaps, gaps[1:])]
    assert min(ratios) >= 3.0


def test_pathway_ratio_examples():
    p = dn.PathwayParams(alpha=0.5, delta=1.0, eta=1.0, q=2.0, a=1.0, beta=8.0)
    assert dn.pathway_limit_ratio(p, 1.3, 1.3) == 1.0
    assert dn.pathway_target_ratio(p, 1.0, 2.0) == pytest.approx(1.5)


def test_pathway_ratio_converges_monotonically():
    r = []
    for beta in (8.0, 32.0, 128.0):
        p = dn.PathwayParams(alpha=0.5, delta=1.0, eta=1.0, q=2.0, a=1.0, beta=beta)
        r.append(dn.pathway_limit_ratio(p, 1.0, 2.0))
    gaps = [abs(v - 1.5) for v in r]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 2e-3


def test_pathway_params_validation():
    with pytest.raises(DomainError):
        dn.PathwayParams(alpha=0.5, delta=1.0, eta=1.0, q=1.0, a=1.0, beta=8.0)


@pytest.mark.parametrize("alpha, gamma", [(0.5, 2.0), (0.7, 1.5)])
def test_gengamma_ml_table_transform_agreement(alpha, gamma):
    for row in dn.gengamma_ml_rows(alpha, gamma):
        for s in (0.5, 1.0, 2.0):
            ml, sub = dn.pair_laplace(row, s)
            assert sub == pytest.approx(ml, rel=1e-6)


def test_spec_validation():
    with pytest.raises(DomainError):
        dn.GMLDensity(1.2, 2.0)
    with pytest.raises(DomainError):
        dn.LevyDensity(1.0)
    with pytest.raises(DomainError):
        dn.GammaDensity(-1.0)
    with pytest.raises(DomainError):
        dn.Grid(1.0, 0.5, 10)
    with pytest.raises(DomainError):
        dn.Grid(0.1, 1.0, 10, "cubic")


def test_grid_points():
    assert np.allclose(dn.Grid(1.0, 100.0, 3, "log").points, [1.0, 10.0, 100.0])
    assert np.allclose(dn.Grid(1.0, 3.0, 3).points, [1.0, 2.0, 3.0])


def test_gengamma_ml_plain_laplace_differs():
    # the table pairs the two densities through Levy subordination; their
    # ordinary Laplace transforms are visibly different
    for row in dn.gengamma_ml_rows(0.5, 2.0):
        plain = integrate.quad(lambda x: row.gengamma_density(np.array([x]))[0] * math.exp(-x), 0, np.inf, limit=200)[0]
        ml, _ = dn.pair_laplace(row, 1.0)
        assert abs(plain - ml) / ml > 0.05
