"""Densities on the positive half-line tied to Mittag-Leffler functions.

The family: gamma, generalized Mittag-Leffler (GML), generalized gamma,
Weibull and the one-sided Levy (positive stable) law.  Besides pointwise
evaluation the module provides closed-form and numeric Laplace/Mellin
transforms, the gamma -> infinity approach of GML to Levy, and the pathway
ratio study.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import integrate, special

from .core_special import MLParams, ml_prabhakar
from .errors import DomainError, QuadratureError, StripError
from .mellin_barnes import auto_contour_eval, levy_integrand


def _positive(name: str, v: float) -> float:
    v = float(v)
    if not (v > 0 and math.isfinite(v)):
        raise DomainError(f"{name} must be positive and finite, got {v}")
    return v


@dataclass(frozen=True)
class GammaDensity:
    """``gamma^gamma x^(gamma-1) exp(-gamma x) / Gamma(gamma)`` (mean one)."""

    gamma: float

    def __post_init__(self):
        _positive("gamma", self.gamma)


@dataclass(frozen=True)
class GMLDensity:
    """``x^(alpha gamma - 1) gamma^gamma E^gamma_{alpha, alpha gamma}(-gamma x^alpha)``.

    ``alpha = 1`` is accepted and reduces to :class:`GammaDensity`.
    """

    alpha: float
    gamma: float

    def __post_init__(self):
        _positive("gamma", self.gamma)
        if not 0 < self.alpha <= 1:
            raise DomainError("GML density needs 0 < alpha <= 1")


@dataclass(frozen=True)
class GenGammaDensity:
    """``alpha gamma^gamma / Gamma(gamma) x^(alpha gamma - 1) exp(-gamma x^alpha)``."""

    alpha: float
    gamma: float

    def __post_init__(self):
        _positive("alpha", self.alpha)
        _positive("gamma", self.gamma)


@dataclass(frozen=True)
class WeibullDensity:
    """``delta b x^(delta-1) exp(-b x^delta)``."""

    delta: float
    b: float

    def __post_init__(self):
        _positive("delta", self.delta)
        _positive("b", self.b)


@dataclass(frozen=True)
class LevyDensity:
    """One-sided stable law with Laplace transform ``exp(-s^alpha)``."""

    alpha: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError("Levy density needs 0 < alpha < 1")


DensitySpec = Union[GammaDensity, GMLDensity, GenGammaDensity, WeibullDensity, LevyDensity]


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    n: int
    spacing: str = "uniform"

    def __post_init__(self):
        if not (0 < self.x_min < self.x_max and math.isfinite(self.x_max)):
            raise DomainError("grid needs 0 < x_min < x_max < inf")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError("grid needs n >= 2 points")
        if self.spacing not in ("uniform", "log"):
            raise DomainError("spacing is 'uniform' or 'log'")

    @property
    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.x_min, self.x_max, self.n)
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass(frozen=True)
class PathwayParams:
    alpha: float
    delta: float
    eta: float
    q: float
    a: float
    beta: float
    x: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "delta", "eta", "a", "beta", "x"):
            _positive(name, getattr(self, name))
        if not self.q > 1:
            raise DomainError("pathway parameter q must exceed 1")


# -- pointwise evaluation ----------------------------------------------------


def _log_smooth(d: DensitySpec, x: np.ndarray) -> tuple[float, np.ndarray]:
    """Split ``f(x) = x^p0 * h(x)`` and return ``(p0, h(x))``.

    ``h`` is bounded near zero, which lets the quadrature treat the
    algebraic endpoint behaviour exactly.  For the Levy law ``p0 = 0``.
    """
    if isinstance(d, GammaDensity):
        g = d.gamma
        return g - 1, np.exp(g * math.log(g) - g * x - special.gammaln(g))
    if isinstance(d, GMLDensity):
        a, g = d.alpha, d.gamma
        h = ml_prabhakar(MLParams(a, a * g, g), -g * x**a, log_prefactor=g * math.log(g))
        return a * g - 1, np.asarray(h, dtype=float)
    if isinstance(d, GenGammaDensity):
        a, g = d.alpha, d.gamma
        return a * g - 1, np.exp(math.log(a) + g * math.log(g) - special.gammaln(g) - g * x**a)
    if isinstance(d, WeibullDensity):
        return d.delta - 1, d.delta * d.b * np.exp(-d.b * x**d.delta)
    if isinstance(d, LevyDensity):
        return 0.0, np.asarray(auto_contour_eval(levy_integrand(d.alpha), x), dtype=float)
    raise DomainError(f"unknown density {d!r}")


def density_eval(d: DensitySpec, x):
    """Density value at ``x``; zero for ``x <= 0``."""
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.zeros(x.shape)
    pos = x > 0
    if np.any(pos):
        xp = x[pos]
        if isinstance(d, GMLDensity):
            # gamma^gamma E(...) alone can overflow for large gamma; keep the power in log space
            a, g = d.alpha, d.gamma
            lp = (a * g - 1) * np.log(xp) + g * math.log(g)
            out[pos] = ml_prabhakar(MLParams(a, a * g, g), -g * xp**a, log_prefactor=lp)
        else:
            p0, h = _log_smooth(d, xp)
            out[pos] = xp**p0 * h
    return float(out[0]) if scalar else out


# -- transforms ----------------------------------------------------------------


def laplace_closed(d: DensitySpec, s: float) -> float:
    if s < 0:
        raise DomainError("Laplace variable must be >= 0")
    if isinstance(d, GammaDensity):
        return (1 + s / d.gamma) ** (-d.gamma)
    if isinstance(d, GMLDensity):
        return (1 + s**d.alpha / d.gamma) ** (-d.gamma)
    if isinstance(d, LevyDensity):
        return math.exp(-(s**d.alpha))
    raise DomainError(f"no closed-form Laplace transform for {type(d).__name__}")


def _tail_coefficients(d: DensitySpec, kmax: int = 60) -> tuple[float, np.ndarray]:
    """Coefficients of ``f(x) ~ sum_{k>=1} c_k x^(-1 - alpha k)`` as x -> inf.

    They come from the right poles of the Levy factor.  For the Levy law the
    series converges; for GML it is asymptotic and carries ``(gamma)_k / gamma^k``.
    """
    a = d.alpha
    k = np.arange(1, kmax + 1, dtype=float)
    # 1/Gamma(-alpha k) = -alpha k / Gamma(1 - alpha k), finite at integer alpha k
    log_c = -special.gammaln(k + 1)
    c = (-1.0) ** k * np.exp(log_c) * special.rgamma(-a * k)
    if isinstance(d, GMLDensity):
        g = d.gamma
        c = c * np.exp(special.gammaln(g + k) - special.gammaln(g) - k * math.log(g))
    return a, c


def _tail_moment(d: DensitySpec, X: float, m: float) -> float:
    """``int_X^inf x^(m-1) f(x) dx`` from the algebraic tail expansion."""
    a, c = _tail_coefficients(d)
    k = np.arange(1, c.size + 1)
    terms = c * X ** (m - 1 - a * k) / (1 + a * k - m)
    mag = np.abs(terms)
    # asymptotic series: stop at the smallest term
    nz = np.flatnonzero(mag > 0)
    stop = c.size
    for i in range(1, nz.size):
        if mag[nz[i]] > mag[nz[i - 1]]:
            stop = nz[i]
            break
    return float(math.fsum(terms[:stop]))


def _heavy_tailed(d: DensitySpec) -> bool:
    return isinstance(d, LevyDensity) or (isinstance(d, GMLDensity) and d.alpha < 1)


def _moment_integral(d: DensitySpec, m: float, sigma: float, rtol: float = 1e-11) -> float:
    """``int_0^inf x^(m-1) exp(-sigma x) f(x) dx``.

    ``[0, 1]`` is handled by QAWS with the exact algebraic weight
    ``x^(p0 + m - 1)``; beyond, geometric panels run until they stop
    contributing, or for heavy tails at ``sigma = 0`` up to a cut-off after
    which the tail expansion takes over.
    """
    p0, _ = _log_smooth(d, np.array([1.0]))
    expo = p0 + m - 1
    if expo <= -1:
        raise DomainError("moment integral diverges at the origin")

    def smooth(x):
        return float(_log_smooth(d, np.array([x]))[1][0]) * math.exp(-sigma * x)

    def full(x):
        return x ** (m - 1) * float(density_eval(d, x)) * math.exp(-sigma * x)

    head, err = integrate.quad(smooth, 0.0, 1.0, weight="alg", wvar=(expo, 0.0), epsabs=0, epsrel=rtol, limit=200)
    total = head
    heavy = _heavy_tailed(d) and sigma == 0
    x_cut = math.inf
    if heavy:
        # the GML expansion is only asymptotic, and worse for small gamma
        scale = 20.0 * (1 + 1 / d.gamma) ** 2 if isinstance(d, GMLDensity) else 20.0
        x_cut = scale ** (1.0 / d.alpha)
    if heavy and m >= 1 + d.alpha:
        raise DomainError("moment diverges at infinity for this heavy-tailed law")
    lo = 1.0
    for _ in range(400):
        hi = min(2 * lo, x_cut)
        piece, err = integrate.quad(full, lo, hi, epsabs=0, epsrel=rtol, limit=200)
        total += piece
        lo = hi
        if lo >= x_cut:
            return total + _tail_moment(d, x_cut, m)
        if lo > 8 and abs(piece) < 1e-16 * abs(total):
            return total
    raise QuadratureError("moment integral did not settle")


def laplace_numeric(d: DensitySpec, s: float) -> float:
    """``int_0^inf exp(-s x) f(x) dx`` by quadrature."""
    if s < 0:
        raise DomainError("Laplace variable must be >= 0")
    return _moment_integral(d, 1.0, float(s))


def mellin_numeric(d: DensitySpec, s: float) -> float:
    """``int_0^inf x^(s-1) f(x) dx`` by quadrature."""
    return _moment_integral(d, float(s), 0.0)


def normalization(d: DensitySpec) -> float:
    return laplace_numeric(d, 0.0)


def mellin_closed_gml(alpha: float, gamma: float, s: float, *, strict: bool = True) -> float:
    """Closed-form Mellin transform of the GML density.

    ``Gamma(gamma + (s-1)/alpha) Gamma((1-s)/alpha) gamma^((1-s)/alpha)
    / (alpha Gamma(gamma) Gamma(1-s))``.  With ``strict`` the argument must
    satisfy ``0 < s < alpha < 1``; otherwise any ``s`` with
    ``1 - alpha gamma < s <= 1`` is accepted (``s = 1`` gives the mass, 1).
    """
    if strict and not (0 < s < alpha < 1):
        raise StripError(f"need 0 < s < alpha < 1, got s={s}, alpha={alpha}")
    if not (gamma + (s - 1) / alpha > 0 and s <= 1):
        raise StripError(f"s={s} is outside the Mellin strip")
    lead = special.gammaln(gamma + (s - 1) / alpha) - special.gammaln(gamma) + (1 - s) / alpha * math.log(gamma)
    if s == 1:
        levy = 0.0
    else:
        levy = special.gammaln((1 - s) / alpha) - math.log(alpha) - special.gammaln(1 - s)
    return math.exp(lead + levy)


def gengamma_redundancy_check(alpha: float, gamma: float, s: float) -> float:
    """``Gamma(gamma + (s-1)/alpha) gamma^((1-s)/alpha) / Gamma(gamma)``.

    This is the Mellin transform of the generalized gamma density; it tends
    to one as ``gamma -> inf`` for fixed ``s``.
    """
    arg = gamma + (s - 1) / alpha
    if not arg > 0:
        raise DomainError(f"gamma + (s-1)/alpha = {arg} must be positive")
    return math.exp(special.gammaln(arg) - special.gammaln(gamma) + (1 - s) / alpha * math.log(gamma))


# -- limit studies --------------------------------------------------------------


def levy_limit_study(alpha: float, gamma_list, grid: Grid) -> list[tuple[float, float]]:
    """Rows ``(gamma, sup_x |GML(alpha, gamma) - Levy(alpha)|)`` over the grid."""
    gammas = [float(g) for g in gamma_list]
    if any(g <= 1 for g in gammas):
        raise DomainError("limit study needs every gamma > 1")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise DomainError("gamma list must be strictly ascending")
    x = grid.points
    levy = density_eval(LevyDensity(alpha), x)
    return [(g, float(np.max(np.abs(density_eval(GMLDensity(alpha, g), x) - levy)))) for g in gammas]


def laplace_limit_gap(alpha: float, gamma: float, s: float = 1.0) -> float:
    """``|(1 + s^alpha/gamma)^(-gamma) - exp(-s^alpha)|``."""
    return abs(laplace_closed(GMLDensity(alpha, gamma), s) - laplace_closed(LevyDensity(alpha), s))


def _pathway_F(p: PathwayParams, x: float) -> float:
    ml = MLParams(p.alpha, p.beta, p.eta / (p.q - 1))
    z = -p.a * (p.q - 1) * x**p.delta * p.beta**p.alpha
    # the bare value is ~1/Gamma(beta); lift it back to order one
    return float(ml_prabhakar(ml, z, log_prefactor=special.gammaln(p.beta)))


def pathway_limit_ratio(p: PathwayParams, x1: float, x2: float) -> float:
    """``F(x1; beta) / F(x2; beta)`` with ``F(x; beta) = E^{eta/(q-1)}_{alpha,beta}(-a (q-1) x^delta beta^alpha)``.

    The ratio removes the unknown normalising constant; its large-``beta``
    limit is :func:`pathway_target_ratio`.
    """
    _positive("x1", x1)
    _positive("x2", x2)
    if x1 == x2:
        return 1.0
    return _pathway_F(p, x1) / _pathway_F(p, x2)


def pathway_target_ratio(p: PathwayParams, x1: float, x2: float) -> float:
    e = -p.eta / (p.q - 1)
    k = p.a * (p.q - 1)
    return ((1 + k * x1**p.delta) / (1 + k * x2**p.delta)) ** e


# -- generalized gamma <-> ML table ----------------------------------------------


@dataclass(frozen=True)
class PairRow:
    label: str
    gengamma: GenGammaDensity
    rate: float  # the table's delta; 1 and gamma for the first two rows
    shape: float

    def ml_density(self, x):
        a, eta, delta = self.gengamma.alpha, self.shape, self.rate
        x = np.asarray(x, dtype=float)
        lp = (a * eta - 1) * np.log(x) + eta * math.log(delta)
        return ml_prabhakar(MLParams(a, a * eta, eta), -delta * x**a, log_prefactor=lp)

    def gengamma_density(self, x):
        a, eta, delta = self.gengamma.alpha, self.shape, self.rate
        x = np.asarray(x, dtype=float)
        return np.exp(math.log(a) + eta * math.log(delta) - special.gammaln(eta) + (a * eta - 1) * np.log(x) - delta * x**a)


def gengamma_ml_rows(alpha: float, gamma: float, eta: float = 1.5, delta: float = 2.0) -> list[PairRow]:
    """The three generalized-gamma / ML density pairs."""
    return [
        PairRow("weibull", GenGammaDensity(alpha, 1.0), 1.0, 1.0),
        PairRow("gengamma", GenGammaDensity(alpha, gamma), gamma, gamma),
        PairRow("gengamma-scaled", GenGammaDensity(alpha, eta), delta, eta),
    ]


def _integrate_positive(fun, p0: float, rtol: float = 1e-11) -> float:
    """``int_0^inf x^p0 fun(x) dx`` for light-tailed ``fun``."""
    total, _ = integrate.quad(fun, 0.0, 1.0, weight="alg", wvar=(p0, 0.0), epsabs=0, epsrel=rtol, limit=200)
    lo = 1.0
    for _ in range(200):
        piece, _ = integrate.quad(lambda x: x**p0 * fun(x), lo, 2 * lo, epsabs=0, epsrel=rtol, limit=200)
        total += piece
        lo *= 2
        if lo > 8 and abs(piece) < 1e-16 * abs(total):
            return total
    raise QuadratureError("integral did not settle")


def pair_laplace(row: PairRow, s: float) -> tuple[float, float]:
    """Laplace transform of the ML member and the Levy-subordinated Laplace
    transform ``int g(y) exp(-(s y)^alpha) dy`` of the generalized gamma member.

    The ML member is the law of ``L * Y`` with ``L`` Levy and ``Y`` generalized
    gamma, so the two numbers agree; the plain Laplace transforms do not.
    """
    a, eta, delta = row.gengamma.alpha, row.shape, row.rate
    p0 = a * eta - 1

    def ml_smooth(x):
        h = ml_prabhakar(MLParams(a, a * eta, eta), -delta * x**a, log_prefactor=eta * math.log(delta))
        return float(h) * math.exp(-s * x)

    def gg_smooth(y):
        return math.exp(math.log(a) + eta * math.log(delta) - special.gammaln(eta) - delta * y**a - (s * y) ** a)

    return _integrate_positive(ml_smooth, p0), _integrate_positive(gg_smooth, p0)
