"""Fractional relaxation equation ``N(x) - N0 f(x) = -rate * I^alpha N(x)``.

``I^alpha`` is the Riemann-Liouville integral
``(1/Gamma(alpha)) int_0^x (x-t)^(alpha-1) g(t) dt`` and ``rate = c^alpha``.
The solution is ``N = N0 f - N0 rate int_0^x K(x-t) f(t) dt`` with the
resolvent kernel ``K(t) = t^(alpha-1) E_{alpha,alpha}(-rate t^alpha)``.

Quadrature is product integration: the integrand is interpolated linearly
and integrated exactly against the ``(x-t)^(order-1)`` kernel, on a mesh
graded towards ``t = 0`` so that algebraic behaviour of ``f`` there costs
no accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable as _Fn, Union

import numpy as np
from scipy import special
from scipy.interpolate import CubicSpline

from .core_special import MLParams, ml_prabhakar
from .densities import Grid
from .errors import DomainError, SingularForcingError, UncataloguedForcingError

CATALOG_TOL = 1e-12
L_MAX = 400
MAX_GRADING = 8


# -- forcing terms ------------------------------------------------------------


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Linear:
    pass


@dataclass(frozen=True)
class ExpNeg:
    pass


@dataclass(frozen=True)
class ExpNegPowAlpha:
    """``exp(-(c x)^alpha)`` with the equation's ``alpha``."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError("c must be positive")


@dataclass(frozen=True)
class PowerOverGamma:
    """``x^(mu-1) / Gamma(mu)``."""

    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError("mu must be positive")


@dataclass(frozen=True)
class PrabhakarForcing:
    """``x^(mu-1) E^gamma_{alpha,mu}(-c^alpha x^alpha)``."""

    alpha: float
    mu: float
    gamma: float
    c: float = 1.0

    def __post_init__(self):
        if not (self.alpha > 0 and self.mu > 0 and self.gamma > 0 and self.c > 0):
            raise DomainError("Prabhakar forcing needs alpha, mu, gamma, c > 0")


@dataclass(frozen=True)
class LevyPower:
    """``x^(alpha-1) / Gamma(alpha)`` with the equation's ``alpha``."""


@dataclass(frozen=True)
class LevyPrabhakar:
    """``x^(alpha-1) E^gamma_{alpha,alpha}(-c^alpha x^alpha)`` with the equation's ``alpha``."""

    gamma: float
    c: float = 1.0

    def __post_init__(self):
        if not (self.gamma > 0 and self.c > 0):
            raise DomainError("gamma and c must be positive")


@dataclass(frozen=True)
class Callable:
    """Any vectorised function of ``x``; not in the catalog."""

    func: _Fn = field(compare=False)
    name: str = "callable"


ForcingSpec = Union[
    One, Linear, ExpNeg, ExpNegPowAlpha, PowerOverGamma, PrabhakarForcing, LevyPower, LevyPrabhakar, Callable
]


@dataclass(frozen=True)
class FracEqSpec:
    alpha: float
    rate: float
    n0: float
    forcing: ForcingSpec

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise DomainError("alpha must lie in (0, 1]")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise DomainError("rate must be positive")
        if not math.isfinite(self.n0):
            raise DomainError("N0 must be finite")

    @classmethod
    def from_c(cls, alpha: float, c: float, n0: float, forcing: ForcingSpec) -> "FracEqSpec":
        if not c > 0:
            raise DomainError("c must be positive")
        return cls(alpha, c**alpha, n0, forcing)

    @property
    def c(self) -> float:
        return self.rate ** (1.0 / self.alpha)


def forcing_eval(forcing: ForcingSpec, alpha: float, x) -> np.ndarray:
    """``f(x)`` for a forcing term; ``alpha`` is the equation's order."""
    x = np.asarray(x, dtype=float)
    if isinstance(forcing, One):
        return np.ones_like(x)
    if isinstance(forcing, Linear):
        return x.copy()
    if isinstance(forcing, ExpNeg):
        return np.exp(-x)
    if isinstance(forcing, ExpNegPowAlpha):
        return np.exp(-((forcing.c * x) ** alpha))
    if isinstance(forcing, PowerOverGamma):
        return x ** (forcing.mu - 1) * special.rgamma(forcing.mu)
    if isinstance(forcing, PrabhakarForcing):
        a = forcing.alpha
        e = ml_prabhakar(MLParams(a, forcing.mu, forcing.gamma), -(forcing.c**a) * x**a)
        return x ** (forcing.mu - 1) * e
    if isinstance(forcing, LevyPower):
        return x ** (alpha - 1) * special.rgamma(alpha)
    if isinstance(forcing, LevyPrabhakar):
        e = ml_prabhakar(MLParams(alpha, alpha, forcing.gamma), -(forcing.c**alpha) * x**alpha)
        return x ** (alpha - 1) * e
    if isinstance(forcing, Callable):
        return np.asarray(forcing.func(x), dtype=float)
    raise DomainError(f"unknown forcing {forcing!r}")


def forcing_tag(forcing: ForcingSpec) -> str:
    return {
        One: "one",
        Linear: "linear",
        ExpNeg: "expneg",
        ExpNegPowAlpha: "expneg-pow",
        PowerOverGamma: "power",
        PrabhakarForcing: "prabhakar",
        LevyPower: "levy-power",
        LevyPrabhakar: "levy-prabhakar",
        Callable: "callable",
    }[type(forcing)]


# -- product integration --------------------------------------------------------


@lru_cache(maxsize=64)
def _trapezoid_weights(order: float, n: int) -> np.ndarray:
    """Weights of ``int_0^1 (1-u)^(order-1) G(u) du`` for piecewise-linear ``G``
    on ``n`` equal steps (fractional trapezoid rule).

    The second differences of ``m^(order+1)`` are formed as
    ``m^(order+1) * (expm1(..) + expm1(..))`` to avoid cancellation at large m.
    """
    b = order
    h = 1.0 / n
    m = np.arange(n + 1, dtype=float)  # m = n - j
    w = np.empty(n + 1)
    mi = m[1:n]
    with np.errstate(divide="ignore"):
        lp = (b + 1) * np.log1p(1.0 / mi)
        lm = (b + 1) * np.log1p(-1.0 / mi)  # -inf at m = 1, where expm1 gives the exact -1
    w_mid = mi ** (b + 1) * (np.expm1(lp) + np.expm1(lm))
    w[1:n] = w_mid[::-1]  # w[j] corresponds to m = n - j
    nn = float(n)
    w[0] = (nn - 1) ** (b + 1) - (nn - b - 1) * nn**b
    w[n] = 1.0
    return w * h**b / (b * (b + 1))


def _grading(sigma: float, smooth_order: float) -> int:
    p = max(math.ceil(2.0 / (1.0 + sigma)), math.ceil(2.0 / smooth_order), 1)
    return min(p, MAX_GRADING)


def _probe_exponent(f, x: float) -> float:
    """Power of ``f(t) ~ t^sigma`` at the origin, estimated from two samples."""
    t = np.array([1e-9, 1e-8]) * x
    v = np.abs(np.asarray(f(t), dtype=float))
    if not np.all(np.isfinite(v)):
        raise SingularForcingError("function is not finite near the origin")
    if np.all(v == 0):
        return 1.0
    if np.any(v == 0):
        return 1.0 if v[0] == 0 else -1.0
    sigma = math.log(v[1] / v[0]) / math.log(10.0)
    if sigma <= -1 + 1e-6:
        raise SingularForcingError(f"function behaves like t^{sigma:.3g} at 0, not integrable")
    return max(min(sigma, 1.0), -1 + 1e-3)


def _graded_integral(g_rows, order: float, x: np.ndarray, n: int, p: int) -> np.ndarray:
    """``int_0^x (x-t)^(order-1) g(x, t) dt`` for each ``x``.

    ``g_rows(x, t)`` receives ``x`` of shape (m, 1) and ``t`` of shape (m, n+1).
    With ``t = x u^p``, ``(x-t)^(order-1) dt = x^order (1-u)^(order-1)
    B(u)^(order-1) p u^(p-1) du`` where ``B(u) = 1 + u + ... + u^(p-1)``.

    The rule is second order in ``1/n``; the same samples on every other
    node give the ``n/2`` rule, and one Richardson step removes the
    ``h^2`` term (``n`` is rounded up to even).
    """
    n += n % 2
    u = np.linspace(0.0, 1.0, n + 1)
    B = np.polynomial.polynomial.polyval(u, np.ones(p))
    jac = p * u ** (p - 1) * B ** (order - 1)
    w = _trapezoid_weights(order, n) * (4.0 / 3.0)
    w[::2] -= _trapezoid_weights(order, n // 2) / 3.0
    out = np.empty(x.shape)
    chunk = max(1, 32768 // (n + 1))
    for i in range(0, x.size, chunk):
        xs = x[i : i + chunk, None]
        t = xs * u[None, :] ** p
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = np.asarray(g_rows(xs, t), dtype=float) * jac[None, :]
        if p > 1:
            vals[:, 0] = 0.0  # u^(p-1) wins against the integrable singularity
        if not np.all(np.isfinite(vals)):
            raise SingularForcingError("non-finite sample of the integrand")
        out[i : i + chunk] = xs[:, 0] ** order * (vals @ w)
    return out


def _rl(f, order: float, x: np.ndarray, n_steps: int, smooth_order: float) -> np.ndarray:
    if order <= 0:
        raise DomainError("order must be positive")
    if n_steps < 8:
        raise DomainError("n_steps must be at least 8")
    sigma = _probe_exponent(f, float(np.max(x)))
    p = _grading(sigma, smooth_order)
    val = _graded_integral(lambda xs, t: f(t), order, x, n_steps, p)
    return val * special.rgamma(order)


def rl_fractional_integral(f, alpha: float, x, n_steps: int = 2048, *, smooth_order: float | None = None):
    """Riemann-Liouville integral ``I^alpha f(x)`` by graded product integration.

    ``f`` must accept numpy arrays.  ``smooth_order`` is the smallest power
    of ``t`` in the expansion of ``f`` at zero that is not an integer
    (defaults to ``min(alpha, 1)``); it sets the mesh grading.
    """
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(xa > 0)):
        raise DomainError("x must be positive")
    out = _rl(f, float(alpha), xa, int(n_steps), smooth_order or min(alpha, 1.0))
    return float(out[0]) if scalar else out


# -- closed-form catalog --------------------------------------------------------


def _ml(alpha, beta, gamma, z):
    return ml_prabhakar(MLParams(alpha, beta, gamma), z)


def _series_until_small(term, x: np.ndarray) -> np.ndarray:
    """``sum_k term(k)`` stopped once two successive terms fall below the tolerance."""
    total = np.zeros_like(x)
    comp = np.zeros_like(x)
    quiet = 0
    for k in range(L_MAX):
        t = term(k)
        y = t - comp
        s = total + y
        comp = (s - total) - y
        total = s
        if np.all(np.abs(t) <= CATALOG_TOL * np.maximum(np.abs(total), 1e-300)):
            quiet += 1
            if quiet == 2:
                return total
        else:
            quiet = 0
    raise DomainError("catalog series did not reach its tolerance; x too large")


def solve_catalog(spec: FracEqSpec):
    """Closed-form solution ``N(x)`` as a vectorised function."""
    a, lam, n0, f = spec.alpha, spec.rate, spec.n0, spec.forcing

    def arg(x):
        return -lam * x**a

    if isinstance(f, One):
        return lambda x: n0 * _ml(a, 1.0, 1.0, arg(np.asarray(x, float)))
    if isinstance(f, Linear):
        return lambda x: n0 * np.asarray(x, float) * _ml(a, 2.0, 1.0, arg(np.asarray(x, float)))
    if isinstance(f, ExpNeg):

        def n_expneg(x):
            x = np.asarray(x, float)
            z = arg(x)
            return n0 * _series_until_small(lambda k: (-x) ** k * _ml(a, k + 1.0, 1.0, z), x)

        return n_expneg
    if isinstance(f, ExpNegPowAlpha):
        cf = f.c

        def n_expneg_pow(x):
            x = np.asarray(x, float)
            z = arg(x)
            y = (cf * x) ** a

            def term(k):
                coef = math.exp(special.gammaln(a * k + 1) - special.gammaln(k + 1))
                return (-1) ** k * coef * y**k * _ml(a, a * k + 1.0, 1.0, z)

            return n0 * _series_until_small(term, x)

        return n_expneg_pow
    if isinstance(f, (PowerOverGamma, LevyPower)):
        mu = f.mu if isinstance(f, PowerOverGamma) else a
        return lambda x: n0 * np.asarray(x, float) ** (mu - 1) * _ml(a, mu, 1.0, arg(np.asarray(x, float)))
    if isinstance(f, (PrabhakarForcing, LevyPrabhakar)):
        fa = f.alpha if isinstance(f, PrabhakarForcing) else a
        mu = f.mu if isinstance(f, PrabhakarForcing) else a
        if abs(fa - a) > 1e-12 or abs(f.c**a - lam) > 1e-12 * lam:
            raise UncataloguedForcingError(
                "the Prabhakar row needs the forcing's alpha and c to match the equation"
            )
        g = f.gamma
        return lambda x: n0 * np.asarray(x, float) ** (mu - 1) * _ml(a, mu, g + 1.0, arg(np.asarray(x, float)))
    raise UncataloguedForcingError(f"no closed-form solution for {forcing_tag(f)} forcing")


# -- numeric solution -------------------------------------------------------------


def _split_index(alpha: float) -> int:
    """Number of leading kernel terms taken out as exact power laws, so the
    remainder kernel behaves like ``t^(order-1)`` with order >= 2.5."""
    return math.ceil(2.5 / alpha) - 1


def resolvent_convolution(spec: FracEqSpec, f, x: np.ndarray, n_steps: int = 2048) -> np.ndarray:
    """``int_0^x (x-t)^(alpha-1) E_{alpha,alpha}(-rate (x-t)^alpha) f(t) dt``.

    ``E_{alpha,alpha}(z) = sum_{k<m} z^k / Gamma(alpha k + alpha) + z^m E_{alpha, alpha(m+1)}(z)``:
    the leading terms are Riemann-Liouville integrals of orders ``alpha (k+1)``,
    the remainder is smooth enough for the same product rule.
    """
    a, r = spec.alpha, spec.rate
    m = _split_index(a)
    sigma = _probe_exponent(f, float(np.max(x)))
    p = _grading(sigma, a)
    total = np.zeros(x.shape)
    for k in range(m):
        order = a * (k + 1)
        part = _graded_integral(lambda xs, t: f(t), order, x, n_steps, p)
        total += (-r) ** k * special.rgamma(order) * part
    order = a * (m + 1)

    def rem(xs, t):
        return ml_prabhakar(MLParams(a, order, 1.0), -r * np.maximum(xs - t, 0.0) ** a) * f(t)

    total += (-r) ** m * _graded_integral(rem, order, x, n_steps, p)
    return total


def _as_function(spec: FracEqSpec):
    return lambda t: forcing_eval(spec.forcing, spec.alpha, t)


def solve_numeric(spec: FracEqSpec, grid: Grid, n_steps: int = 2048) -> np.ndarray:
    """``N0 f - N0 rate (K * f)`` sampled on the grid."""
    x = grid.points
    f = _as_function(spec)
    conv = resolvent_convolution(spec, f, x, n_steps)
    return spec.n0 * (f(x) - spec.rate * conv)


def neumann_series_solution(spec: FracEqSpec, x, terms: int = 20, n_steps: int = 2048) -> np.ndarray:
    """Truncated series ``N0 f + N0 sum_{k=1}^{terms} (-rate)^k I^(alpha k) f``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    f = _as_function(spec)
    out = f(x).astype(float)
    for k in range(1, terms + 1):
        out = out + (-spec.rate) ** k * _rl(f, spec.alpha * k, x, n_steps, spec.alpha)
    return spec.n0 * out


# -- residuals ------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualReport:
    max_residual: float
    scale: float
    residuals: np.ndarray = field(repr=False, compare=False)

    @property
    def relative(self) -> float:
        return self.max_residual / self.scale if self.scale > 0 else math.inf

    def passes(self, tol: float) -> bool:
        return self.max_residual <= tol * self.scale


def _sampled(xs: np.ndarray, ns: np.ndarray, alpha: float):
    """Cubic spline of samples in the variable ``x^alpha``.

    Catalog solutions are power series in ``x^alpha`` (times a fixed power
    of ``x`` at most), so this variable keeps the interpolant smooth down
    to ``t = 0``, where the spline is extrapolated.
    """
    xs = np.asarray(xs, float)
    spline = CubicSpline(xs**alpha, np.asarray(ns, float))
    return lambda t: spline(np.asarray(t, float) ** alpha)


def residual_check(N, spec: FracEqSpec, grid: Grid, n_steps: int = 2048) -> ResidualReport:
    """``max |N - N0 f + rate I^alpha N|`` over the grid.

    ``N`` is a vectorised function, or an array of samples on ``grid``
    (then interpolated, which limits the attainable residual).
    """
    x = grid.points
    if callable(N):
        fn = N
    else:
        fn = _sampled(x, np.asarray(N, float), spec.alpha)
    nx = np.asarray(fn(x), dtype=float)
    integral = _rl(fn, spec.alpha, x, n_steps, spec.alpha)
    res = nx - spec.n0 * forcing_eval(spec.forcing, spec.alpha, x) + spec.rate * integral
    return ResidualReport(float(np.max(np.abs(res))), float(np.max(np.abs(nx))), res)


def gml_equation_check(alpha: float, gamma: float, grid: Grid, n_steps: int = 2048) -> ResidualReport:
    """Residual of ``N - f = -gamma I^alpha N`` for the GML density
    ``N = x^(alpha gamma - 1) gamma^gamma E^gamma_{alpha, alpha gamma}(-gamma x^alpha)``
    with ``f`` the same expression at Prabhakar index ``gamma - 1``.
    """
    if not gamma >= 1:
        raise DomainError("gamma >= 1 keeps the forcing's Prabhakar index non-negative")
    a, g = alpha, gamma
    lg = g * math.log(g)

    def density(t, index):
        t = np.asarray(t, float)
        with np.errstate(divide="ignore"):
            lp = (a * g - 1) * np.log(t) + lg
        return ml_prabhakar(MLParams(a, a * g, index), -g * t**a, log_prefactor=lp)

    forcing = Callable(lambda t: density(t, g - 1), "gml-forcing")
    spec = FracEqSpec(a, g, 1.0, forcing)
    return residual_check(lambda t: density(t, g), spec, grid, n_steps)


def wrong_solution(spec: FracEqSpec):
    """Negative control: the classical ``N0 exp(-rate x)``, right only at ``alpha = 1``."""
    return lambda x: spec.n0 * np.exp(-spec.rate * np.asarray(x, float))
