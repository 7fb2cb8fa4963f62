"""Lift of ordinary-space functions to alpha-level space (the "Mathai transform").

At finite ``gamma`` the transform is

    J_gamma(f)(x) = int_0^x (t/x) f2((x/t)^alpha) g_gamma(t) dt / t,   f2(y) = y f(y),

with ``g_gamma`` the generalized Mittag-Leffler density.  After ``t = x u``
this is ``int_0^1 u^(-alpha) f(u^(-alpha)) g_gamma(x u) du``, the form used
here.  The lift itself is the ``gamma -> inf`` limit, estimated from a
geometric ``gamma`` sequence by Richardson extrapolation.

The catalog (:data:`CATALOG`) maps each ordinary function to the alpha-level
function obtained by the termwise rule
``x^p -> Gamma(p+1) x^(alpha (p+1) - 1) / Gamma(alpha (p+1))``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .core_special import MLParams, compensated_sum, ml_prabhakar
from .densities import GMLDensity, density_eval
from .errors import DivergenceError, DomainError
from .mellin_barnes import MellinIntegrand, with_levy_structure

_GL_X, _GL_W = np.polynomial.legendre.leggauss(40)
MAX_PANELS = 4000
LIFT_EPS = 1e-16


@dataclass(frozen=True)
class CatalogFunction:
    """Ordinary-space function ``tag`` with its parameters."""

    tag: str
    params: tuple = ()

    def __post_init__(self):
        if self.tag not in CATALOG:
            raise DomainError(f"unknown catalog tag {self.tag!r}; known: {', '.join(CATALOG)}")
        entry = CATALOG[self.tag]
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        if len(self.params) != len(entry.param_names):
            raise DomainError(f"{self.tag} takes parameters {entry.param_names}")

    @property
    def entry(self) -> "CorrespondenceEntry":
        return CATALOG[self.tag]

    def __call__(self, y):
        return self.entry.ordinary(np.asarray(y, dtype=float), *self.params)

    def growth(self) -> float:
        """Exponent ``p`` with ``|f(y)| = O(y^p)`` as ``y -> inf``."""
        return self.entry.growth(*self.params)

    def lifted(self, alpha: float, x):
        return self.entry.lifted(alpha, np.asarray(x, dtype=float), *self.params)


@dataclass(frozen=True)
class TransformSpec:
    alpha: float
    gamma: float
    f: object  # CatalogFunction or a vectorised callable
    x: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise DomainError("the lift needs 0 < alpha < 1")
        if not self.gamma > 0:
            raise DomainError("gamma must be positive")
        if not self.x > 0:
            raise DomainError("x must be positive")
        if not (isinstance(self.f, CatalogFunction) or callable(self.f)):
            raise DomainError("f must be a catalog function or a callable")


# -- catalog ------------------------------------------------------------------


def _lifted_pfq(alpha, x, upper, lower):
    """``x^(alpha-1) sum_k prod(a)_k / prod(c)_k (-1)^k x^(alpha k) / Gamma(alpha k + alpha)``."""
    p, q = len(upper), len(lower)
    if p > q and alpha < 1:
        # (a)_k grows like k!, 1/Gamma(alpha k) only like 1/(alpha k)!
        raise DivergenceError("lifted series has zero radius of convergence for alpha < 1")
    x = np.atleast_1d(x)
    out = np.empty(x.shape)
    lx = np.log(x)
    K = 64
    while True:
        k = np.arange(K, dtype=float)
        log_c = -special.gammaln(alpha * k + alpha)
        sign = np.where(k % 2 == 1, -1.0, 1.0)
        for a in upper:
            log_c = log_c + special.gammaln(a + k) - special.gammaln(a)
        for c in lower:
            log_c = log_c - special.gammaln(c + k) + special.gammaln(c)
        terms = sign[None, :] * np.exp(log_c[None, :] + alpha * np.outer(lx, k))
        s = compensated_sum(terms)
        tail = np.max(np.abs(terms[:, -4:]), axis=1)
        if np.all(tail <= LIFT_EPS * np.abs(s)) or K >= 4096:
            break
        K *= 2
    out[:] = x ** (alpha - 1) * s
    return out


def _ml_row(alpha, x, rate):
    x = np.asarray(x, float)
    return x ** (alpha - 1) * ml_prabhakar(MLParams(alpha, alpha, 1.0), -rate * x**alpha)


def _gamma_row(alpha, x, eta, delta):
    x = np.asarray(x, float)
    lp = (alpha * eta - 1) * np.log(x) - eta * math.log(delta)
    return ml_prabhakar(MLParams(alpha, alpha * eta, eta), -(x**alpha) / delta, log_prefactor=lp)


def _f0f1(y, a):
    # 0F1(;a;-y) = Gamma(a) y^((1-a)/2) J_{a-1}(2 sqrt y); the series cancels badly for large y
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sqrt(y)
        v = special.gamma(a) * r ** (1 - a) * special.jv(a - 1, 2 * r)
    return np.where(y < 1e-8, 1.0 - y / a, v)


@dataclass(frozen=True)
class CorrespondenceEntry:
    tag: str
    ordinary_label: str
    lifted_label: str
    param_names: tuple
    ordinary: Callable = field(repr=False)
    lifted: Callable = field(repr=False)
    growth: Callable = field(repr=False)
    elementary: bool = True

    def describe(self) -> dict:
        return {
            "tag": self.tag,
            "ordinary": self.ordinary_label,
            "lifted": self.lifted_label,
            "params": list(self.param_names),
            "elementary": self.elementary,
        }


CATALOG: dict[str, CorrespondenceEntry] = {
    e.tag: e
    for e in [
        CorrespondenceEntry(
            "one", "1", "x^(alpha-1)/Gamma(alpha)", (),
            lambda y: np.ones_like(y),
            lambda a, x: x ** (a - 1) * special.rgamma(a),
            lambda: 0.0,
        ),
        CorrespondenceEntry(
            "x", "x", "x^(2 alpha-1)/Gamma(2 alpha)", (),
            lambda y: y,
            lambda a, x: x ** (2 * a - 1) * special.rgamma(2 * a),
            lambda: 1.0,
        ),
        CorrespondenceEntry(
            "exp", "exp(-x)", "x^(alpha-1) E_{alpha,alpha}(-x^alpha)", (),
            lambda y: np.exp(-y),
            lambda a, x: _ml_row(a, x, 1.0),
            lambda: -math.inf,
        ),
        CorrespondenceEntry(
            "exp-sum", "exp(-a x) exp(-b x)", "x^(alpha-1) E_{alpha,alpha}(-(a+b) x^alpha)", ("a", "b"),
            lambda y, a, b: np.exp(-a * y) * np.exp(-b * y),
            lambda al, x, a, b: _ml_row(al, x, a + b),
            lambda a, b: -math.inf,
        ),
        CorrespondenceEntry(
            "gamma-density",
            "x^(eta-1) exp(-x/delta) / (delta^eta Gamma(eta))",
            "x^(alpha eta-1) delta^(-eta) E^eta_{alpha,alpha eta}(-x^alpha/delta)",
            ("eta", "delta"),
            lambda y, eta, delta: np.exp(
                (eta - 1) * np.log(np.maximum(y, 1e-300)) - y / delta - eta * math.log(delta) - special.gammaln(eta)
            ),
            _gamma_row,
            lambda eta, delta: -math.inf,
        ),
        CorrespondenceEntry(
            "0f1", "0F1(;a;-x)", "x^(alpha-1) sum (-1)^k x^(alpha k) / ((a)_k Gamma(alpha k+alpha))", ("a",),
            _f0f1,
            lambda al, x, a: _lifted_pfq(al, x, [], [a]),
            lambda a: (1 - 2 * a) / 4,
            elementary=False,
        ),
        CorrespondenceEntry(
            "1f0", "1F0(a;;-x)", "x^(alpha-1) sum (a)_k (-1)^k x^(alpha k) / Gamma(alpha k+alpha)", ("a",),
            lambda y, a: (1 + y) ** (-a),
            lambda al, x, a: _lifted_pfq(al, x, [a], []),
            lambda a: -a,
        ),
        CorrespondenceEntry(
            "1f1", "1F1(a;b;-x)", "x^(alpha-1) sum (a)_k (-1)^k x^(alpha k) / ((b)_k Gamma(alpha k+alpha))", ("a", "b"),
            lambda y, a, b: special.hyp1f1(a, b, -y),
            lambda al, x, a, b: _lifted_pfq(al, x, [a], [b]),
            lambda a, b: -a,
            elementary=False,
        ),
        CorrespondenceEntry(
            "2f1", "2F1(a,b;c;-x)", "x^(alpha-1) sum (a)_k (b)_k (-1)^k x^(alpha k) / ((c)_k Gamma(alpha k+alpha))",
            ("a", "b", "c"),
            lambda y, a, b, c: special.hyp2f1(a, b, c, -y),
            lambda al, x, a, b, c: _lifted_pfq(al, x, [a, b], [c]),
            lambda a, b, c: -min(a, b),
            elementary=False,
        ),
    ]
}


def catalog_function(tag: str, *params) -> CatalogFunction:
    return CatalogFunction(tag, tuple(params))


def correspondence_eval(tag: str, params, alpha: float, x):
    """alpha-level counterpart of a catalog function at ``x > 0``."""
    f = CatalogFunction(tag, tuple(params))
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, float))
    if np.any(~(xa > 0)):
        raise DomainError("x must be positive")
    out = np.asarray(f.lifted(alpha, xa), dtype=float)
    return float(out[0]) if scalar else out


def correspondence_listing() -> list[dict]:
    return [e.describe() for e in CATALOG.values()]


# -- finite-gamma transform -----------------------------------------------------


def _gl(fun, lo: float, hi: float) -> float:
    half = 0.5 * (hi - lo)
    u = lo + half * (_GL_X + 1)
    return float(half * np.dot(_GL_W, fun(u)))


def _geometric_panels(fun, start: float, ratio: float) -> float:
    """``int`` of ``fun`` from ``start`` towards 0 (``ratio < 1``) or infinity
    (``ratio > 1``) over panels ``[start r^j, start r^(j+1)]``.

    Once successive panels shrink by a steady factor the integrand is in its
    power-law regime and the remaining geometric series is summed in closed
    form.  A factor that does not shrink means the integral diverges.
    """
    total = 0.0
    prev = None
    prev_rate = None
    a = start
    for _ in range(MAX_PANELS):
        b = a * ratio
        piece = _gl(fun, min(a, b), max(a, b))
        total += piece
        if piece == 0.0 and total != 0.0:
            return total
        if abs(piece) <= 1e-16 * abs(total):
            return total
        if prev not in (None, 0.0) and piece * prev > 0:
            rate = piece / prev
            if prev_rate is not None and abs(rate - prev_rate) <= 1e-6 * rate:
                if rate >= 1.0:
                    raise DivergenceError("integrand decays too slowly at the endpoint")
                return total + piece * rate / (1.0 - rate)
            prev_rate = rate
        prev = piece
        a = b
    raise DivergenceError("panel sum did not settle")


def _integrand(spec: TransformSpec):
    a, x = spec.alpha, spec.x
    dens = GMLDensity(a, spec.gamma)

    def fun(u):
        u = np.asarray(u, float)
        with np.errstate(over="ignore", under="ignore"):
            fu = np.asarray(spec.f(u ** (-a)), dtype=float)
        return u ** (-a) * fu * density_eval(dens, x * u)

    return fun


def _endpoint_exponent(fun) -> float:
    u = np.array([1e-7, 1e-6])
    v = np.abs(fun(u))
    if not np.all(np.isfinite(v)):
        raise DivergenceError("integrand is not finite near u = 0")
    if np.any(v == 0):
        return math.inf
    return math.log(v[1] / v[0]) / math.log(10.0)


def _gate(spec: TransformSpec, fun) -> None:
    a, g = spec.alpha, spec.gamma
    if isinstance(spec.f, CatalogFunction):
        p = spec.f.growth()
        if not a * g - a * (p + 1) > 0:
            raise DivergenceError(
                f"gamma={g} too small for {spec.f.tag}: need alpha*gamma > alpha*({p:g}+1)"
            )
    elif _endpoint_exponent(fun) <= -1:
        raise DivergenceError(f"gamma={g} too small: integrand is not integrable at u = 0")


def mathai_transform_finite(spec: TransformSpec) -> float:
    """``J_gamma(f)(x) = int_0^1 u^(-alpha) f(u^(-alpha)) g_gamma(x u) du``."""
    fun = _integrand(spec)
    _gate(spec, fun)
    return _geometric_panels(fun, 1.0, 0.5)


def full_range_transform(spec: TransformSpec) -> float:
    """Diagnostic variant ``alpha int_0^inf u^(-alpha) f(u^(-alpha)) g_gamma(x u) du``.

    Its ``gamma -> inf`` limit reproduces the catalog; the literal transform
    (upper limit 1, no factor alpha) does not.  Kept to document that gap.
    """
    fun = _integrand(spec)
    _gate(spec, fun)
    return spec.alpha * (_geometric_panels(fun, 1.0, 0.5) + _geometric_panels(fun, 1.0, 2.0))


@dataclass
class LimitResult:
    value: float
    error: float
    gammas: list
    values: list
    converged: bool
    target: float | None = None

    def rows(self):
        tgt = self.target
        return [(g, v, abs(v - tgt) if tgt is not None else math.nan) for g, v in zip(self.gammas, self.values)]


def richardson(gammas, values) -> tuple[float, float]:
    """Eliminate an ``A/gamma`` term from the last two members."""
    g1, g2 = gammas[-2], gammas[-1]
    j1, j2 = values[-2], values[-1]
    ext = (g2 * j2 - g1 * j1) / (g2 - g1)
    return ext, abs(ext - j2)


def mathai_transform_limit(f, alpha: float, x: float, gamma_seq, *, transform=mathai_transform_finite) -> LimitResult:
    """Finite-gamma values along ``gamma_seq`` and their extrapolated limit.

    A non-monotone difference sequence triggers a ``RuntimeWarning`` and
    ``converged = False``; it is never fatal.
    """
    gammas = [float(g) for g in gamma_seq]
    if len(gammas) < 3:
        raise DomainError("need at least three gamma values")
    if any(b <= a for a, b in zip(gammas, gammas[1:])):
        raise DomainError("gamma sequence must be ascending")
    values = [transform(TransformSpec(alpha, g, f, x)) for g in gammas]
    diffs = np.abs(np.diff(values))
    converged = bool(np.all(diffs[1:] < diffs[:-1]))
    if not converged:
        warnings.warn("finite-gamma sequence is not contracting", RuntimeWarning, stacklevel=2)
    ext, err = richardson(gammas, values)
    target = None
    if isinstance(f, CatalogFunction):
        try:
            target = float(f.lifted(alpha, np.array([x]))[0])
        except DivergenceError:
            target = None
    return LimitResult(ext, err, gammas, values, converged, target)


# -- Levy structure -----------------------------------------------------------------


def levy_structure_attach(mellin_stats: MellinIntegrand, alpha: float) -> MellinIntegrand:
    """Multiply by ``Gamma((1-s)/alpha) / (alpha Gamma(1-s))``."""
    return with_levy_structure(mellin_stats, alpha)
