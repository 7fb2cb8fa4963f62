"""Scalar special-function kernels: log-gamma, Pochhammer symbols, the
three-parameter (Prabhakar) Mittag-Leffler function and generalized
hypergeometric series.

All functions are pure.  Power series are accumulated with a vectorized
Neumaier loop (:func:`compensated_sum`) so the summation itself adds no
cancellation on top of what the alternating terms already carry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, PoleError, SeriesConvergenceError

EPS_ML = 1e-16
K_MAX = 10_000
# Hard ceiling for the series route on the negative real axis.
Z0 = 50.0
# Below Z0 the series is still abandoned for the contour once its estimated
# rounding error relative to the sum exceeds this.
SERIES_ROUNDING_TOL = 1e-11


def _nonpositive_integer(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return (x <= 0) & (x == np.round(x))


def ln_gamma(z):
    """Natural logarithm of the gamma function.

    Real input gives ``log|Gamma(z)|``; complex input gives the principal
    branch of ``log Gamma(z)``.  Raises :class:`PoleError` at non-positive
    integers.
    """
    arr = np.asarray(z)
    if np.iscomplexobj(arr):
        if np.any((arr.imag == 0) & _nonpositive_integer(arr.real)):
            raise PoleError(f"Gamma has a pole at {z!r}")
        out = special.loggamma(arr)
    else:
        arr = arr.astype(float)
        if np.any(_nonpositive_integer(arr)):
            raise PoleError(f"Gamma has a pole at {z!r}")
        out = special.gammaln(arr)
    return out[()] if np.ndim(out) == 0 else out


def compensated_sum(terms, axis: int = -1):
    """Neumaier-compensated sum of ``terms`` along ``axis``.

    Vectorized over the remaining axes; complex input is summed
    componentwise.
    """
    terms = np.asarray(terms)
    if np.iscomplexobj(terms):
        return compensated_sum(terms.real, axis) + 1j * compensated_sum(terms.imag, axis)
    terms = np.moveaxis(terms.astype(float), axis, -1)
    s = np.zeros(terms.shape[:-1])
    c = np.zeros(terms.shape[:-1])
    with np.errstate(invalid="ignore"):
        for j in range(terms.shape[-1]):
            t = terms[..., j]
            u = s + t
            c += np.where(np.abs(s) >= np.abs(t), (s - u) + t, (t - u) + s)
            s = u
        out = s + c
    # inf - inf in the correction term is meaningless; keep the raw sum.
    out = np.where(np.isfinite(out), out, s)
    return out[()] if out.ndim == 0 else out


def pochhammer(b: float, k: int) -> float:
    """Rising factorial ``(b)_k = b (b+1) ... (b+k-1)`` with ``(b)_0 = 1``.

    Uses the gamma ratio for ``b > 0`` and the direct product otherwise.
    Overflow is reported as ``inf``.
    """
    if k < 0 or int(k) != k:
        raise DomainError("k must be a non-negative integer")
    k = int(k)
    if k == 0:
        return 1.0
    if b > 0:
        try:
            return math.exp(special.gammaln(b + k) - special.gammaln(b))
        except OverflowError:
            return math.inf
    prod = 1.0
    for j in range(k):
        prod *= b + j
    return prod


def pochhammer_ratio(gamma: float, k: int) -> float:
    """``(gamma)_k / gamma**k``, which tends to 1 as ``gamma`` grows."""
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if k < 0 or int(k) != k:
        raise DomainError("k must be a non-negative integer")
    return math.exp(math.fsum(math.log1p(j / gamma) for j in range(int(k))))


def log_pochhammer(b: float, k) -> np.ndarray:
    """``log|(b)_k|`` for an array of ``k``; ``-inf`` where ``(b)_k = 0``."""
    k = np.asarray(k, dtype=float)
    if b > 0:
        return special.gammaln(b + k) - special.gammaln(b)
    out = np.empty_like(k)
    for i, kk in enumerate(k.ravel()):
        p = pochhammer(b, int(kk))
        out.ravel()[i] = math.log(abs(p)) if p != 0 else -math.inf
    return out


def sign_pochhammer(b: float, k) -> np.ndarray:
    k = np.asarray(k, dtype=int)
    if b > 0:
        return np.ones(k.shape)
    out = np.empty(k.shape)
    for i, kk in enumerate(k.ravel()):
        out.ravel()[i] = np.sign(pochhammer(b, int(kk)))
    return out


@dataclass(frozen=True)
class MLParams:
    """Parameters ``(alpha, beta, gamma)`` of ``E^gamma_{alpha,beta}``.

    ``gamma = 0`` is admitted: ``E^0_{alpha,beta} = 1/Gamma(beta)``.
    """

    alpha: float
    beta: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
        if self.alpha <= 0:
            raise DomainError("alpha must be positive")
        if self.beta < 0:
            raise DomainError("beta must be non-negative")
        if self.gamma < 0:
            raise DomainError("gamma must be non-negative")


@dataclass(frozen=True)
class PfqSpec:
    """Upper and lower parameters of ``pFq``."""

    upper: tuple = ()
    lower: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(float(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(float(c) for c in self.lower))
        if np.any(_nonpositive_integer(self.lower)):
            raise PoleError("lower parameters may not be non-positive integers")

    @property
    def terminating(self) -> bool:
        return bool(np.any(_nonpositive_integer(self.upper))) if self.upper else False


@lru_cache(maxsize=256)
def _ml_coefficients(alpha: float, beta: float, gamma: float, K: int):
    """log|c_k| and sign(c_k) for c_k = (gamma)_k / (k! Gamma(alpha k + beta))."""
    k = np.arange(K, dtype=float)
    arg = alpha * k + beta
    pole = _nonpositive_integer(arg)
    with np.errstate(divide="ignore"):
        logc = special.gammaln(gamma + k) - special.gammaln(gamma) - special.gammaln(k + 1)
        logc = logc - special.gammaln(arg)
    sgn = special.gammasgn(arg)
    logc[pole] = -np.inf
    sgn[pole] = 0.0
    logc.flags.writeable = False
    sgn.flags.writeable = False
    return logc, sgn


@dataclass
class MLSeriesResult:
    """Power-series evaluation with its error bookkeeping.

    ``tail_bound`` is ``|next term| / (1 - ratio)`` (``inf`` if the terms are
    not yet decreasing); ``rounding`` estimates accumulated floating-point
    error from the size of the individual terms.
    """

    value: np.ndarray
    n_terms: int
    tail_bound: np.ndarray
    rounding: np.ndarray = field(repr=False)

    @property
    def relative_rounding(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.rounding / np.abs(self.value)


def ml_series(p: MLParams, z, log_prefactor=0.0) -> MLSeriesResult:
    """Truncated series for ``exp(log_prefactor) * E^gamma_{alpha,beta}(z)``.

    Terms are accumulated until ``|term| < EPS_ML * |partial sum|`` past the
    peak of the term magnitudes.
    """
    z = np.atleast_1d(np.asarray(z))
    lp = np.broadcast_to(np.asarray(log_prefactor, dtype=float), z.shape).ravel()
    shape = z.shape
    z = z.ravel()
    is_complex = np.iscomplexobj(z)
    value = np.zeros(z.shape, dtype=complex if is_complex else float)
    tail = np.zeros(z.shape)
    rounding = np.zeros(z.shape)

    zero = z == 0
    if np.any(zero):
        value[zero] = np.exp(lp[zero]) * special.rgamma(p.beta)
    if p.gamma == 0:
        value[~zero] = np.exp(lp[~zero]) * special.rgamma(p.beta)
        zero[:] = True
    nz = ~zero
    n_terms = 1
    if np.any(nz):
        zz = z[nz]
        logz = np.log(np.abs(zz))
        argz = np.angle(zz)
        K = 32
        while True:
            logc, sgn = _ml_coefficients(p.alpha, p.beta, p.gamma, K)
            k = np.arange(K)
            with np.errstate(invalid="ignore"):
                L = logc + np.outer(logz, k) + lp[nz, None]
            mag = np.exp(L)
            if is_complex:
                terms = sgn * mag * np.exp(1j * np.outer(argz, k))
            else:
                terms = sgn * mag * np.where(np.outer(zz < 0, k % 2 == 1), -1.0, 1.0)
            S = compensated_sum(terms)
            with np.errstate(divide="ignore"):
                log_s = np.log(np.maximum(np.abs(S), 1e-300))
            decreasing = L[:, -1] < L[:, -2]
            small = np.maximum(L[:, -1], L[:, -2]) < math.log(EPS_ML) + log_s
            if np.all(decreasing & small):
                break
            if K >= K_MAX:
                raise SeriesConvergenceError(
                    f"Mittag-Leffler series for {p} did not converge in {K_MAX} terms"
                )
            K = min(2 * K, K_MAX)
        n_terms = K
        ratio = np.exp(L[:, -1] - L[:, -2])
        tail[nz] = np.exp(L[:, -1]) * ratio / (1.0 - ratio)
        weight = 1.0 + np.abs(logc[np.isfinite(logc)]).max() + np.abs(np.outer(logz, k))
        rounding[nz] = EPS_ML * np.sum(np.where(np.isfinite(L), mag * weight, 0.0), axis=1)
        value[nz] = S
    return MLSeriesResult(
        value.reshape(shape), n_terms, tail.reshape(shape), rounding.reshape(shape)
    )


def _peak_term_too_large(p: MLParams, logw: np.ndarray) -> np.ndarray:
    """True where the largest series term on the negative axis dwarfs the
    first one by more than the rounding budget allows.

    ``|E(-w)|`` never exceeds the leading term there, so ``eps * peak /
    first`` is a lower bound on the relative rounding error of the series.
    """
    threshold = math.log(SERIES_ROUNDING_TOL / EPS_ML)
    result = np.zeros(logw.shape, dtype=bool)
    pending = np.ones(logw.shape, dtype=bool)
    K = 32
    while np.any(pending):
        logc, _ = _ml_coefficients(p.alpha, p.beta, p.gamma, K)
        first = int(np.argmax(np.isfinite(logc)))
        k = np.arange(K)
        L = logc + np.outer(logw[pending], k)
        rise = L.max(axis=1) - L[:, first]
        over = rise > threshold
        settled = over | (L[:, -1] < L[:, -2])
        idx = np.flatnonzero(pending)
        result[idx[over]] = True
        pending[idx[settled]] = False
        if K >= K_MAX:
            result[pending] = True
            break
        K = min(2 * K, K_MAX)
    return result


def ml_prabhakar(p: MLParams, z, *, log_prefactor=0.0, route: str = "auto"):
    """Three-parameter Mittag-Leffler function ``E^gamma_{alpha,beta}(z)``.

    ``E^gamma_{alpha,beta}(z) = sum_k (gamma)_k z^k / (k! Gamma(alpha k + beta))``.

    The result is multiplied by ``exp(log_prefactor)`` before leaving log
    space, which keeps densities such as ``x^(alpha gamma - 1) gamma^gamma
    E(...)`` representable when the bare function underflows.

    ``route`` is ``"auto"``, ``"series"`` or ``"contour"``.  On the negative
    real axis ``auto`` uses the series for ``|z| <= Z0`` unless its estimated
    rounding error is too large, and the Mellin-Barnes contour otherwise.
    Complex arguments are supported for ``Re z >= 0`` only.
    """
    if route not in ("auto", "series", "contour"):
        raise DomainError(f"unknown route {route!r}")
    scalar = np.ndim(z) == 0 and np.ndim(log_prefactor) == 0
    z = np.asarray(z)
    z, lp = np.broadcast_arrays(z, np.asarray(log_prefactor, dtype=float))
    if not np.all(np.isfinite(z)):
        raise DomainError("z must be finite")
    if np.iscomplexobj(z):
        if np.all(z.imag == 0):
            z = z.real
        elif np.any((z.real < 0) & (z.imag != 0)):
            raise DomainError("complex z is supported only for Re z >= 0")
    shape = z.shape
    z = np.array(z).reshape(-1)
    lp = np.array(lp, dtype=float).reshape(-1)
    is_complex = np.iscomplexobj(z)
    out = np.zeros(z.shape, dtype=complex if is_complex else float)
    contour_ok = (not is_complex) and p.alpha < 2 and p.gamma > 0
    neg = (z < 0) if not is_complex else np.zeros(z.shape, dtype=bool)

    if route == "contour":
        if not contour_ok or np.any(~neg):
            raise DomainError("contour route needs real z < 0, 0 < alpha < 2, gamma > 0")
        use_contour = np.ones(z.shape, dtype=bool)
    elif route == "series" or not contour_ok:
        use_contour = np.zeros(z.shape, dtype=bool)
    else:
        use_contour = neg & (np.abs(z) > Z0)
        screen = neg & ~use_contour
        if np.any(screen):
            use_contour[screen] = _peak_term_too_large(p, np.log(-z[screen]))
        trial = ~use_contour
        if np.any(trial):
            res = ml_series(p, z[trial], lp[trial])
            out[trial] = res.value
            bad = np.zeros(z.shape, dtype=bool)
            bad[trial] = neg[trial] & ~(res.relative_rounding <= SERIES_ROUNDING_TOL)
            use_contour |= bad
        if np.any(use_contour):
            from .mellin_barnes import ml_contour

            out[use_contour] = ml_contour(p, -z[use_contour], lp[use_contour])
        out = out.reshape(shape)
        return out[()] if scalar else out

    if np.any(use_contour):
        from .mellin_barnes import ml_contour

        out[use_contour] = ml_contour(p, -z[use_contour], lp[use_contour])
    if np.any(~use_contour):
        out[~use_contour] = ml_series(p, z[~use_contour], lp[~use_contour]).value
    out = out.reshape(shape)
    return out[()] if scalar else out


def mittag_leffler(z, alpha: float, beta: float = 1.0, gamma: float = 1.0, **kwargs):
    """Shorthand for ``ml_prabhakar(MLParams(alpha, beta, gamma), z)``."""
    return ml_prabhakar(MLParams(alpha, beta, gamma), z, **kwargs)


def hyper_pfq(spec: PfqSpec, t: float) -> float:
    """Generalized hypergeometric series ``pFq(upper; lower; t)``.

    Non-terminating series with ``p = q + 1`` need ``|t| < 1``; ``p > q + 1``
    is rejected outright.
    """
    p, q = len(spec.upper), len(spec.lower)
    if not spec.terminating:
        if p > q + 1:
            raise DomainError(f"{p}F{q} diverges for every t != 0")
        if p == q + 1 and abs(t) >= 1:
            raise DomainError(f"{p}F{q} series needs |t| < 1, got t={t}")
    if t == 0:
        return 1.0
    terms = [1.0]
    term = 1.0
    running = 1.0
    for k in range(K_MAX):
        num = math.prod(a + k for a in spec.upper)
        den = math.prod(c + k for c in spec.lower)
        ratio = num / den * t / (k + 1)
        term *= ratio
        if term == 0.0:
            return math.fsum(terms)
        terms.append(term)
        running += term
        if abs(term) < EPS_ML * abs(running) and abs(ratio) < 1:
            return math.fsum(terms)
    raise SeriesConvergenceError(f"pFq series did not converge in {K_MAX} terms")
