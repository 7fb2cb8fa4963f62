"""Mellin-Barnes integrands built from gamma factors ``Gamma(a s + b)``.

An integrand is kept symbolically (:class:`MellinIntegrand`) so that the
Levy structure ``Gamma((1-s)/alpha) / (alpha Gamma(1-s))`` can be detected,
removed and attached exactly.  Numerically the inverse Mellin integral

    f(x) = 1/(2 pi i) int_{c - i inf}^{c + i inf} F(s) x^(-s) ds

is evaluated with the trapezoid rule on the line ``Re s = c``.  Gamma
products decay exponentially along the line (Stirling), so the rule is
spectrally accurate once the truncation height has been found by doubling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special
from scipy.special import logsumexp

from .core_special import MLParams, compensated_sum
from .errors import ContourError, DomainError, ResidueError, StripError, StructureError

MATCH_TOL = 1e-12
TAIL_TOL = 1e-15
IMAG_TOL = 1e-9
MAX_DOUBLINGS = 14


@dataclass(frozen=True, order=True)
class GammaFactor:
    """``Gamma(coeff * s + shift)``; ``coeff == 0`` is the constant ``Gamma(shift)``."""

    coeff: float
    shift: float

    def __post_init__(self):
        object.__setattr__(self, "coeff", float(self.coeff))
        object.__setattr__(self, "shift", float(self.shift))
        if not (math.isfinite(self.coeff) and math.isfinite(self.shift)):
            raise DomainError("gamma factor parameters must be finite")

    def isclose(self, other: "GammaFactor", tol: float = MATCH_TOL) -> bool:
        return abs(self.coeff - other.coeff) <= tol and abs(self.shift - other.shift) <= tol


def _factors(seq) -> tuple:
    return tuple(g if isinstance(g, GammaFactor) else GammaFactor(*g) for g in seq)


@dataclass(frozen=True)
class MellinIntegrand:
    """``scalar * prod Gamma(num) / prod Gamma(den) * prod base^(a s + b)``.

    The kernel ``x^(-s)`` is implicit; :func:`contour_eval` and
    :func:`residue_series_eval` supply it.
    """

    numerator: tuple = ()
    denominator: tuple = ()
    scalar: float = 1.0
    base_powers: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "numerator", _factors(self.numerator))
        object.__setattr__(self, "denominator", _factors(self.denominator))
        object.__setattr__(self, "scalar", float(self.scalar))
        powers = tuple(tuple(float(v) for v in p) for p in self.base_powers)
        object.__setattr__(self, "base_powers", powers)
        if not math.isfinite(self.scalar) or self.scalar == 0:
            raise DomainError("scalar must be finite and non-zero")
        for base, a, b in powers:
            if not base > 0 or not (math.isfinite(a) and math.isfinite(b)):
                raise DomainError("base powers need base > 0 and finite exponents")

    @property
    def is_empty(self) -> bool:
        return not (self.numerator or self.denominator or self.base_powers)

    def log_eval(self, s) -> np.ndarray:
        """Complex logarithm of the integrand (up to branch) at ``s``."""
        s = np.asarray(s, dtype=complex)
        out = np.full(s.shape, complex(math.log(abs(self.scalar)), math.pi if self.scalar < 0 else 0.0))
        for g in self.numerator:
            out = out + special.loggamma(g.coeff * s + g.shift)
        for g in self.denominator:
            arg = g.coeff * s + g.shift
            pole = (arg.imag == 0) & (arg.real <= 0) & (arg.real == np.round(arg.real))
            lg = special.loggamma(np.where(pole, 1.0, arg))
            # 1/Gamma vanishes at its poles
            out = out - np.where(pole, np.inf, lg)
        for base, a, b in self.base_powers:
            out = out + (a * s + b) * math.log(base)
        return out

    def __call__(self, s):
        return np.exp(self.log_eval(s))

    def strip(self) -> tuple[float, float]:
        """Open interval of ``Re s`` separating left poles from right poles.

        Only numerator factors contribute poles: ``coeff > 0`` ones march
        to the left, ``coeff < 0`` ones to the right.
        """
        lo, hi = -math.inf, math.inf
        for g in self.numerator:
            if g.coeff > 0:
                lo = max(lo, -g.shift / g.coeff)
            elif g.coeff < 0:
                hi = min(hi, g.shift / -g.coeff)
        return lo, hi

    def decay_rate(self) -> float:
        """Exponential decay rate of ``|F(c + i t)|`` in ``|t|`` from Stirling."""
        num = sum(abs(g.coeff) for g in self.numerator)
        den = sum(abs(g.coeff) for g in self.denominator)
        return 0.5 * math.pi * (num - den)

    def isclose(self, other: "MellinIntegrand", tol: float = MATCH_TOL) -> bool:
        """Field-wise equality up to ``tol``, factor order ignored."""

        def same(a, b):
            if len(a) != len(b):
                return False
            return all(x.isclose(y, tol) for x, y in zip(sorted(a), sorted(b)))

        if not (same(self.numerator, other.numerator) and same(self.denominator, other.denominator)):
            return False
        if abs(self.scalar - other.scalar) > tol * max(1.0, abs(self.scalar)):
            return False
        if len(self.base_powers) != len(other.base_powers):
            return False
        return all(
            np.allclose(p, q, rtol=tol, atol=tol)
            for p, q in zip(sorted(self.base_powers), sorted(other.base_powers))
        )

    def to_json(self) -> dict:
        return {
            "num": [[g.coeff, g.shift] for g in self.numerator],
            "den": [[g.coeff, g.shift] for g in self.denominator],
            "scalar": self.scalar,
            "powers": [list(p) for p in self.base_powers],
        }

    @classmethod
    def from_json(cls, data: dict) -> "MellinIntegrand":
        return cls(
            numerator=data.get("num", []),
            denominator=data.get("den", []),
            scalar=data.get("scalar", 1.0),
            base_powers=data.get("powers", []),
        )


@dataclass(frozen=True)
class ContourSpec:
    """Vertical line ``Re s = line_re`` truncated to ``|Im s| <= half_height``.

    ``half_height`` is only the starting height; evaluation keeps the step
    ``2 half_height / (nodes - 1)`` and doubles the height until the last
    panel is negligible.
    """

    line_re: float
    half_height: float = 4.0
    nodes: int = 161

    def __post_init__(self):
        if not self.half_height > 0:
            raise DomainError("half_height must be positive")
        if self.nodes < 33 or self.nodes % 2 == 0:
            raise DomainError("nodes must be odd and at least 33")

    @property
    def step(self) -> float:
        return 2.0 * self.half_height / (self.nodes - 1)

    def refined(self) -> "ContourSpec":
        """Same line and height with the step halved."""
        return ContourSpec(self.line_re, self.half_height, 2 * self.nodes - 1)

    @classmethod
    def with_step(cls, line_re: float, step: float, half_height: float = 4.0) -> "ContourSpec":
        m = max(16, int(math.ceil(half_height / step)))
        return cls(line_re, m * step, 2 * m + 1)


def default_contour(f: MellinIntegrand, line_re: float | None = None) -> ContourSpec:
    """Mid-strip line with a step fine enough for the pole distance."""
    lo, hi = f.strip()
    if line_re is None:
        if math.isfinite(lo) and math.isfinite(hi):
            line_re = 0.5 * (lo + hi)
        elif math.isfinite(hi):
            line_re = hi - 0.5
        elif math.isfinite(lo):
            line_re = lo + 0.5
        else:
            line_re = 0.0
    dist = min(line_re - lo, hi - line_re)
    return ContourSpec.with_step(line_re, min(0.1, dist / 8.0))


class _LineRule:
    """Trapezoid nodes on one vertical line with cached ``log F`` values."""

    def __init__(self, f: MellinIntegrand, spec: ContourSpec, tail_tol: float):
        c, h = spec.line_re, spec.step
        m = (spec.nodes - 1) // 2
        t = np.arange(-m, m + 1) * h
        logf = f.log_eval(c + 1j * t)
        for _ in range(MAX_DOUBLINGS):
            j = np.arange(m + 1, 2 * m + 1) * h
            tn = np.concatenate([-j[::-1], j])
            new = f.log_eval(c + 1j * tn)
            t = np.concatenate([-j[::-1], t, j])
            logf = np.concatenate([new[:m], logf, new[m:]])
            m = 2 * m
            if not np.all(np.isfinite(logf.real) | (logf.real == -np.inf)):
                raise ContourError("integrand is singular on the contour")
            if logsumexp(new.real) - logsumexp(logf.real) < math.log(tail_tol):
                break
        else:
            raise ContourError(
                f"truncation tail still above {tail_tol:g} at |Im s| = {m * h:g}"
            )
        self.line_re = c
        self.step = h
        self.s = c + 1j * t
        self.logf = logf
        self.log_l1 = float(logsumexp(logf.real) + math.log(h / (2 * math.pi)))

    def __call__(self, x, log_prefactor=0.0, chunk: int = 256) -> np.ndarray:
        lx = np.log(np.atleast_1d(np.asarray(x, dtype=float)))
        lp = np.broadcast_to(np.asarray(log_prefactor, dtype=float), lx.shape)
        out = np.empty(lx.shape, dtype=complex)
        for i in range(0, lx.size, chunk):
            sl = slice(i, i + chunk)
            expo = self.logf[None, :] - np.outer(lx[sl], self.s) + lp[sl, None]
            out[sl] = np.exp(expo).sum(axis=1)
        return out * (self.step / (2 * math.pi))

    def l1_bound(self, x, log_prefactor=0.0) -> np.ndarray:
        lx = np.log(np.atleast_1d(np.asarray(x, dtype=float)))
        return np.exp(self.log_l1 - self.line_re * lx + log_prefactor)


@lru_cache(maxsize=512)
def _line_rule(f: MellinIntegrand, spec: ContourSpec, tail_tol: float) -> _LineRule:
    return _LineRule(f, spec, tail_tol)


def _check_line(f: MellinIntegrand, line_re: float) -> None:
    lo, hi = f.strip()
    if not lo < line_re < hi:
        raise StripError(f"line Re s = {line_re} is outside the strip ({lo}, {hi})")
    if f.decay_rate() <= 0:
        raise ContourError("integrand does not decay along vertical lines")


def contour_eval(f: MellinIntegrand, c: ContourSpec, x, *, log_prefactor=0.0, tail_tol: float = TAIL_TOL):
    """Inverse Mellin transform of ``f`` at ``x > 0`` by the trapezoid rule.

    Returns the real part; the imaginary part of a conjugate-symmetric
    integrand must vanish to ``IMAG_TOL`` relative.
    """
    _check_line(f, c.line_re)
    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0)):
        raise DomainError("x must be positive")
    rule = _line_rule(f, c, tail_tol)
    val = rule(x, log_prefactor)
    floor = 1e-14 * rule.l1_bound(x, log_prefactor)
    if np.any(np.abs(val.imag) > IMAG_TOL * np.abs(val.real) + floor):
        raise ContourError("imaginary part did not cancel; integrand is not conjugate-symmetric")
    out = val.real
    return float(out[0]) if scalar else out


def truncation_estimate(f: MellinIntegrand, c: ContourSpec, tail_tol: float = TAIL_TOL) -> dict:
    """Height and node count the adaptive rule settled on, plus the Stirling rate."""
    _check_line(f, c.line_re)
    rule = _line_rule(f, c, tail_tol)
    return {
        "half_height": float(rule.s.imag.max()),
        "nodes": int(rule.s.size),
        "decay_rate": f.decay_rate(),
    }


def residue_series_eval(f: MellinIntegrand, x, terms: int = 200):
    """Sum of residues at the left poles ``Gamma(a s + b)``, ``a > 0``.

    ``Res_{w=-k} Gamma(w) = (-1)^k / k!`` gives the contribution of the pole
    at ``s_k = -(b + k)/a`` as ``(-1)^k / (k! a)`` times the rest of the
    integrand and ``x^(-s_k)``.
    """
    left = [i for i, g in enumerate(f.numerator) if g.coeff > 0]
    if len(left) != 1:
        if len(left) > 1:
            raise ResidueError("ambiguous pole set: several numerator factors have left poles")
        raise ResidueError("no numerator factor generates left poles")
    g = f.numerator[left[0]]
    k = np.arange(terms, dtype=float)
    s_k = -(g.shift + k) / g.coeff
    log_t = -special.gammaln(k + 1) - math.log(g.coeff) + math.log(abs(f.scalar))
    sign = np.where(k % 2 == 1, -1.0, 1.0) * math.copysign(1.0, f.scalar)
    for i, other in enumerate(f.numerator):
        if i == left[0]:
            continue
        arg = other.coeff * s_k + other.shift
        if np.any((arg <= 0) & (arg == np.round(arg))):
            raise ResidueError("ambiguous pole set: another numerator factor is singular at a swept pole")
        log_t = log_t + special.gammaln(arg)
        sign = sign * special.gammasgn(arg)
    for other in f.denominator:
        arg = other.coeff * s_k + other.shift
        pole = (arg <= 0) & (arg == np.round(arg))
        with np.errstate(divide="ignore"):
            log_t = log_t - np.where(pole, np.inf, special.gammaln(arg))
        sign = sign * np.where(pole, 0.0, special.gammasgn(arg))
    for base, a, b in f.base_powers:
        log_t = log_t + (a * s_k + b) * math.log(base)

    scalar = np.ndim(x) == 0
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(~(x > 0)):
        raise DomainError("x must be positive")
    expo = log_t[None, :] - np.outer(np.log(x), s_k)
    terms_arr = np.where(sign[None, :] == 0, 0.0, sign[None, :] * np.exp(expo))
    out = compensated_sum(terms_arr)
    out = np.atleast_1d(out)
    return float(out[0]) if scalar else out


# -- Levy structure --------------------------------------------------------


def levy_factors(alpha: float) -> tuple[GammaFactor, GammaFactor]:
    """Numerator ``Gamma(-s/alpha + 1/alpha)`` and denominator ``Gamma(1 - s)``."""
    return GammaFactor(-1.0 / alpha, 1.0 / alpha), GammaFactor(-1.0, 1.0)


def _find(factors: tuple, target: GammaFactor) -> int:
    for i, g in enumerate(factors):
        if g.isclose(target):
            return i
    return -1


def has_levy_structure(f: MellinIntegrand, alpha: float) -> bool:
    """True iff ``f`` carries ``Gamma((1-s)/alpha) / (alpha Gamma(1-s))``."""
    if not alpha > 0:
        return False
    num, den = levy_factors(alpha)
    return _find(f.numerator, num) >= 0 and _find(f.denominator, den) >= 0


def strip_levy_structure(f: MellinIntegrand, alpha: float) -> MellinIntegrand:
    """Remove the Levy structure; the scalar is multiplied by ``alpha``."""
    if not has_levy_structure(f, alpha):
        raise StructureError(f"integrand has no Levy structure for alpha={alpha}")
    num, den = levy_factors(alpha)
    i, j = _find(f.numerator, num), _find(f.denominator, den)
    return MellinIntegrand(
        f.numerator[:i] + f.numerator[i + 1 :],
        f.denominator[:j] + f.denominator[j + 1 :],
        f.scalar * alpha,
        f.base_powers,
    )


def with_levy_structure(f: MellinIntegrand, alpha: float) -> MellinIntegrand:
    if not 0 < alpha:
        raise DomainError("alpha must be positive")
    num, den = levy_factors(alpha)
    return MellinIntegrand(
        f.numerator + (num,), f.denominator + (den,), f.scalar / alpha, f.base_powers
    )


# -- named integrands ------------------------------------------------------


def exponential_integrand() -> MellinIntegrand:
    """``Gamma(s)``, the Mellin transform of ``exp(-x)``."""
    return MellinIntegrand([(1.0, 0.0)])


def gamma_density_integrand(gamma: float) -> MellinIntegrand:
    """``Gamma(gamma + s - 1) / Gamma(gamma) * gamma^(1 - s)``."""
    return MellinIntegrand([(1.0, gamma - 1.0)], [(0.0, gamma)], 1.0, [(gamma, -1.0, 1.0)])


def gml_integrand(alpha: float, gamma: float) -> MellinIntegrand:
    """Integrand of the generalized Mittag-Leffler density
    ``x^(alpha gamma - 1) gamma^gamma E^gamma_{alpha, alpha gamma}(-gamma x^alpha)``."""
    return MellinIntegrand(
        [(1.0 / alpha, gamma - 1.0 / alpha), (-1.0 / alpha, 1.0 / alpha)],
        [(0.0, gamma), (-1.0, 1.0)],
        1.0 / alpha,
        [(gamma, -1.0 / alpha, 1.0 / alpha)],
    )


def gengamma_integrand(alpha: float, gamma: float) -> MellinIntegrand:
    """GML integrand with the Levy structure removed; its residues give
    ``alpha gamma^gamma / Gamma(gamma) x^(alpha gamma - 1) exp(-gamma x^alpha)``."""
    return MellinIntegrand(
        [(1.0 / alpha, gamma - 1.0 / alpha)],
        [(0.0, gamma)],
        1.0,
        [(gamma, -1.0 / alpha, 1.0 / alpha)],
    )


def levy_integrand(alpha: float) -> MellinIntegrand:
    """``Gamma((1-s)/alpha) / (alpha Gamma(1-s))``: the one-sided stable law
    with Laplace transform ``exp(-s^alpha)``."""
    num, den = levy_factors(alpha)
    return MellinIntegrand([num], [den], 1.0 / alpha)


def ml_integrand(alpha: float, beta: float, gamma: float) -> MellinIntegrand:
    """``Gamma(s) Gamma(gamma - s) / (Gamma(gamma) Gamma(beta - alpha s))``;
    inverting it at ``w`` gives ``E^gamma_{alpha,beta}(-w)``."""
    return MellinIntegrand(
        [(1.0, 0.0), (-1.0, gamma)], [(0.0, gamma), (-alpha, beta)], 1.0
    )


def resolvent_kernel_integrand(alpha: float, rate: float) -> MellinIntegrand:
    """Kernel ``rate (x-t)^(alpha-1) E_{alpha,alpha}(-rate (x-t)^alpha)`` as an
    integrand in ``x - t``; it carries the Levy structure."""
    num, den = levy_factors(alpha)
    return MellinIntegrand(
        [(1.0 / alpha, 1.0 - 1.0 / alpha), num], [den], 1.0 / alpha, [(rate, -1.0 / alpha, 1.0 / alpha)]
    )


def moment_integrand(f: MellinIntegrand, alpha: float) -> MellinIntegrand:
    """Mellin transform of ``x^(1/alpha)``: ``E[(x^(1/alpha))^(s-1)] = M_f(1 + (s-1)/alpha)``."""
    if not alpha > 0:
        raise DomainError("alpha must be positive")

    def remap(a, b):
        return a / alpha, b + a - a / alpha

    return MellinIntegrand(
        [remap(g.coeff, g.shift) for g in f.numerator],
        [remap(g.coeff, g.shift) for g in f.denominator],
        f.scalar,
        [(base, *remap(a, b)) for base, a, b in f.base_powers],
    )


# -- Mittag-Leffler on the negative axis ------------------------------------


def _ml_right_edge(p: MLParams) -> tuple[float, list[float]]:
    """First uncancelled pole of ``Gamma(gamma - s)`` and the removable ones before it.

    A pole at ``gamma + n`` is removable when ``beta - alpha (gamma + n)``
    is a non-positive integer, because ``1/Gamma`` vanishes there.
    """
    removable = []
    for n in range(64):
        arg = p.beta - p.alpha * (p.gamma + n)
        if not (arg <= 0 and abs(arg - round(arg)) < 1e-12):
            return p.gamma + n, removable
        removable.append(p.gamma + n)
    return p.gamma + 64, removable


@lru_cache(maxsize=128)
def _ml_lines(p: MLParams) -> list:
    f = ml_integrand(p.alpha, p.beta, p.gamma)
    right, removable = _ml_right_edge(p)
    dmin = min(0.25, right / 4.0)
    rules = []
    for c in _candidate_lines(0.0, right):
        # 0/0 at a removable pole is harmless analytically but not in floating point
        for r in removable:
            if abs(c - r) < 0.1:
                c = r - 0.1 if r - 0.1 > 0.5 * dmin else r + 0.1
        dist = min(c, right - c)
        spec = ContourSpec.with_step(c, min(0.1, dist / 8.0))
        rules.append(_LineRule(f, spec, TAIL_TOL))
    return rules


def _eval_best_line(rules: list, x, log_prefactor) -> np.ndarray:
    """Evaluate each ``x`` on the candidate line with the smallest L1 bound,
    i.e. the least cancellation for the trapezoid sum to absorb."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lp = np.broadcast_to(np.asarray(log_prefactor, dtype=float), x.shape)
    if np.any(~(x > 0)):
        raise DomainError("x must be positive")
    lx = np.log(x)
    score = np.array([r.log_l1 for r in rules])[None, :] - np.outer(lx, [r.line_re for r in rules])
    pick = np.argmin(score, axis=1)
    out = np.empty(x.shape)
    for j in np.unique(pick):
        sel = pick == j
        out[sel] = rules[j](x[sel], lp[sel]).real
    return out


def _candidate_lines(lo: float, hi: float) -> list[float]:
    if math.isfinite(lo) and math.isfinite(hi):
        width = hi - lo
        d = min(0.25, width / 4.0)
        cands = {lo + 0.5 * width}
        while d < 0.5 * width:
            cands.update((lo + d, hi - d))
            d *= 2.0
        return sorted(cands)
    if math.isfinite(hi):
        return [hi - 0.25 * 2.0**k for k in range(10)]
    if math.isfinite(lo):
        return [lo + 0.25 * 2.0**k for k in range(10)]
    return [0.25 * 2.0**k * sgn for k in range(8) for sgn in (-1, 1)]


@lru_cache(maxsize=128)
def _auto_rules(f: MellinIntegrand) -> list:
    lo, hi = f.strip()
    if f.decay_rate() <= 0:
        raise ContourError("integrand does not decay along vertical lines")
    rules = []
    for c in _candidate_lines(lo, hi):
        dist = min(c - lo, hi - c)
        spec = ContourSpec.with_step(c, min(0.1, dist / 8.0))
        rules.append(_LineRule(f, spec, TAIL_TOL))
    return rules


def auto_contour_eval(f: MellinIntegrand, x, *, log_prefactor=0.0):
    """:func:`contour_eval` with the line chosen per ``x`` from a candidate set."""
    scalar = np.ndim(x) == 0
    out = _eval_best_line(_auto_rules(f), x, log_prefactor)
    return float(out[0]) if scalar else out


def ml_contour(p: MLParams, w, log_prefactor=0.0) -> np.ndarray:
    """``exp(log_prefactor) E^gamma_{alpha,beta}(-w)`` for ``w > 0``."""
    if not 0 < p.alpha < 2 or p.gamma <= 0:
        raise DomainError("contour route needs 0 < alpha < 2 and gamma > 0")
    return _eval_best_line(_ml_lines(p), w, log_prefactor)
