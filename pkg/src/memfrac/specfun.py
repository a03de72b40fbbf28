"""Special functions: gamma family, classical Mittag-Leffler, and the
moment-based Mittag-Leffler-type function of a weight distribution.

All series are summed term by term with exactly rounded (``math.fsum``)
accumulation, because the interesting arguments are negative and the
series alternate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import AccuracyError, DomainError

MomentProvider = Callable[[int], float]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class MLSeriesConfig:
    """Truncation policy for the Mittag-Leffler series.

    ``tol`` is relative: summation stops once the terms are past their
    peak and the current term is below ``tol`` times the partial sum.
    """

    tol: float = 1e-16
    max_terms: int = 5000
    domain_radius: float = 50.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")
        if not self.domain_radius > 0:
            raise ValueError("domain_radius must be positive")


DEFAULT_ML_CONFIG = MLSeriesConfig()


def gamma_fn(z: float) -> float:
    """Gamma function for positive real arguments."""
    if not z > 0:
        raise DomainError(f"gamma_fn requires z > 0, got {z!r}")
    return math.gamma(z)


def log_gamma(z: float) -> float:
    """Natural log of the gamma function for positive real arguments."""
    if not z > 0:
        raise DomainError(f"log_gamma requires z > 0, got {z!r}")
    return math.lgamma(z)


def log_beta(a: float, b: float) -> float:
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b)


def beta_fn(a: float, b: float) -> float:
    """Euler beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b), a, b > 0."""
    return math.exp(log_beta(a, b))


def as_moments(moments) -> MomentProvider:
    """Accept either a callable ``n -> E[W^n]`` or an object with ``.moment``."""
    if hasattr(moments, "moment"):
        return moments.moment
    if callable(moments):
        return moments
    raise TypeError(f"cannot use {type(moments).__name__} as a moment provider")


def _fsum(terms):
    if terms and isinstance(terms[0], complex):
        return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# classical two-parameter Mittag-Leffler


def _ml_log_ratio(alpha, beta, n):
    # log(Γ(αn+β)/Γ(α(n+1)+β))
    return math.lgamma(alpha * n + beta) - math.lgamma(alpha * (n + 1) + beta)


def _ml_series_double(alpha, beta, z, cfg):
    if z == 0:
        return 1.0 / math.gamma(beta), 0.0, 1
    logz = math.log(abs(z))
    sign = -1.0 if z < 0 else 1.0
    terms = []
    running = 0.0
    max_log = -math.inf
    for n in range(cfg.max_terms):
        log_mag = n * logz - math.lgamma(alpha * n + beta)
        if log_mag > 700:
            raise AccuracyError(
                f"Mittag-Leffler series terms overflow for alpha={alpha}, z={z}",
                partial=math.nan,
                terms=n,
            )
        term = (sign**n) * math.exp(log_mag)
        terms.append(term)
        running += term
        max_log = max(max_log, log_mag)
        past_peak = logz + _ml_log_ratio(alpha, beta, n) < 0
        if n > 0 and past_peak and abs(term) <= cfg.tol * max(abs(running), 1e-300):
            break
    else:
        raise AccuracyError(
            f"Mittag-Leffler series did not converge in {cfg.max_terms} terms",
            partial=_fsum(terms),
            terms=cfg.max_terms,
        )
    total = _fsum(terms)
    # each term carries a few ulps of error from exp/lgamma
    err = 8 * len(terms) * _EPS * math.exp(max_log)
    return total, err, len(terms)


def _ml_series_mp(alpha, beta, z, cfg, max_log, approx):
    import mpmath

    peak_digits = max_log / math.log(10)
    extra = 30
    while True:
        with mpmath.workdps(int(peak_digits + extra)):
            a, b, zz = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(z)
            total = mpmath.mpf(0)
            power = mpmath.mpf(1)
            for n in range(cfg.max_terms):
                term = power * mpmath.rgamma(a * n + b)
                total += term
                power *= zz
                past_peak = math.log(abs(z)) + _ml_log_ratio(alpha, beta, n) < 0
                if n > 0 and past_peak and abs(term) <= cfg.tol * abs(total):
                    break
            else:
                raise AccuracyError(
                    f"Mittag-Leffler series did not converge in {cfg.max_terms} terms",
                    partial=approx,
                    terms=cfg.max_terms,
                )
            # absolute error ~ 10**-extra; keep 20 significant digits
            if extra > 400 or (total != 0 and extra + float(mpmath.log10(abs(total))) >= 20):
                return float(total)
        extra *= 2


def mittag_leffler(alpha: float, beta: float, z: float, config: MLSeriesConfig | None = None) -> float:
    """Classical Mittag-Leffler function E_{α,β}(z) = Σ zⁿ/Γ(αn+β).

    Evaluated by its power series for real ``|z| <= domain_radius``.  When
    cancellation in the alternating series would destroy the double
    precision result, the same series is re-summed with extended working
    precision.
    """
    cfg = config or DEFAULT_ML_CONFIG
    if not 0 < alpha <= 1:
        raise DomainError(f"mittag_leffler requires alpha in (0, 1], got {alpha!r}")
    if not beta > 0:
        raise DomainError(f"mittag_leffler requires beta > 0, got {beta!r}")
    z = float(z)
    if not abs(z) <= cfg.domain_radius:
        raise DomainError(
            f"|z| = {abs(z)} exceeds the series domain radius {cfg.domain_radius}"
        )
    total, err, _ = _ml_series_double(alpha, beta, z, cfg)
    if err > 1e-14 * abs(total) and z < 0:
        max_log = _peak_log_term(alpha, beta, z, cfg)
        total = _ml_series_mp(alpha, beta, z, cfg, max_log, total)
    return total


def _peak_log_term(alpha, beta, z, cfg):
    logz = math.log(abs(z))
    best = -math.inf
    for n in range(cfg.max_terms):
        val = n * logz - math.lgamma(alpha * n + beta)
        if val < best and logz + _ml_log_ratio(alpha, beta, n) < 0:
            break
        best = max(best, val)
    return best


# ---------------------------------------------------------------------------
# moment-based Mittag-Leffler-type function


def new_ml_coefficients(moments, n_terms: int) -> np.ndarray:
    """Coefficients c_n = 1/(n! Π_{j=1}^{n-1} E[W^j]) for n < n_terms.

    Uses c_{n+1} = c_n / ((n+1) E[W^n]) with E[W^0] = 1.
    """
    m = as_moments(moments)
    c = np.empty(n_terms)
    c[0] = 1.0
    for n in range(n_terms - 1):
        c[n + 1] = c[n] / ((n + 1) * m(n))
    return c


def new_ml(moments, s: Union[float, complex], tol: float = 1e-17, max_terms: int = 2000):
    """Mittag-Leffler-type function ℰ(s) = Σ sⁿ / (n! Π_{j=1}^{n-1} E[W^j]).

    ``moments`` supplies E[W^n]; the series is entire whenever
    n E[W^n] → ∞.  Raises :class:`AccuracyError` (partial sum attached)
    if the terms have not become negligible after ``max_terms`` terms.
    """
    m = as_moments(moments)
    is_complex = isinstance(s, complex)
    s = complex(s) if is_complex else float(s)
    if s == 0:
        return complex(1.0) if is_complex else 1.0
    terms = [complex(1.0) if is_complex else 1.0]
    term = terms[0]
    running = term
    for n in range(max_terms - 1):
        ratio = abs(s) / ((n + 1) * m(n))
        term = term * s / ((n + 1) * m(n))
        terms.append(term)
        running += term
        if ratio < 1 and abs(term) <= tol * max(abs(running), 1e-300):
            return _fsum(terms)
        if not math.isfinite(abs(term)):
            break
    raise AccuracyError(
        f"new_ml series did not converge in {max_terms} terms at s={s!r}",
        partial=_fsum(terms),
        terms=len(terms),
    )


def new_ml_matrix(moments, A, t: float = 1.0, tol: float = 1e-17, max_terms: int = 2000) -> np.ndarray:
    """ℰ(tA) for a square matrix ``A``: Σ (tA)ⁿ / (n! Π E[W^j])."""
    m = as_moments(moments)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    d = A.shape[0]
    if A.shape != (d, d):
        raise ValueError(f"A must be square, got shape {A.shape}")
    tA = t * A
    norm_tA = np.abs(tA).sum(axis=1).max()
    term = np.eye(d)
    acc = term.copy()
    comp = np.zeros_like(acc)  # Neumaier compensation
    for n in range(max_terms - 1):
        f = (n + 1) * m(n)
        term = tA @ term / f
        y = acc + term
        big = np.abs(acc) >= np.abs(term)
        comp += np.where(big, (acc - y) + term, (term - y) + acc)
        acc = y
        if not np.all(np.isfinite(term)):
            break
        total_norm = np.abs(acc + comp).max()
        if norm_tA / ((n + 2) * m(n + 1)) < 1 and np.abs(term).max() <= tol * max(total_norm, 1e-300):
            return acc + comp
    raise AccuracyError(
        f"new_ml_matrix series did not converge in {max_terms} terms",
        partial=acc + comp,
        terms=max_terms,
    )
