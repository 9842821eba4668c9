"""Hitting and first-passage laws of ``N1(G(N(s)))`` and ``N1(E(N(s)))``.

``T_k = inf{s : X(s) = k}`` may be infinite because the process can jump over
level ``k``.  ``T~_k = inf{s : X(s) >= k}`` is always finite.

The embedded jump chain gives an oracle that shares no algebra with the
series: jumps have negative binomial sizes, so ``P{T_k < inf}`` is the
renewal probability that the partial sums of the jumps visit ``k``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate, stats

from .models import ModelParams
from .pmf import pmf_n1en, pmf_n1gn
from .specfun import (
    DEFAULT_CONTROL,
    NEG_INF,
    SeriesControl,
    TruncationError,
    log_mittag_leffler3,
    log_poch,
    series_from,
    sum_log_terms,
)

__all__ = [
    "JumpDistribution",
    "jump_distribution",
    "hit_prob_renewal",
    "hit_prob_n1gn",
    "hit_prob_n1en",
    "hit_prob_alpha2",
    "hit_density_n1gn",
    "hit_density_n1en",
    "hit_prob_by_quadrature",
    "fpt_cdf",
    "fpt_density",
]

Q_TAIL = 1e-12


@dataclass(frozen=True)
class JumpDistribution:
    """Law of one jump of the counting process, truncated at ``jmax = len(q)``.

    ``q[j - 1]`` is the probability of a jump of size ``j``; ``tail`` is the
    mass above ``jmax``.
    """

    rate: float
    q: np.ndarray
    tail: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"rate must be positive, got {self.rate!r}")
        if np.any(self.q < 0):
            raise ValueError("jump probabilities must be non-negative")
        if abs(math.fsum(self.q) + self.tail - 1.0) > 1e-12:
            raise ValueError("jump probabilities and tail do not add up to 1")

    @property
    def jmax(self) -> int:
        return len(self.q)


def _escape(p: ModelParams) -> float:
    """``1 - x^alpha``: probability that a clock jump produces at least one event."""
    return -math.expm1(p.alpha * math.log(p.x))


def jump_distribution(p: ModelParams, jmax: Optional[int] = None) -> JumpDistribution:
    """Jump-size law of ``N1(G(N(s)))``.

    A clock jump is ``Gamma(alpha, beta)``, so the number of outer events it
    carries is negative binomial with ``alpha`` successes and success
    probability ``x = beta / (lam1 + beta)``.  Conditioning on at least one
    event gives ``q_j``; the jump rate is ``lam (1 - x^alpha)``.

    ``jmax=None`` picks the smallest cut-off with tail below ``1e-15``.
    """
    nb = stats.nbinom(p.alpha, p.x)
    esc = _escape(p)
    if jmax is None:
        # sf is decreasing, so a doubling search plus bisection is enough
        hi = 16
        while nb.sf(hi) / esc >= 1e-15:
            hi *= 2
        lo = hi // 2 if hi > 16 else 1
        while lo < hi:
            mid = (lo + hi) // 2
            if nb.sf(mid) / esc < 1e-15:
                hi = mid
            else:
                lo = mid + 1
        jmax = hi
    if jmax < 1 or int(jmax) != jmax:
        raise ValueError(f"jmax must be a positive integer, got {jmax!r}")
    j = np.arange(1, jmax + 1)
    q = np.exp(nb.logpmf(j)) / esc
    tail = float(nb.sf(jmax)) / esc
    if tail > Q_TAIL:
        raise TruncationError(f"jump law tail {tail:.3g} exceeds {Q_TAIL:g} at jmax={jmax}")
    # absorb rounding so that the invariant sum(q) + tail = 1 holds exactly enough
    q *= (1.0 - tail) / math.fsum(q)
    return JumpDistribution(rate=p.lam * esc, q=q, tail=tail)


def hit_prob_renewal(k: int, q: JumpDistribution) -> float:
    """``P{T_k < inf}`` from ``r_0 = 1``, ``r_m = sum_j q_j r_{m-j}``."""
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if k > q.jmax:
        raise ValueError(f"k={k} exceeds the jump law truncation jmax={q.jmax}")
    r = np.zeros(k + 1)
    r[0] = 1.0
    for m in range(1, k + 1):
        r[m] = float(np.dot(q.q[:m], r[m - 1::-1]))
    return float(r[k])


def hit_prob_n1gn(k: int, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """``P{T_k < inf}`` for ``N1(G(N(s)))`` as a series over the clock jump count.

    ``rho^k / k! (1 - x^alpha) sum_{n>=1} x^{alpha n} Gamma(alpha n + k) / Gamma(alpha n)``.
    Free of ``lam``.
    """
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    al = p.alpha
    log_xa = al * math.log(p.x)

    def term(n: int):
        if n == 0:
            return NEG_INF, 0.0
        return n * log_xa + log_poch(al * n, k), 1.0

    ls, sg = sum_log_terms(series_from(term), ctl, "hit_prob_n1gn")
    return sg * math.exp(k * math.log(p.rho) - math.lgamma(k + 1) + math.log(_escape(p)) + ls)


def hit_prob_n1en(k: int, p: ModelParams) -> float:
    """``P{T_k < inf}`` for exponential jumps: ``beta / (lam1 + beta)`` at every level."""
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    return p.x


def hit_prob_alpha2(k: int, p: ModelParams) -> float:
    """Closed form of ``P{T_k < inf}`` at ``alpha = 2``.

    ``(1 - x^2) (beta/2) [1/lam1 - lam1^k / (lam1 + 2 beta)^{k+1}]``, obtained by
    keeping the even-index terms of ``sum_n y^n Gamma(n + k)/Gamma(n)``.
    """
    if p.alpha != 2:
        raise ValueError(f"the closed form needs alpha = 2, got {p.alpha!r}")
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    l1, b = p.lam1, p.beta
    x = p.x
    return (1 - x * x) * (b / 2) * (1 / l1 - math.exp(k * math.log(l1) - (k + 1) * math.log(l1 + 2 * b)))


def _check_ks(k: int, s: float) -> None:
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if not s > 0:
        raise ValueError(f"s must be positive, got {s!r}")


def _log_jump_weight(j: int, p: ModelParams) -> float:
    """``log(lam1^j / j! * int t^j e^{-lam1 t} nu(dt))`` for the Poisson-Gamma measure."""
    al = p.alpha
    return (math.log(p.lam) + al * math.log(p.x) + j * math.log(p.rho)
            + math.lgamma(j + al) - math.lgamma(al) - math.lgamma(j + 1))


def hit_density_n1gn(k: int, s: float, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL,
                     form: str = "series") -> float:
    """Defective density of ``T_k`` for ``N1(G(N(s)))``.

    ``form="series"`` sums ``w_n (n s^{n-1} - c s^n)`` with ``c = lam x^alpha``
    against ``e^{-lam s}``.  ``form="grouped"`` conditions on the last jump:
    ``sum_{j=1}^k p_{k-j}(s) lam1^j M_j / j!``.
    """
    _check_ks(k, s)
    if form == "grouped":
        parts = [math.exp(_log_jump_weight(j, p)) * pmf_n1gn(k - j, s, p, ctl) for j in range(1, k + 1)]
        return math.fsum(parts)
    if form != "series":
        raise ValueError(f"unknown form {form!r}")
    al, lam = p.alpha, p.lam
    log_c = math.log(lam) + al * math.log(p.x)
    c = math.exp(log_c)
    log_s = math.log(s)

    def term(n: int):
        if n == 0:
            return NEG_INF, 0.0
        bracket = n - c * s  # n s^{n-1} - c s^n = s^{n-1} (n - c s)
        if bracket == 0:
            return NEG_INF, 0.0
        lw = n * log_c - math.lgamma(n + 1) + log_poch(al * n, k)
        return lw + (n - 1) * log_s + math.log(abs(bracket)), math.copysign(1.0, bracket)

    ls, sg = sum_log_terms(series_from(term), ctl, "hit_density_n1gn")
    if sg == 0:
        return 0.0
    return sg * math.exp(-lam * s + k * math.log(p.rho) - math.lgamma(k + 1) + ls)


def hit_density_n1en(k: int, s: float, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL,
                     form: str = "mixture") -> float:
    """Defective density of ``T_k`` for ``N1(E(N(s)))``; ``p.alpha`` is ignored.

    ``form="mixture"``: ``lam beta/(lam1+beta) sum_n Poi(n; lam s) NB(n; k, rho)``
    where ``NB(n; k, rho)`` is the law of ``N_beta(E_lam1(k))``.
    ``form="finite"``: ``lam beta/(lam1+beta) sum_{j<k} rho^{k-j} p_j(s)``.
    """
    _check_ks(k, s)
    pre = p.lam * p.x
    if form == "finite":
        return pre * math.fsum(p.rho ** (k - j) * pmf_n1en(j, s, p, ctl) for j in range(k))
    if form != "mixture":
        raise ValueError(f"unknown form {form!r}")
    lam_s = p.lam * s
    log_ls, log_x = math.log(lam_s), math.log(p.x)
    head = k * math.log(p.rho) - math.lgamma(k)

    def term(n: int):
        # Poisson(n; lam s) * Gamma(n + k) / (n! Gamma(k)) rho^k x^n
        return (-lam_s + n * (log_ls + log_x) - 2 * math.lgamma(n + 1)
                + math.lgamma(n + k) + head), 1.0

    ls, sg = sum_log_terms(series_from(term), ctl, "hit_density_n1en")
    return pre * sg * math.exp(ls)


def hit_prob_by_quadrature(k: int, p: ModelParams, exponential: bool = False,
                           ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Integrate the hitting density over ``(0, s_max)``.

    The density decays at least like ``s^{k} e^{-s f(lam1)}``; ``s_max`` is
    chosen so that the neglected tail is far below ``1e-10``.
    """
    q = p.with_(alpha=1.0) if exponential else p
    decay = q.lam * _escape(q)
    smax = max(40.0 / p.lam, (60.0 + 4.0 * k) / decay)
    dens = (lambda s: hit_density_n1en(k, s, p, ctl)) if exponential else \
        (lambda s: hit_density_n1gn(k, s, p, ctl))
    val, _ = integrate.quad(dens, 0.0, smax, epsabs=1e-13, epsrel=1e-11, limit=500)
    return val


def _log_nb_tail(k: int, shape: float, log_rho: float, ctl: SeriesControl) -> float:
    """``log sum_{j>=k} rho^j Gamma(shape + j) / (j! Gamma(shape))``."""

    def term(i: int):
        j = k + i
        return j * log_rho + log_poch(shape, j) - math.lgamma(j + 1), 1.0

    return sum_log_terms(series_from(term), ctl, "nb_tail")[0]


def fpt_cdf(k: int, s: float, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL,
            method: str = "complement") -> float:
    """``P{T~_k < s} = P{N1(G(N(s))) >= k}``.

    ``method="complement"`` is ``1 - sum_{j<k} p_j(s)``.  ``method="series"``
    evaluates the double series over ``j >= k`` and the jump count ``n``; it
    keeps full relative accuracy when the probability is tiny.
    """
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if s < 0:
        raise ValueError(f"s must be >= 0, got {s!r}")
    if s == 0:
        return 0.0
    if method == "complement":
        return max(0.0, 1.0 - math.fsum(pmf_n1gn(j, s, p, ctl) for j in range(k)))
    if method != "series":
        raise ValueError(f"unknown method {method!r}")
    al, lam = p.alpha, p.lam
    log_z = math.log(lam * s) + al * math.log(p.x)
    log_rho = math.log(p.rho)

    def term(n: int):
        if n == 0:
            return NEG_INF, 0.0
        return n * log_z - math.lgamma(n + 1) + _log_nb_tail(k, al * n, log_rho, ctl), 1.0

    ls, sg = sum_log_terms(series_from(term), ctl, "fpt_cdf")
    return sg * math.exp(-lam * s + ls) if sg else 0.0


def fpt_density(k: int, s: float, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL,
                form: str = "general") -> float:
    """Density of ``T~_k`` for ``N1(G(N(s)))``.

    ``form="general"``:
    ``e^{-lam s} sum_{j>=k} rho^j/j! sum_{n>=1} (n s^{n-1} - lam s^n) c^n Gamma(alpha n + j)/(n! Gamma(alpha n))``
    with ``c = lam x^alpha``, i.e. the time derivative of the ``fpt_cdf``
    double series.  ``form="exponential"`` is the ``alpha = 1`` expression
    ``e^{-lam s} lam x sum_{j>=k} rho^j [E^{j+1}_{1,1}(w) - lam s E^{j+1}_{1,2}(w)]``
    with ``w = lam x s``; it ignores ``p.alpha``.
    """
    _check_ks(k, s)
    lam = p.lam
    log_rho = math.log(p.rho)
    if form == "exponential":
        w = lam * p.x * s

        def term_j(i: int):
            j = k + i
            l11, s11 = log_mittag_leffler3(1.0, 1.0, j + 1.0, w, ctl)
            l12, s12 = log_mittag_leffler3(1.0, 2.0, j + 1.0, w, ctl)
            # bracket = E11 - lam s E12, formed from the ratio to keep its sign exact
            ratio = lam * s * s12 * math.exp(l12 - l11)
            diff = s11 - ratio
            if diff == 0:
                return NEG_INF, 0.0
            return j * log_rho + l11 + math.log(abs(diff)), math.copysign(1.0, diff)

        ls, sg = sum_log_terms(series_from(term_j), ctl, "fpt_density")
        return sg * lam * p.x * math.exp(-lam * s + ls) if sg else 0.0
    if form != "general":
        raise ValueError(f"unknown form {form!r}")
    al = p.alpha
    log_c = math.log(lam) + al * math.log(p.x)
    log_s = math.log(s)

    def term(n: int):
        if n == 0:
            return NEG_INF, 0.0
        bracket = n - lam * s
        if bracket == 0:
            return NEG_INF, 0.0
        lt = (n * log_c - math.lgamma(n + 1) + (n - 1) * log_s + math.log(abs(bracket))
              + _log_nb_tail(k, al * n, log_rho, ctl))
        return lt, math.copysign(1.0, bracket)

    ls, sg = sum_log_terms(series_from(term), ctl, "fpt_density")
    return sg * math.exp(-lam * s + ls) if sg else 0.0
