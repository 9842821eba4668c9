"""Probability mass functions of Poisson processes on Gamma-type clocks.

Four counting processes are covered, all of the form ``N1(H(t))`` with ``N1``
a Poisson process of rate ``lam1``:

* ``N1GN``  with ``H = G(N(t))``
* ``N1EN``  with ``H = E(N(t))`` (``alpha = 1``)
* ``N1GNa`` with ``H = G(a t + N(t))``
* ``N1ENa`` with ``H = E(a t + N(t))``

Each closed form is evaluated as a log-space series.  :func:`pmf_via_pgf`
computes the same probabilities from the generating function by formal power
series exponentiation, and is kept independent of the closed forms so it can
serve as their oracle.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .models import Family, LevyCharacterization, ModelParams, characterize, moments
from .specfun import (
    DEFAULT_CONTROL,
    NEG_INF,
    SeriesControl,
    TruncationError,
    log_mittag_leffler3,
    log_poch,
    series_from,
    sum_log_terms,
    wright_psi11,
)

__all__ = [
    "PMF_FAMILIES",
    "PmfTable",
    "TailMassError",
    "pmf",
    "pmf_n1gn",
    "pmf_n1gn_wright",
    "pmf_n1en",
    "pmf_n1gna",
    "pmf_n1ena",
    "pgf",
    "pmf_via_pgf",
    "pgf_coefficients",
    "subordinator_of",
    "adaptive_kmax",
    "build_table",
]

PMF_FAMILIES = (Family.N1GN, Family.N1EN, Family.N1GNa, Family.N1ENa)


class TailMassError(TruncationError):
    """Truncated probabilities leave more mass unaccounted for than allowed."""


def _check(k: int, t: float) -> None:
    if k < 0 or int(k) != k:
        raise ValueError(f"k must be a non-negative integer, got {k!r}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")


def pmf_n1gn(k: int, t: float, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P{N1(G(N(t))) = k}."""
    _check(k, t)
    if t == 0:
        return 1.0 if k == 0 else 0.0
    lam, al = p.lam, p.alpha
    log_x = math.log(p.x)
    if k == 0:
        return math.exp(lam * t * math.expm1(al * log_x))
    # e^{-lam t} rho^k / k! * sum_{n>=1} z^n Gamma(alpha n + k) / (n! Gamma(alpha n))
    log_z = math.log(lam * t) + al * log_x
    head = -lam * t + k * math.log(p.rho) - math.lgamma(k + 1)

    def term(n: int):
        if n == 0:
            return NEG_INF, 0.0
        return n * log_z - math.lgamma(n + 1) + log_poch(al * n, k), 1.0

    ls, sg = sum_log_terms(series_from(term), ctl, "pmf_n1gn")
    return sg * math.exp(head + ls) if sg else 0.0


def pmf_n1gn_wright(k: int, t: float, p: ModelParams,
                    ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Same probability as :func:`pmf_n1gn`, for ``k >= 1`` via ``1Psi1((k, alpha), (0, alpha); z)``."""
    _check(k, t)
    if k == 0 or t == 0:
        return pmf_n1gn(k, t, p, ctl)
    z = p.lam * t * p.x ** p.alpha
    psi = wright_psi11((k, p.alpha), (0.0, p.alpha), z, ctl)
    return math.exp(-p.lam * t + k * math.log(p.rho) - math.lgamma(k + 1)) * psi


def pmf_n1en(k: int, t: float, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P{N1(E(N(t))) = k}; ``p.alpha`` is ignored (exponential jumps)."""
    _check(k, t)
    if t == 0:
        return 1.0 if k == 0 else 0.0
    lam, b, l1 = p.lam, p.beta, p.lam1
    if k == 0:
        return math.exp(-lam * l1 * t / (l1 + b))
    w = lam * b * t / (l1 + b)
    lml, sml = log_mittag_leffler3(1.0, 2.0, k + 1.0, w, ctl)
    return sml * math.exp(-lam * t + k * math.log(p.rho) + math.log(w) + lml)


def pmf_n1gna(k: int, t: float, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P{N1(G(a t + N(t))) = k}; reduces to :func:`pmf_n1gn` at ``a = 0``."""
    _check(k, t)
    if t == 0:
        return 1.0 if k == 0 else 0.0
    lam, al = p.lam, p.alpha
    at = p.a * t
    log_x = math.log(p.x)
    log_lt = math.log(lam * t)
    head = -lam * t + al * at * log_x + k * math.log(p.rho) - math.lgamma(k + 1)

    def term(n: int):
        lp = log_poch(al * (n + at), k)
        if lp == NEG_INF:
            return NEG_INF, 0.0
        return n * (log_lt + al * log_x) - math.lgamma(n + 1) + lp, 1.0

    ls, sg = sum_log_terms(series_from(term), ctl, "pmf_n1gna")
    return sg * math.exp(head + ls) if sg else 0.0


def pmf_n1ena(k: int, t: float, p: ModelParams, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P{N1(E(a t + N(t))) = k} through ``E^{k+at}_{1,at}``; ``p.alpha`` is ignored."""
    _check(k, t)
    if t == 0:
        return 1.0 if k == 0 else 0.0
    if p.a == 0:
        return pmf_n1en(k, t, p, ctl)
    lam, b, l1 = p.lam, p.beta, p.lam1
    at = p.a * t
    w = lam * b * t / (l1 + b)
    lml, sml = log_mittag_leffler3(1.0, at, k + at, w, ctl)
    return sml * math.exp(-lam * t + math.lgamma(k + at) - math.lgamma(k + 1)
                          + k * math.log(p.rho) + at * math.log(p.x) + lml)


_PMF = {
    Family.N1GN: pmf_n1gn,
    Family.N1EN: pmf_n1en,
    Family.N1GNa: pmf_n1gna,
    Family.N1ENa: pmf_n1ena,
}


def pmf(family: "str | Family", k: int, t: float, p: ModelParams,
        ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    return _PMF[Family.parse(family)](k, t, p, ctl)


def subordinator_of(family: "str | Family") -> Family:
    """The clock family ``H`` of a counting family ``N1(H(t))``."""
    return {
        Family.N1GN: Family.GN,
        Family.N1EN: Family.EN,
        Family.N1GNa: Family.GNa,
        Family.N1ENa: Family.ENa,
    }[Family.parse(family)]


def pgf(u: float, t: float, char: LevyCharacterization, lambda1: float) -> float:
    """Generating function ``E u^{N1(H(t))} = exp(-t f(lambda1 (1 - u)))``."""
    if abs(u) > 1:
        raise ValueError(f"|u| must be <= 1, got {u!r}")
    return math.exp(-t * char.bernstein(lambda1 * (1 - u)))


MAX_ORDER = 256
PGF_TAIL = 1e-10


def pgf_coefficients(t: float, char: LevyCharacterization, lambda1: float,
                     order: int = 128) -> np.ndarray:
    """Taylor coefficients ``c_0..c_order`` of ``u -> exp(-t f(lambda1 (1 - u)))``.

    With ``M_m = int x^m e^{-lambda1 x} nu(dx)`` the exponent expands as
    ``-t f(lambda1) + sum_m h_m u^m`` where ``h_m = t lambda1^m M_m / m!`` (plus
    ``t * drift * lambda1`` at ``m = 1``).  All ``h_m >= 0``, so the recurrence
    ``n c_n = sum_m m h_m c_{n-m}`` is free of cancellation.
    """
    if order < 0 or order > MAX_ORDER:
        raise ValueError(f"order must lie in [0, {MAX_ORDER}], got {order!r}")
    h = np.zeros(order + 1)
    for m in range(1, order + 1):
        lmom = char.log_jump_moment(m, lambda1)
        if lmom > NEG_INF:
            h[m] = t * math.exp(m * math.log(lambda1) + lmom - math.lgamma(m + 1))
    if order >= 1:
        h[1] += t * char.drift * lambda1
    c = np.zeros(order + 1)
    c[0] = math.exp(-t * char.bernstein(lambda1))
    mh = np.arange(order + 1) * h
    for n in range(1, order + 1):
        c[n] = float(np.dot(mh[1:n + 1], c[n - 1::-1][:n])) / n
    return c


def pmf_via_pgf(k: int, t: float, char: LevyCharacterization, lambda1: float,
                order: Optional[int] = None) -> float:
    """``P{N1(H(t)) = k}`` read off the generating function's power series.

    ``order=None`` tries 128 and then 256.  Raises :class:`TailMassError` when
    the coefficients up to ``order`` leave more than ``1e-10`` of probability
    unaccounted for.
    """
    orders = [order] if order is not None else [o for o in (128, MAX_ORDER) if o >= k]
    if not orders or k > orders[-1]:
        raise ValueError(f"k={k} exceeds the expansion order {orders[-1] if orders else MAX_ORDER}")
    for o in orders:
        c = pgf_coefficients(t, char, lambda1, o)
        tail = 1.0 - math.fsum(c)
        if tail <= PGF_TAIL:
            return float(c[k])
    raise TailMassError(f"expansion order {o} leaves tail mass {tail:.3g} > {PGF_TAIL:g}")


def adaptive_kmax(family: "str | Family", p: ModelParams, times: Sequence[float],
                  width: float = 12.0) -> int:
    """``ceil(mean + width * sd)`` at the largest time, from the exact moments.

    A starting guess only; :func:`build_table` extends it until the tail is
    negligible.
    """
    fam = Family.parse(family)
    if not times:
        return 0
    q = p
    if fam in (Family.N1EN, Family.N1ENa):
        q = q.with_(alpha=1.0)
    if fam in (Family.N1GN, Family.N1EN):
        q = q.with_(a=0.0)
    ms = moments(Family.N1GNa, q, max(times))
    return int(math.ceil(ms.mean + width * math.sqrt(ms.variance)))


@dataclass
class PmfTable:
    """Probabilities ``probs[i, k] = P{X(times[i]) = k}`` for ``k <= kmax``."""

    params: ModelParams
    family: Family
    times: list[float]
    kmax: int
    probs: np.ndarray
    tail_mass: np.ndarray = field(init=False)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float).reshape(len(self.times), self.kmax + 1)
        self.tail_mass = np.array([1.0 - math.fsum(row) for row in self.probs])

    def means(self) -> np.ndarray:
        ks = np.arange(self.kmax + 1)
        return np.array([math.fsum(ks * row) for row in self.probs])

    def rows(self):
        for t, row in zip(self.times, self.probs):
            for k, pr in enumerate(row):
                yield t, k, pr

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["family", "t", "k", "prob"])
        for t, k, pr in self.rows():
            w.writerow([self.family.value, f"{t:.12g}", k, f"{pr:.12g}"])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "params": {"lambda": self.params.lam, "alpha": self.params.alpha,
                       "beta": self.params.beta, "lambda1": self.params.lam1, "a": self.params.a},
            "times": [float(f"{t:.12g}") for t in self.times],
            "kmax": self.kmax,
            "probs": [[float(f"{v:.12g}") for v in row] for row in self.probs],
            "tail_mass": [float(f"{v:.12g}") for v in self.tail_mass],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


ADAPTIVE_TAIL = 1e-12
KMAX_CAP = 100_000


def build_table(family: "str | Family", p: ModelParams, times: Sequence[float],
                kmax: Optional[int] = None, ctl: SeriesControl = DEFAULT_CONTROL,
                max_tail: Optional[float] = 1e-6) -> PmfTable:
    """Tabulate a pmf family on ``times x {0..kmax}``.

    ``kmax=None`` starts from :func:`adaptive_kmax` and extends the table until
    every row's missing mass is below ``1e-12``.  Raises
    :class:`TailMassError` when a row's missing mass exceeds ``max_tail``; pass
    ``max_tail=None`` to keep a deliberately short table.
    """
    fam = Family.parse(family)
    times = [float(t) for t in times]
    fn = _PMF[fam]
    if kmax is None:
        kmax = adaptive_kmax(fam, p, times)
        rows = [[fn(k, t, p, ctl) for k in range(kmax + 1)] for t in times]
        while rows and max(1.0 - math.fsum(r) for r in rows) > ADAPTIVE_TAIL and kmax < KMAX_CAP:
            grow = max(8, kmax // 4)
            for t, r in zip(times, rows):
                r.extend(fn(k, t, p, ctl) for k in range(kmax + 1, kmax + grow + 1))
            kmax += grow
        probs = np.array(rows) if rows else np.zeros((0, kmax + 1))
    else:
        if kmax < 0:
            raise ValueError("kmax must be >= 0")
        probs = np.array([[fn(k, t, p, ctl) for k in range(kmax + 1)] for t in times])
    table = PmfTable(params=p, family=fam, times=times, kmax=kmax, probs=probs)
    if max_tail is not None and len(times) and float(table.tail_mass.max()) > max_tail:
        worst = int(np.argmax(table.tail_mass))
        raise TailMassError(
            f"kmax={kmax} leaves tail mass {table.tail_mass[worst]:.3g} at t={times[worst]:g}"
            f" (bound {max_tail:g})"
        )
    return table
