"""Series evaluation of the special functions used by the closed-form laws.

Every series here is summed term by term in log space.  Terms are
``exp(log|t_k|)`` with the sign carried separately, so factorials and gamma
functions of order a few hundred never overflow on their own.  Gamma poles in
denominators are exact zeros (``1/Gamma(-n) = 0``), which silently removes the
``n = 0`` term from sums such as ``sum_n Gamma(a n + k) / Gamma(a n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

from scipy import special

__all__ = [
    "SeriesControl",
    "TruncationError",
    "DEFAULT_CONTROL",
    "recip_gamma",
    "log_abs_gamma",
    "log_poch",
    "wright_phi",
    "wright_psi11",
    "mittag_leffler3",
    "bessel_i",
    "sum_log_terms",
    "series_from",
    "log_wright_phi",
    "log_mittag_leffler3",
    "log_bessel_i",
]

NEG_INF = -math.inf
RECIP_GAMMA_CAP = 500.0


class TruncationError(ArithmeticError):
    """A series did not meet its tail bound within ``max_terms``."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy shared by every infinite series.

    ``tol`` is a relative bound: summation stops once three consecutive,
    non-increasing terms are each below ``tol`` times the running sum.
    """

    tol: float = 1e-14
    max_terms: int = 10_000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"tol must be positive, got {self.tol!r}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise ValueError(f"max_terms must be a positive integer, got {self.max_terms!r}")


DEFAULT_CONTROL = SeriesControl()


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def recip_gamma(x: float) -> float:
    """Return ``1/Gamma(x)``, exactly 0 at the poles ``x = 0, -1, -2, ...``.

    Valid for ``|x| <= 500``.  Beyond the cap, ``x > 500`` underflows to 0 and
    ``x < -500`` raises ``OverflowError``.
    """
    x = float(x)
    if _is_nonpositive_int(x):
        return 0.0
    if x > RECIP_GAMMA_CAP:
        return 0.0
    if x < -RECIP_GAMMA_CAP:
        raise OverflowError(f"1/Gamma({x}) is outside the supported range |x| <= 500")
    return float(special.rgamma(x))


def log_abs_gamma(x: float) -> tuple[float, float]:
    """``(log|Gamma(x)|, sign Gamma(x))``; at poles returns ``(inf, 0.0)``."""
    if _is_nonpositive_int(x):
        return math.inf, 0.0
    return math.lgamma(x), float(special.gammasgn(x))


def log_poch(x: float, k: float) -> float:
    """``log(Gamma(x + k) / Gamma(x))`` for ``x >= 0``, ``k >= 0``.

    Uses the rising-factorial convention at ``x = 0``: the ratio is 1 when
    ``k = 0`` and 0 (log ``-inf``) when ``k > 0``.
    """
    if k == 0:
        return 0.0
    if x == 0:
        return NEG_INF
    return math.lgamma(x + k) - math.lgamma(x)


def sum_log_terms(
    terms: Iterator[tuple[float, float]],
    ctl: SeriesControl = DEFAULT_CONTROL,
    what: str = "series",
) -> tuple[float, float]:
    """Sum a series given as ``(log|term|, sign)`` pairs.

    Returns ``(log|S|, sign(S))``.  Zero terms are passed as ``(-inf, 0)``.
    The final value is an exactly rounded ``math.fsum`` over all retained
    terms, rescaled by the largest log-term.
    """
    log_tol = math.log(ctl.tol)
    logs: list[float] = []
    signs: list[float] = []
    ref = NEG_INF
    acc = 0.0  # running sum in units of exp(ref), only used for stopping
    streak = 0
    prev = NEG_INF
    for count, (lt, sg) in enumerate(terms):
        if count >= ctl.max_terms:
            raise TruncationError(
                f"{what}: tail bound {ctl.tol:g} not reached within {ctl.max_terms} terms"
            )
        if sg != 0 and lt > NEG_INF:
            logs.append(lt)
            signs.append(sg)
            if lt > ref:
                acc = acc * math.exp(ref - lt) + sg if ref > NEG_INF else sg
                ref = lt
            else:
                acc += sg * math.exp(lt - ref)
        if acc != 0.0:
            small = sg == 0 or lt == NEG_INF or lt - ref - math.log(abs(acc)) <= log_tol
            if small and lt <= prev:
                streak += 1
                if streak >= 3:
                    break
            else:
                streak = 0
        prev = lt if sg != 0 else NEG_INF
    if not logs:
        return NEG_INF, 0.0
    top = max(logs)
    total = math.fsum(s * math.exp(l - top) for l, s in zip(logs, signs))
    if total == 0.0:
        return NEG_INF, 0.0
    return top + math.log(abs(total)), math.copysign(1.0, total)


def _finish(log_s: float, sign: float) -> float:
    if sign == 0.0:
        return 0.0
    return sign * math.exp(log_s)


def _log_power(z: float, k: int) -> tuple[float, float]:
    """``(log|z^k|, sign(z^k))`` with ``0^0 = 1``."""
    if k == 0:
        return 0.0, 1.0
    if z == 0:
        return NEG_INF, 0.0
    sign = -1.0 if (z < 0 and k % 2) else 1.0
    return k * math.log(abs(z)), sign


def _wright_phi_terms(rho: float, delta: float, z: float) -> Iterator[tuple[float, float]]:
    k = 0
    while True:
        lz, sz = _log_power(z, k)
        lg, sg = log_abs_gamma(rho * k + delta)
        if sg == 0.0 or sz == 0.0:
            yield NEG_INF, 0.0
        else:
            yield lz - math.lgamma(k + 1) - lg, sz * sg
        k += 1


def log_wright_phi(rho: float, delta: float, z: float,
                   ctl: SeriesControl = DEFAULT_CONTROL) -> tuple[float, float]:
    """Log-space Wright function, see :func:`wright_phi`."""
    if not rho > 0:
        raise ValueError(f"rho must be positive, got {rho!r}")
    if z == 0:
        lg, sg = log_abs_gamma(delta)
        return (-lg, sg) if sg != 0 else (NEG_INF, 0.0)
    return sum_log_terms(_wright_phi_terms(rho, delta, z), ctl, "wright_phi")


def wright_phi(rho: float, delta: float, z: float,
               ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Wright function ``sum_k z^k / (k! Gamma(rho k + delta))``.

    Terms whose gamma argument is a non-positive integer vanish, so
    ``wright_phi(1, 0, z) == sqrt(z) * I_1(2 sqrt(z))``.
    """
    return _finish(*log_wright_phi(rho, delta, z, ctl))


def wright_psi11(a_pair: tuple[float, float], b_pair: tuple[float, float], z: float,
                 ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Generalized Wright function ``1Psi1((a, A), (b, B); z)``.

    ``sum_k Gamma(a + A k) / Gamma(b + B k) * z^k / k!``.  Denominator poles
    contribute 0; numerator poles are not allowed.
    """
    a, big_a = a_pair
    b, big_b = b_pair
    if big_a - big_b <= -1:
        raise ValueError("1Psi1 diverges unless A - B > -1")
    if z == 0:
        return math.gamma(a) * recip_gamma(b)

    def terms():
        k = 0
        while True:
            la, sa = log_abs_gamma(a + big_a * k)
            if sa == 0.0:
                raise ValueError(f"numerator Gamma({a + big_a * k}) is at a pole")
            lb, sb = log_abs_gamma(b + big_b * k)
            lz, sz = _log_power(z, k)
            if sb == 0.0 or sz == 0.0:
                yield NEG_INF, 0.0
            else:
                yield la - lb + lz - math.lgamma(k + 1), sa * sb * sz
            k += 1

    return _finish(*sum_log_terms(terms(), ctl, "wright_psi11"))


def log_mittag_leffler3(rho: float, delta: float, gamma: float, z: float,
                        ctl: SeriesControl = DEFAULT_CONTROL) -> tuple[float, float]:
    """Log-space three-parameter Mittag-Leffler function."""
    if not (rho > 0 and delta > 0 and gamma > 0):
        raise ValueError("mittag_leffler3 needs rho, delta, gamma > 0")
    lgg = math.lgamma(gamma)

    def terms():
        k = 0
        while True:
            lz, sz = _log_power(z, k)
            if sz == 0.0:
                yield NEG_INF, 0.0
            else:
                yield (math.lgamma(gamma + k) - lgg + lz - math.lgamma(k + 1)
                       - math.lgamma(rho * k + delta)), sz
            k += 1

    if z == 0:
        return -math.lgamma(delta), 1.0
    return sum_log_terms(terms(), ctl, "mittag_leffler3")


def mittag_leffler3(rho: float, delta: float, gamma: float, z: float,
                    ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Prabhakar function ``E^gamma_{rho,delta}(z)``.

    ``sum_k Gamma(gamma + k) / Gamma(gamma) * z^k / (k! Gamma(rho k + delta))``
    """
    return _finish(*log_mittag_leffler3(rho, delta, gamma, z, ctl))


def log_bessel_i(order: float, z: float,
                 ctl: SeriesControl = DEFAULT_CONTROL) -> tuple[float, float]:
    """Log-space modified Bessel function of the first kind."""
    if z < 0:
        raise ValueError(f"bessel_i is defined here for z >= 0, got {z!r}")
    if z == 0:
        if order == 0:
            return 0.0, 1.0
        if order > 0 or _is_nonpositive_int(order):
            return NEG_INF, 0.0
        return math.inf, float(special.gammasgn(order + 1))
    lhalf = math.log(z / 2)

    def terms():
        n = 0
        while True:
            lg, sg = log_abs_gamma(n + order + 1)
            if sg == 0.0:
                yield NEG_INF, 0.0
            else:
                yield (2 * n + order) * lhalf - math.lgamma(n + 1) - lg, sg
            n += 1

    return sum_log_terms(terms(), ctl, "bessel_i")


def bessel_i(order: float, z: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Modified Bessel function ``I_order(z)`` of real order by its power series."""
    return _finish(*log_bessel_i(order, z, ctl))


def series_from(log_term: Callable[[int], tuple[float, float]], start: int = 0
                ) -> Iterator[tuple[float, float]]:
    """Adapt an index -> (log|term|, sign) callable into a term iterator."""
    n = start
    while True:
        yield log_term(n)
        n += 1
