"""Subordinator families: parameters, Bernstein functions, Levy measures, laws.

Five families are covered.  ``GN`` is the compound Poisson-Gamma subordinator
``G(N(t))``, ``GNa`` adds the drift ``G(a t + N(t))``, ``EN``/``ENa`` are the
``alpha = 1`` (exponential jump) special cases and ``DriftedPoisson`` is the
inner clock ``a t + N(t)`` itself.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .specfun import (
    DEFAULT_CONTROL,
    NEG_INF,
    SeriesControl,
    log_bessel_i,
    log_wright_phi,
)

__all__ = [
    "Family",
    "ModelParams",
    "LevyCharacterization",
    "MomentSet",
    "characterize",
    "density_gna",
    "density_ena",
    "dist_gn_with_atom",
    "moments",
    "FIG1",
    "FIG2",
    "FIG3",
    "FIG4",
]


class Family(str, enum.Enum):
    GN = "GN"
    EN = "EN"
    GNa = "GNa"
    ENa = "ENa"
    DriftedPoisson = "DriftedPoisson"
    N1GN = "N1GN"
    N1EN = "N1EN"
    N1GNa = "N1GNa"
    N1ENa = "N1ENa"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, cls):
            return name
        key = str(name).replace("_", "").replace("-", "").lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ValueError(f"unknown family {name!r}")


@dataclass(frozen=True)
class ModelParams:
    """Rates and shapes shared by every process.

    lam:   rate of the inner Poisson clock N(t)
    alpha: Gamma shape per unit of operational time
    beta:  Gamma rate
    lam1:  rate of the outer Poisson process N1 (the ``mu`` of iterated chains)
    a:     drift of the inner clock, ``a t + N(t)``
    """

    lam: float
    alpha: float
    beta: float
    lam1: float = 1.0
    a: float = 0.0

    def __post_init__(self):
        for name in ("lam", "alpha", "beta", "lam1"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ValueError(f"a must be >= 0, got {self.a!r}")

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)

    @property
    def x(self) -> float:
        """``beta / (lam1 + beta)``: P(no outer event during one Gamma jump)^(1/alpha)."""
        return self.beta / (self.lam1 + self.beta)

    @property
    def rho(self) -> float:
        """``lam1 / (lam1 + beta)``."""
        return self.lam1 / (self.lam1 + self.beta)


# Parameter sets of the four published probability figures.
FIG1 = ModelParams(lam=2.0, alpha=2.0, beta=0.8, lam1=1.0)
FIG2 = ModelParams(lam=4.0, alpha=1.0, beta=0.8, lam1=1.0)
FIG3 = ModelParams(lam=1.0, alpha=2.0, beta=0.8, lam1=1.0, a=5.0)
FIG4 = ModelParams(lam=1.0, alpha=1.0, beta=0.8, lam1=1.0, a=5.0)


@dataclass(frozen=True)
class LevyCharacterization:
    """A subordinator given by its Bernstein function and Levy measure.

    ``f(u) = drift * u + int (1 - e^{-u x}) nu(dx)`` where ``nu`` has the
    absolutely continuous part ``levy_density`` plus ``point_masses``.
    ``jump_moment(m, s)`` returns ``int x^m e^{-s x} nu(dx)`` in closed form
    when available; otherwise it is obtained by quadrature.
    """

    bernstein: Callable[[float], float]
    levy_density: Callable[[float], float]
    atom_at_zero: Optional[Callable[[float], float]] = None
    total_mass_finite: bool = True
    drift: float = 0.0
    point_masses: tuple[tuple[float, float], ...] = ()
    closed_log_moment: Optional[Callable[[int, float], float]] = field(default=None, repr=False)

    def jump_moment(self, m: int, s: float) -> float:
        if self.closed_log_moment is not None:
            return math.exp(self.closed_log_moment(m, s))
        return self.quad_jump_moment(m, s)

    def log_jump_moment(self, m: int, s: float) -> float:
        """``log int x^m e^{-s x} nu(dx)``; stays finite where the moment itself overflows."""
        if self.closed_log_moment is not None:
            return self.closed_log_moment(m, s)
        mom = self.quad_jump_moment(m, s)
        return math.log(mom) if mom > 0 else NEG_INF

    def quad_jump_moment(self, m: int, s: float) -> float:
        """``int x^m e^{-s x} nu(dx)`` by adaptive quadrature (needs ``m >= 1``)."""
        if m < 1:
            raise ValueError("jump moments are taken for m >= 1")
        atoms = math.fsum(w * loc ** m * math.exp(-s * loc) for loc, w in self.point_masses)
        val, _ = integrate.quad(lambda x: x ** m * math.exp(-s * x) * self.levy_density(x),
                                0.0, math.inf, epsabs=1e-15, epsrel=1e-13, limit=400)
        return atoms + val


def _gn_bernstein(lam: float, alpha: float, beta: float) -> Callable[[float], float]:
    # lam * (1 - (beta/(beta+u))^alpha), written with expm1/log1p for small u
    return lambda u: -lam * math.expm1(-alpha * math.log1p(u / beta))


def _gamma_bernstein(alpha: float, beta: float) -> Callable[[float], float]:
    return lambda u: alpha * math.log1p(u / beta)


def characterize(family: "str | Family", p: ModelParams) -> LevyCharacterization:
    """Bernstein function and Levy measure of a subordinator family.

    ``EN`` and ``ENa`` force ``alpha = 1``; ``GN`` and ``EN`` ignore ``a``.
    """
    fam = Family.parse(family)
    lam, beta = p.lam, p.beta
    alpha = 1.0 if fam in (Family.EN, Family.ENa) else p.alpha
    lg_alpha = math.lgamma(alpha)

    def gn_density(x: float) -> float:
        if x <= 0:
            return 0.0
        return lam * math.exp(alpha * math.log(beta) - lg_alpha
                              + (alpha - 1) * math.log(x) - beta * x)

    def gn_log_moment(m: int, s: float) -> float:
        return (math.log(lam) + alpha * math.log(beta) + math.lgamma(m + alpha) - lg_alpha
                - (m + alpha) * math.log(s + beta))

    if fam in (Family.GN, Family.EN):
        return LevyCharacterization(
            bernstein=_gn_bernstein(lam, alpha, beta),
            levy_density=gn_density,
            atom_at_zero=lambda t: math.exp(-lam * t),
            total_mass_finite=True,
            closed_log_moment=gn_log_moment,
        )

    if fam in (Family.GNa, Family.ENa):
        a = p.a
        f_gn = _gn_bernstein(lam, alpha, beta)
        f_gamma = _gamma_bernstein(alpha, beta)

        def density(x: float) -> float:
            if x <= 0:
                return 0.0
            return a * alpha * math.exp(-beta * x) / x + gn_density(x)

        def log_moment(m: int, s: float) -> float:
            gn = gn_log_moment(m, s)
            if a == 0:
                return gn
            return float(np.logaddexp(math.log(a * alpha) + math.lgamma(m) - m * math.log(s + beta), gn))

        return LevyCharacterization(
            bernstein=lambda u: a * f_gamma(u) + f_gn(u),
            levy_density=density,
            atom_at_zero=(lambda t: math.exp(-lam * t)) if a == 0 else None,
            total_mass_finite=a == 0,
            closed_log_moment=log_moment,
        )

    if fam is Family.DriftedPoisson:
        a = p.a
        return LevyCharacterization(
            bernstein=lambda u: a * u - lam * math.expm1(-u),
            levy_density=lambda x: 0.0,
            atom_at_zero=(lambda t: math.exp(-lam * t)) if a == 0 else None,
            total_mass_finite=True,
            drift=a,
            point_masses=((1.0, lam),),
            closed_log_moment=lambda m, s: math.log(lam) - s,
        )

    raise ValueError(f"{fam.value} is a counting process, not a subordinator")


def density_gna(y: float, t: float, p: ModelParams,
                ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Density of ``G(a t + N(t))`` at ``y`` (requires ``a > 0``).

    ``e^{-beta y - lam t} (beta y)^{alpha a t} / y * Phi(alpha, alpha a t, lam t (beta y)^alpha)``
    """
    if p.a == 0:
        raise ValueError("G(N(t)) has an atom at 0; use dist_gn_with_atom for a = 0")
    if t <= 0:
        raise ValueError("density_gna needs t > 0; at t = 0 the law is the unit mass at 0")
    if y <= 0:
        return 0.0
    al, b = p.alpha, p.beta
    shape = al * p.a * t
    z = p.lam * t * (b * y) ** al
    lphi, sphi = log_wright_phi(al, shape, z, ctl)
    if sphi == 0:
        return 0.0
    return sphi * math.exp(-y * b - p.lam * t + shape * math.log(b * y) - math.log(y) + lphi)


def density_ena(y: float, t: float, p: ModelParams,
                ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Density of ``E(a t + N(t))`` at ``y`` through the Bessel function ``I_{at-1}``."""
    if p.a == 0:
        raise ValueError("E(N(t)) has an atom at 0; use dist_gn_with_atom for a = 0")
    if t <= 0:
        raise ValueError("density_ena needs t > 0")
    if y <= 0:
        return 0.0
    b, lt, at = p.beta, p.lam * t, p.a * t
    li, si = log_bessel_i(at - 1, 2 * math.sqrt(lt * b * y), ctl)
    if si == 0:
        return 0.0
    return si * math.exp(-y * b - lt + 0.5 * (at + 1) * math.log(b)
                         + 0.5 * (at - 1) * math.log(y / lt) + li)


def dist_gn_with_atom(s: float, t: float, p: ModelParams,
                      ctl: SeriesControl = DEFAULT_CONTROL) -> tuple[float, float]:
    """Law of ``G(N(t))``: the atom ``e^{-lam t}`` at 0 and the density at ``s > 0``."""
    atom = math.exp(-p.lam * t)
    if t <= 0 or s <= 0:
        return atom, 0.0
    z = p.lam * t * (p.beta * s) ** p.alpha
    lphi, sphi = log_wright_phi(p.alpha, 0.0, z, ctl)
    if sphi == 0:
        return atom, 0.0
    return atom, sphi * math.exp(-p.lam * t - p.beta * s - math.log(s) + lphi)


@dataclass(frozen=True)
class MomentSet:
    mean: float
    variance: float
    covariance: Callable[[float, float], float] = field(repr=False)
    cov_ts: float = math.nan


def moments(family: "str | Family", p: ModelParams, t: float, s: Optional[float] = None) -> MomentSet:
    """Mean and variance at ``t`` and covariance at ``(t, s)``.

    Families: ``DriftedPoisson`` (``a t + N(t)``), ``GNa`` (``G(a t + N(t))``)
    and ``N1GNa`` (``N1(G(a t + N(t)))``).  Setting ``a = 0`` or ``alpha = 1``
    covers GN, EN and ENa.
    """
    fam = Family.parse(family)
    lam, al, b, l1, a = p.lam, p.alpha, p.beta, p.lam1, p.a
    if fam is Family.DriftedPoisson:
        m, rate = (lam + a), lam
    elif fam is Family.GNa:
        m, rate = al / b * (lam + a), al / b ** 2 * (lam * al + lam + a)
    elif fam is Family.N1GNa:
        m = l1 * al / b * (lam + a)
        rate = l1 * al / b ** 2 * (l1 * (lam * al + lam + a) + (lam + a) * b)
    else:
        raise ValueError(f"no moment formulas for family {fam.value}")

    def cov(t1: float, t2: float) -> float:
        return rate * min(t1, t2)

    return MomentSet(mean=m * t, variance=rate * t, covariance=cov,
                     cov_ts=cov(t, s) if s is not None else math.nan)
