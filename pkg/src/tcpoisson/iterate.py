"""Iterated Bessel transforms ``X_n(t) = E_n(a_n t + N_n(X_{n-1}(t)))``.

The one-step transform ``X -> E_beta(a t + N_lam(X(t)))`` maps a Levy measure
of the form ``sum_i e^{-r_i x} (c_i / x + d_i)`` (plus a drift) to another
measure of the same form, so every chain has an exact exponential-mixture
Levy density.  :class:`ExpMixture` carries that algebra and serves as the
reference for the closed forms of homogeneous chains.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy import integrate

from .models import LevyCharacterization, ModelParams
from .specfun import NEG_INF, log_wright_phi

__all__ = [
    "Stage",
    "IterChain",
    "UnsupportedRegime",
    "ExpMixture",
    "LogComponent",
    "RationalComponent",
    "gamma_sum",
    "bessel_transform_levy",
    "chain_mixture",
    "iter_levy_density",
    "iter_bernstein",
    "compose_bernstein",
    "collapse_chain",
    "ode_coefficients",
    "chain_characterization",
]


class UnsupportedRegime(ValueError):
    """The chain lies outside the parameter regimes that have a closed form."""


@dataclass(frozen=True)
class Stage:
    a: float
    beta: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a >= 0):
            raise ValueError(f"stage drift must be >= 0, got {self.a!r}")
        for name in ("beta", "lam"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"stage {name} must be positive, got {v!r}")


@dataclass(frozen=True)
class IterChain:
    """Stages ``(a_i, beta_i, lam_i)``, innermost first, over the base ``X_0(t) = base_scale * t``."""

    stages: tuple[Stage, ...]
    base_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(
            s if isinstance(s, Stage) else Stage(*s) for s in self.stages))
        if len(self.stages) < 1:
            raise ValueError("a chain needs at least one stage")
        if not (math.isfinite(self.base_scale) and self.base_scale > 0):
            raise ValueError(f"base scale must be positive, got {self.base_scale!r}")

    @property
    def n(self) -> int:
        return len(self.stages)

    @property
    def identity_base(self) -> bool:
        return self.base_scale == 1.0

    def drifts(self) -> list[float]:
        """``[a_0, a_1, ..., a_n]`` with ``a_0 = 0``."""
        return [0.0] + [s.a for s in self.stages]

    @classmethod
    def uniform(cls, n: int, a: float, beta: float = 1.0, lam: float = 1.0,
                base_scale: float = 1.0) -> "IterChain":
        return cls(tuple(Stage(a, beta, lam) for _ in range(n)), base_scale)

    @classmethod
    def from_dict(cls, d: dict) -> "IterChain":
        stages = tuple(Stage(float(s["a"]), float(s["beta"]), float(s["lambda"]))
                       for s in d["stages"])
        base = d.get("base", "identity")
        if base == "identity":
            scale = 1.0
        elif isinstance(base, dict) and set(base) == {"scaled"}:
            scale = float(base["scaled"])
        else:
            raise ValueError(f"base must be 'identity' or {{'scaled': value}}, got {base!r}")
        return cls(stages, scale)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "IterChain":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        base = "identity" if self.identity_base else {"scaled": self.base_scale}
        return {"stages": [{"a": s.a, "beta": s.beta, "lambda": s.lam} for s in self.stages],
                "base": base}


def gamma_sum(lam: float, beta: float, m: int) -> float:
    """``sum_{j=1}^m lam^{m-j} beta^{j-1}``, finite at ``lam = beta``."""
    return math.fsum(lam ** (m - j) * beta ** (j - 1) for j in range(1, m + 1))


@dataclass(frozen=True)
class ExpMixture:
    """Levy measure ``sum_i e^{-r_i x} (c_i / x + d_i) dx`` plus a linear drift.

    ``terms`` holds ``(r_i, c_i, d_i)``.  Terms with equal rates are merged.
    """

    terms: tuple[tuple[float, float, float], ...] = ()
    drift: float = 0.0

    def __post_init__(self):
        merged: dict[float, list[float]] = {}
        for r, c, d in self.terms:
            if not r > 0:
                raise ValueError(f"mixture rates must be positive, got {r!r}")
            key = next((k for k in merged if abs(k - r) <= 1e-14 * r), r)
            acc = merged.setdefault(key, [0.0, 0.0])
            acc[0] += c
            acc[1] += d
        scale = max([abs(c) + abs(d) for c, d in merged.values()] + [0.0])
        kept = tuple((r, c, d) for r, (c, d) in merged.items()
                     if abs(c) + abs(d) > 1e-14 * scale)
        object.__setattr__(self, "terms", kept)

    def density(self, x: float) -> float:
        if x <= 0:
            return 0.0
        return math.fsum(math.exp(-r * x) * (c / x + d) for r, c, d in self.terms)

    def bernstein(self, u: float) -> float:
        parts = [self.drift * u]
        for r, c, d in self.terms:
            parts.append(c * math.log1p(u / r) + d * u / (r * (r + u)))
        return math.fsum(parts)

    def log_jump_moment(self, m: int, s: float) -> float:
        if m < 1:
            raise ValueError("jump moments are taken for m >= 1")
        # c Gamma(m) / (s+r)^m + d Gamma(m+1) / (s+r)^{m+1}, positive for chain measures
        logs, signs = [], []
        for r, c, d in self.terms:
            lr = math.log(s + r)
            if c:
                logs.append(math.lgamma(m) - m * lr + math.log(abs(c)))
                signs.append(math.copysign(1.0, c))
            if d:
                logs.append(math.lgamma(m + 1) - (m + 1) * lr + math.log(abs(d)))
                signs.append(math.copysign(1.0, d))
        if not logs:
            return NEG_INF
        top = max(logs)
        total = math.fsum(sg * math.exp(l - top) for l, sg in zip(logs, signs))
        if total <= 0:
            return NEG_INF
        return top + math.log(total)

    def transform(self, a: float, beta: float, lam: float) -> "ExpMixture":
        """Exact one-step Bessel transform with exponential jumps (``alpha = 1``)."""
        out = [(beta, a, 0.0)]
        if self.drift:
            # N_lam(drift * t) is Poisson at rate lam*drift, each event adds an Exp(beta) jump
            out.append((beta, 0.0, self.drift * lam * beta))
        for r, c, d in self.terms:
            r_new = beta * r / (lam + r)
            out.append((beta, -c, 0.0))
            out.append((r_new, c, d * lam * beta / (lam + r) ** 2))
        return ExpMixture(tuple(out))

    def characterization(self) -> LevyCharacterization:
        return LevyCharacterization(
            bernstein=self.bernstein,
            levy_density=self.density,
            atom_at_zero=None,
            total_mass_finite=all(c == 0 for _, c, _ in self.terms),
            drift=self.drift,
            closed_log_moment=self.log_jump_moment,
        )


def _kernel(u: float, x: float, beta: float, lam: float, alpha: float) -> float:
    """``e^{-lam u - beta x} x^{-1} Phi(alpha, 0, lam u (beta x)^alpha)``.

    The ``e^{-beta x}`` factor is kept inside the exponent: on its own the
    Wright function overflows for large ``x``.
    """
    if u <= 0:
        return 0.0
    lphi, sphi = log_wright_phi(alpha, 0.0, lam * u * (beta * x) ** alpha)
    if sphi == 0:
        return 0.0
    return sphi * math.exp(lphi - lam * u - beta * x - math.log(x))


def bessel_transform_levy(nu_x: Union[LevyCharacterization, ExpMixture], a: float, beta: float,
                          lam: float, alpha: float = 1.0, method: str = "auto"
                          ) -> LevyCharacterization:
    """Levy characterization of ``G_{alpha,beta}(a t + N_lam(X(t)))``.

    ``method="closed"`` needs ``nu_x`` as an :class:`ExpMixture` and
    ``alpha = 1``; ``method="quad"`` integrates the Wright-function kernel
    against ``nu_x`` pointwise.  ``"auto"`` picks the closed path when it
    applies.
    """
    if method not in ("auto", "closed", "quad"):
        raise ValueError(f"unknown method {method!r}")
    closed_ok = isinstance(nu_x, ExpMixture) and alpha == 1
    if method == "closed" and not closed_ok:
        raise ValueError("the closed path needs an ExpMixture measure and alpha = 1")
    if method != "quad" and closed_ok:
        return nu_x.transform(a, beta, lam).characterization()

    char = nu_x.characterization() if isinstance(nu_x, ExpMixture) else nu_x
    lg_alpha = math.lgamma(alpha)

    def density(x: float) -> float:
        if x <= 0:
            return 0.0
        parts = [a * alpha / x * math.exp(-beta * x)]
        if char.drift:
            parts.append(char.drift * lam * math.exp(alpha * math.log(beta) - lg_alpha
                                                     + (alpha - 1) * math.log(x) - beta * x))
        for loc, w in char.point_masses:
            parts.append(w * _kernel(loc, x, beta, lam, alpha))
        val, _ = integrate.quad(lambda u: _kernel(u, x, beta, lam, alpha) * char.levy_density(u),
                                0.0, math.inf, epsabs=1e-300, epsrel=1e-12, limit=400)
        parts.append(val)
        return math.fsum(parts)

    def bernstein(u: float) -> float:
        inner = -lam * math.expm1(-alpha * math.log1p(u / beta))
        return a * alpha * math.log1p(u / beta) + char.bernstein(inner)

    return LevyCharacterization(
        bernstein=bernstein,
        levy_density=density,
        atom_at_zero=None,
        total_mass_finite=False if a > 0 else char.total_mass_finite,
    )


def chain_mixture(chain: IterChain) -> ExpMixture:
    """Exact Levy measure of ``X_n`` for any chain, by repeated transforms."""
    mix = ExpMixture((), drift=chain.base_scale)
    for s in chain.stages:
        mix = mix.transform(s.a, s.beta, s.lam)
    return mix


def _regime(chain: IterChain) -> tuple[float, float, float]:
    """``(beta, lam, scale)`` of a chain covered by the stage-by-stage closed forms.

    Homogeneous stages over the identity base, or unit stages (except possibly
    ``lam_1``) over a scaled base, where ``scale`` multiplies the rational term.
    """
    st = chain.stages
    b0, l0 = st[0].beta, st[0].lam
    if chain.identity_base and all(s.beta == b0 and s.lam == l0 for s in st):
        return b0, l0, 1.0
    if all(s.beta == 1.0 for s in st) and all(s.lam == 1.0 for s in st[1:]):
        return 1.0, 1.0, chain.base_scale * st[0].lam
    raise UnsupportedRegime(
        "closed forms need equal beta_i and lam_i across stages (identity base), "
        "beta_i = 1 and lam_i = 1 for i >= 2, or beta_i = lam_i with a common drift; "
        "use compose_bernstein or chain_mixture")


def _matched_rates(chain: IterChain) -> bool:
    """``beta_i = lam_i`` at every stage with a common drift over the identity base."""
    a = chain.stages[0].a
    return chain.identity_base and all(s.beta == s.lam and s.a == a for s in chain.stages)


def iter_levy_density(x: float, chain: IterChain) -> float:
    """Closed-form Levy density of ``X_n`` at ``x > 0``."""
    if not x > 0:
        raise ValueError(f"x must be positive, got {x!r}")
    return math.fsum(c.levy_density(x) for c in ode_coefficients(chain))


def iter_bernstein(u: float, chain: IterChain) -> float:
    """Closed-form Bernstein function ``f_n(u)``."""
    if u < 0:
        raise ValueError(f"u must be >= 0, got {u!r}")
    return math.fsum(c(u) for c in ode_coefficients(chain))


def compose_bernstein(u: float, chain: IterChain) -> float:
    """``f_n(u)`` by the recursion ``f_i(u) = a_i log(1 + u/beta_i) + f_{i-1}(lam_i u / (beta_i + u))``."""
    if u < 0:
        raise ValueError(f"u must be >= 0, got {u!r}")
    logs = []
    v = u
    # unroll from the outermost stage inwards
    for s in reversed(chain.stages):
        logs.append(s.a * math.log1p(v / s.beta))
        v = s.lam * v / (s.beta + v)
    logs.append(chain.base_scale * v)
    return math.fsum(logs)


def collapse_chain(chain: IterChain, lam1: float = 1.0) -> ModelParams:
    """Single-stage ``E(a t + N(t))`` parameters equal in law to the chain.

    Needs a common drift and either ``beta_i = lam_i`` at every stage
    (rates ``1/sum(1/beta_i)``) or homogeneous ``(beta, lam)`` (rates
    ``beta^n/gamma`` and ``lam^n/gamma``).  ``lam1`` is passed through as the
    outer counting rate.
    """
    if not chain.identity_base:
        raise UnsupportedRegime("collapse needs the identity base X_0(t) = t")
    a = chain.stages[0].a
    if any(s.a != a for s in chain.stages):
        raise UnsupportedRegime("collapse needs the same drift at every stage")
    if all(s.beta == s.lam for s in chain.stages):
        rate = 1.0 / math.fsum(1.0 / s.beta for s in chain.stages)
        return ModelParams(lam=rate, alpha=1.0, beta=rate, lam1=lam1, a=a)
    b0, l0 = chain.stages[0].beta, chain.stages[0].lam
    if all(s.beta == b0 and s.lam == l0 for s in chain.stages):
        g = gamma_sum(l0, b0, chain.n)
        return ModelParams(lam=l0 ** chain.n / g, alpha=1.0, beta=b0 ** chain.n / g, lam1=lam1, a=a)
    raise UnsupportedRegime("collapse needs beta_i = lam_i at every stage or homogeneous stages")


@dataclass(frozen=True)
class LogComponent:
    """``coef * log(1 + scale * u)``."""

    coef: float
    scale: float

    def __call__(self, u: float) -> float:
        return self.coef * math.log1p(self.scale * u)

    def levy_density(self, x: float) -> float:
        return self.coef * math.exp(-x / self.scale) / x

    def shift_coefficients(self, mu: float, order: int) -> np.ndarray:
        """``c_m`` with ``f(mu (1 - z)) = sum_m c_m z^m``, ``m = 0..order``."""
        sm = self.scale * mu
        q = sm / (1 + sm)
        m = np.arange(1, order + 1)
        c = np.empty(order + 1)
        c[0] = self.coef * math.log1p(sm)
        c[1:] = -self.coef * q ** m / m
        return c


@dataclass(frozen=True)
class RationalComponent:
    """``num * u / (base + slope * u)``."""

    num: float
    base: float
    slope: float

    def __call__(self, u: float) -> float:
        return self.num * u / (self.base + self.slope * u)

    def levy_density(self, x: float) -> float:
        # num u / (base + slope u) is the Bernstein function of d e^{-r x}
        return self.num * self.base / self.slope ** 2 * math.exp(-x * self.base / self.slope)

    def shift_coefficients(self, mu: float, order: int) -> np.ndarray:
        den = self.base + self.slope * mu
        r = self.slope * mu / den
        c = np.empty(order + 1)
        c[0] = self.num * mu / den
        c[1:] = -(self.num / self.slope) * (self.base / den) * r ** np.arange(1, order + 1)
        return c


def ode_coefficients(chain: IterChain) -> list[Union[LogComponent, RationalComponent]]:
    """Components ``f_{n,0}, ..., f_{n,n}`` whose sum is ``f_n``.

    ``p_k' = -sum_j f_{n,j}(mu (I - B)) p_k`` where ``B`` shifts ``k -> k-1``;
    each component exposes the expansion of ``f_{n,j}(mu (1 - z))`` in powers
    of ``z``.  Chains with ``beta_i = lam_i = 1/c_i`` and a common drift that
    are not homogeneous reduce to two components, ``a log(1 + c u)`` and
    ``u / (1 + c u)`` with ``c = sum c_i``.
    """
    try:
        beta, lam, scale = _regime(chain)
    except UnsupportedRegime:
        if not _matched_rates(chain):
            raise
        c = math.fsum(1.0 / s.beta for s in chain.stages)
        return [LogComponent(chain.stages[0].a, c), RationalComponent(1.0, 1.0, c)]
    n = chain.n
    a = chain.drifts()
    comps: list[Union[LogComponent, RationalComponent]] = [
        LogComponent(a[n - k] - a[n - k - 1], gamma_sum(lam, beta, k + 1) / beta ** (k + 1))
        for k in range(n)]
    comps.append(RationalComponent(scale * lam ** n, beta ** n, gamma_sum(lam, beta, n)))
    return comps


def chain_characterization(chain: IterChain) -> LevyCharacterization:
    """Levy characterization of ``X_n``; closed form when the regime allows, mixture otherwise."""
    mix = chain_mixture(chain)
    try:
        ode_coefficients(chain)
    except UnsupportedRegime:
        return mix.characterization()
    return LevyCharacterization(
        bernstein=lambda u: iter_bernstein(u, chain),
        levy_density=lambda x: iter_levy_density(x, chain) if x > 0 else 0.0,
        atom_at_zero=None,
        total_mass_finite=mix.characterization().total_mass_finite,
        closed_log_moment=mix.log_jump_moment,
    )
