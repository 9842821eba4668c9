"""Monte Carlo sampling and ODE-residual checks for the closed forms.

Sampling is split into fixed-size blocks.  Block ``i`` draws from
``Generator(PCG64(SeedSequence(seed, spawn_key=(i,))))`` and blocks are
concatenated in index order, so a run depends only on ``(seed, n_samples)``
and never on how many workers processed the blocks.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy import stats

from .iterate import IterChain, chain_characterization, ode_coefficients
from .models import FIG1, FIG2, FIG3, FIG4, Family, ModelParams, characterize, moments
from .pmf import (
    PMF_FAMILIES,
    adaptive_kmax,
    build_table,
    pgf_coefficients,
    pmf,
    pmf_via_pgf,
    subordinator_of,
)
from .specfun import SeriesControl

__all__ = [
    "SimConfig",
    "EmpiricalPmf",
    "HitEstimate",
    "CheckResult",
    "VerificationReport",
    "BLOCK_SIZE",
    "ODE_CONTROL",
    "ODE_SYSTEMS",
    "sample_process",
    "empirical_pmf",
    "simulate_hit",
    "ks_two_sample",
    "chi_square_gof",
    "ode_residual",
    "richardson_ratio",
    "run_suite",
]

BLOCK_SIZE = 1 << 16
# Residuals compare a finite difference against the right-hand side, so the
# pmfs are summed to full double precision.
ODE_CONTROL = SeriesControl(tol=1e-17)
ODE_SYSTEMS = ("GeneralEq5", "GN_Eq9", "EN_Eq15", "GNa_Eq38", "ENa_Thm6", "Iter_Thm8")
FIGURES = {Family.N1GN: FIG1, Family.N1EN: FIG2, Family.N1GNa: FIG3, Family.N1ENa: FIG4}


@dataclass(frozen=True)
class SimConfig:
    seed: int
    n_samples: int
    t: float = 1.0
    workers: int = 1

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples!r}")
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers!r}")


def _blocks(cfg: SimConfig, draw: Callable[[np.random.Generator, int], np.ndarray]) -> np.ndarray:
    sizes = [BLOCK_SIZE] * (cfg.n_samples // BLOCK_SIZE)
    if cfg.n_samples % BLOCK_SIZE:
        sizes.append(cfg.n_samples % BLOCK_SIZE)

    def run(i: int) -> np.ndarray:
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(cfg.seed), spawn_key=(i,))))
        return draw(rng, sizes[i])

    if cfg.workers == 1:
        parts = [run(i) for i in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    return np.concatenate(parts)


def _gamma(rng: np.random.Generator, shape: np.ndarray, rate: float) -> np.ndarray:
    """Gamma draws with shape 0 mapped to the unit mass at 0."""
    out = np.zeros(shape.shape)
    pos = shape > 0
    out[pos] = rng.standard_gamma(shape[pos]) / rate
    return out


def sample_process(family: Union[str, Family], target: Union[ModelParams, IterChain],
                   cfg: SimConfig, t: Optional[float] = None) -> np.ndarray:
    """``cfg.n_samples`` independent draws of the process at time ``t`` (default ``cfg.t``).

    ``family="IterChain"`` samples ``X_n(t)`` of the chain ``target`` from the
    innermost stage out.  Other families take ``ModelParams``; the EN variants
    use ``alpha = 1`` and the GN/EN variants ignore ``a``.
    """
    t = cfg.t if t is None else t
    if str(family).lower() == "iterchain":
        if not isinstance(target, IterChain):
            raise TypeError("IterChain sampling needs an IterChain target")

        def draw_chain(rng, size):
            x = np.full(size, target.base_scale * t)
            for s in target.stages:
                jumps = rng.poisson(s.lam * x)
                x = _gamma(rng, s.a * t + jumps, s.beta)
            return x

        return _blocks(cfg, draw_chain)

    fam = Family.parse(family)
    if not isinstance(target, ModelParams):
        raise TypeError(f"{fam.value} sampling needs ModelParams")
    p = target
    outer = fam in PMF_FAMILIES
    clock = subordinator_of(fam) if outer else fam
    if clock is Family.DriftedPoisson:
        raise ValueError("DriftedPoisson is not sampled here")
    alpha = 1.0 if clock in (Family.EN, Family.ENa) else p.alpha
    drift = p.a if clock in (Family.GNa, Family.ENa) else 0.0

    def draw(rng, size):
        n = rng.poisson(p.lam * t, size)
        g = _gamma(rng, alpha * (n + drift * t), p.beta)
        if outer:
            return rng.poisson(p.lam1 * g).astype(np.int64)
        return g

    return _blocks(cfg, draw)


@dataclass
class EmpiricalPmf:
    counts: np.ndarray
    n_samples: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.n_samples:
            raise ValueError("bin counts must add up to n_samples")

    @property
    def probs(self) -> np.ndarray:
        return self.counts / self.n_samples

    @property
    def stderr(self) -> np.ndarray:
        p = self.probs
        return np.sqrt(p * (1 - p) / self.n_samples)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(max(length, len(self.counts)))
        out[:len(self.counts)] = self.probs
        return out

    def tv_distance(self, probs: np.ndarray) -> float:
        """Total variation distance; mass of ``probs`` beyond its length is ignored."""
        length = max(len(probs), len(self.counts))
        ref = np.zeros(length)
        ref[:len(probs)] = probs
        return 0.5 * float(np.abs(self.padded(length) - ref).sum())

    def sigma_check(self, probs: np.ndarray, min_expected: float = 20.0,
                    width: float = 3.0) -> tuple[float, list[int]]:
        """``(max |z|, failing bins)`` over bins with expected count ``>= min_expected``."""
        emp = self.padded(len(probs))[:len(probs)]
        se = np.sqrt(emp * (1 - emp) / self.n_samples)
        mask = probs * self.n_samples >= min_expected
        with np.errstate(divide="ignore", invalid="ignore"):
            z = np.where(mask, np.abs(emp - probs) / se, 0.0)
        z[mask & (se == 0)] = np.inf
        return float(z.max(initial=0.0)), [int(k) for k in np.nonzero(z > width)[0]]


def empirical_pmf(family: Union[str, Family], p: ModelParams, cfg: SimConfig,
                  t: Optional[float] = None) -> EmpiricalPmf:
    fam = Family.parse(family)
    if fam not in PMF_FAMILIES:
        raise ValueError(f"{fam.value} is not a counting family")
    draws = sample_process(fam, p, cfg, t)
    return EmpiricalPmf(counts=np.bincount(draws), n_samples=cfg.n_samples)


def chi_square_gof(emp: EmpiricalPmf, probs: np.ndarray, min_expected: float = 5.0
                   ) -> tuple[float, int, float]:
    """Pearson chi-square test; bins with small expected counts are pooled into the tail.

    Returns ``(statistic, degrees of freedom, p-value)``.
    """
    n = emp.n_samples
    probs = np.asarray(probs, dtype=float)
    counts = np.zeros(max(len(probs), len(emp.counts)))
    counts[:len(emp.counts)] = emp.counts
    expected = np.zeros_like(counts)
    expected[:len(probs)] = probs * n
    # pool from the right until the tail bin is large enough
    cut = len(probs)
    while cut > 1 and expected[cut - 1:].sum() < min_expected:
        cut -= 1
    keep = [i for i in range(cut - 1) if expected[i] >= min_expected]
    obs = list(counts[keep])
    exp = list(expected[keep])
    rest = np.ones(len(counts), bool)
    rest[keep] = False
    obs.append(counts[rest].sum())
    exp.append(n - sum(exp))
    res = stats.chisquare(obs, exp)
    return float(res.statistic), len(obs) - 1, float(res.pvalue)


@dataclass(frozen=True)
class HitEstimate:
    estimate: float
    stderr: float
    n_samples: int
    bias_bound: float


def simulate_hit(k: int, q, cfg: SimConfig, max_jumps: Optional[int] = None) -> HitEstimate:
    """Frequency with which the embedded jump chain lands exactly on ``k``.

    Every jump is at least 1, so ``k`` jumps always suffice and the
    ``max_jumps = 64 k`` guard never binds.  The only bias comes from the jump
    law's truncation: at most ``k * q.tail``.
    """
    if k < 1 or int(k) != k:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    max_jumps = 64 * k if max_jumps is None else max_jumps
    cdf = np.cumsum(q.q)
    cdf /= cdf[-1]

    def draw(rng, size):
        pos = np.zeros(size, np.int64)
        active = np.ones(size, bool)
        for _ in range(max_jumps):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            jumps = np.searchsorted(cdf, rng.random(idx.size), side="right") + 1
            pos[idx] += jumps
            active[idx] = pos[idx] < k
        return (pos == k).astype(np.int8)

    hits = _blocks(cfg, draw)
    p = float(hits.mean())
    return HitEstimate(estimate=p, stderr=math.sqrt(max(p * (1 - p), 0.0) / cfg.n_samples),
                       n_samples=cfg.n_samples, bias_bound=k * q.tail)


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value."""
    a, b = np.asarray(a), np.asarray(b)
    if a.size == 0 or b.size == 0:
        raise ValueError("both samples must be nonempty")
    res = stats.ks_2samp(a, b, method="asymp")
    return float(res.statistic), float(res.pvalue)


# ---------------------------------------------------------------- ODE systems


def _pmf_vector(system: str, target, k: int, t: float, mu: float,
                family: Family, ctl: SeriesControl) -> np.ndarray:
    """``p_0(t), ..., p_k(t)`` for the process the system describes."""
    if isinstance(target, IterChain):
        return pgf_coefficients(t, chain_characterization(target), mu, order=k)
    return np.array([pmf(family, j, t, target, ctl) for j in range(k + 1)])


def _system_family(system: str, family: Optional[Union[str, Family]]) -> Family:
    return {
        "GN_Eq9": Family.N1GN,
        "EN_Eq15": Family.N1EN,
        "GNa_Eq38": Family.N1GNa,
        "ENa_Thm6": Family.N1ENa,
    }.get(system, Family.parse(family) if family is not None else Family.N1GN)


def _rhs(system: str, target, pv: np.ndarray, mu: float, family: Family) -> float:
    k = len(pv) - 1
    m = np.arange(1, k + 1)
    lower = pv[k - 1::-1][:k] if k else np.zeros(0)  # p_{k-1}, ..., p_0
    if system == "Iter_Thm8":
        total = 0.0
        for comp in ode_coefficients(target):
            total += float(np.dot(comp.shift_coefficients(mu, k), pv[::-1]))
        return -total
    if system == "GeneralEq5":
        if isinstance(target, IterChain):
            char, lam1 = chain_characterization(target), mu
        else:
            char, lam1 = characterize(subordinator_of(family), target), target.lam1
        w = np.array([math.exp(j * math.log(lam1) - math.lgamma(j + 1) + char.log_jump_moment(j, lam1))
                      for j in m]) + np.where(m == 1, char.drift * lam1, 0.0)
        return -char.bernstein(lam1) * pv[k] + float(np.dot(w, lower))
    p = target
    lam, beta, l1, a = p.lam, p.beta, p.lam1, p.a
    rho, x = p.rho, p.x
    lg = np.array([math.lgamma(j + 1) for j in m])
    if system == "GN_Eq9":
        al = p.alpha
        c = lam * x ** al
        w = c * np.exp(m * math.log(rho) + np.array([math.lgamma(j + al) for j in m]) - lg - math.lgamma(al))
        return (c - lam) * pv[k] + float(np.dot(w, lower))
    if system == "EN_Eq15":
        return -lam * rho * pv[k] + lam * x * float(np.dot(rho ** m, lower))
    if system == "GNa_Eq38":
        al = p.alpha
        lead = a * al * math.log1p(l1 / beta) - lam * math.expm1(al * math.log(x))
        w = np.exp(m * math.log(rho) - lg) * (
            a * al * np.exp(lg - np.log(m))
            + lam * x ** al * np.exp(np.array([math.lgamma(j + al) for j in m]) - math.lgamma(al)))
        return -lead * pv[k] + float(np.dot(w, lower))
    if system == "ENa_Thm6":
        lead = a * math.log1p(l1 / beta) + lam * rho
        w = rho ** m * (a / m + lam * x)
        return -lead * pv[k] + float(np.dot(w, lower))
    raise ValueError(f"unknown system {system!r}; expected one of {ODE_SYSTEMS}")


def ode_residual(system: str, k: int, t: float, target: Union[ModelParams, IterChain],
                 h: float = 1e-4, mu: float = 1.0, family: Optional[Union[str, Family]] = None,
                 ctl: SeriesControl = ODE_CONTROL) -> float:
    """``|central difference of p_k at t - right-hand side of the system|``.

    ``GeneralEq5`` takes ``family`` (a counting family for ``ModelParams``) or
    an ``IterChain`` with outer rate ``mu``; ``Iter_Thm8`` needs an
    ``IterChain`` in a closed-form regime.
    """
    if system not in ODE_SYSTEMS:
        raise ValueError(f"unknown system {system!r}; expected one of {ODE_SYSTEMS}")
    if k < 0 or int(k) != k:
        raise ValueError(f"k must be a non-negative integer, got {k!r}")
    if not t > h > 0:
        raise ValueError("need t > h > 0")
    if system == "Iter_Thm8" and not isinstance(target, IterChain):
        raise TypeError("Iter_Thm8 needs an IterChain")
    fam = _system_family(system, family)
    hi = _pmf_vector(system, target, k, t + h, mu, fam, ctl)[k]
    lo = _pmf_vector(system, target, k, t - h, mu, fam, ctl)[k]
    fd = (hi - lo) / (2 * h)
    return abs(fd - _rhs(system, target, _pmf_vector(system, target, k, t, mu, fam, ctl), mu, fam))


def richardson_ratio(system: str, k: int, t: float, target, h: float = 1e-4, **kw) -> float:
    """``r(h) / r(h/2)``; close to 4 when the residual is the O(h^2) difference error."""
    return ode_residual(system, k, t, target, h, **kw) / ode_residual(system, k, t, target, h / 2, **kw)


# --------------------------------------------------------------- check suites


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: float
    observed: float
    tolerance: float
    passed: bool

    @classmethod
    def within(cls, name: str, expected: float, observed: float, tol: float) -> "CheckResult":
        return cls(name, float(expected), float(observed), float(tol),
                   bool(abs(observed - expected) <= tol))

    @classmethod
    def below(cls, name: str, observed: float, bound: float) -> "CheckResult":
        return cls(name, 0.0, float(observed), float(bound), bool(observed <= bound))

    @classmethod
    def between(cls, name: str, observed: float, lo: float, hi: float) -> "CheckResult":
        return cls(name, (lo + hi) / 2, float(observed), (hi - lo) / 2, bool(lo <= observed <= hi))


@dataclass
class VerificationReport:
    suite: str
    seed: int
    n: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"suite": self.suite, "seed": self.seed, "n": self.n, "passed": self.passed,
                "checks": [asdict(c) for c in self.checks]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=True)


# (system, k, t, target, extra kwargs); points where |p'''| is large enough
# for the O(h^2) difference error to dominate rounding
ODE_POINTS = (
    ("GN_Eq9", 0, 1.0, FIG1, {}),
    ("GN_Eq9", 1, 0.5, FIG1, {}),
    ("EN_Eq15", 1, 0.5, FIG2, {}),
    ("GNa_Eq38", 1, 0.5, FIG3.with_(a=0.5), {}),
    ("ENa_Thm6", 1, 0.5, FIG4.with_(a=0.5), {}),
    ("GeneralEq5", 1, 0.5, FIG1, {"family": "N1GN"}),
    ("Iter_Thm8", 1, 0.5, IterChain.uniform(3, 0.5, 2.0, 3.0), {"mu": 2.0}),
)


def _suite_pmf(seed: int, n: int, workers: int) -> list[CheckResult]:
    out = []
    for fam, p in FIGURES.items():
        char = characterize(subordinator_of(fam), p)
        for t in (1.0, 2.0, 3.0):
            worst = max(abs(pmf(fam, k, t, p) - pmf_via_pgf(k, t, char, p.lam1)) for k in range(16))
            out.append(CheckResult.below(f"pmf/{fam.value}/t={t:g}/pgf-oracle", worst, 1e-9))
            table = build_table(fam, p, [t], max_tail=None)
            out.append(CheckResult.below(f"pmf/{fam.value}/t={t:g}/normalization",
                                         float(table.tail_mass[0]), 1e-9))
            emp = empirical_pmf(fam, p, SimConfig(seed, n, t, workers))
            zmax, _ = emp.sigma_check(table.probs[0])
            out.append(CheckResult.below(f"pmf/{fam.value}/t={t:g}/monte-carlo-max-z", zmax, 3.0))
    return out


def _suite_moments(seed: int, n: int, workers: int) -> list[CheckResult]:
    out = []
    p = FIG3
    for fam, label in ((Family.GNa, "GNa"), (Family.N1GNa, "N1GNa")):
        draws = sample_process(fam, p, SimConfig(seed, n, 1.0, workers)).astype(float)
        ms = moments(fam, p, 1.0)
        se_mean = draws.std() / math.sqrt(n)
        c = draws - draws.mean()
        se_var = math.sqrt(max(np.mean(c ** 4) - np.mean(c ** 2) ** 2, 0.0) / n)
        out.append(CheckResult.within(f"moments/{label}/mean", ms.mean, draws.mean(), 3 * se_mean))
        out.append(CheckResult.within(f"moments/{label}/variance", ms.variance, draws.var(), 3 * se_var))
    return out


def _suite_hitting(seed: int, n: int, workers: int) -> list[CheckResult]:
    from .passage import (
        hit_prob_alpha2,
        hit_prob_by_quadrature,
        hit_prob_n1gn,
        hit_prob_renewal,
        jump_distribution,
    )

    out = []
    grid = (0.5, 1.0, 2.0)
    worst = 0.0
    for al in grid:
        for b in grid:
            for l1 in grid:
                p = ModelParams(lam=1.0, alpha=al, beta=b, lam1=l1)
                q = jump_distribution(p)
                worst = max(worst, max(abs(hit_prob_n1gn(k, p) - hit_prob_renewal(k, q))
                                       for k in range(1, 21)))
    out.append(CheckResult.below("hitting/series-vs-renewal/grid", worst, 1e-10))
    exp_p = ModelParams(lam=1.0, alpha=1.0, beta=0.8, lam1=1.0)
    out.append(CheckResult.below("hitting/alpha=1/constant-4/9",
                                 max(abs(hit_prob_n1gn(k, exp_p) - 4 / 9) for k in range(1, 21)), 1e-12))
    inv = max(max(hit_prob_n1gn(k, FIG1.with_(lam=l)) for l in (0.5, 2, 7))
              - min(hit_prob_n1gn(k, FIG1.with_(lam=l)) for l in (0.5, 2, 7)) for k in range(1, 11))
    out.append(CheckResult.below("hitting/lambda-invariance", inv, 1e-14))
    p2 = ModelParams(lam=1.0, alpha=2.0, beta=1.0, lam1=1.0)
    out.append(CheckResult.within("hitting/alpha=2/closed-form", 1 / 3, hit_prob_alpha2(1, p2), 1e-10))
    out.append(CheckResult.within("hitting/alpha=2/renewal", 1 / 3,
                                  hit_prob_renewal(1, jump_distribution(p2)), 1e-10))
    for k in (2, 5):
        out.append(CheckResult.within(f"hitting/density-integral/k={k}", hit_prob_n1gn(k, FIG1),
                                      hit_prob_by_quadrature(k, FIG1), 1e-8))
    for label, p, k in (("alpha=1,k=5", exp_p, 5), ("alpha=2,k=1", p2, 1), ("fig1,k=10", FIG1, 10)):
        q = jump_distribution(p)
        est = simulate_hit(k, q, SimConfig(seed, n, 1.0, workers))
        exact = hit_prob_renewal(k, q)
        out.append(CheckResult.within(f"hitting/monte-carlo/{label}", exact, est.estimate,
                                      3 * math.sqrt(exact * (1 - exact) / n)))
    return out


def _suite_ode() -> list[CheckResult]:
    out = []
    for system, k, t, target, kw in ODE_POINTS:
        r = ode_residual(system, k, t, target, 1e-4, **kw)
        r2 = ode_residual(system, k, t, target, 5e-5, **kw)
        out.append(CheckResult.below(f"ode/{system}/k={k}/t={t:g}/residual", r, 1e-6))
        out.append(CheckResult.between(f"ode/{system}/k={k}/t={t:g}/richardson", r / r2, 3.5, 4.5))
    return out


def _suite_iterate(seed: int, n: int, workers: int) -> list[CheckResult]:
    from scipy import integrate

    from .iterate import (
        ExpMixture,
        Stage,
        bessel_transform_levy,
        collapse_chain,
        compose_bernstein,
        iter_bernstein,
        iter_levy_density,
    )

    out = []
    us = np.geomspace(1e-3, 10, 30)
    worst = 0.0
    for n_st in range(1, 6):
        for beta, lam in ((1.0, 1.0), (2.0, 3.0)):
            ch = IterChain(tuple(Stage(0.3 * i, beta, lam) for i in range(1, n_st + 1)))
            worst = max(worst, max(abs(iter_bernstein(u, ch) - compose_bernstein(u, ch)) for u in us))
    out.append(CheckResult.below("iterate/closed-vs-composition", worst, 1e-12))
    rel = 0.0
    for ch in (IterChain.uniform(3, 0.7), IterChain.uniform(2, 0.4, 2.0, 3.0)):
        for u in (0.1, 1.0, 5.0):
            val, _ = integrate.quad(lambda x: -math.expm1(-u * x) * iter_levy_density(x, ch),
                                    0, math.inf, epsabs=1e-13, epsrel=1e-11, limit=400)
            rel = max(rel, abs(val / iter_bernstein(u, ch) - 1))
    out.append(CheckResult.below("iterate/levy-bernstein-quadrature", rel, 1e-7))
    g, al, a = 0.6, 1.5, 0.4
    z = bessel_transform_levy(ExpMixture(((g, a, g * g),)), a, al, al)
    r = al * g / (al + g)
    xs = np.geomspace(0.05, 10, 10)
    err = max(abs(z.levy_density(x) - math.exp(-r * x) * (a / x + r * r)) for x in xs)
    out.append(CheckResult.below("iterate/one-step-closure", err, 1e-10))
    nested = IterChain((Stage(0.5, 0.5, 0.5), Stage(0.5, 1 / 3, 1 / 3)))
    single = collapse_chain(nested)
    cerr = max(abs(compose_bernstein(u, nested) - characterize("ENa", single).bernstein(u)) for u in us)
    out.append(CheckResult.below("iterate/collapse-bernstein", cerr, 1e-12))
    m = min(n, 100_000) if n >= 1000 else n
    xa = sample_process("IterChain", nested, SimConfig(seed, m, 1.0, workers))
    xb = sample_process("ENa", single, SimConfig(seed + 1, m, 1.0, workers))
    _, pval = ks_two_sample(xa, xb)
    out.append(CheckResult(name="iterate/collapse-ks", expected=1.0, observed=pval,
                           tolerance=0.01, passed=pval > 0.01))
    return out


def run_suite(suite: str = "all", seed: int = 42, n: int = 100_000, workers: int = 1
              ) -> VerificationReport:
    """Run a named group of checks.  Monte Carlo tolerances are 3 standard errors at ``n``."""
    suites = ("all", "pmf", "hitting", "ode", "iterate")
    if suite not in suites:
        raise ValueError(f"suite must be one of {suites}, got {suite!r}")
    rep = VerificationReport(suite, seed, n)
    if suite in ("all", "pmf"):
        rep.checks += _suite_pmf(seed, n, workers)
        rep.checks += _suite_moments(seed, n, workers)
    if suite in ("all", "hitting"):
        rep.checks += _suite_hitting(seed, n, workers)
    if suite in ("all", "ode"):
        rep.checks += _suite_ode()
    if suite in ("all", "iterate"):
        rep.checks += _suite_iterate(seed, n, workers)
    return rep
