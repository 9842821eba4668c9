"""Acceptance criteria 1-10.  A PASS/FAIL line per criterion is printed in the
terminal summary (see ``conftest.py``)."""

import csv
import math
import time

import numpy as np
import pytest

from tcpoisson.cli import main
from tcpoisson.iterate import (
    ExpMixture,
    IterChain,
    Stage,
    bessel_transform_levy,
    collapse_chain,
    compose_bernstein,
    iter_bernstein,
    iter_levy_density,
)
from tcpoisson.models import FIG3, ModelParams, characterize, moments
from tcpoisson.passage import (
    hit_prob_alpha2,
    hit_prob_n1gn,
    hit_prob_renewal,
    jump_distribution,
)
from tcpoisson.pmf import PMF_FAMILIES, build_table, pmf, pmf_via_pgf, subordinator_of
from tcpoisson.specfun import bessel_i, mittag_leffler3, wright_phi
from tcpoisson.verify import (
    FIGURES,
    ODE_POINTS,
    SimConfig,
    empirical_pmf,
    ks_two_sample,
    ode_residual,
    sample_process,
    simulate_hit,
)

SEED = 20261015
U_GRID = np.geomspace(1e-3, 10, 30)


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")
    return ok


@pytest.mark.criterion(1)
def test_criterion_01_hitting_constancy():
    start = time.perf_counter()
    p = ModelParams(lam=1.0, alpha=1.0, beta=0.8, lam1=1.0)
    worst = max(abs(hit_prob_n1gn(k, p) - 4 / 9) for k in range(1, 21))
    elapsed = time.perf_counter() - start
    assert report(1, worst <= 1e-12 and elapsed < 1, f"max err {worst:.2e}, {elapsed:.2f}s")


@pytest.mark.criterion(2)
def test_criterion_02_alpha2_three_routes_and_simulation():
    start = time.perf_counter()
    p = ModelParams(lam=1.0, alpha=2.0, beta=1.0, lam1=1.0)
    q = jump_distribution(p)
    routes = [hit_prob_n1gn(1, p), hit_prob_alpha2(1, p), hit_prob_renewal(1, q)]
    spread = max(abs(r - 1 / 3) for r in routes)
    n = 1_000_000
    est = simulate_hit(1, q, SimConfig(SEED, n))
    z = abs(est.estimate - 1 / 3) / math.sqrt((1 / 3) * (2 / 3) / n)
    elapsed = time.perf_counter() - start
    ok = spread <= 1e-10 and z <= 3 and elapsed < 30
    assert report(2, ok, f"route spread {spread:.2e}, MC z={z:.2f}, {elapsed:.1f}s")


@pytest.mark.criterion(3)
def test_criterion_03_lambda_invariance():
    worst = 0.0
    for alpha in (0.5, 1.0, 2.0, 3.0):
        for beta in (0.5, 1.0, 2.0):
            for lam1 in (0.5, 1.0, 2.0):
                for k in range(1, 11):
                    vals = [hit_prob_n1gn(k, ModelParams(lam=lam, alpha=alpha, beta=beta, lam1=lam1))
                            for lam in (0.5, 2.0, 7.0)]
                    worst = max(worst, max(vals) - min(vals))
    assert report(3, worst <= 1e-14, f"max spread {worst:.2e}")


@pytest.mark.criterion(4)
@pytest.mark.parametrize("family", sorted(PMF_FAMILIES, key=lambda f: f.value))
def test_criterion_04_pmf_oracle_equivalence(family):
    p = FIGURES[family]
    char = characterize(subordinator_of(family), p)
    worst, deficit = 0.0, 0.0
    for t in (1.0, 2.0, 3.0):
        worst = max(worst, max(abs(pmf(family, k, t, p) - pmf_via_pgf(k, t, char, p.lam1)) for k in range(16)))
        table = build_table(family, p, [t], max_tail=None)
        deficit = max(deficit, abs(1 - math.fsum(table.probs[0])))
    ok = worst <= 1e-9 and deficit < 1e-9
    assert report(4, ok, f"{family.value}: oracle err {worst:.2e}, deficit {deficit:.2e}")


@pytest.mark.criterion(5)
def test_criterion_05_ode_residuals():
    start = time.perf_counter()
    lines, ok = [], True
    for system, k, t, target, kw in ODE_POINTS:
        r = ode_residual(system, k, t, target, 1e-4, **kw)
        ratio = r / ode_residual(system, k, t, target, 5e-5, **kw)
        ok &= r < 1e-6 and 3.5 <= ratio <= 4.5
        lines.append(f"{system} r={r:.1e} ratio={ratio:.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    assert report(5, ok, "; ".join(lines) + f"; {elapsed:.1f}s")
    assert {pt[0] for pt in ODE_POINTS} >= {"GN_Eq9", "EN_Eq15", "GNa_Eq38", "Iter_Thm8"}


def _regime_chains():
    for n in range(1, 6):
        for beta, lam in ((1.0, 1.0), (2.0, 3.0)):
            yield IterChain(tuple(Stage(0.3 * i, beta, lam) for i in range(1, n + 1)))
        # unit stages over a scaled base, first rate free
        yield IterChain((Stage(0.4, 1.0, 1.7),) + tuple(Stage(0.4 + 0.2 * i, 1.0, 1.0) for i in range(1, n)), 2.5)


@pytest.mark.criterion(6)
def test_criterion_06_closed_form_vs_composition():
    worst = max(abs(iter_bernstein(u, ch) - compose_bernstein(u, ch)) for ch in _regime_chains() for u in U_GRID)
    rel = 0.0
    from scipy import integrate

    for ch in (IterChain.uniform(3, 0.7), IterChain.uniform(2, 0.4, 2.0, 3.0),
               IterChain((Stage(0.5, 1.0, 2.0), Stage(0.5, 1.0, 1.0)), 1.5)):
        for u in (0.01, 0.1, 1.0, 5.0, 50.0):
            val, _ = integrate.quad(lambda x: -math.expm1(-u * x) * iter_levy_density(x, ch), 0, math.inf,
                                    epsabs=1e-13, epsrel=1e-11, limit=400)
            rel = max(rel, abs(val / iter_bernstein(u, ch) - 1))
    ok = worst < 1e-12 and rel <= 1e-7
    assert report(6, ok, f"closed vs composed {worst:.2e}, quadrature rel {rel:.2e}")


@pytest.mark.criterion(7)
def test_criterion_07_one_step_closure_and_collapse():
    start = time.perf_counter()
    g, al, a = 0.6, 1.5, 0.4
    z = bessel_transform_levy(ExpMixture(((g, a, g * g),)), a, al, al)
    r = al * g / (al + g)
    closure = max(abs(z.levy_density(x) - math.exp(-r * x) * (a / x + r * r)) for x in np.geomspace(0.05, 10, 10))
    nested = IterChain((Stage(0.5, 0.5, 0.5), Stage(0.5, 1 / 3, 1 / 3)))
    single = collapse_chain(nested)
    dens = max(abs(iter_levy_density(x, nested) - characterize("ENa", single).levy_density(x))
               for x in np.geomspace(0.05, 10, 10))
    xa = sample_process("IterChain", nested, SimConfig(SEED, 100_000))
    xb = sample_process("ENa", single, SimConfig(SEED + 1, 100_000))
    _, pval = ks_two_sample(xa, xb)
    elapsed = time.perf_counter() - start
    ok = closure <= 1e-10 and dens <= 1e-10 and pval > 0.01 and elapsed < 60
    assert report(7, ok, f"closure {closure:.2e}, collapse density {dens:.2e}, KS p={pval:.3f}, {elapsed:.1f}s")


@pytest.mark.slow
@pytest.mark.criterion(8)
@pytest.mark.parametrize("family", ["GNa", "N1GNa"])
def test_criterion_08_moments(family):
    n = 1_000_000
    x = sample_process(family, FIG3, SimConfig(SEED, n)).astype(float)
    ms = moments(family, FIG3, 1.0)
    c = x - x.mean()
    se_mean = x.std() / math.sqrt(n)
    se_var = math.sqrt((np.mean(c ** 4) - np.mean(c ** 2) ** 2) / n)
    z_mean = abs(x.mean() - ms.mean) / se_mean
    z_var = abs(x.var() - ms.variance) / se_var
    ok = z_mean <= 3 and z_var <= 3
    assert report(8, ok, f"{family}: mean z={z_mean:.2f}, variance z={z_var:.2f}")


@pytest.mark.criterion(9)
def test_criterion_09_special_function_identities():
    start = time.perf_counter()
    rel = 0.0
    for at in np.linspace(0.05, 5, 25):
        for z in np.geomspace(0.01, 20, 25):
            lhs = wright_phi(1, at, z)
            rhs = z ** ((1 - at) / 2) * bessel_i(at - 1, 2 * math.sqrt(z))
            rel = max(rel, abs(lhs - rhs) / abs(rhs))
    for z in np.geomspace(0.01, 20, 25):
        rel = max(rel, abs(wright_phi(1, 0, z) / (math.sqrt(z) * bessel_i(1, 2 * math.sqrt(z))) - 1))
    h, fd_err, ratios = 1e-3, 0.0, []
    for a in (0.1, 1.0, 3.0):
        for s in (0.1, 1.0, 3.0):
            for gam in (0.2, 1.0, 6.0):
                def g(x):
                    return a * x * mittag_leffler3(1, 2, gam, a * x)

                exact = a * mittag_leffler3(1, 1, gam, a * s)
                e1 = abs((g(s + h) - g(s - h)) / (2 * h) - exact)
                e2 = abs((g(s + h / 2) - g(s - h / 2)) / h - exact)
                fd_err = max(fd_err, e1 / max(1.0, exact))
                if e1 > 1e-9 * max(1.0, exact):
                    ratios.append(e1 / e2)
    elapsed = time.perf_counter() - start
    ok = rel <= 1e-10 and fd_err <= 1e-3 and all(3.5 <= r <= 4.5 for r in ratios) and elapsed < 5
    assert report(9, ok, f"Bessel rel {rel:.1e}, ML FD err {fd_err:.1e}, "
                         f"h^2 ratios [{min(ratios):.2f}, {max(ratios):.2f}], {elapsed:.2f}s")


def _pmf_cli_table(family, p, tmp_path):
    out = tmp_path / f"{family.value}.csv"
    argv = ["pmf", "--family", family.value.lower(), "--lambda", repr(p.lam), "--alpha", repr(p.alpha),
            "--beta", repr(p.beta), "--lambda1", repr(p.lam1), "--a", repr(p.a), "--t", "1,2,3",
            "--out", str(out)]
    assert main(argv) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    table = {}
    for r in rows:
        table.setdefault(float(r["t"]), []).append(float(r["prob"]))
    return table


@pytest.mark.slow
@pytest.mark.criterion(10)
@pytest.mark.parametrize("family", sorted(PMF_FAMILIES, key=lambda f: f.value))
def test_criterion_10_figure_data(family, tmp_path):
    p = FIGURES[family]
    table = _pmf_cli_table(family, p, tmp_path)
    char = characterize(subordinator_of(family), p)
    lines, ok = [], True
    for t, probs in sorted(table.items()):
        probs = np.array(probs)
        oracle = max(abs(probs[k] - pmf_via_pgf(k, t, char, p.lam1)) for k in range(16))
        emp = empirical_pmf(family, p, SimConfig(SEED, 1_000_000, t))
        zmax, bad = emp.sigma_check(probs)
        ok &= oracle <= 1e-9 and abs(1 - probs.sum()) < 1e-9 and not bad
        lines.append(f"t={t:g} max z={zmax:.2f} bins>3sd={bad}")
    assert report(10, ok, f"{family.value}: " + "; ".join(lines))
