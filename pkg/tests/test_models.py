import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from tcpoisson.models import (
    FIG3,
    FIG4,
    Family,
    ModelParams,
    characterize,
    density_ena,
    density_gna,
    dist_gn_with_atom,
    moments,
)

SUBORDINATORS = ("GN", "EN", "GNa", "ENa", "DriftedPoisson")
positive = st.floats(0.1, 5.0)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(lam=0, alpha=1, beta=1)
    with pytest.raises(ValueError):
        ModelParams(lam=1, alpha=1, beta=1, a=-1)
    with pytest.raises(ValueError):
        ModelParams(lam=1, alpha=math.nan, beta=1)


def test_family_parse():
    assert Family.parse("n1-gna") is Family.N1GNa
    assert Family.parse("Drifted_Poisson") is Family.DriftedPoisson
    with pytest.raises(ValueError):
        Family.parse("nope")


def test_characterize_examples():
    assert characterize("GN", ModelParams(lam=2, alpha=1, beta=1)).bernstein(1) == pytest.approx(1.0, abs=1e-15)
    f = characterize("GNa", ModelParams(lam=1, alpha=2, beta=0.8, a=5)).bernstein(1)
    assert f == pytest.approx(10 * math.log(1 + 1 / 0.8) + 1 - (1 + 1 / 0.8) ** -2, rel=1e-15)
    # the exact expression evaluates to 8.91177130
    assert f == pytest.approx(8.91177130, abs=1e-8)
    assert characterize("DriftedPoisson", ModelParams(lam=2, alpha=1, beta=1, a=5)).bernstein(0) == 0.0


def test_counting_family_has_no_characterization():
    with pytest.raises(ValueError):
        characterize("N1GN", FIG3)


@pytest.mark.parametrize("family", SUBORDINATORS)
@given(lam=positive, alpha=positive, beta=positive, a=st.floats(0, 5))
@settings(max_examples=25, deadline=None)
def test_bernstein_property(family, lam, alpha, beta, a):
    char = characterize(family, ModelParams(lam=lam, alpha=alpha, beta=beta, a=a))
    u = np.geomspace(1e-6, 1e3, 200)
    f = np.array([char.bernstein(x) for x in u])
    assert char.bernstein(0.0) == 0.0
    assert np.all(np.diff(f) >= 0)
    # concavity on a non-uniform grid: slopes must not increase
    du = np.diff(u)
    slopes = np.diff(f) / du
    # rounding in f is ~eps * f, which bounds the noise in each slope
    noise = 8 * np.finfo(float).eps * np.abs(f[1:-1]) / du[1:]
    assert np.all(np.diff(slopes) <= noise)


@pytest.mark.parametrize("family", ["GN", "EN", "GNa", "ENa"])
@given(lam=positive, alpha=st.floats(0.3, 4.0), beta=positive, a=st.floats(0, 3))
@settings(max_examples=10, deadline=None)
def test_levy_density_nonnegative(family, lam, alpha, beta, a):
    char = characterize(family, ModelParams(lam=lam, alpha=alpha, beta=beta, a=a))
    assert all(char.levy_density(x) >= 0 for x in np.geomspace(1e-4, 50, 40))


@pytest.mark.parametrize("family", ["GN", "GNa"])
@pytest.mark.parametrize("u", [1e-3, 0.1, 1.0, 10.0, 300.0])
def test_bernstein_equals_levy_integral(family, u):
    p = ModelParams(lam=1.7, alpha=1.6, beta=0.8, a=0.9)
    char = characterize(family, p)
    val, _ = integrate.quad(lambda x: -math.expm1(-u * x) * char.levy_density(x), 0, math.inf,
                            epsabs=1e-14, epsrel=1e-12, limit=400)
    assert val == pytest.approx(char.bernstein(u), rel=1e-8)


@given(lam=positive, alpha=positive, beta=positive, a=st.floats(0, 5), u=st.floats(0, 100))
@settings(max_examples=100, deadline=None)
def test_gna_decomposes_into_gn_plus_gamma(lam, alpha, beta, a, u):
    p = ModelParams(lam=lam, alpha=alpha, beta=beta, a=a)
    lhs = characterize("GNa", p).bernstein(u)
    rhs = characterize("GN", p).bernstein(u) + a * alpha * math.log1p(u / beta)
    assert lhs == pytest.approx(rhs, rel=1e-14, abs=1e-300)


@pytest.mark.parametrize("family", ["GN", "GNa", "DriftedPoisson"])
@pytest.mark.parametrize("m", [1, 2, 7, 30])
def test_closed_jump_moments_match_quadrature(family, m):
    p = ModelParams(lam=1.3, alpha=2.5, beta=0.8, a=0.7)
    char = characterize(family, p)
    if family == "DriftedPoisson":
        assert char.jump_moment(m, 1.0) == pytest.approx(1.3 * math.exp(-1.0), rel=1e-15)
        return
    assert char.jump_moment(m, 1.0) == pytest.approx(char.quad_jump_moment(m, 1.0), rel=1e-9)


def test_log_jump_moment_finite_past_double_range():
    char = characterize("GN", FIG3)
    lm = char.log_jump_moment(300, 1.0)
    assert math.isfinite(lm) and lm > 709


def test_density_gna_examples():
    p = ModelParams(lam=1, alpha=1, beta=1, a=1)
    assert density_gna(1, 1, p) == pytest.approx(math.exp(-2) * special.i0(2), rel=1e-13)
    assert density_gna(1, 1, p) == pytest.approx(0.3085083, abs=5e-8)
    assert density_gna(1e-12, 1, FIG3) < 1e-100


def test_density_gna_domain():
    with pytest.raises(ValueError):
        density_gna(1.0, 1.0, FIG3.with_(a=0))
    with pytest.raises(ValueError):
        density_gna(1.0, 0.0, FIG3)
    assert density_gna(-1.0, 1.0, FIG3) == 0.0


def _integral(fn, hi):
    # the bulk up to mean + 12 sd, plus the exponential tail beyond it
    body = integrate.quad(fn, 0, hi, epsabs=1e-10, limit=400)[0]
    return body + integrate.quad(fn, hi, math.inf, epsabs=1e-12, limit=400)[0]


def _norm_and_moments(dens, mean, sd):
    hi = mean + 12 * sd
    mass = _integral(dens, hi)
    m1 = _integral(lambda y: y * dens(y), hi)
    m2 = _integral(lambda y: y * y * dens(y), hi)
    return mass, m1, m2 - m1 ** 2


@pytest.mark.parametrize("t", [0.5, 2.0])
def test_density_gna_normalization_and_moments(t):
    ms = moments("GNa", FIG3, t)
    mass, mean, var = _norm_and_moments(lambda y: density_gna(y, t, FIG3), ms.mean, math.sqrt(ms.variance))
    assert mass == pytest.approx(1.0, abs=1e-8)
    assert mean == pytest.approx(ms.mean, rel=1e-6)
    assert var == pytest.approx(ms.variance, rel=1e-6)


def test_density_ena_matches_gna_at_alpha_one():
    p = ModelParams(lam=1, alpha=1, beta=0.8, a=5)
    assert density_ena(0.7, 1.3, p) == pytest.approx(density_gna(0.7, 1.3, p), rel=1e-10)
    q = ModelParams(lam=1, alpha=1, beta=1, a=1)
    assert density_ena(1, 1, q) == pytest.approx(math.exp(-2) * special.i0(2), rel=1e-13)


@given(y=st.floats(0.01, 40), t=st.floats(0.05, 4), lam=positive, beta=positive, a=st.floats(0.05, 5))
@settings(max_examples=60, deadline=None)
def test_density_ena_equals_gna_alpha_one_property(y, t, lam, beta, a):
    p = ModelParams(lam=lam, alpha=1.0, beta=beta, a=a)
    assert density_ena(y, t, p) == pytest.approx(density_gna(y, t, p), rel=1e-10, abs=1e-300)


def test_density_ena_normalization():
    ms = moments("GNa", FIG4, 1.0)
    mass, mean, _ = _norm_and_moments(lambda y: density_ena(y, 1.0, FIG4), ms.mean, math.sqrt(ms.variance))
    assert mass == pytest.approx(1.0, abs=1e-8)
    assert mean == pytest.approx(ms.mean, rel=1e-6)


def test_dist_gn_with_atom():
    p = ModelParams(lam=2, alpha=1.0, beta=0.8)
    atom, _ = dist_gn_with_atom(1.0, 1.0, p)
    assert atom == pytest.approx(math.exp(-2), rel=1e-15)
    for s in (0.1, 1.0, 4.0):
        _, dens = dist_gn_with_atom(s, 1.0, p)
        z = 2 * math.sqrt(2 * 0.8 * s)
        ref = math.exp(-2 - 0.8 * s) * math.sqrt(2 * 0.8 / s) * special.i1(z)
        assert dens == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_dist_gn_with_atom_total_mass(alpha):
    p = ModelParams(lam=2, alpha=alpha, beta=0.8)
    atom, _ = dist_gn_with_atom(1.0, 1.0, p)
    ms = moments("GNa", p, 1.0)
    hi = ms.mean + 12 * math.sqrt(ms.variance)
    mass = _integral(lambda s: dist_gn_with_atom(s, 1.0, p)[1], hi)
    assert atom + mass == pytest.approx(1.0, abs=1e-8)


def test_moment_examples():
    assert moments("DriftedPoisson", ModelParams(lam=2, alpha=1, beta=1, a=5), 3).mean == pytest.approx(21)
    assert moments("GNa", FIG3, 1).variance == pytest.approx(25, rel=1e-14)
    ms = moments("N1GNa", FIG3, 2, s=3)
    assert ms.cov_ts == pytest.approx(ms.covariance(2, 2)) == pytest.approx(ms.variance)
    assert moments("N1GNa", FIG3, 1).mean == pytest.approx(15, rel=1e-14)


@given(t=st.floats(0.01, 10), s=st.floats(0.01, 10))
@settings(max_examples=50, deadline=None)
def test_covariance_symmetric(t, s):
    ms = moments("GNa", FIG3, t)
    assert ms.covariance(t, s) == ms.covariance(s, t)
    assert ms.covariance(t, t) == pytest.approx(ms.variance)
    assert ms.variance >= 0


def test_moments_unknown_family():
    with pytest.raises(ValueError):
        moments("GN", FIG3, 1.0)
