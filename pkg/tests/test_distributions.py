import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import optimize, stats

from egfkit.distributions import (
    DistributionSpec,
    Family,
    Sample,
    cdf,
    hazard,
    mean_residual_life,
    pdf,
    quantile,
    sample,
    support_integral,
    survival,
)
from egfkit.errors import DegenerateTailError, DomainError, InfiniteMeanError
from egfkit.numerics import RngStream, differentiate

D = DistributionSpec.parse

GRID = [
    "paretoI:0.5", "paretoI:1", "paretoI:3",
    "exponential:0.5", "exponential:2",
    "uniform:0,1", "uniform:2,4",
    "power:0.5", "power:2",
    "lomax:0.5", "lomax:3",
    "weibull:0.5", "weibull:1.5", "weibull:3",
    "gamma_shifted:0.5", "gamma_shifted:2",
    "beta_exponential:0.5", "beta_exponential:1", "beta_exponential:3",
    "tilted_pareto:1", "tilted_pareto:4",
    "inverse_beta:0", "inverse_beta:0.5", "inverse_beta:2",
    "benini:0.5", "benini:1.5",
    "half_normal:-", "log_normal:-",
]


def test_parse_and_label():
    d = D("uniform:2,4")
    assert d.family is Family.UNIFORM and d.params == (2.0, 4.0)
    assert D(d.label) == d
    assert D("half_normal").params == ()


@pytest.mark.parametrize("text", ["paretoI:0", "paretoI:-1", "uniform:3,1", "weibull", "nosuch:1", "power:x"])
def test_parse_rejects(text):
    with pytest.raises(DomainError):
        D(text)


@pytest.mark.parametrize("text", GRID)
def test_pdf_normalized(text):
    d = D(text)
    total = support_integral(d, lambda x, f: f, rel_tol=1e-10).value
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("text", GRID)
def test_cdf_survival_consistency(text):
    d = D(text)
    xs = quantile(d, np.linspace(0.01, 0.99, 25))
    F = cdf(d, xs)
    assert np.all(np.diff(F) >= 0)
    assert np.allclose(F + survival(d, xs), 1.0, atol=1e-14)
    assert cdf(d, d.support.lower) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("text", GRID)
def test_quantile_inverts_cdf(text):
    d = D(text)
    u = np.linspace(0.02, 0.98, 30)
    xs = quantile(d, u)
    assert np.allclose(quantile(d, cdf(d, xs)), xs, rtol=1e-8, atol=0)


def test_pdf_examples():
    assert pdf(D("paretoI:1"), 2.0) == 0.25
    assert pdf(D("uniform:0,1"), 0.3) == 1.0
    assert pdf(D("paretoI:1"), 0.5) == 0.0


def test_cdf_examples():
    assert cdf(D("paretoI:1"), 4.0) == pytest.approx(0.75)
    assert cdf(D("exponential:2"), 0.0) == 0.0
    assert cdf(D("tilted_pareto:1"), 3.0) == pytest.approx(0.5)


def test_quantile_examples():
    assert quantile(D("paretoI:1"), 0.75) == pytest.approx(4.0)
    assert quantile(D("uniform:2,4"), 0.5) == pytest.approx(3.0)
    d = D("benini:1.5")
    x = quantile(d, 0.9)
    root = optimize.brentq(lambda y: cdf(d, y) - 0.9, 1.0, 100.0, xtol=1e-14)
    assert x == pytest.approx(root, rel=1e-10)
    assert cdf(d, x) == pytest.approx(0.9, abs=1e-10)


@pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5])
def test_quantile_domain(u):
    with pytest.raises(DomainError):
        quantile(D("paretoI:1"), u)


def test_sample_examples():
    d = D("paretoI:3")
    a = sample(d, 100_000, RngStream(3, 1))
    assert np.array_equal(a.values, sample(d, 100_000, RngStream(3, 1)).values)
    assert abs(a.values.mean() - 1.5) < 0.02
    w = sample(D("weibull:1.5"), 100_000, RngStream(3, 2))
    assert abs(np.mean(w.values <= 1.0) - (1 - math.exp(-1))) < 0.01


@pytest.mark.parametrize("text", GRID)
def test_sampling_matches_cdf(text):
    d = D(text)
    x = sample(d, 100_000, RngStream(17, 4)).values
    ks = stats.kstest(x, lambda v: cdf(d, v)).statistic
    assert ks < 0.01


def test_hazard_examples():
    assert hazard(D("exponential:2"), 5.0) == pytest.approx(2.0)
    assert hazard(D("paretoI:2"), 3.0) == pytest.approx(2 / 3)
    assert hazard(D("weibull:3"), 0.5) == pytest.approx(0.75)
    with pytest.raises(DegenerateTailError):
        hazard(D("uniform:0,1"), 1.0)


def test_mrl_examples():
    assert mean_residual_life(D("exponential:2"), 1.7) == pytest.approx(0.5, rel=1e-8)
    assert mean_residual_life(D("uniform:0,1"), 0.5) == pytest.approx(0.25, rel=1e-8)
    assert mean_residual_life(D("paretoI:3"), 2.0) == pytest.approx(1.0, rel=1e-8)
    with pytest.raises(InfiniteMeanError):
        mean_residual_life(D("paretoI:1"), 2.0)


@pytest.mark.parametrize("text, t", [("exponential:1.5", 0.7), ("uniform:0,1", 0.4), ("paretoI:2.5", 3.0)])
def test_hazard_mrl_relation(text, t):
    d = D(text)
    m = mean_residual_life(d, t)
    dm = differentiate(lambda y: mean_residual_life(d, y), t)
    assert hazard(d, t) == pytest.approx((1 + dm) / m, abs=1e-4)


def test_sample_type():
    s = Sample([3.0, 1.0, 2.0])
    assert s.n == 3
    assert list(s.sorted_view) == [1.0, 2.0, 3.0]
    with pytest.raises(ValueError):
        s.values[0] = 5.0
    with pytest.raises(DomainError):
        Sample([])
    with pytest.raises(DomainError):
        Sample([1.0, math.nan])


@settings(max_examples=40, deadline=None)
@given(alpha=st.floats(0.2, 10), x=st.floats(1.0, 1e6))
def test_pareto_cdf_closed_form(alpha, x):
    assert cdf(D(f"paretoI:{alpha!r}"), x) == pytest.approx(1 - x**-alpha, abs=1e-12)
