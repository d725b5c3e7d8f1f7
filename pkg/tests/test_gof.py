import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from egfkit.distributions import DistributionSpec, Family, sample
from egfkit.errors import ConvergenceError, DomainError, EstimatorUndefinedError
from egfkit.gof import (
    GofConfig,
    GofReport,
    alpha_moment,
    bootstrap_test,
    critical_region,
    delta_functional,
    delta_stat,
    empirical_quantile,
    pareto_replicates,
)
from egfkit.kde import KdeConfig
from egfkit.numerics import RngStream

D = DistributionSpec.parse
PHI0 = 1 / math.sqrt(2 * math.pi)


def test_config_validation():
    with pytest.raises(DomainError):
        GofConfig(gamma=0.5)
    with pytest.raises(DomainError):
        GofConfig(boot_reps=99)
    with pytest.raises(DomainError):
        GofConfig(sided="lower")


@pytest.mark.parametrize("alpha", [0.6, 0.75, 1.0, 2.0, 5.0])
def test_delta_functional_vanishes_on_pareto(alpha):
    assert delta_functional(DistributionSpec(Family.PARETO_I, (alpha,))) == pytest.approx(0.0, abs=1e-8)


def test_delta_functional_inverse_beta_degenerate():
    assert delta_functional(D("inverse_beta:0")) == pytest.approx(0.0, abs=1e-8)


def test_delta_functional_tilted_pareto():
    # F = 1 - 2/(x+1), f = 2/(x+1)^2 on [1, inf): the two integrals are 1/6 and 1/8
    assert delta_functional(D("tilted_pareto:1")) == pytest.approx(1 / 6 - 1 / 8, rel=1e-8)


@pytest.mark.parametrize("text", ["inverse_beta:0.5", "benini:1.5", "beta_exponential:1", "weibull:1.5"])
def test_delta_functional_positive_off_null(text):
    assert delta_functional(D(text)) > 0


def test_delta_functional_divergent():
    with pytest.raises(ConvergenceError):
        delta_functional(D("gamma_shifted:0.5"))


def test_delta_functional_below_one_support():
    assert delta_functional(D("uniform:0,1")) == 0.0


def test_alpha_moment_examples():
    assert alpha_moment([2, 2, 2]) == 2.0
    with pytest.raises(EstimatorUndefinedError):
        alpha_moment([0.5, 0.6])


def test_delta_stat_examples():
    assert delta_stat([2.0], KdeConfig(bandwidth_rule=1.0)) == pytest.approx(4 * PHI0)
    assert delta_stat([1.0, 1.0], KdeConfig(bandwidth_rule=1.0)) == pytest.approx(1.25 * PHI0)


def test_delta_stat_consistency_large_sample():
    x = sample(D("paretoI:2"), 5000, RngStream(8, 0))
    assert abs(delta_stat(x) - delta_functional(D("paretoI:2"))) <= 0.05


@settings(max_examples=30, deadline=None)
@given(data=st.lists(st.floats(1, 100), min_size=3, max_size=40), seed=st.integers(0, 2**32))
def test_delta_stat_permutation_invariant(data, seed):
    v = np.array(data)
    perm = np.random.default_rng(seed).permutation(v)
    cfg = KdeConfig(bandwidth_rule=0.8)
    assert delta_stat(perm, cfg) == delta_stat(v, cfg)


@settings(max_examples=30, deadline=None)
@given(data=st.lists(st.floats(1, 100), min_size=2, max_size=40), c=st.floats(0.1, 10), h=st.floats(0.1, 5))
def test_delta_stat_scale_invariant(data, c, h):
    v = np.array(data)
    a = delta_stat(v, KdeConfig(bandwidth_rule=h))
    b = delta_stat(c * v, KdeConfig(bandwidth_rule=c * h))
    assert b == pytest.approx(a, rel=1e-12, abs=1e-300)


def test_empirical_quantile_convention():
    stats = np.arange(1, 501, dtype=float)[::-1]
    # ranks ceil(12.5) = 13 and ceil(487.5) = 488
    assert critical_region(stats, 0.05, "two") == (13.0, 488.0)
    assert critical_region(stats, 0.05, "upper") == (-math.inf, 475.0)
    assert empirical_quantile([3.0], 0.5) == 3.0


def test_replicates_use_stream_per_row():
    rows = pareto_replicates(1.5, 10, 100, seed=3)
    assert rows.shape == (100, 10)
    assert np.array_equal(rows, pareto_replicates(1.5, 10, 100, seed=3))
    u = RngStream(3, 7).uniforms(10)
    assert np.allclose(rows[6], np.sort((1 - u) ** (-1 / 1.5)), rtol=1e-14)


def test_bootstrap_deterministic_and_consistent():
    x = sample(D("paretoI:1.5"), 60, RngStream(1, 1))
    a, b = bootstrap_test(x), bootstrap_test(x)
    assert a == b
    assert a.crit_lo <= a.crit_hi
    assert a.reject == (a.delta_hat < a.crit_lo or a.delta_hat > a.crit_hi)
    assert a.alpha_hat == alpha_moment(x)


def test_bootstrap_permutation_invariant():
    x = sample(D("paretoI:1.5"), 40, RngStream(1, 2)).values
    assert bootstrap_test(x) == bootstrap_test(x[::-1])


def test_bootstrap_undefined_estimator():
    with pytest.raises(EstimatorUndefinedError):
        bootstrap_test([0.5, 0.7, 0.9])


def test_upper_region():
    x = sample(D("paretoI:1.5"), 40, RngStream(1, 3))
    r = bootstrap_test(x, GofConfig(sided="upper"))
    assert r.crit_lo == -math.inf and r.sided == "upper"
    assert r.to_dict()["crit_lo"] is None


def test_report_json_round_trip():
    x = sample(D("paretoI:1.5"), 30, RngStream(1, 4))
    for cfg in (GofConfig(), GofConfig(sided="upper")):
        r = bootstrap_test(x, cfg)
        text = r.to_json()
        assert GofReport.from_dict(json.loads(text)) == r
        assert json.dumps(json.loads(text), indent=2) == text
