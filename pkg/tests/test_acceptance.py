"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (collected again in the terminal
summary) and then asserts, at the tolerance stated for the criterion.
"""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from egfkit import datasets
from egfkit.distributions import DistributionSpec, Family, pdf, support_integral, survival
from egfkit.egf import EGFQuery, default_t_grid, hazard_ode_residual, wegf, wregf
from egfkit.gof import GofConfig, bootstrap_test, delta_functional
from egfkit.kde import KdeConfig, KernelSpec, bandwidth, d2_estimate, kde_eval
from egfkit.numerics import Interval, RngStream, integrate, quad
from egfkit.simharness import SimConfig, normality_probe, run_grid

D = DistributionSpec.parse
Q = EGFQuery


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_criterion_01_closed_form_agreement(verdict):
    grid = [
        ("lomax", (m,), s) for m in (0.5, 1.0, 3.0) for s in (2.5, 3.0)
    ] + [
        ("power", (c,), s) for c in (0.5, 2.0, 4.0) for s in (0.5, 2.0, 3.0)
    ] + [
        ("paretoI", (a,), s) for a in (0.5, 1.0, 3.0) for s in (2.0, 3.0)
    ] + [
        ("uniform", ab, s) for ab in ((0.0, 1.0), (2.0, 5.0)) for s in (0.5, 2.0, 3.0)
    ] + [
        ("exponential", (lam,), s) for lam in (0.5, 1.0, 3.0) for s in (0.5, 2.0, 4.0)
    ]
    start = time.perf_counter()
    worst = 0.0
    for fam, params, s in grid:
        d = DistributionSpec(Family(fam), params)
        closed = wegf(d, s, method="closed_form").value
        numeric = wegf(d, s, method="quadrature").value
        worst = max(worst, _rel(closed, numeric))
    elapsed = time.perf_counter() - start
    ok = len(grid) >= 20 and worst <= 1e-6 and elapsed < 10
    verdict(1, "closed form vs quadrature", ok, f"{len(grid)} pairs, worst rel {worst:.1e}, {elapsed:.1f}s")
    assert ok


IDENTITY_CASES = {
    "exponential:1": [0.5, 1.0, 2.0, 3.0, 5.0],
    "uniform:0,1": [0.1, 0.2, 0.3, 0.4, 0.5],
    "paretoI:3": [1.5, 2.0, 3.0, 5.0, 8.0],
    "power:2": [0.1, 0.2, 0.3, 0.4, 0.5],
}


def test_criterion_02_wregf_identities(verdict):
    s = 2.0
    start = time.perf_counter()
    ode = dec = rep = 0.0
    for text, ts in IDENTITY_CASES.items():
        d = D(text)
        total = wegf(d, s).value
        for t in ts:
            ode = max(ode, abs(hazard_ode_residual(d, Q(s, t))))
            tail_w = wregf(d, Q(s, t), method="quadrature").value
            head = quad(lambda x: x * pdf(d, x) ** s, Interval(d.support.lower, t), 1e-10).value
            dec = max(dec, _rel(head + survival(d, t) ** s * tail_w, total))
            tail = lambda y: support_integral(d, lambda x, f: f**s, start=float(y), rel_tol=1e-10).value
            rhs = t * tail(t) + quad(tail, Interval(t, d.support.upper), 1e-8).value
            rep = max(rep, _rel(tail_w * survival(d, t) ** s, rhs))
    elapsed = time.perf_counter() - start
    ok = ode <= 1e-4 and dec <= 1e-6 and rep <= 1e-5 and elapsed < 30
    verdict(2, "WREGF identities", ok,
            f"ode {ode:.1e}, decomposition {dec:.1e}, representation {rep:.1e}, {elapsed:.1f}s")
    assert ok


def test_criterion_03_characterizations(verdict):
    pareto_err = 0.0
    for c in (0.5, 1.0, 2.0, 3.0):
        d = DistributionSpec(Family.PARETO_I, (c,))
        for t in (1.0, 2.0, 5.0, 10.0):
            pareto_err = max(pareto_err, abs(wregf(d, Q(2, t), method="quadrature").value - c / 2))
    weibull_spread = 0.0
    for s in (0.4, 0.5, 0.7):
        d = DistributionSpec(Family.WEIBULL, ((2 - s) / (1 - s),))
        values = np.array([wregf(d, Q(s, float(t))).value for t in default_t_grid(d)])
        weibull_spread = max(weibull_spread, (values.max() - values.min()) / abs(values.mean()))
    ok = pareto_err <= 1e-6 and weibull_spread <= 1e-4
    verdict(3, "Pareto and Weibull characterizations", ok,
            f"pareto abs err {pareto_err:.1e}, weibull rel spread {weibull_spread:.1e}")
    assert ok


def test_criterion_04_departure_measure(verdict):
    null = [abs(delta_functional(DistributionSpec(Family.PARETO_I, (a,)))) for a in (0.75, 1.0, 2.0, 5.0)]
    alt = {t: delta_functional(D(t)) for t in ("tilted_pareto:1", "inverse_beta:0.5", "benini:1.5")}
    ok = max(null) <= 1e-8 and all(v > 0 for v in alt.values())
    verdict(4, "departure measure", ok,
            f"null max {max(null):.1e}; " + ", ".join(f"{k} {v:.4f}" for k, v in alt.items()))
    assert ok


def test_criterion_05_empirical_size(verdict):
    cfg = SimConfig(D("paretoI:1"), (50, 100), 1000, GofConfig(gamma=0.05, boot_reps=500), ("delta",))
    res = run_grid(cfg)
    rates = {row.n: row.rejection_rate for row in res.rows}
    ok = all(0.03 <= r <= 0.07 for r in rates.values())
    verdict(5, "empirical size under Pareto(1)", ok, ", ".join(f"n={n}: {r:.3f}" for n, r in rates.items()))
    assert ok


POWER_TARGETS = [
    ("gamma_shifted:0.5", 50, 0.95),
    ("beta_exponential:1", 50, 0.95),
    ("weibull:1.5", 30, 0.95),
    ("inverse_beta:0.5", 50, 0.90),
]


def test_criterion_06_power(verdict):
    results = []
    for gen, n, target in POWER_TARGETS:
        res = run_grid(SimConfig(D(gen), (n,), 500, GofConfig(), ("delta",)))
        results.append((gen, n, res.rows[0].rejection_rate, target))
    ok = all(rate >= target for _, _, rate, target in results)
    verdict(6, "power against alternatives", ok,
            ", ".join(f"{g} n={n}: {r:.3f} (>= {t})" for g, n, r, t in results))
    assert ok


def test_criterion_07_normality(verdict):
    probe = normality_probe(200, 2000, GofConfig())
    ok = probe.ks_distance <= 0.05
    verdict(7, "asymptotic normality probe", ok, f"ks distance {probe.ks_distance:.4f}")
    assert ok


def test_criterion_08_datasets(verdict):
    cfg = GofConfig(gamma=0.05, boot_reps=500, seed=42)
    floods = bootstrap_test(datasets.load("floods"), cfg)
    rayleigh = bootstrap_test(datasets.load("rayleigh"), cfg)
    ref = datasets.REFERENCE["floods"]["delta_hat"]
    in_range = 0 < floods.delta_hat < 1 and ref / 5 <= floods.delta_hat <= ref * 5
    ok = floods.reject is False and rayleigh.reject is True and in_range
    verdict(8, "dataset decisions", ok,
            f"floods reject={floods.reject} delta={floods.delta_hat:.4f} "
            f"[{floods.crit_lo:.4f}, {floods.crit_hi:.4f}]; "
            f"rayleigh reject={rayleigh.reject} delta={rayleigh.delta_hat:.4f} "
            f"[{rayleigh.crit_lo:.4f}, {rayleigh.crit_hi:.4f}]")
    assert ok


MIXTURES = [
    "gaussian", "epanechnikov", "triangular", "uniform",
    "0.5:gaussian,0.5:epanechnikov", "0.2:uniform,0.3:triangular,0.5:gaussian",
]


def test_criterion_09_kde(verdict):
    x = -np.log(RngStream(2, 0).uniforms(40))
    mass_err = 0.0
    for kernel in MIXTURES:
        cfg = KdeConfig(KernelSpec.parse(kernel))
        h = bandwidth(cfg, x)
        pts = tuple(sorted(set(np.concatenate([x - h, x, x + h]))))
        dom = Interval(x.min() - 40 * h, x.max() + 40 * h)
        mass = integrate(lambda t: kde_eval(cfg, x, t), dom, 1e-9, points=pts)
        mass_err = max(mass_err, abs(mass - 1.0))

    grid = np.linspace(0.05, 6.0, 400)
    mise = []
    for n in (100, 1000, 10_000):
        sample = -np.log(RngStream(9, n).uniforms(n))
        mise.append(np.mean((kde_eval(KdeConfig(), sample, grid) - np.exp(-grid)) ** 2) * (grid[-1] - grid[0]))

    n = 5000
    sample = -np.log(RngStream(21, 0).uniforms(n))
    h = sample.std(ddof=1) * n**-0.4
    d2 = d2_estimate(KdeConfig(bandwidth_rule=h), sample, lambda v: 1.0)

    ok = mass_err <= 1e-6 and mise[0] > mise[1] > mise[2] and abs(d2 - 0.5) <= 0.05
    verdict(9, "kernel density properties", ok,
            f"mass err {mass_err:.1e}, MISE {', '.join(f'{m:.2e}' for m in mise)}, d2 {d2:.4f}")
    assert ok


def _cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "egfkit", *argv], capture_output=True)
    return proc.returncode, proc.stdout


def test_criterion_10_determinism(verdict, tmp_path):
    data = tmp_path / "floods.txt"
    data.write_text("\n".join(str(v) for v in datasets.DATASETS["floods"]) + "\n")
    commands = [
        ("gof", "--input", str(data), "--gamma", "0.05", "--boot", "500", "--seed", "42"),
        ("egf", "--family", "exponential", "--params", "1", "--s", "2", "--weighted"),
        ("simulate", "--family", "weibull", "--param", "1.5", "--n", "10", "--reps", "50", "--seed", "1"),
        ("datasets", "rayleigh"),
    ]
    same_bytes = all(_cli(*c) == _cli(*c) for c in commands)
    _, report = _cli(*commands[0])
    round_trip = json.dumps(json.loads(report), indent=2) + "\n" == report.decode()
    cfg = SimConfig(D("paretoI:1.5"), (20, 30), 40, GofConfig(boot_reps=200), ("delta", "cvm"))
    parallel_free = run_grid(cfg, threads=1) == run_grid(cfg, threads=4)
    ok = same_bytes and round_trip and parallel_free
    verdict(10, "determinism", ok,
            f"repeat identical={same_bytes}, json round trip={round_trip}, thread independent={parallel_free}")
    assert ok
