"""Classical goodness-of-fit statistics against a fitted Pareto Type-I null.

Each statistic works on the probability integral transform
``U_(j) = F(X_(j); alpha)`` of the order statistics.  Batched versions take a
sorted ``(B, n)`` array of PIT values so the bootstrap can evaluate all
replicates at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import as_sample
from .errors import DomainError
from .gof import GofConfig, GofReport, alpha_moment_batch, bootstrap_test, calibrate

__all__ = [
    "EPS",
    "MEINTANIS_A",
    "STATISTICS",
    "COMPETITORS",
    "PitSample",
    "pit",
    "ks_stat",
    "cvm_stat",
    "ad_stat",
    "zhang_za",
    "zhang_zb",
    "meintanis_stat",
    "competitor_bootstrap",
    "run_test",
]

EPS = 1e-10
MEINTANIS_A = 0.5


@dataclass(frozen=True)
class PitSample:
    u_values: np.ndarray

    def __post_init__(self):
        u = np.array(self.u_values, dtype=float).ravel()
        if u.size < 1:
            raise DomainError("a PIT sample needs at least one value")
        if np.any((u < 0.0) | (u > 1.0)) or np.any(np.diff(u) < 0):
            raise DomainError("PIT values must be nondecreasing and lie in [0, 1]")
        u.setflags(write=False)
        object.__setattr__(self, "u_values", u)

    @property
    def n(self) -> int:
        return int(self.u_values.size)


def _pit_rows(rows: np.ndarray, alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.ndim:
        alpha = alpha[:, None]
    with np.errstate(divide="ignore", over="ignore"):
        return np.maximum(0.0, -np.expm1(-alpha * np.log(np.maximum(rows, 1.0))))


def pit(sample, alpha: float) -> PitSample:
    """``U_(j) = max(0, 1 - X_(j)^-alpha)``; values below 1 map to 0."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    s = as_sample(sample)
    return PitSample(_pit_rows(s.sorted_view[None, :], alpha)[0])


def _ranks(n: int) -> np.ndarray:
    return np.arange(1, n + 1, dtype=float)


def _ks(u):
    n = u.shape[1]
    j = _ranks(n)
    return np.maximum((j / n - u).max(axis=1), (u - (j - 1) / n).max(axis=1))


def _cvm(u):
    n = u.shape[1]
    j = _ranks(n)
    return 1.0 / (12 * n) + ((u - (2 * j - 1) / (2 * n)) ** 2).sum(axis=1)


def _ad(u):
    n = u.shape[1]
    j = _ranks(n)
    u = np.clip(u, EPS, 1.0 - EPS)
    terms = (2 * j - 1) * np.log(u) + (2 * n + 1 - 2 * j) * np.log1p(-u)
    return -n - terms.sum(axis=1) / n


def _zan(u):
    u = np.minimum(u, 1.0 - EPS)
    return -np.log1p(-u).mean(axis=1)


def _zbn(u):
    n = u.shape[1]
    j = _ranks(n)
    u = np.clip(u, EPS, 1.0 - EPS)
    return (-np.log1p(-u) / (n - j + 0.5) - np.log(u) / (j - 0.5)).sum(axis=1)


def _men(u, a=MEINTANIS_A):
    n = u.shape[1]
    out = np.empty(u.shape[0])
    step = max(1, 2_000_000 // (n * n))
    for i in range(0, u.shape[0], step):
        block = u[i:i + step]
        d = block[:, :, None] - block[:, None, :]
        out[i:i + step] = (2 * a / (d * d + a * a)).sum(axis=(1, 2)) / n
    out += 2 * (np.arctan(u / a) + np.arctan((1 - u) / a)).sum(axis=1)
    return out - 4 * n * math.atan(1 / a) - n * math.log1p(1 / (a * a))


def _one(fn, p: PitSample, *args) -> float:
    return float(fn(p.u_values[None, :], *args)[0])


def ks_stat(p: PitSample) -> float:
    """Kolmogorov-Smirnov distance of the PIT values from uniformity."""
    return _one(_ks, p)


def cvm_stat(p: PitSample) -> float:
    """Cramer-von Mises statistic."""
    return _one(_cvm, p)


def ad_stat(p: PitSample) -> float:
    """Anderson-Darling statistic; values are nudged into ``[EPS, 1 - EPS]``."""
    return _one(_ad, p)


def zhang_za(p: PitSample) -> float:
    """Mean exponential score ``-(1/n) sum log(1 - U_(j))``."""
    return _one(_zan, p)


def zhang_zb(p: PitSample) -> float:
    """``sum_j [-log(1 - U_(j))/(n - j + 1/2) - log(U_(j))/(j - 1/2)]``."""
    return _one(_zbn, p)


def meintanis_stat(p: PitSample, a: float = MEINTANIS_A) -> float:
    """Characteristic-function type statistic with tuning parameter ``a``."""
    if not a > 0:
        raise DomainError(f"tuning parameter must be positive, got {a}")
    return _one(_men, p, a)


# selector -> (PIT statistic, rejection region)
COMPETITORS = {
    "ks": (_ks, "upper"),
    "cvm": (_cvm, "upper"),
    "ad": (_ad, "upper"),
    "zan": (_zan, "two"),
    "zbn": (_zbn, "upper"),
    "men": (_men, "upper"),
}
STATISTICS = ("delta",) + tuple(COMPETITORS)


def _fitted_batch(fn):
    # each row is transformed under its own moment estimate
    def stat(rows):
        alpha = alpha_moment_batch(rows)
        return fn(_pit_rows(rows, alpha))
    return stat


def competitor_bootstrap(sample, stat: str, config: GofConfig = GofConfig()) -> GofReport:
    """Bootstrap test with ``stat`` in place of the plug-in departure statistic."""
    if stat not in COMPETITORS:
        raise DomainError(f"unknown competitor {stat!r}; choose from {sorted(COMPETITORS)}")
    fn, sided = COMPETITORS[stat]
    return calibrate(sample, config, stat, _fitted_batch(fn), sided)


def run_test(sample, statistic: str, config: GofConfig = GofConfig()) -> GofReport:
    """Dispatch on a selector from :data:`STATISTICS`."""
    if statistic == "delta":
        return bootstrap_test(sample, config)
    return competitor_bootstrap(sample, statistic, config)
