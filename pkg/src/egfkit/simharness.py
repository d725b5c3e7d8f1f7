"""Monte Carlo size and power experiments for the bootstrap tests.

Every replication draws its sample from a stream addressed by
``(statistic, n, r)`` and seeds its bootstrap from a separate hash, so each
cell of a grid is reproducible on its own and results do not depend on how
work is spread across processes.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats

from .competitors import STATISTICS, run_test
from .distributions import DistributionSpec, Family, quantile, sample
from .errors import DomainError, EstimatorUndefinedError
from .gof import GofConfig, delta_stat_batch
from .numerics import RngStream, derive_stream_id

__all__ = [
    "CSV_HEADER",
    "SIZE_GRID",
    "POWER_GRID",
    "POWER_ALTERNATIVES",
    "SimConfig",
    "SimRow",
    "SimResult",
    "NormalityProbe",
    "run_grid",
    "normality_probe",
    "worker_count",
]

CSV_HEADER = ("statistic", "n", "rejection_rate", "reps_used", "skipped")
SIZE_GRID = (10, 25, 50, 75, 100)
POWER_GRID = (10, 20, 30, 40, 50)
POWER_ALTERNATIVES = (
    "gamma_shifted:0.5",
    "beta_exponential:1",
    "inverse_beta:0.5",
    "benini:1.5",
    "weibull:1.5",
    "half_normal:-",
    "log_normal:-",
)
_CHUNK = 25


@dataclass(frozen=True)
class SimConfig:
    generator: DistributionSpec
    sample_sizes: tuple
    reps: int
    gof: GofConfig = field(default_factory=GofConfig)
    statistics: tuple = ("delta",)

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sample_sizes)
        if not sizes:
            raise DomainError("sample_sizes must be nonempty")
        if any(n < 2 for n in sizes):
            raise DomainError(f"sample sizes must be >= 2, got {sizes}")
        if int(self.reps) < 1:
            raise DomainError(f"reps must be >= 1, got {self.reps}")
        statistics = tuple(self.statistics)
        unknown = [s for s in statistics if s not in STATISTICS]
        if not statistics or unknown:
            raise DomainError(f"statistics must be drawn from {STATISTICS}, got {statistics}")
        object.__setattr__(self, "sample_sizes", sizes)
        object.__setattr__(self, "reps", int(self.reps))
        object.__setattr__(self, "statistics", statistics)


class SimRow(NamedTuple):
    statistic: str
    n: int
    rejection_rate: float
    reps_used: int
    skipped: int


@dataclass(frozen=True)
class SimResult:
    rows: tuple

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow([row.statistic, row.n, repr(row.rejection_rate), row.reps_used, row.skipped])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"rows": [row._asdict() for row in self.rows]}, indent=2)

    def rate(self, statistic: str, n: int) -> float:
        for row in self.rows:
            if row.statistic == statistic and row.n == n:
                return row.rejection_rate
        raise KeyError((statistic, n))


def worker_count(threads: Optional[int] = None) -> int:
    """Explicit ``threads``, else ``EGFKIT_THREADS``, else the CPU count."""
    if threads is None:
        env = os.environ.get("EGFKIT_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def _replicate(generator: DistributionSpec, statistic: str, n: int, r: int, gof: GofConfig) -> int:
    """1 reject, 0 accept, -1 skipped (moment estimator undefined)."""
    stream = derive_stream_id("sample", statistic, n, r)
    x = sample(generator, n, RngStream(gof.seed, stream))
    boot_seed = derive_stream_id("boot", gof.seed, statistic, n, r)
    config = GofConfig(gof.gamma, gof.boot_reps, gof.kde, boot_seed, gof.sided)
    try:
        return int(run_test(x, statistic, config).reject)
    except EstimatorUndefinedError:
        return -1


def _run_chunk(task):
    generator, statistic, n, start, stop, gof = task
    return [_replicate(generator, statistic, n, r, gof) for r in range(start, stop)]


def run_grid(config: SimConfig, threads: Optional[int] = None) -> SimResult:
    """Rejection rates for every ``(statistic, n)`` cell of the grid."""
    tasks, owners = [], []
    for statistic in config.statistics:
        for n in config.sample_sizes:
            for start in range(0, config.reps, _CHUNK):
                stop = min(config.reps, start + _CHUNK)
                tasks.append((config.generator, statistic, n, start, stop, config.gof))
                owners.append((statistic, n))
    workers = worker_count(threads)
    if workers == 1 or len(tasks) == 1:
        outcomes = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_chunk, tasks))
    counts: dict = {}
    for owner, chunk in zip(owners, outcomes):
        tally = counts.setdefault(owner, [0, 0, 0])
        for outcome in chunk:
            if outcome < 0:
                tally[2] += 1
            else:
                tally[0] += outcome
                tally[1] += 1
    rows = []
    for statistic in config.statistics:
        for n in config.sample_sizes:
            rejected, used, skipped = counts[(statistic, n)]
            rate = rejected / used if used else 0.0
            rows.append(SimRow(statistic, n, rate, used, skipped))
    return SimResult(tuple(rows))


class NormalityProbe(NamedTuple):
    mean: float
    sd: float
    ks_distance: float
    raw_mean: float
    raw_sd: float


def normality_probe(n: int, reps: int, gof: GofConfig = GofConfig()) -> NormalityProbe:
    """Standardize ``reps`` null values of the plug-in statistic (Pareto index 1,
    size ``n``) and measure their Kolmogorov distance to N(0, 1)."""
    if reps < 200:
        raise DomainError(f"reps must be >= 200, got {reps}")
    null = DistributionSpec(Family.PARETO_I, (1.0,))
    values = np.empty(reps)
    step = max(1, 2_000_000 // (n * n))
    for start in range(0, reps, step):
        stop = min(reps, start + step)
        rows = np.stack([
            quantile(null, RngStream(gof.seed, derive_stream_id("probe", n, r)).uniforms(n))
            for r in range(start, stop)
        ])
        rows.sort(axis=1)
        values[start:stop] = delta_stat_batch(rows, gof.kde)
    raw_mean = float(values.mean())
    raw_sd = float(values.std(ddof=1))
    z = (values - raw_mean) / raw_sd
    ks = float(stats.kstest(z, "norm").statistic)
    return NormalityProbe(float(z.mean()), float(z.std(ddof=1)), ks, raw_mean, raw_sd)
