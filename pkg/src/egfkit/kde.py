"""Kernel density estimation with convex combinations of symmetric kernels.

Kernels are written on the standardized scale; the estimate at ``x`` from
observations ``X_j`` with bandwidth ``h`` is::

    f_hat(x) = 1/(n h) * sum_j sum_i a_i k_i((x - X_j) / h)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .distributions import Sample, as_sample
from .errors import DegenerateSampleError, DomainError, InsufficientDataError

__all__ = [
    "BASE_KERNELS",
    "KernelSpec",
    "KdeConfig",
    "bandwidth",
    "kde_eval",
    "kde_self_batch",
    "d2_estimate",
    "SILVERMAN",
]

SILVERMAN = "silverman"
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_CHUNK_ELEMENTS = 2_000_000


def _gaussian(u):
    return _INV_SQRT_2PI * np.exp(-0.5 * (u * u))


def _epanechnikov(u):
    return np.where(np.abs(u) <= 1.0, 0.75 * (1.0 - u * u), 0.0)


def _triangular(u):
    return np.maximum(1.0 - np.abs(u), 0.0)


def _uniform(u):
    return np.where(np.abs(u) <= 1.0, 0.5, 0.0)


BASE_KERNELS: dict[str, Callable] = {
    "gaussian": _gaussian,
    "epanechnikov": _epanechnikov,
    "triangular": _triangular,
    "uniform": _uniform,
}


@dataclass(frozen=True)
class KernelSpec:
    """Convex combination ``sum a_i k_i`` of base kernels."""

    components: tuple = ((1.0, "gaussian"),)

    def __post_init__(self):
        comps = tuple((float(w), str(base)) for w, base in self.components)
        if not comps:
            raise DomainError("a kernel needs at least one component")
        for w, base in comps:
            if base not in BASE_KERNELS:
                raise DomainError(f"unknown base kernel {base!r}; choose from {sorted(BASE_KERNELS)}")
            if not w > 0:
                raise DomainError(f"kernel weights must be positive, got {w}")
        if abs(math.fsum(w for w, _ in comps) - 1.0) > 1e-12:
            raise DomainError("kernel weights must sum to 1")
        object.__setattr__(self, "components", comps)

    @classmethod
    def parse(cls, text: str) -> "KernelSpec":
        """``gaussian`` or ``0.5:gaussian,0.5:epanechnikov``."""
        comps = []
        for part in text.split(","):
            part = part.strip()
            if ":" in part:
                w, base = part.split(":", 1)
                try:
                    comps.append((float(w), base.strip()))
                except ValueError:
                    raise DomainError(f"bad kernel component {part!r}") from None
            else:
                comps.append((1.0, part))
        return cls(tuple(comps))

    @property
    def radius(self) -> float:
        """Half-width of the kernel support (``inf`` if any part is gaussian)."""
        return math.inf if any(b == "gaussian" for _, b in self.components) else 1.0

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        if len(self.components) == 1:
            return BASE_KERNELS[self.components[0][1]](u)
        out = np.zeros_like(u)
        for w, base in self.components:
            out += w * BASE_KERNELS[base](u)
        return out

    def describe(self) -> str:
        if len(self.components) == 1:
            return self.components[0][1]
        return ",".join(f"{w:g}:{b}" for w, b in self.components)


@dataclass(frozen=True)
class KdeConfig:
    """Kernel plus bandwidth rule: ``"silverman"`` or a fixed positive ``h``."""

    kernel: KernelSpec = field(default_factory=KernelSpec)
    bandwidth_rule: Union[str, float] = SILVERMAN

    def __post_init__(self):
        bw = self.bandwidth_rule
        if isinstance(bw, str):
            if bw != SILVERMAN:
                try:
                    bw = float(bw)
                except ValueError:
                    raise DomainError(f"bandwidth must be 'silverman' or a number, got {bw!r}") from None
        if not isinstance(bw, str):
            bw = float(bw)
            if not (bw > 0 and math.isfinite(bw)):
                raise DomainError(f"fixed bandwidth must be positive, got {bw}")
        object.__setattr__(self, "bandwidth_rule", bw)

    def to_dict(self) -> dict:
        return {
            "kernel": [{"weight": w, "base": b} for w, b in self.kernel.components],
            "bandwidth_rule": self.bandwidth_rule,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KdeConfig":
        kernel = KernelSpec(tuple((c["weight"], c["base"]) for c in data["kernel"]))
        return cls(kernel, data["bandwidth_rule"])


def _silverman(rows: np.ndarray) -> np.ndarray:
    n = rows.shape[-1]
    if n < 2:
        raise InsufficientDataError("silverman bandwidth needs at least 2 observations")
    sd = rows.std(axis=-1, ddof=1)
    if np.any(sd == 0):
        raise DegenerateSampleError("sample has zero standard deviation")
    return 1.06 * sd * n ** (-0.2)


def bandwidth(config: KdeConfig, sample) -> float:
    """Silverman's ``1.06 sd n^(-1/5)`` (sd with divisor n-1) or the fixed h."""
    if config.bandwidth_rule != SILVERMAN:
        return float(config.bandwidth_rule)
    return float(_silverman(as_sample(sample).values[None, :])[0])


def kde_eval(config: KdeConfig, sample, x):
    """Density estimate at ``x`` (scalar or array)."""
    s = as_sample(sample)
    h = bandwidth(config, s)
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.size)
    step = max(1, _CHUNK_ELEMENTS // s.n)
    for i in range(0, flat.size, step):
        u = (flat[i:i + step, None] - s.values[None, :]) / h
        out[i:i + step] = config.kernel(u).sum(axis=1)
    out /= s.n * h
    out = out.reshape(x.shape)
    return out if out.ndim else float(out)


def kde_self_batch(config: KdeConfig, rows: np.ndarray) -> np.ndarray:
    """For each row of ``rows`` (shape ``(B, n)``), the row's own density
    estimate evaluated at each of its points."""
    rows = np.asarray(rows, dtype=float)
    n = rows.shape[1]
    if config.bandwidth_rule == SILVERMAN:
        h = _silverman(rows)
    else:
        h = np.full(rows.shape[0], float(config.bandwidth_rule))
    out = np.empty_like(rows)
    step = max(1, _CHUNK_ELEMENTS // (n * n))
    for i in range(0, rows.shape[0], step):
        block = rows[i:i + step]
        hb = h[i:i + step, None, None]
        u = (block[:, :, None] - block[:, None, :]) / hb
        out[i:i + step] = config.kernel(u).sum(axis=2)
    return out / (n * h[:, None])


def d2_estimate(config: KdeConfig, sample, weight: Callable) -> float:
    """Leave-diagonal-out estimate of ``int f^2 W``::

        1/(n(n-1)) sum_{i != j} (1/h) k((X_i - X_j)/h) W(X_i)
    """
    s = as_sample(sample)
    n = s.n
    if n < 2:
        raise InsufficientDataError("the quadratic functional needs at least 2 observations")
    h = bandwidth(config, s)
    x = s.values
    w = np.broadcast_to(np.asarray(weight(x), dtype=float), x.shape)
    k0 = float(config.kernel(np.zeros(1))[0])
    total = 0.0
    step = max(1, _CHUNK_ELEMENTS // n)
    for i in range(0, n, step):
        u = (x[i:i + step, None] - x[None, :]) / h
        rows = config.kernel(u).sum(axis=1) - k0
        total += float(np.dot(rows, w[i:i + step]))
    return total / (h * n * (n - 1))
