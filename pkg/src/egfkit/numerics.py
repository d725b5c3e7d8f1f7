"""Numerical substrate: adaptive quadrature, central differences and
reproducible random streams.

Quadrature is a global adaptive Gauss-Kronrod (7/15) scheme.  Semi-infinite
ranges ``[a, inf)`` use the substitution ``x = a + u / (1 - u)``.  The head
``u < 1/2`` is integrated directly in ``x`` and the tail in ``w = 1 - u``,
so both a singular lower end and the far tail (``u`` close to 1) keep full
floating-point resolution; all panels share one error-driven queue.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .errors import DomainError, EgfkitError, IntegrationError

__all__ = [
    "Interval",
    "QuadResult",
    "quad",
    "integrate",
    "differentiate",
    "RngStream",
    "uniform_stream",
    "derive_stream_id",
    "DEFAULT_REL_TOL",
    "ORACLE_REL_TOL",
    "MAX_PANELS",
]

DEFAULT_REL_TOL = 1e-6
ORACLE_REL_TOL = 1e-8
MAX_PANELS = 2**15

# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.0, 0.129484966168869693270611432679082,
    0.0, 0.279705391489276667901467771423780,
    0.0, 0.381830050505118944950369775488975,
    0.0, 0.417959183673469387755102040816327,
])

# full 15-point layout: -x_0..-x_6, 0, x_6..x_0
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KRONROD = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GAUSS = np.concatenate([_WG[:-1], [_WG[-1]], _WG[-2::-1]])

_EPS = np.finfo(float).eps
_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class Interval:
    """Integration range with a finite lower end; ``upper`` may be ``inf``."""

    lower: float
    upper: float = math.inf

    def __post_init__(self):
        if not math.isfinite(self.lower):
            raise DomainError(f"interval lower bound must be finite, got {self.lower}")
        if math.isnan(self.upper) or self.upper == -math.inf:
            raise DomainError(f"invalid interval upper bound {self.upper}")
        if not self.lower < self.upper:
            raise DomainError(f"empty interval [{self.lower}, {self.upper}]")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.upper)

    def __contains__(self, x) -> bool:
        return self.lower <= x <= self.upper


class QuadResult(NamedTuple):
    value: float
    error: float
    panels: int


def _call_vectorized(f, x):
    try:
        y = np.asarray(f(x), dtype=float)
    except (TypeError, ValueError):
        y = None
    if y is None or y.shape != x.shape:
        y = np.array([float(f(xi)) for xi in x.ravel()]).reshape(x.shape)
    return y


_EDGE_FACTOR = 10.0


def _gk15(g, a, b, edges=(None, None)):
    """Apply the 7/15 rule to panels ``[a_k, b_k]``; returns (value, error).

    A panel that touches a domain edge in ``edges`` while the integrand
    grows toward that edge looks like an endpoint singularity, where the
    Gauss-Kronrod difference underestimates the error; such panels get
    ``error >= _EDGE_FACTOR * |value|``.
    """
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = g(x)
    resk = fx @ _KRONROD
    resg = fx @ _GAUSS
    resabs = np.abs(fx) @ _KRONROD
    resasc = np.abs(fx - 0.5 * resk[:, None]) @ _KRONROD
    value = resk * half
    err = np.abs((resk - resg) * half)
    resasc = resasc * np.abs(half)
    resabs = resabs * np.abs(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc != 0) & (err != 0), scaled, err)
    floor = 50.0 * _EPS * resabs
    err = np.where(resabs > _TINY / (50.0 * _EPS), np.maximum(err, floor), err)
    mag = np.abs(fx)
    singular = np.zeros(len(a), dtype=bool)
    if edges[0] is not None:
        singular |= (a == edges[0]) & (mag[:, 0] > 2.0 * mag[:, 7])
    if edges[1] is not None:
        singular |= (b == edges[1]) & (mag[:, -1] > 2.0 * mag[:, 7])
    err = np.where(singular, np.maximum(err, _EDGE_FACTOR * np.abs(value)), err)
    return value, err


def quad(
    f: Callable,
    domain: Interval,
    rel_tol: float = DEFAULT_REL_TOL,
    *,
    abs_tol: float = 0.0,
    points: Iterable[float] = (),
    max_panels: int = MAX_PANELS,
) -> QuadResult:
    """Adaptive quadrature of ``f`` over ``domain`` with an error estimate.

    ``f`` should accept a numpy array and evaluate elementwise; scalar-only
    callables are detected and evaluated point by point.  ``points`` are
    interior breakpoints (kinks, jumps) used to seed the initial panels.
    Convergence means ``error <= max(abs_tol, rel_tol * max(|I|, 1e-12))``.
    """
    if not 0.0 < rel_tol <= 1e-2:
        raise DomainError(f"rel_tol must lie in (0, 1e-2], got {rel_tol}")

    lower = domain.lower
    points = [float(p) for p in points]

    def direct(x):
        y = _call_vectorized(f, x)
        if not np.all(np.isfinite(y)):
            raise IntegrationError("integrand is not finite on the domain")
        return y

    def mapped(w):
        x = lower - 1.0 + 1.0 / w
        fx = _call_vectorized(f, x)
        with np.errstate(over="ignore", invalid="ignore"):
            y = np.where(fx == 0.0, 0.0, fx / w / w)
        if not np.all(np.isfinite(y)):
            raise IntegrationError("integrand is not finite on the domain")
        return y

    # each piece: (integrand, breakpoints, edges where singularities may sit)
    if domain.is_finite:
        head_end = domain.upper
        pieces = [(direct, sorted({lower, head_end, *(p for p in points if lower < p < head_end)}),
                   (lower, head_end))]
    else:
        # [lower, lower+1] directly (keeps resolution at the lower end), the
        # tail through x = lower + u/(1-u) written in w = 1 - u in (0, 1/2]
        head_end = lower + 1.0
        tail = sorted({1.0 / (p - lower + 1.0) for p in points if p > head_end})
        pieces = [
            (direct, sorted({lower, head_end, *(p for p in points if lower < p < head_end)}),
             (lower, None)),
            (mapped, [0.0, *tail, 0.5], (0.0, None)),
        ]

    counter = itertools.count()
    heap = []
    for k, (g, breaks, edges) in enumerate(pieces):
        a = np.array(breaks[:-1], dtype=float)
        b = np.array(breaks[1:], dtype=float)
        values, errors = _gk15(g, a, b, edges)
        for lo, hi, v, e in zip(a, b, values, errors):
            heap.append((-e, next(counter), lo, hi, float(v), float(e), k))
    heapq.heapify(heap)
    total = math.fsum(item[4] for item in heap)
    total_err = math.fsum(item[5] for item in heap)
    frozen = []  # panels too narrow to bisect further
    n_panels = len(heap)

    def target(estimate):
        return max(abs_tol, rel_tol * max(abs(estimate), 1e-12))

    while True:
        if total_err <= target(total):
            # refresh running sums to shed accumulated drift before accepting
            total = math.fsum([item[4] for item in heap] + [item[4] for item in frozen])
            total_err = math.fsum([item[5] for item in heap] + [item[5] for item in frozen])
            if total_err <= target(total):
                return QuadResult(total, total_err, n_panels)
        if not heap or n_panels >= max_panels:
            break
        item = heapq.heappop(heap)
        _, _, lo, hi, v, e, k = item
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            frozen.append(item)
            continue
        g, _, edges = pieces[k]
        cv, ce = _gk15(g, np.array([lo, mid]), np.array([mid, hi]), edges)
        total += float(cv[0] + cv[1]) - v
        total_err += float(ce[0] + ce[1]) - e
        heapq.heappush(heap, (-ce[0], next(counter), lo, mid, float(cv[0]), float(ce[0]), k))
        heapq.heappush(heap, (-ce[1], next(counter), mid, hi, float(cv[1]), float(ce[1]), k))
        n_panels += 1

    total = math.fsum([item[4] for item in heap] + [item[4] for item in frozen])
    total_err = math.fsum([item[5] for item in heap] + [item[5] for item in frozen])
    raise IntegrationError(
        f"quadrature did not converge after {n_panels} panels "
        f"(estimate {total!r}, error {total_err:.3g})",
        partial=total,
        error=total_err,
    )


def integrate(f: Callable, domain: Interval, rel_tol: float = DEFAULT_REL_TOL, **kwargs) -> float:
    """Integral of ``f`` over ``domain``; see :func:`quad` for options."""
    return quad(f, domain, rel_tol, **kwargs).value


def differentiate(f: Callable[[float], float], t: float, step: float = 1e-4) -> float:
    """Central difference ``(f(t+step) - f(t-step)) / (2 step)``."""
    if not step > 0:
        raise DomainError(f"step must be positive, got {step}")
    try:
        hi = float(f(t + step))
        lo = float(f(t - step))
    except (EgfkitError, ValueError, ArithmeticError) as exc:
        raise DomainError(f"function undefined near t={t}: {exc}") from exc
    if not (math.isfinite(hi) and math.isfinite(lo)):
        raise DomainError(f"function not finite near t={t}")
    return (hi - lo) / (2.0 * step)


_U64 = 2**64


def derive_stream_id(*parts) -> int:
    """Stable 64-bit identifier from arbitrary hashable labels."""
    digest = hashlib.blake2b(repr(parts).encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass
class RngStream:
    """A seeded PCG64 stream addressed by ``(seed, stream_id)``.

    Streams are single-owner: draw from one stream in one task only and
    obtain parallelism by allocating distinct stream ids.
    """

    seed: int
    stream_id: int = 0
    _generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or not 0 <= int(value) < _U64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {value!r}")
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self._generator = np.random.Generator(np.random.PCG64(seq))

    def uniforms(self, size: int) -> np.ndarray:
        """``size`` draws strictly inside (0, 1) on a 2**-52 grid."""
        raw = self._generator.bit_generator.random_raw(size)
        return ((raw >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52

    def standard_gamma(self, shape: float, size: int) -> np.ndarray:
        return self._generator.standard_gamma(shape, size)


def uniform_stream(rng: RngStream, size: int) -> np.ndarray:
    """Next ``size`` open-interval uniforms from ``rng``."""
    return rng.uniforms(size)
