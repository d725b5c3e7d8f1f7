"""Lifetime distribution catalog: density, cdf, survival, quantile, sampling,
hazard rate and mean residual life for every family used by egfkit.

Families and their CLI spellings (parameters in order)::

    paretoI:alpha        alpha x^-(alpha+1),                 x >= 1
    exponential:lambda   lambda e^(-lambda x),               x >= 0
    uniform:a,b          1 / (b - a),                        a <= x <= b
    power:c              c x^(c-1),                          0 <= x <= 1
    lomax:m              m (1+x)^-(1+m),                     x >= 0
    weibull:lambda       lambda x^(lambda-1) e^(-x^lambda),  x >= 0
    gamma_shifted:lambda (x-1)^(lambda-1) e^-(x-1) / G(lambda), x >= 1
    beta_exponential:lambda
                         lambda e^-(x-1) (1 - e^-(x-1))^(lambda-1), x >= 1
    tilted_pareto:lambda (1+lambda) (x+lambda)^-2,            x >= 1
    inverse_beta:lambda  (1+lambda) (x-1)^lambda x^-(2+lambda), x >= 1
    benini:lambda        x^-2 (1 + 2 lambda ln x) e^(-lambda ln^2 x), x >= 1
    half_normal:-        sqrt(2/pi) e^(-x^2/2),              x >= 0
    log_normal:-         e^(-ln^2 x / 2) / (x sqrt(2 pi)),   x > 0
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import DegenerateTailError, DomainError, InfiniteMeanError
from .numerics import Interval, RngStream, integrate, quad

__all__ = [
    "Family",
    "DistributionSpec",
    "Sample",
    "as_sample",
    "pdf",
    "pdf_offset",
    "support_integral",
    "cdf",
    "survival",
    "quantile",
    "sample",
    "hazard",
    "mean_residual_life",
    "has_finite_mean",
]


class Family(enum.Enum):
    PARETO_I = "paretoI"
    EXPONENTIAL = "exponential"
    UNIFORM = "uniform"
    POWER = "power"
    LOMAX = "lomax"
    WEIBULL = "weibull"
    GAMMA_SHIFTED = "gamma_shifted"
    BETA_EXPONENTIAL = "beta_exponential"
    TILTED_PARETO = "tilted_pareto"
    INVERSE_BETA = "inverse_beta"
    BENINI = "benini"
    HALF_NORMAL = "half_normal"
    LOG_NORMAL = "log_normal"


@dataclass(frozen=True)
class _Impl:
    param_names: tuple
    support: Callable[..., tuple]
    pdf: Callable
    cdf: Callable
    sf: Callable
    ppf: Callable
    finite_mean: Callable[..., bool] = lambda *p: True
    # f(x) ~ (x - lower)^origin_power near the lower end (None: bounded there)
    origin_power: Optional[Callable[..., float]] = None
    origin_label: str = ""
    # f(x) ~ x^-tail_power as x -> inf (None: faster than any power)
    tail_power: Optional[Callable[..., float]] = None
    tail_label: str = ""
    allow_zero: tuple = ()
    # density at lower + y, accurate for tiny offsets y (None: pdf(lower + y))
    pdf_offset: Optional[Callable] = None


_SQRT2 = math.sqrt(2.0)


def _halfnormal_ppf(u):
    return np.where(u < 0.5, _SQRT2 * special.erfinv(u), _SQRT2 * special.erfcinv(1.0 - u))


def _gamma_ppf(u, lam):
    return 1.0 + np.where(u < 0.5, special.gammaincinv(lam, u), special.gammainccinv(lam, 1.0 - u))


def _benini_ppf(u, lam):
    big_l = -np.log1p(-u)
    return np.exp(2.0 * big_l / (1.0 + np.sqrt(1.0 + 4.0 * lam * big_l)))


_IMPLS = {
    Family.PARETO_I: _Impl(
        ("alpha",),
        support=lambda a: (1.0, math.inf),
        pdf=lambda x, a: a * x ** (-(a + 1.0)),
        cdf=lambda x, a: -np.expm1(-a * np.log(x)),
        sf=lambda x, a: x ** (-a),
        ppf=lambda u, a: np.exp(-np.log1p(-u) / a),
        finite_mean=lambda a: a > 1.0,
        tail_power=lambda a: a + 1.0,
        tail_label="(alpha+1)",
    ),
    Family.EXPONENTIAL: _Impl(
        ("lambda",),
        support=lambda lam: (0.0, math.inf),
        pdf=lambda x, lam: lam * np.exp(-lam * x),
        cdf=lambda x, lam: -np.expm1(-lam * x),
        sf=lambda x, lam: np.exp(-lam * x),
        ppf=lambda u, lam: -np.log1p(-u) / lam,
    ),
    Family.UNIFORM: _Impl(
        ("a", "b"),
        support=lambda a, b: (a, b),
        pdf=lambda x, a, b: np.full_like(x, 1.0 / (b - a)),
        cdf=lambda x, a, b: (x - a) / (b - a),
        sf=lambda x, a, b: (b - x) / (b - a),
        ppf=lambda u, a, b: a + u * (b - a),
    ),
    Family.POWER: _Impl(
        ("c",),
        support=lambda c: (0.0, 1.0),
        pdf=lambda x, c: c * x ** (c - 1.0),
        cdf=lambda x, c: x**c,
        sf=lambda x, c: -np.expm1(c * np.log(x)),
        ppf=lambda u, c: u ** (1.0 / c),
        origin_power=lambda c: c - 1.0,
        origin_label="(c-1)",
    ),
    Family.LOMAX: _Impl(
        ("m",),
        support=lambda m: (0.0, math.inf),
        pdf=lambda x, m: m * (1.0 + x) ** (-(1.0 + m)),
        cdf=lambda x, m: -np.expm1(-m * np.log1p(x)),
        sf=lambda x, m: (1.0 + x) ** (-m),
        ppf=lambda u, m: np.expm1(-np.log1p(-u) / m),
        finite_mean=lambda m: m > 1.0,
        tail_power=lambda m: m + 1.0,
        tail_label="(1+m)",
    ),
    Family.WEIBULL: _Impl(
        ("lambda",),
        support=lambda lam: (0.0, math.inf),
        pdf=lambda x, lam: lam * x ** (lam - 1.0) * np.exp(-(x**lam)),
        cdf=lambda x, lam: -np.expm1(-(x**lam)),
        sf=lambda x, lam: np.exp(-(x**lam)),
        ppf=lambda u, lam: (-np.log1p(-u)) ** (1.0 / lam),
        origin_power=lambda lam: lam - 1.0,
        origin_label="(lambda-1)",
    ),
    Family.GAMMA_SHIFTED: _Impl(
        ("lambda",),
        support=lambda lam: (1.0, math.inf),
        pdf=lambda x, lam: np.exp(special.xlogy(lam - 1.0, x - 1.0) - (x - 1.0) - special.gammaln(lam)),
        cdf=lambda x, lam: special.gammainc(lam, x - 1.0),
        sf=lambda x, lam: special.gammaincc(lam, x - 1.0),
        ppf=_gamma_ppf,
        pdf_offset=lambda y, lam: np.exp(special.xlogy(lam - 1.0, y) - y - special.gammaln(lam)),
        origin_power=lambda lam: lam - 1.0,
        origin_label="(lambda-1)",
    ),
    Family.BETA_EXPONENTIAL: _Impl(
        ("lambda",),
        support=lambda lam: (1.0, math.inf),
        pdf=lambda x, lam: lam * np.exp(-(x - 1.0) + special.xlogy(lam - 1.0, -np.expm1(-(x - 1.0)))),
        cdf=lambda x, lam: np.exp(special.xlogy(lam, -np.expm1(-(x - 1.0)))),
        sf=lambda x, lam: -np.expm1(lam * np.log1p(-np.exp(-(x - 1.0)))),
        ppf=lambda u, lam: 1.0 - np.log1p(-(u ** (1.0 / lam))),
        pdf_offset=lambda y, lam: lam * np.exp(-y + special.xlogy(lam - 1.0, -np.expm1(-y))),
        origin_power=lambda lam: lam - 1.0,
        origin_label="(lambda-1)",
    ),
    Family.TILTED_PARETO: _Impl(
        ("lambda",),
        support=lambda lam: (1.0, math.inf),
        pdf=lambda x, lam: (1.0 + lam) / (x + lam) ** 2,
        cdf=lambda x, lam: (x - 1.0) / (x + lam),
        sf=lambda x, lam: (1.0 + lam) / (x + lam),
        ppf=lambda u, lam: (1.0 + lam) / (1.0 - u) - lam,
        finite_mean=lambda lam: False,
        tail_power=lambda lam: 2.0,
        tail_label="2",
    ),
    Family.INVERSE_BETA: _Impl(
        ("lambda",),
        support=lambda lam: (1.0, math.inf),
        pdf=lambda x, lam: (1.0 + lam) * np.exp(special.xlogy(lam, x - 1.0) - (2.0 + lam) * np.log(x)),
        cdf=lambda x, lam: np.exp((1.0 + lam) * np.log1p(-1.0 / x)),
        sf=lambda x, lam: -np.expm1((1.0 + lam) * np.log1p(-1.0 / x)),
        ppf=lambda u, lam: -1.0 / np.expm1(np.log(u) / (1.0 + lam)),
        finite_mean=lambda lam: False,
        tail_power=lambda lam: 2.0,
        tail_label="2",
        allow_zero=("lambda",),
    ),
    Family.BENINI: _Impl(
        ("lambda",),
        support=lambda lam: (1.0, math.inf),
        pdf=lambda x, lam: (1.0 + 2.0 * lam * np.log(x)) * np.exp(-2.0 * np.log(x) - lam * np.log(x) ** 2),
        cdf=lambda x, lam: -np.expm1(-np.log(x) - lam * np.log(x) ** 2),
        sf=lambda x, lam: np.exp(-np.log(x) - lam * np.log(x) ** 2),
        ppf=_benini_ppf,
    ),
    Family.HALF_NORMAL: _Impl(
        (),
        support=lambda: (0.0, math.inf),
        pdf=lambda x: math.sqrt(2.0 / math.pi) * np.exp(-0.5 * x * x),
        cdf=lambda x: special.erf(x / _SQRT2),
        sf=lambda x: special.erfc(x / _SQRT2),
        ppf=_halfnormal_ppf,
    ),
    Family.LOG_NORMAL: _Impl(
        (),
        support=lambda: (0.0, math.inf),
        pdf=lambda x: np.exp(-0.5 * np.log(x) ** 2) / (x * math.sqrt(2.0 * math.pi)),
        cdf=lambda x: special.ndtr(np.log(x)),
        sf=lambda x: special.ndtr(-np.log(x)),
        ppf=lambda u: np.exp(special.ndtri(u)),
    ),
}


@dataclass(frozen=True)
class DistributionSpec:
    """A catalog family together with its parameter values."""

    family: Family
    params: tuple = ()

    def __post_init__(self):
        family = self.family if isinstance(self.family, Family) else Family(self.family)
        object.__setattr__(self, "family", family)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "params", params)
        impl = _IMPLS[family]
        if len(params) != len(impl.param_names):
            raise DomainError(
                f"{family.value} takes {len(impl.param_names)} parameter(s) "
                f"({', '.join(impl.param_names) or 'none'}), got {len(params)}"
            )
        for name, value in zip(impl.param_names, params):
            if not math.isfinite(value):
                raise DomainError(f"{family.value}: {name} must be finite, got {value}")
            if family is Family.UNIFORM:
                continue
            if value < 0 or (value == 0 and name not in impl.allow_zero):
                raise DomainError(f"{family.value}: {name} must be positive, got {value}")
        if family is Family.UNIFORM and not params[0] < params[1]:
            raise DomainError(f"uniform requires a < b, got {params}")

    @classmethod
    def parse(cls, text: str) -> "DistributionSpec":
        """Parse ``family:p1,p2`` (``family:-`` or ``family`` for no parameters)."""
        name, _, rest = text.strip().partition(":")
        try:
            family = Family(name)
        except ValueError:
            known = ", ".join(f.value for f in Family)
            raise DomainError(f"unknown family {name!r}; expected one of {known}") from None
        rest = rest.strip()
        if rest in ("", "-"):
            params = ()
        else:
            try:
                params = tuple(float(p) for p in rest.split(","))
            except ValueError:
                raise DomainError(f"cannot parse parameters {rest!r}") from None
        return cls(family, params)

    @property
    def label(self) -> str:
        if not self.params:
            return f"{self.family.value}:-"
        return f"{self.family.value}:" + ",".join(f"{p:g}" for p in self.params)

    @property
    def support(self) -> Interval:
        lo, hi = _IMPLS[self.family].support(*self.params)
        return Interval(lo, hi)

    @property
    def impl(self) -> _Impl:
        return _IMPLS[self.family]

    def __str__(self):
        return self.label


class Sample:
    """Finite i.i.d. observations with a cached sorted view."""

    __slots__ = ("values", "sorted_view")

    def __init__(self, values):
        arr = np.array(values, dtype=float).ravel()
        if arr.size < 1:
            raise DomainError("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample values must be finite")
        arr.setflags(write=False)
        ordered = np.sort(arr)
        ordered.setflags(write=False)
        self.values = arr
        self.sorted_view = ordered

    @property
    def n(self) -> int:
        return int(self.values.size)

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"Sample(n={self.n})"


def as_sample(data) -> Sample:
    return data if isinstance(data, Sample) else Sample(data)


def _evaluate(dist: DistributionSpec, fn: Callable, x, below: float, above: float):
    """Apply ``fn`` inside the support; constants ``below``/``above`` outside."""
    x = np.asarray(x, dtype=float)
    sup = dist.support
    inside = (x >= sup.lower) & (x <= sup.upper)
    anchor = sup.lower + (1.0 if not sup.is_finite else 0.5 * (sup.upper - sup.lower))
    safe = np.where(inside, x, anchor)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
        inner = np.asarray(fn(safe, *dist.params), dtype=float)
    out = np.where(inside, inner, np.where(x < sup.lower, below, above))
    return out if out.ndim else float(out)


def pdf(dist: DistributionSpec, x):
    """Density at ``x``; zero outside the support."""
    return _evaluate(dist, dist.impl.pdf, x, 0.0, 0.0)


def pdf_offset(dist: DistributionSpec, y):
    """Density at ``support.lower + y`` for ``y >= 0``.

    Families with a singular density at a nonzero lower end evaluate this
    in the offset itself, so offsets far below the spacing of floats near
    the endpoint remain distinct.
    """
    y = np.asarray(y, dtype=float)
    fn = dist.impl.pdf_offset
    if fn is None:
        return pdf(dist, dist.support.lower + y)
    sup = dist.support
    inside = (y >= 0.0) & (y <= sup.upper - sup.lower)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore", under="ignore"):
        inner = np.asarray(fn(np.where(inside, y, 1.0), *dist.params), dtype=float)
    out = np.where(inside, inner, 0.0)
    return out if out.ndim else float(out)


def support_integral(dist: DistributionSpec, integrand: Callable, start=None, rel_tol=1e-8, **kwargs):
    """Quadrature of ``integrand(x, f(x))`` from ``start`` to the upper end.

    ``start`` defaults to the support's lower end, in which case the
    integration runs in offset coordinates (see :func:`pdf_offset`) so
    endpoint singularities of the density are resolved.  Returns a
    :class:`~egfkit.numerics.QuadResult`.
    """
    sup = dist.support
    if start is None or start <= sup.lower:
        lower = sup.lower
        domain = Interval(0.0, sup.upper - lower)
        return quad(lambda y: integrand(lower + y, pdf_offset(dist, y)), domain, rel_tol, **kwargs)
    return quad(lambda x: integrand(x, pdf(dist, x)), Interval(start, sup.upper), rel_tol, **kwargs)


def cdf(dist: DistributionSpec, x):
    return _evaluate(dist, dist.impl.cdf, x, 0.0, 1.0)


def survival(dist: DistributionSpec, x):
    return _evaluate(dist, dist.impl.sf, x, 1.0, 0.0)


def quantile(dist: DistributionSpec, u):
    """Inverse cdf for ``u`` strictly inside (0, 1)."""
    arr = np.asarray(u, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise DomainError("quantile level must lie strictly inside (0, 1)")
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        out = np.asarray(dist.impl.ppf(arr, *dist.params), dtype=float)
    return out if out.ndim else float(out)


def sample(dist: DistributionSpec, n: int, rng: RngStream) -> Sample:
    """``n`` independent draws, by inversion of open-interval uniforms."""
    if n < 1:
        raise DomainError(f"sample size must be >= 1, got {n}")
    if dist.family is Family.GAMMA_SHIFTED:
        return Sample(1.0 + rng.standard_gamma(dist.params[0], n))
    return Sample(quantile(dist, rng.uniforms(n)))


def hazard(dist: DistributionSpec, t: float) -> float:
    """Failure rate ``f(t) / S(t)``."""
    s = survival(dist, t)
    if not s > 0.0:
        raise DegenerateTailError(f"{dist.label}: survival is zero at t={t}")
    return pdf(dist, t) / s


def has_finite_mean(dist: DistributionSpec) -> bool:
    return dist.impl.finite_mean(*dist.params)


def mean_residual_life(dist: DistributionSpec, t: float, rel_tol: float = 1e-10) -> float:
    """``m(t) = integral_t^inf S(x) dx / S(t)`` by quadrature."""
    if not has_finite_mean(dist):
        raise InfiniteMeanError(f"{dist.label} has no finite mean; residual life diverges")
    s_t = survival(dist, t)
    if not s_t > 0.0:
        raise DegenerateTailError(f"{dist.label}: survival is zero at t={t}")
    sup = dist.support
    start = max(t, sup.lower)
    head = start - t  # S == 1 below the support
    tail = integrate(lambda x: survival(dist, x), Interval(start, sup.upper), rel_tol)
    return (head + tail) / s_t
