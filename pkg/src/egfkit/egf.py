"""Entropy generating functions of lifetime distributions.

Four related functionals of a density ``f`` with survival ``S``:

* ``egf``           B_s(X)      = int f(x)^s dx
* ``egf_residual``  B_s(X; t)   = int_t^inf (f(x) / S(t))^s dx
* ``wegf``          B_s(W, X)   = int x f(x)^s dx
* ``wregf``         B_s(W, X; t) = int_t^inf x (f(x) / S(t))^s dx

Closed forms are used where they are known and every other case falls back
to adaptive quadrature.  Entropy functionals, the hazard-rate relation and
the monotone-class machinery live here as well.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .distributions import (
    DistributionSpec,
    Family,
    hazard,
    mean_residual_life,
    quantile,
    support_integral,
    survival,
)
from .errors import (
    ConvergenceError,
    DegenerateTailError,
    DomainError,
    IntegrationError,
    OrderError,
)
from .numerics import ORACLE_REL_TOL, differentiate

__all__ = [
    "EGFQuery",
    "EGFValue",
    "Monotonicity",
    "convergence_condition",
    "egf",
    "egf_residual",
    "wegf",
    "wregf",
    "shannon_entropy",
    "weighted_entropy",
    "mean_log",
    "wregf_derivative",
    "hazard_ode_residual",
    "hazard_bound",
    "mrl_bound",
    "classify_monotonicity",
    "default_t_grid",
]

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
_METHODS = ("auto", CLOSED_FORM, QUADRATURE)

# quadrature tolerance used when a value feeds a finite difference
_DERIVATIVE_REL_TOL = 1e-11


@dataclass(frozen=True)
class EGFQuery:
    """Order ``s`` and age ``t`` at which a residual functional is evaluated."""

    s: float
    t: float


@dataclass(frozen=True)
class EGFValue:
    value: float
    method: str
    est_error: float = 0.0

    def __float__(self):
        return float(self.value)


class Monotonicity(enum.Enum):
    IWREGF = "IWREGF"
    DWREGF = "DWREGF"
    NEITHER = "neither"


def _check_order(s: float) -> float:
    s = float(s)
    if not s > 0 or not math.isfinite(s):
        raise DomainError(f"order s must be positive and finite, got {s}")
    if s == 1.0:
        raise OrderError("order s = 1 is excluded from every generating function")
    return s


def convergence_condition(dist: DistributionSpec, s: float, weighted: bool,
                          include_origin: bool = True) -> Optional[str]:
    """Return a description of the violated convergence condition, or None.

    Tail condition for ``f ~ x^-g``: ``g*s > 1`` (``> 2`` when weighted).
    Origin condition for ``f ~ (x - lower)^b``: ``b*s > -1``, relaxed to
    ``b*s > -2`` for the weighted integral when the support starts at 0.
    """
    impl = dist.impl
    if impl.tail_power is not None and not dist.support.is_finite:
        g = impl.tail_power(*dist.params)
        bound = 2.0 if weighted else 1.0
        if not g * s > bound:
            return (f"{dist.label}: tail requires {impl.tail_label}*s > {bound:g}, "
                    f"got {g:g}*{s:g} = {g * s:g}")
    if include_origin and impl.origin_power is not None:
        b = impl.origin_power(*dist.params)
        bound = -2.0 if (weighted and dist.support.lower == 0.0) else -1.0
        if not b * s > bound:
            return (f"{dist.label}: origin requires {impl.origin_label}*s > {bound:g}, "
                    f"got {b:g}*{s:g} = {b * s:g}")
    return None


def _closed_egf(dist, s):
    p = dist.params
    if dist.family is Family.UNIFORM:
        return (p[1] - p[0]) ** (1.0 - s)
    if dist.family is Family.EXPONENTIAL:
        return p[0] ** (s - 1.0) / s
    return None


def _closed_egf_residual(dist, s, t):
    p = dist.params
    if dist.family is Family.UNIFORM:
        return (p[1] - t) ** (1.0 - s)
    if dist.family is Family.EXPONENTIAL:
        return p[0] ** (s - 1.0) / s
    return None


def _closed_wegf(dist, s):
    p = dist.params
    fam = dist.family
    if fam is Family.LOMAX:
        k = (1.0 + p[0]) * s
        return p[0] ** s / ((k - 1.0) * (k - 2.0))
    if fam is Family.POWER:
        return p[0] ** s / ((p[0] - 1.0) * s + 2.0)
    if fam is Family.PARETO_I:
        return p[0] ** s / ((p[0] + 1.0) * s - 2.0)
    if fam is Family.UNIFORM:
        a, b = p
        return (b * b - a * a) / (2.0 * (b - a) ** s)
    if fam is Family.EXPONENTIAL:
        return 1.0 / (s * s * p[0] ** (2.0 - s))
    return None


def _closed_wregf(dist, s, t):
    p = dist.params
    fam = dist.family
    if fam is Family.UNIFORM:
        b = p[1]
        return (b + t) / (2.0 * (b - t) ** (s - 1.0))
    if fam is Family.EXPONENTIAL:
        lam = p[0]
        return lam**s * (1.0 + lam * s * t) / (lam * s) ** 2
    if fam is Family.PARETO_I:
        alpha = p[0]
        return alpha**s * t ** (2.0 - s) / ((alpha + 1.0) * s - 2.0)
    return None


def _dispatch(closed, method, compute):
    if method not in _METHODS:
        raise DomainError(f"method must be one of {_METHODS}, got {method!r}")
    if method != QUADRATURE and closed is not None:
        value = closed()
        if value is not None:
            return EGFValue(float(value), CLOSED_FORM, 0.0)
    if method == CLOSED_FORM:
        raise DomainError("no closed form available for this distribution")
    return compute()


def _quadrature(dist, integrand, start, rel_tol, scale=1.0):
    try:
        res = support_integral(dist, integrand, start=start, rel_tol=rel_tol)
    except IntegrationError as exc:
        raise ConvergenceError(f"{dist.label}: quadrature failed to converge ({exc})") from exc
    return EGFValue(res.value * scale, QUADRATURE, res.error * abs(scale))


def _check_time(dist, t):
    sup = dist.support
    if t < sup.lower:
        raise DomainError(f"t={t} lies below the support start {sup.lower}")
    s_t = survival(dist, t)
    if not s_t > 0.0:
        raise DegenerateTailError(f"{dist.label}: survival is zero at t={t}")
    return s_t


def _require_convergent(dist, s, weighted, include_origin=True):
    message = convergence_condition(dist, s, weighted, include_origin)
    if message is not None:
        raise ConvergenceError(message)


def egf(dist: DistributionSpec, s: float, *, method: str = "auto",
        rel_tol: float = ORACLE_REL_TOL) -> EGFValue:
    """Information generating function ``int f^s``."""
    s = _check_order(s)
    _require_convergent(dist, s, weighted=False)
    return _dispatch(
        lambda: _closed_egf(dist, s),
        method,
        lambda: _quadrature(dist, lambda x, f: f**s, None, rel_tol),
    )


def egf_residual(dist: DistributionSpec, query: EGFQuery, *, method: str = "auto",
                 rel_tol: float = ORACLE_REL_TOL) -> EGFValue:
    """Residual generating function at age ``query.t``."""
    s, t = _check_order(query.s), float(query.t)
    s_t = _check_time(dist, t)
    if t == dist.support.lower:
        return egf(dist, s, method=method, rel_tol=rel_tol)
    _require_convergent(dist, s, weighted=False, include_origin=False)
    return _dispatch(
        lambda: _closed_egf_residual(dist, s, t),
        method,
        lambda: _quadrature(dist, lambda x, f: (f / s_t) ** s, t, rel_tol),
    )


def wegf(dist: DistributionSpec, s: float, *, method: str = "auto",
         rel_tol: float = ORACLE_REL_TOL) -> EGFValue:
    """Weighted generating function ``int x f^s``."""
    s = _check_order(s)
    _require_convergent(dist, s, weighted=True)
    return _dispatch(
        lambda: _closed_wegf(dist, s),
        method,
        lambda: _quadrature(dist, lambda x, f: x * f**s, None, rel_tol),
    )


def wregf(dist: DistributionSpec, query: EGFQuery, *, method: str = "auto",
          rel_tol: float = ORACLE_REL_TOL) -> EGFValue:
    """Weighted residual generating function at age ``query.t``.

    The Pareto closed form is ``alpha^s t^(2-s) / ((alpha+1)s - 2)``, which
    is what direct integration gives; at ``s = 2`` it is ``alpha / 2`` for
    every ``t``.
    """
    s, t = _check_order(query.s), float(query.t)
    s_t = _check_time(dist, t)
    if t == dist.support.lower:
        return wegf(dist, s, method=method, rel_tol=rel_tol)
    _require_convergent(dist, s, weighted=True, include_origin=False)
    return _dispatch(
        lambda: _closed_wregf(dist, s, t),
        method,
        lambda: _quadrature(dist, lambda x, f: x * (f / s_t) ** s, t, rel_tol),
    )


def _entropy_integral(dist, integrand, rel_tol, what):
    try:
        return support_integral(dist, integrand, rel_tol=rel_tol).value
    except IntegrationError as exc:
        raise ConvergenceError(f"{dist.label}: {what} integral does not converge ({exc})") from exc


def shannon_entropy(dist: DistributionSpec, rel_tol: float = ORACLE_REL_TOL) -> float:
    """``-int f log f``."""
    return _entropy_integral(dist, lambda x, f: -special.xlogy(f, f), rel_tol, "entropy")


def weighted_entropy(dist: DistributionSpec, rel_tol: float = ORACLE_REL_TOL) -> float:
    """``-int x f log f``; needs a finite mean."""
    impl = dist.impl
    if impl.tail_power is not None and not impl.tail_power(*dist.params) > 2.0:
        raise ConvergenceError(f"{dist.label}: weighted entropy needs {impl.tail_label} > 2")
    return _entropy_integral(dist, lambda x, f: -x * special.xlogy(f, f), rel_tol, "weighted entropy")


def mean_log(dist: DistributionSpec, rel_tol: float = ORACLE_REL_TOL) -> float:
    """``E log X``."""
    if dist.support.lower < 0:
        raise DomainError(f"{dist.label}: log X undefined on a support reaching below 0")

    def integrand(x, f):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(f == 0.0, 0.0, f * np.log(x))

    return _entropy_integral(dist, integrand, rel_tol, "log-moment")


def _wregf_at(dist, s, rel_tol):
    return lambda t: wregf(dist, EGFQuery(s, t), rel_tol=rel_tol).value


def wregf_derivative(dist: DistributionSpec, query: EGFQuery) -> float:
    """d/dt of the weighted residual generating function (central difference,
    step ``1e-4 * max(1, |t|)``)."""
    s, t = _check_order(query.s), float(query.t)
    step = 1e-4 * max(1.0, abs(t))
    if t - step < dist.support.lower:
        raise DomainError(f"t={t} too close to the support start for a central difference")
    return differentiate(_wregf_at(dist, s, _DERIVATIVE_REL_TOL), t, step)


def hazard_ode_residual(dist: DistributionSpec, query: EGFQuery) -> float:
    """``B'(t) - s h(t) B(t) + t h(t)^s``, which vanishes identically."""
    s, t = query.s, query.t
    h = hazard(dist, t)
    b = wregf(dist, query, rel_tol=_DERIVATIVE_REL_TOL).value
    return wregf_derivative(dist, query) - s * h * b + t * h**s


def hazard_bound(dist: DistributionSpec, s: float, t: float) -> float:
    """``(t / s) h(t)^(s-1)``: a lower bound of the weighted residual
    generating function on IWREGF, an upper bound on DWREGF."""
    return t / s * hazard(dist, t) ** (s - 1.0)


def mrl_bound(dist: DistributionSpec, s: float, t: float) -> float:
    """The hazard bound with ``h = (1 + m'(t)) / m(t)`` from the mean
    residual life."""
    m = mean_residual_life(dist, t)
    step = 1e-4 * max(1.0, abs(t))
    dm = differentiate(lambda u: mean_residual_life(dist, u), t, step)
    return t / s * ((1.0 + dm) / m) ** (s - 1.0)


def default_t_grid(dist: DistributionSpec, size: int = 20) -> np.ndarray:
    """``size`` log-spaced ages between the 1% and 99% quantiles."""
    lo, hi = quantile(dist, np.array([0.01, 0.99]))
    if lo > 0:
        return np.geomspace(lo, hi, size)
    return np.linspace(lo, hi, size)


def classify_monotonicity(dist: DistributionSpec, s: float,
                          t_grid: Optional[Sequence[float]] = None,
                          tol: float = 1e-6) -> Monotonicity:
    """IWREGF if the derivative is >= -tol on the whole grid, DWREGF if it is
    <= tol everywhere, otherwise neither.  A flat function counts as IWREGF."""
    grid = default_t_grid(dist) if t_grid is None else np.asarray(t_grid, dtype=float)
    slopes = np.array([wregf_derivative(dist, EGFQuery(s, float(t))) for t in grid])
    if np.all(slopes >= -tol):
        return Monotonicity.IWREGF
    if np.all(slopes <= tol):
        return Monotonicity.DWREGF
    return Monotonicity.NEITHER
