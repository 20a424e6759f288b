"""Risk measures on the aggregate distribution: VaR by root finding on the
survival function, TVaR, and conditional upper tail moments, including the
finite-mixture decomposition
    E(X^r | X > a) = sum_k pi_k (1 - F_k(a)) / (1 - F(a)) * E(X_k^r | X_k > a).

Level convention: value_at_risk(model, level) returns the x with
F(x) = level, i.e. level is the probability of NOT exceeding the returned
threshold.
"""

from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .aggregate import (
    AggregateModel,
    MixtureRepresentation,
    mixture_representation,
    moment,
    moment_from_mixture,
    pdf,
    survival,
)
from .errors import TailUnderflowError, UnsupportedModelError

__all__ = ["RiskReport", "value_at_risk", "tail_moment", "tvar", "risk_report"]

_DEEPEST_LEVEL = 1.0 - 1e-12
_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-11, limit=300)


def value_at_risk(model: AggregateModel, level: float) -> float:
    """Quantile of S_n: the unique x with survival(x) = 1 - level."""
    if not (0.0 < level < 1.0):
        raise ValueError("level must lie strictly between 0 and 1")
    if level >= _DEEPEST_LEVEL:
        raise TailUnderflowError(
            "survival evaluation underflows double precision this deep in the tail"
        )
    target = 1.0 - level
    lo, hi = 0.0, 1.0
    while survival(model, hi) > target:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise TailUnderflowError("VaR bracket expansion ran away")
    return float(optimize.brentq(lambda x: survival(model, x) - target,
                                 lo, hi, xtol=1e-14, rtol=1e-12))


def _tail_moment_quadrature(model: AggregateModel, r: int, a: float) -> float:
    denom = survival(model, a)
    if denom <= 1e-300:
        raise TailUnderflowError(f"survival({a}) underflows; tail moment is noise")
    num, _ = integrate.quad(lambda x: x ** r * pdf(model, x), a, np.inf, **_QUAD_OPTS)
    return num / denom


def _tail_moment_mixture(rep: MixtureRepresentation, r: int, a: float) -> float:
    total = moment_from_mixture(rep, r)
    surv = 1.0 - rep.cdf(a)
    if surv <= 1e-300:
        raise TailUnderflowError(f"mixture survival at {a} underflows")
    # E(X^r) (1 - F^(r)(a)) / (1 - F(a)) applied componentwise
    num = sum(c.weight * c.moment(r) * (1.0 - c.incomplete_moment_cdf(r, a))
              for c in rep.components)
    if total <= 0:
        raise ValueError("mixture has nonpositive total moment")
    return num / surv


def tail_moment(target, r: int, a: float) -> float:
    """Conditional upper tail moment E(X^r | X > a); a = 0 gives E(X^r).

    Accepts an AggregateModel (quadrature against the exact pdf) or a
    MixtureRepresentation (componentwise incomplete-moment formula).
    """
    if r < 1:
        raise ValueError("moment order must be >= 1")
    if a < 0:
        raise ValueError("threshold must be nonnegative")
    if isinstance(target, MixtureRepresentation):
        if a == 0.0:
            return moment_from_mixture(target, r)
        return _tail_moment_mixture(target, r, a)
    if isinstance(target, AggregateModel):
        # existence check up front so divergent tails fail loudly
        moment(target, r)
        if a == 0.0:
            return moment(target, r)
        return _tail_moment_quadrature(target, r, a)
    raise TypeError("target must be an AggregateModel or MixtureRepresentation")


def tvar(model: AggregateModel, level: float) -> float:
    """Tail value at risk: E(S_n | S_n > VaR(level)).

    Uses the mixture decomposition when the model has one (it is exact and
    fast) and quadrature on the density otherwise.
    """
    a = value_at_risk(model, level)
    try:
        rep = mixture_representation(model)
        return _tail_moment_mixture(rep, 1, a)
    except UnsupportedModelError:
        return _tail_moment_quadrature(model, 1, a)


@dataclass(frozen=True)
class RiskReport:
    level: float
    var: float
    tvar: float
    tail_moments: tuple  # of (order, value)


def risk_report(model: AggregateModel, level: float, orders=(1, 2)) -> RiskReport:
    """VaR/TVaR bundle with tail moments of the requested orders."""
    a = value_at_risk(model, level)
    try:
        rep = mixture_representation(model)
        tm = [(r, _tail_moment_mixture(rep, r, a)) for r in orders]
    except UnsupportedModelError:
        tm = [(r, _tail_moment_quadrature(model, r, a)) for r in orders]
    t = next((v for r, v in tm if r == 1), None)
    if t is None:
        t = tvar(model, level)
    return RiskReport(level=level, var=a, tvar=t, tail_moments=tuple(tm))
