"""Tail approximations for sums of classical Pareto claims mixed over a
frailty: the generic Laplace-of-log form

    f(x) ~ -d/dx L[log(x / beta^m)] = -L'(log(x/beta^m)) / x,

plus its gamma and inverse-Gaussian specializations.  beta is the Pareto
precision parameter and m the index of the smallest conditional shape.
"""

import math
from dataclasses import dataclass

from .mixing import GammaMixing, InverseGaussianMixing, MixingDistribution

__all__ = ["ParetoTailSpec", "tail_pdf_generic", "tail_pdf_gamma", "tail_pdf_ig"]


@dataclass(frozen=True)
class ParetoTailSpec:
    beta: float
    m: int
    mixing: MixingDistribution

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("precision parameter must be positive")
        if self.m < 1:
            raise ValueError("index m must be >= 1")
        if not isinstance(self.mixing, (GammaMixing, InverseGaussianMixing)):
            raise ValueError(
                "tail specializations exist for gamma and inverse-Gaussian mixing only"
            )


def _log_arg(spec: ParetoTailSpec, x: float) -> float:
    s = math.log(x) - spec.m * math.log(spec.beta)
    if s <= 0:
        raise ValueError(f"x must exceed beta^m = {spec.beta ** spec.m}")
    return s


def tail_pdf_generic(spec: ParetoTailSpec, x: float) -> float:
    """Chain-rule evaluation -L'(log(x/beta^m))/x via the exact derivative."""
    s = _log_arg(spec, x)
    return -spec.mixing.laplace_derivative(1, s) / x


def tail_pdf_gamma(alpha: float, lam: float, beta: float, m: int, x: float) -> float:
    """Printed gamma specialization alpha lam^alpha / (x [lam + log x - m log beta]^{alpha+1})."""
    denom = lam + math.log(x) - m * math.log(beta)
    if denom <= 0:
        raise ValueError("x is below the valid tail domain")
    return alpha * lam ** alpha / (x * denom ** (alpha + 1.0))


def tail_pdf_ig(lam: float, mu: float, beta: float, m: int, x: float) -> float:
    """Printed inverse-Gaussian specialization with
    phi(x) = lam/mu^2 + 2 log(x/beta^m)."""
    phi = lam / mu ** 2 + 2.0 * (math.log(x) - m * math.log(beta))
    if phi <= 0:
        raise ValueError("x is below the valid tail domain")
    return (1.0 / x) * math.sqrt(lam / phi) * math.exp(lam / mu - math.sqrt(lam * phi))
