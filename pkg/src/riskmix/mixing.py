"""Catalog of frailty (mixing) laws.

Each law knows its Laplace transform, exact n-th Laplace derivatives, the
Archimedean generator (the exact functional inverse of the transform),
negative moments and an exact sampler.  Everything downstream (aggregate
densities, copulas, ruin formulas) plugs into this catalog.

Laplace derivatives of the exp-of-composition laws (Levy, positive stable,
inverse Gaussian) are assembled from partial Bell polynomials whose
coefficient polynomials are accumulated in log space and exponentiated once,
so orders up to DERIVATIVE_CAP stay accurate.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from math import exp, inf, lgamma, log

import numpy as np
from scipy import optimize, special

from .errors import (
    DerivativeCapError,
    NonexistentMomentError,
    UnsupportedModelError,
)
from .specfun import (
    bell_partial,
    kummer_u_integral,
    log_abs_falling_factorial,
    log_bell_partial,
)

__all__ = [
    "DERIVATIVE_CAP",
    "MixingDistribution",
    "GammaMixing",
    "LevyMixing",
    "PositiveStableMixing",
    "InverseGaussianMixing",
    "LindleyMixing",
    "GleserGammaMixing",
    "BetaSecondKindMixing",
    "faa_di_bruno",
]

DERIVATIVE_CAP = 64


def _require_positive(**params):
    for name, value in params.items():
        if not (value > 0):
            raise ValueError(f"{name} must be positive, got {value}")


def _check_order(n: int):
    if n < 1:
        raise ValueError("derivative order must be >= 1")
    if n > DERIVATIVE_CAP:
        raise DerivativeCapError(
            f"derivative order {n} exceeds cap {DERIVATIVE_CAP}; "
            "higher orders would silently lose precision"
        )


def _ret(value, scalar_in):
    value = np.asarray(value, dtype=float)
    return float(value) if scalar_in else value


def _signed_sum_exp(log_terms, sign):
    """sign * sum_k exp(log_terms[k]), each entry a scalar or array."""
    arrs = [np.asarray(t, dtype=float) for t in log_terms]
    if len(arrs) > 1:
        arrs = np.broadcast_arrays(*arrs)
    arr = np.stack(arrs)
    with np.errstate(invalid="ignore"):
        out = np.exp(special.logsumexp(arr, axis=0))
    return sign * out


# log |a_j| for the sqrt-composition coefficients a_j = (-1)^{j-1}(2j-2)!/(2^{2j-1}(j-1)!)
def _log_abs_sqrt_coeff(j: int) -> float:
    return lgamma(2 * j - 1) - (2 * j - 1) * log(2.0) - lgamma(j)


@lru_cache(maxsize=None)
def _log_bell_sqrt(n: int, k: int) -> float:
    """log |B_{n,k}(a_1,...,a_{n-k+1})| for the sqrt coefficient sequence."""
    return log_bell_partial(n, k, [_log_abs_sqrt_coeff(j) for j in range(1, n - k + 2)])


@lru_cache(maxsize=None)
def _log_bell_power(n: int, k: int, alpha: float) -> float:
    """log |B_{n,k}((alpha)_1,...)| for the power-function coefficient sequence."""
    return log_bell_partial(
        n, k, [log_abs_falling_factorial(alpha, j)[1] for j in range(1, n - k + 2)]
    )


class MixingDistribution:
    """Base interface for frailty laws; instances are immutable."""

    kind = "abstract"
    has_density = True
    support = (0.0, inf)

    def laplace(self, s):
        raise NotImplementedError

    def laplace_derivative(self, n: int, s):
        raise NotImplementedError

    def generator(self, t):
        """Archimedean generator phi = L^{-1} on (0, 1]."""
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr > 1.0):
            raise ValueError("generator argument must lie in (0, 1]")
        if np.any(t_arr <= 0.0):
            raise ValueError("generator diverges at t = 0")
        return self._generator(t_arr, np.isscalar(t) or t_arr.ndim == 0)

    def _generator(self, t, scalar_in):
        raise NotImplementedError

    def neg_moment(self, r: int) -> float:
        raise NotImplementedError

    def sample(self, size, rng) -> np.ndarray:
        raise NotImplementedError

    def pdf(self, theta):
        raise UnsupportedModelError(f"{self.kind} mixing has no usable density")


@dataclass(frozen=True)
class GammaMixing(MixingDistribution):
    """Gamma frailty Ga(alpha, beta) with rate beta; L(s) = (1+s/beta)^-alpha.

    Yields Pareto claims with Clayton survival copula.
    """

    alpha: float
    beta: float

    kind = "gamma"

    def __post_init__(self):
        _require_positive(alpha=self.alpha, beta=self.beta)

    def laplace(self, s):
        s_arr = np.asarray(s, dtype=float)
        return _ret(np.exp(-self.alpha * np.log1p(s_arr / self.beta)), np.isscalar(s))

    def laplace_derivative(self, n, s):
        _check_order(n)
        s_arr = np.asarray(s, dtype=float)
        a, b = self.alpha, self.beta
        logv = (lgamma(a + n) - lgamma(a) - n * log(b)
                - (a + n) * np.log1p(s_arr / b))
        return _ret((-1.0) ** n * np.exp(logv), np.isscalar(s))

    def _generator(self, t, scalar_in):
        return _ret(self.beta * np.expm1(-np.log(t) / self.alpha), scalar_in)

    def neg_moment(self, r):
        if r >= self.alpha:
            raise NonexistentMomentError(
                f"E(Theta^-{r}) requires alpha > {r}, got alpha={self.alpha}"
            )
        return self.beta ** r * exp(lgamma(self.alpha - r) - lgamma(self.alpha))

    def sample(self, size, rng):
        return rng.gamma(shape=self.alpha, scale=1.0 / self.beta, size=size)

    def pdf(self, theta):
        th = np.asarray(theta, dtype=float)
        a, b = self.alpha, self.beta
        with np.errstate(divide="ignore"):
            logv = a * log(b) + (a - 1) * np.log(th) - b * th - lgamma(a)
        return _ret(np.where(th > 0, np.exp(logv), 0.0), np.isscalar(theta))


@dataclass(frozen=True)
class LevyMixing(MixingDistribution):
    """One-sided 1/2-stable (Levy) frailty; L(s) = exp(-lam sqrt(s)).

    Yields Weibull(1/2) claims with Gumbel copula of parameter 2.
    """

    lam: float

    kind = "levy"

    def __post_init__(self):
        _require_positive(lam=self.lam)

    def laplace(self, s):
        s_arr = np.asarray(s, dtype=float)
        return _ret(np.exp(-self.lam * np.sqrt(s_arr)), np.isscalar(s))

    def laplace_derivative(self, n, s):
        _check_order(n)
        s_arr = np.asarray(s, dtype=float)
        log_s = np.log(s_arr)
        expo = -self.lam * np.sqrt(s_arr)
        terms = [k * log(self.lam) + expo + (0.5 * k - n) * log_s + _log_bell_sqrt(n, k)
                 for k in range(1, n + 1)]
        return _ret(_signed_sum_exp(terms, (-1.0) ** n), np.isscalar(s))

    def _generator(self, t, scalar_in):
        return _ret((-np.log(t) / self.lam) ** 2, scalar_in)

    def neg_moment(self, r):
        raise UnsupportedModelError(
            "negative moments of stable frailties are not implemented; "
            "route aggregate moments through the mixture representation"
        )

    def sample(self, size, rng):
        n = rng.standard_normal(size)
        return self.lam ** 2 / (2.0 * n ** 2)

    def pdf(self, theta):
        th = np.asarray(theta, dtype=float)
        lam = self.lam
        with np.errstate(divide="ignore"):
            logv = log(lam / 2) - 0.5 * (log(math.pi) + 3 * np.log(th)) - lam ** 2 / (4 * th)
        return _ret(np.where(th > 0, np.exp(logv), 0.0), np.isscalar(theta))


@dataclass(frozen=True)
class PositiveStableMixing(MixingDistribution):
    """One-sided alpha-stable frailty; L(s) = exp(-s^alpha), alpha in (0, 1].

    Yields Weibull(alpha) claims with Gumbel copula; alpha = 1 degenerates to
    a unit point mass (independence bound of the copula, Gamma(n, 1) sums).
    """

    alpha: float

    kind = "stable"
    has_density = False

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError(f"stable index must lie in (0, 1], got {self.alpha}")

    def laplace(self, s):
        s_arr = np.asarray(s, dtype=float)
        return _ret(np.exp(-s_arr ** self.alpha), np.isscalar(s))

    def laplace_derivative(self, n, s):
        _check_order(n)
        s_arr = np.asarray(s, dtype=float)
        log_s = np.log(s_arr)
        expo = -s_arr ** self.alpha
        terms = []
        for k in range(1, n + 1):
            lb = _log_bell_power(n, k, self.alpha)
            if lb == -inf:
                continue
            terms.append(expo + (k * self.alpha - n) * log_s + lb)
        return _ret(_signed_sum_exp(terms, (-1.0) ** n), np.isscalar(s))

    def _generator(self, t, scalar_in):
        return _ret((-np.log(t)) ** (1.0 / self.alpha), scalar_in)

    def neg_moment(self, r):
        raise UnsupportedModelError(
            "negative moments of stable frailties are not implemented; "
            "route aggregate moments through the mixture representation"
        )

    def sample(self, size, rng):
        # Chambers-Mallows-Stuck restricted to the one-sided case
        if self.alpha == 1.0:
            return np.ones(size)
        a = self.alpha
        theta = math.pi * (rng.random(size) - 0.5)
        w = rng.exponential(1.0, size)
        shifted = theta + math.pi / 2
        return (np.sin(a * shifted) / np.cos(theta) ** (1.0 / a)
                * (np.cos(theta - a * shifted) / w) ** ((1.0 - a) / a))


@dataclass(frozen=True)
class InverseGaussianMixing(MixingDistribution):
    """Inverse Gaussian frailty IG(lam, mu)."""

    lam: float
    mu: float

    kind = "inverse-gaussian"

    def __post_init__(self):
        _require_positive(lam=self.lam, mu=self.mu)

    @property
    def _b(self):
        return 2.0 * self.mu ** 2 / self.lam

    def laplace(self, s):
        s_arr = np.asarray(s, dtype=float)
        root = np.sqrt(1.0 + self._b * s_arr)
        return _ret(np.exp(-self.lam / self.mu * (root - 1.0)), np.isscalar(s))

    def laplace_derivative(self, n, s):
        _check_order(n)
        s_arr = np.asarray(s, dtype=float)
        b = self._b
        c = 1.0 + b * s_arr
        log_c = np.log(c)
        expo = -self.lam / self.mu * (np.sqrt(c) - 1.0)
        ratio = log(self.lam / self.mu)
        terms = [k * ratio + expo + n * log(b) + (0.5 * k - n) * log_c + _log_bell_sqrt(n, k)
                 for k in range(1, n + 1)]
        return _ret(_signed_sum_exp(terms, (-1.0) ** n), np.isscalar(s))

    def _generator(self, t, scalar_in):
        lam, mu = self.lam, self.mu
        return _ret(lam / (2 * mu ** 2) * ((1.0 - mu / lam * np.log(t)) ** 2 - 1.0), scalar_in)

    def pos_moment(self, r: int) -> float:
        """E(Theta^r) for integer r >= 1 via the finite Bessel-type sum."""
        if r < 1:
            raise ValueError("positive moment order must be >= 1")
        acc = 0.0
        for s_ in range(r):
            acc += (math.factorial(r - 1 + s_)
                    / (math.factorial(s_) * math.factorial(r - 1 - s_))
                    * (2.0 * self.lam / self.mu) ** (-s_))
        return self.mu ** r * acc

    def neg_moment(self, r):
        return self.pos_moment(r + 1) / self.mu ** (2 * r + 1)

    def sample(self, size, rng):
        return rng.wald(self.mu, self.lam, size=size)

    def pdf(self, theta):
        th = np.asarray(theta, dtype=float)
        lam, mu = self.lam, self.mu
        with np.errstate(divide="ignore", invalid="ignore"):
            logv = (0.5 * log(lam / (2 * math.pi)) - 1.5 * np.log(th)
                    - lam * (th - mu) ** 2 / (2 * mu ** 2 * th))
        return _ret(np.where(th > 0, np.exp(logv), 0.0), np.isscalar(theta))


@dataclass(frozen=True)
class LindleyMixing(MixingDistribution):
    """Lindley frailty: mixture of Exp(lam) and Gamma(2, lam).

    L(s) = lam^2 (lam + 1 + s) / ((1 + lam)(lam + s)^2), derived from the pdf
    (the transform is not printed in the source material) and validated
    against quadrature in the tests.
    """

    lam: float

    kind = "lindley"

    def __post_init__(self):
        _require_positive(lam=self.lam)

    def laplace(self, s):
        s_arr = np.asarray(s, dtype=float)
        lam = self.lam
        return _ret(lam ** 2 * (lam + 1.0 + s_arr) / ((1.0 + lam) * (lam + s_arr) ** 2),
                    np.isscalar(s))

    def laplace_derivative(self, n, s):
        _check_order(n)
        s_arr = np.asarray(s, dtype=float)
        lam = self.lam
        y = lam + s_arr
        val = (math.factorial(n) * y ** (-(n + 1.0))
               + math.factorial(n + 1) * y ** (-(n + 2.0)))
        return _ret((-1.0) ** n * lam ** 2 / (1.0 + lam) * val, np.isscalar(s))

    def _generator(self, t, scalar_in):
        lam = self.lam
        # solve t (1+lam) y^2 - lam^2 y - lam^2 = 0 for y = lam + s
        disc = np.sqrt(lam ** 4 + 4.0 * t * (1.0 + lam) * lam ** 2)
        y = (lam ** 2 + disc) / (2.0 * t * (1.0 + lam))
        return _ret(y - lam, scalar_in)

    def neg_moment(self, r):
        raise NonexistentMomentError(
            "E(Theta^-r) diverges for the Lindley law (density positive at 0)"
        )

    def sample(self, size, rng):
        lam = self.lam
        pick = rng.random(size) < lam / (1.0 + lam)
        expo = rng.exponential(1.0 / lam, size=size)
        gam = rng.gamma(2.0, 1.0 / lam, size=size)
        return np.where(pick, expo, gam)

    def pdf(self, theta):
        th = np.asarray(theta, dtype=float)
        lam = self.lam
        val = lam ** 2 / (1.0 + lam) * (1.0 + th) * np.exp(-lam * th)
        return _ret(np.where(th > 0, val, 0.0), np.isscalar(theta))


@dataclass(frozen=True)
class GleserGammaMixing(MixingDistribution):
    """Mixing law that turns exponentials into Gamma(alpha, lam) claims.

    Density (theta - lam)^{-alpha} lam^alpha / (theta Gamma(1-alpha) Gamma(alpha))
    on (lam, inf); L(s) = Gamma(alpha, lam*s)/Gamma(alpha).  alpha = 1 is the
    degenerate point mass at lam (plain exponential claims), accepted so the
    exponential sanity checks can run through the same interface.
    """

    alpha: float
    lam: float

    kind = "gleser-gamma"

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError(f"shape must lie in (0, 1], got {self.alpha}")
        _require_positive(lam=self.lam)

    def laplace(self, s):
        s_arr = np.asarray(s, dtype=float)
        return _ret(special.gammaincc(self.alpha, self.lam * s_arr), np.isscalar(s))

    def laplace_derivative(self, n, s):
        _check_order(n)
        s_arr = np.asarray(s, dtype=float)
        a, lam = self.alpha, self.lam
        log_s = np.log(s_arr)
        terms = []
        for k in range(n):
            sign_p, logp = log_abs_falling_factorial(a - 1.0, k)
            if sign_p == 0:
                continue
            terms.append(log(math.comb(n - 1, k)) + (n - 1 - k) * log(lam) + logp
                         + (a - 1.0 - k) * log_s - lam * s_arr
                         + a * log(lam) - lgamma(a))
        return _ret(_signed_sum_exp(terms, (-1.0) ** n), np.isscalar(s))

    def _generator(self, t, scalar_in):
        return _ret(special.gammainccinv(self.alpha, t) / self.lam, scalar_in)

    def neg_moment(self, r):
        # E(Theta^-r) = Gamma(alpha + r) / (lam^r r! Gamma(alpha)), by the
        # change of variables theta = lam/u against the Beta(alpha, 1-alpha) law
        a, lam = self.alpha, self.lam
        return exp(lgamma(a + r) - lgamma(a) - lgamma(r + 1) - r * log(lam))

    def sample(self, size, rng):
        if self.alpha == 1.0:
            return np.full(size, self.lam)
        u = rng.beta(self.alpha, 1.0 - self.alpha, size=size)
        return self.lam / u

    def pdf(self, theta):
        if self.alpha == 1.0:
            raise UnsupportedModelError("alpha = 1 is a point mass at lam; no density")
        th = np.asarray(theta, dtype=float)
        a, lam = self.alpha, self.lam
        with np.errstate(divide="ignore", invalid="ignore"):
            logv = (a * log(lam) - a * np.log(th - lam) - np.log(th)
                    - lgamma(1.0 - a) - lgamma(a))
        return _ret(np.where(th > lam, np.exp(logv), 0.0), np.isscalar(theta))

    @property
    def support(self):
        return (self.lam, inf)


@dataclass(frozen=True)
class BetaSecondKindMixing(MixingDistribution):
    """Second-kind beta frailty B2(beta, gam) = Gamma(beta,1)/Gamma(gam,1)."""

    beta: float
    gam: float

    kind = "beta2"

    def __post_init__(self):
        _require_positive(beta=self.beta, gam=self.gam)

    def laplace(self, s):
        scalar_in = np.isscalar(s)
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        lb = special.betaln(self.beta, self.gam)
        out = np.array([1.0 if si == 0.0
                        else kummer_u_integral(self.beta, 1.0 - self.gam, si) * exp(-lb)
                        for si in s_arr])
        return _ret(out[0] if scalar_in else out, scalar_in)

    def laplace_derivative(self, n, s):
        _check_order(n)
        scalar_in = np.isscalar(s)
        s_arr = np.atleast_1d(np.asarray(s, dtype=float))
        lb = special.betaln(self.beta, self.gam)
        out = np.array([kummer_u_integral(self.beta + n, n + 1.0 - self.gam, si) * exp(-lb)
                        for si in s_arr])
        return _ret((-1.0) ** n * (out[0] if scalar_in else out), scalar_in)

    def _generator(self, t, scalar_in):
        t_arr = np.atleast_1d(t)

        def invert(ti):
            if ti == 1.0:
                return 0.0
            hi = 1.0
            while self.laplace(hi) > ti:
                hi *= 2.0
                if hi > 1e12:
                    raise ArithmeticError("generator bracket expansion failed")
            return optimize.brentq(lambda s: self.laplace(s) - ti, 0.0, hi,
                                   xtol=1e-14, rtol=8.9e-16)

        out = np.array([invert(ti) for ti in t_arr])
        return _ret(out[0] if scalar_in else out, scalar_in)

    def neg_moment(self, r):
        if r >= self.beta:
            raise NonexistentMomentError(
                f"E(Theta^-{r}) requires beta > {r}, got beta={self.beta}"
            )
        return exp(lgamma(self.beta - r) - lgamma(self.beta)
                   + lgamma(self.gam + r) - lgamma(self.gam))

    def sample(self, size, rng):
        return rng.gamma(self.beta, 1.0, size=size) / rng.gamma(self.gam, 1.0, size=size)

    def pdf(self, theta):
        th = np.asarray(theta, dtype=float)
        b, g = self.beta, self.gam
        with np.errstate(divide="ignore"):
            logv = (b - 1.0) * np.log(th) - (b + g) * np.log1p(th) - special.betaln(b, g)
        return _ret(np.where(th > 0, np.exp(logv), 0.0), np.isscalar(theta))


def faa_di_bruno(f_deriv, g_deriv, n: int, s: float) -> float:
    """n-th derivative of f(g(s)) via partial Bell polynomials.

    f_deriv(k, u) must return f^(k)(u) (k = 0 allowed), g_deriv(j, s) must
    return g^(j)(s) with g_deriv(0, s) = g(s).  Reference path used by the
    tests to validate the per-law closed-form derivatives.
    """
    if n < 1:
        raise ValueError("order must be >= 1")
    u = g_deriv(0, s)
    total = 0.0
    for k in range(1, n + 1):
        args = [g_deriv(j, s) for j in range(1, n - k + 2)]
        total += f_deriv(k, u) * bell_partial(n, k, args)
    return total
