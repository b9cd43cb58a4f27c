"""Limit-law numerics for extreme parts, ranks and graphical fractions.

The order-k Gumbel density is ``f_k(x) = exp(-e^{-x} - k x) / (k-1)!``, the
law of ``-log G`` for ``G ~ Gamma(k, 1)``.  ``E_k[f]`` denotes the mean of
``f`` under it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from respart.errors import DegenerateMomentError, DomainError, IntegrationError
from respart.restriction import RestrictionMu

__all__ = [
    "EsseenInputs",
    "EtaTransform",
    "GumbelLaw",
    "critical_lower_bound",
    "esseen_bound",
    "esseen_inputs",
    "fraction_ratio",
    "gumbel_expect",
    "gumbel_moment_closed_form",
    "gumbel_order_cdf",
    "gumbel_order_cdf_quad",
    "log_cdf_num_parts",
    "rank_density",
    "rank_moments",
]

QUAD_RTOL = 1e-12


# ------------------------------------------------------------------ eta


@dataclass(frozen=True)
class EtaTransform:
    """``eta(y) = alpha*y + log(alpha * mu'(mu^{-1}(y)))``."""

    alpha: float
    restriction: RestrictionMu

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError("alpha must be positive")

    def eta(self, y: float) -> float:
        r = self.restriction
        slope = float(r.mu_prime(r.mu_inv(y)))
        if not slope > 0:
            raise DomainError(f"mu' vanishes at mu^-1({y})")
        return self.alpha * y + math.log(self.alpha * slope)

    def _eta_vec(self, y: np.ndarray) -> np.ndarray:
        r = self.restriction
        with np.errstate(divide="ignore"):
            return self.alpha * y + np.log(self.alpha * r.mu_prime(r.mu_inv(y)))

    def eta_inv(self, x: float, tol: float = 1e-12, domain: tuple[float, float] | None = None) -> float:
        """Invert ``eta`` by bisection to absolute tolerance ``tol``.

        Without ``domain`` the bracket grows outward from ``(x - log alpha)/alpha``.
        ``eta`` must be increasing on the bracket; nonlinear restrictions are
        not monotone everywhere (the interpolated piece below ``mu(1)`` and the
        odd branch), so pass ``domain`` to pick a branch.
        """
        if domain is not None:
            lo, hi = map(float, domain)
            if not lo < hi:
                raise DomainError("domain must be an increasing pair")
            if not self.eta(lo) <= x <= self.eta(hi):
                raise DomainError(f"eta^-1({x}) is not inside the requested domain")
        else:
            lo, hi = self._bracket(x)
        grid = np.linspace(lo, hi, 2049)
        if np.any(np.diff(self._eta_vec(grid)) < 0):
            raise DomainError(f"eta is not monotone on [{lo:.6g}, {hi:.6g}]")
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if self.eta(mid) < x:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def _bracket(self, x: float) -> tuple[float, float]:
        guess = (x - math.log(self.alpha)) / self.alpha
        step = max(1.0, abs(guess))
        lo, hi = guess - step, guess + step
        for _ in range(200):
            if self.eta(lo) <= x:
                break
            lo -= step
            step *= 2.0
        else:
            raise DomainError(f"cannot bracket eta^-1({x}) from below")
        step = max(1.0, abs(guess))
        for _ in range(200):
            if self.eta(hi) >= x:
                break
            hi += step
            step *= 2.0
        else:
            raise DomainError(f"cannot bracket eta^-1({x}) from above")
        return lo, hi


# --------------------------------------------------------------- Gumbel


def _log_density(k: int, x: float) -> float:
    if x < -700.0:
        return -math.inf
    return -math.exp(-x) - k * x - math.lgamma(k)


def gumbel_density(k: int, x: float) -> float:
    return math.exp(_log_density(k, x))


def gumbel_order_cdf(k: int, y: float) -> float:
    """P(eta(Y_k) <= y) in the limit: the regularized upper gamma Q(k, e^{-y})."""
    if k < 1:
        raise DomainError("k must be >= 1")
    if y > 700:
        return 1.0
    if y < -700:
        return 0.0
    return float(special.gammaincc(k, math.exp(-y)))


def gumbel_order_cdf_quad(k: int, y: float) -> float:
    """The same CDF by direct quadrature of the order-k density."""
    if k < 1:
        raise DomainError("k must be >= 1")
    edges = [e for e in _edges(k) if e < y] + [y]
    if len(edges) < 2:
        return 0.0
    return _integrate_pieces(lambda x: gumbel_density(k, x), edges)


def _edges(k: int) -> list[float]:
    mode = -math.log(k)
    sd = 1.0 / math.sqrt(k)
    left = [mode - c * sd for c in (40, 10, 3, 1)]
    right = [mode + c * sd for c in (1, 3, 10, 40)]
    return left + [mode] + right + [mode + 40 * sd + 60.0 / k]


def _integrate_pieces(fn: Callable[[float], float], edges: Sequence[float]) -> float:
    total = 0.0
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        out = integrate.quad(fn, a, b, epsabs=0.0, epsrel=QUAD_RTOL, limit=200, full_output=1)
        total += out[0]
        err += out[1]
    if not math.isfinite(total):
        raise IntegrationError("quadrature produced a non-finite value")
    if err > 1e-6 * max(abs(total), 1e-300) and err > 1e-14:
        raise IntegrationError(f"quadrature error estimate {err:.3g} too large for value {total:.3g}")
    return total


def gumbel_expect(k: int, f: Callable[[float], float]) -> float:
    """E_k[f] by adaptive Gauss-Kronrod quadrature split around the mode ``-log k``."""
    if k < 1:
        raise DomainError("k must be >= 1")
    return _integrate_pieces(lambda x: f(x) * gumbel_density(k, x), _edges(k))


def gumbel_moment_closed_form(k: int, power: int) -> float:
    """Raw moments of the order-k law from polygamma values."""
    psi = float(special.digamma(k))
    psi1 = float(special.polygamma(1, k))
    psi2 = float(special.polygamma(2, k))
    if power == 0:
        return 1.0
    if power == 1:
        return -psi
    if power == 2:
        return psi**2 + psi1
    if power == 3:
        return -(psi**3 + 3 * psi * psi1 + psi2)
    raise DomainError("closed forms are provided for powers 0..3")


@dataclass(frozen=True)
class GumbelLaw:
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise DomainError("k must be >= 1")

    @property
    def mode(self) -> float:
        return -math.log(self.k)

    def pdf(self, x: float) -> float:
        return gumbel_density(self.k, x)

    def cdf(self, y: float) -> float:
        return gumbel_order_cdf(self.k, y)

    def expect(self, f: Callable[[float], float]) -> float:
        return gumbel_expect(self.k, f)

    def moment(self, power: int) -> float:
        return gumbel_moment_closed_form(self.k, power)


# ------------------------------------------------------- ranks / fraction


def _gap(r: RestrictionMu, linear_convention: bool) -> Callable[[float], float]:
    """g(x) = x - mu^{-1}(x); for exactly linear mu optionally the cancelled g(x) = x."""
    if linear_convention and r.is_linear:
        return lambda x: x
    return lambda x: x - float(r.mu_inv(x))


def fraction_ratio(n: int, r: RestrictionMu) -> float:
    """|E_n[g^3]| / E_n[g^2]^{3/2}; the graphical fraction bound is this times n^{-1/2}."""
    if n < 2:
        raise DomainError("n must be >= 2")
    g = _gap(r, linear_convention=True)
    second = gumbel_expect(n, lambda x: g(x) ** 2)
    if second < 1e-30:
        raise DegenerateMomentError(f"E_n[g^2] = {second:.3g} for {r.name}")
    third = gumbel_expect(n, lambda x: g(x) ** 3)
    return abs(third) / second**1.5


def rank_moments(
    k: int, r: RestrictionMu, alpha: float, linear_convention: bool = False
) -> tuple[float, float, float]:
    """First three raw moments of R_k with eta^{-1}(x) ~ x/alpha.

    Returns ``(E_k[g]/alpha, E_k[g^2]/alpha^2, E_k[g^3]/alpha^3)``.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    g = _gap(r, linear_convention)
    return (
        gumbel_expect(k, g) / alpha,
        gumbel_expect(k, lambda x: g(x) ** 2) / alpha**2,
        gumbel_expect(k, lambda x: g(x) ** 3) / alpha**3,
    )


def _log_density_vec(k: int, x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        return -np.exp(-np.maximum(x, -700.0)) - k * x - math.lgamma(k)


def rank_density(k: int, r: RestrictionMu, alpha: float, grid: Sequence[float]) -> np.ndarray:
    """Limiting density of R_k on ``grid``.

    ``alpha * R_k = U - mu^{-1}(V)`` with ``U``, ``V`` independent order-k
    Gumbel variables, so the density at ``t`` is
    ``alpha * int f_k(v) f_k(alpha t + mu^{-1}(v)) dv``.  The inner integral is
    evaluated for all grid points at once by vector-valued adaptive quadrature.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if not alpha > 0:
        raise DomainError("alpha must be positive")
    t = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(t)):
        raise DomainError("grid must be finite")

    def integrand(v: float) -> np.ndarray:
        u = alpha * t + float(r.mu_inv(v))
        return np.exp(_log_density(k, v) + _log_density_vec(k, u))

    total = np.zeros_like(t)
    edges = _edges(k)
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad_vec(integrand, a, b, epsabs=1e-14, epsrel=1e-10, limit=500)
        total += val
    bad = ~np.isfinite(total)
    if bad.any():
        raise IntegrationError(f"rank density failed at grid points {t[bad][:5].tolist()}")
    return np.maximum(alpha * total, 0.0)


@dataclass(frozen=True)
class EsseenInputs:
    sigmas_sq: tuple[float, ...]
    rhos: tuple[float, ...]
    s_sq: float = field(init=False)
    r: float = field(init=False)

    def __post_init__(self):
        if len(self.sigmas_sq) != len(self.rhos):
            raise DomainError("sigmas_sq and rhos must have equal length")
        if any(s < 0 for s in self.sigmas_sq) or any(not (0 <= p < math.inf) for p in self.rhos):
            raise DomainError("variances and third moments must be nonnegative and finite")
        object.__setattr__(self, "s_sq", math.fsum(self.sigmas_sq))
        object.__setattr__(self, "r", math.fsum(self.rhos))


def esseen_bound(e: EsseenInputs) -> float:
    """6 r_n / s_n^3."""
    if e.s_sq <= 0:
        raise DegenerateMomentError("s_n^2 must be positive")
    return 6.0 * e.r / e.s_sq**1.5


def esseen_inputs(n: int, r: RestrictionMu, alpha: float) -> EsseenInputs:
    """Rank-sum inputs with every term replaced by the k = n term, as in the
    leading-order estimate ``s_n^2 ~ n sigma_n^2``, ``r_n ~ n rho_n``."""
    _, second, third = rank_moments(n, r, alpha, linear_convention=True)
    return EsseenInputs((second,) * n, (abs(third),) * n)


def log_cdf_num_parts(n: int, x: float, r: RestrictionMu, alpha: float) -> float:
    """``-e^{-alpha mu(x)} / (alpha mu'(x))``: log P(X_1 <= x) up to normalization."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if x < 1:
        raise DomainError("x must be >= 1")
    slope = float(r.mu_prime(x))
    if slope == 0:
        raise DomainError("mu'(x) = 0")
    return -math.exp(-alpha * float(r.mu(x))) / (alpha * slope)


def critical_lower_bound(n: float, r: RestrictionMu) -> float:
    """``mu(log n) - log n`` (natural logarithm)."""
    if n < 3:
        raise DomainError("n must be >= 3 so that log n > 1")
    ln = math.log(n)
    return float(r.mu(ln)) - ln
