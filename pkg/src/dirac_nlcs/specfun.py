"""Special functions and quadrature shared by the rest of the package.

Only the normalized oscillator functions are evaluated here; raw Hermite
polynomials overflow in double precision long before the levels we need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError

PI_QUARTER = math.pi ** -0.25

# rescaling thresholds for the scaled Hermite recurrence
_BIG = 1e150
_SMALL = 1e-150

BESSEL_SWITCH = 15.0


class QuadratureError(NumericalError):
    """Panel refinement did not converge.

    The last two estimates are kept on the exception so callers can decide
    whether the result is usable anyway.
    """

    def __init__(self, message, previous, last):
        super().__init__(message)
        self.previous = previous
        self.last = last


def _check_level(n):
    if int(n) != n or n < 0:
        raise ValueError(f"level index must be a non-negative integer, got {n!r}")
    return int(n)


def hermite_functions(nmax, xi):
    """All normalized oscillator functions phi_0..phi_nmax at `xi`.

    Returns an array of shape ``(nmax + 1,) + np.shape(xi)``.

    The recurrence runs on scaled values with a per-point log scale so that
    neither the Gaussian seed underflows nor the growth in the forbidden
    region overflows (checked up to n = 5000, |xi| = 100).
    """
    nmax = _check_level(nmax)
    xi = np.asarray(xi, dtype=float)
    if not np.all(np.isfinite(xi)):
        raise ValueError("xi must be finite")

    out = np.empty((nmax + 1,) + xi.shape)
    logscale = -0.5 * xi * xi + math.log(PI_QUARTER)
    prev = np.zeros_like(xi)
    cur = np.ones_like(xi)
    out[0] = np.exp(logscale)
    for n in range(nmax):
        nxt = xi * math.sqrt(2.0 / (n + 1)) * cur - math.sqrt(n / (n + 1)) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _BIG
        if np.any(big):
            prev = np.where(big, prev * _SMALL, prev)
            cur = np.where(big, cur * _SMALL, cur)
            logscale = np.where(big, logscale + math.log(_BIG), logscale)
        with np.errstate(under="ignore"):
            out[n + 1] = cur * np.exp(logscale)
    return out


def hermite_function(n, xi):
    """Normalized oscillator function (2^n n! sqrt(pi))^(-1/2) e^(-xi^2/2) H_n(xi).

    `xi` may be a scalar or an array; a float comes back for scalar input.
    """
    n = _check_level(n)
    values = hermite_functions(n, xi)[n]
    if np.ndim(values) == 0:
        return float(values)
    return values


def hermite_derivative(n, xi):
    """d/dxi phi_n = sqrt(n/2) phi_{n-1} - sqrt((n+1)/2) phi_{n+1}."""
    n = _check_level(n)
    phis = hermite_functions(n + 1, xi)
    lower = phis[n - 1] if n > 0 else 0.0
    return math.sqrt(n / 2) * lower - math.sqrt((n + 1) / 2) * phis[n + 1]


# -- modified Bessel functions of the first kind -------------------------


def _bessel_series(nu, x):
    half = 0.5 * x
    term = half ** nu / math.factorial(nu)
    total = term
    q = half * half
    m = 0
    while True:
        m += 1
        term *= q / (m * (m + nu))
        total += term
        if term <= 1e-17 * total:
            return total


def _bessel_asymptotic_scaled(nu, x):
    # e^{-x} I_nu(x) ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k(nu) / x^k
    mu = 4.0 * nu * nu
    total = 1.0
    term = 1.0
    prev = math.inf
    k = 0
    while True:
        k += 1
        term *= -(mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(term) >= prev or abs(term) < 1e-17 * abs(total):
            break
        total += term
        prev = abs(term)
    return total / math.sqrt(2.0 * math.pi * x)


def _check_bessel_args(nu, x):
    if nu not in (1, 2):
        raise ValueError(f"only orders 1 and 2 are supported, got nu={nu!r}")
    x = float(x)
    if not x >= 0 or not math.isfinite(x):
        raise ValueError(f"argument must be finite and non-negative, got {x!r}")
    return x


def bessel_i(nu, x):
    """Modified Bessel function I_nu(x) for nu in {1, 2}, x >= 0.

    Power series below x = 15, asymptotic expansion above. Past x ~ 710 the
    value exceeds double range and inf is returned; use log_bessel_i there.
    """
    x = _check_bessel_args(nu, x)
    if x < BESSEL_SWITCH:
        return _bessel_series(nu, x)
    log_scaled = math.log(_bessel_asymptotic_scaled(nu, x))
    if x + log_scaled > 709.0:
        return math.inf
    return math.exp(x + log_scaled)


def log_bessel_i(nu, x):
    """log I_nu(x); stays finite where I_nu itself would overflow."""
    x = _check_bessel_args(nu, x)
    if x == 0.0:
        return -math.inf
    if x < BESSEL_SWITCH:
        return math.log(_bessel_series(nu, x))
    return x + math.log(_bessel_asymptotic_scaled(nu, x))


# -- quadrature -------------------------------------------------------------


@lru_cache(maxsize=16)
def _gauss_legendre(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@dataclass(frozen=True)
class QuadratureRule:
    """Composite Gauss-Legendre rule: `panels` equal panels of `order` points."""

    a: float
    b: float
    panels: int = 16
    order: int = 20

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or self.b <= self.a:
            raise ValueError(f"invalid interval [{self.a}, {self.b}]")
        if self.panels < 1 or self.order < 1:
            raise ValueError("panels and order must be positive")

    @property
    def domain(self):
        return (self.a, self.b)

    @property
    def nodes(self):
        x, _ = _gauss_legendre(self.order)
        edges = np.linspace(self.a, self.b, self.panels + 1)
        half = 0.5 * np.diff(edges)
        mid = 0.5 * (edges[:-1] + edges[1:])
        return (mid[:, None] + half[:, None] * x[None, :]).ravel()

    @property
    def weights(self):
        _, w = _gauss_legendre(self.order)
        half = 0.5 * (self.b - self.a) / self.panels
        return np.tile(w * half, self.panels)

    def refined(self):
        return QuadratureRule(self.a, self.b, 2 * self.panels, self.order)

    def apply(self, f):
        """One fixed estimate, no refinement. `f` must accept an array of nodes."""
        values = np.asarray(f(self.nodes), dtype=float)
        if not np.all(np.isfinite(values)):
            raise NumericalError("integrand is not finite on all quadrature nodes")
        return float(np.dot(self.weights, values))


def integrate(f, rule, tol=1e-10, max_panels=8192):
    """Integrate a vectorized `f` by doubling panels until two estimates agree to `tol`."""
    previous = rule.apply(f)
    while rule.panels * 2 <= max_panels:
        rule = rule.refined()
        current = rule.apply(f)
        if abs(current - previous) < tol:
            return current
        previous = current
    raise QuadratureError(
        f"quadrature did not converge to {tol:g} with {rule.panels} panels "
        f"(last estimates {previous!r}, {current!r})",
        previous,
        current,
    )


def xi_window(nmax=0):
    """Default integration window in xi: [-25, 25], widened past level 250."""
    if nmax > 250:
        half = math.sqrt(2 * nmax + 1) + 8.0
        return (-half, half)
    return (-25.0, 25.0)
