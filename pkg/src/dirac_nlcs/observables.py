"""Expectation values, variances and mean energies of coherent states.

Two independent routes are provided:

* ``series`` sums the family's closed-form series in log space (built-in
  families only);
* ``matrix`` contracts the truncated coefficient vector with the Fock-space
  matrices of s_q = (theta^- + (-1)^q theta^+) / (sqrt(2) i^q), applied to
  each spinor component (s_q ⊗ 1).

s_0 is the dimensionless position xi, s_1 the momentum p.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from .errors import NumericalError
from .fockalg import quadrature_operator
from .landau import AnisotropyParams, SpinorProfile, _check_grid, eigenfunctions
from .specfun import log_bessel_i

__all__ = [
    "ObservableReport",
    "ClosedFormMismatch",
    "density",
    "s_moments",
    "uncertainty",
    "mean_energy",
    "compare_routes",
    "position_variance",
]

ROUTE_TOL = 1e-8


class ClosedFormMismatch(UserWarning):
    """A closed-form series disagrees with the matrix route beyond ROUTE_TOL."""


@dataclass(frozen=True)
class ObservableReport:
    mean_xi: float
    mean_p: float
    second_xi: float
    second_p: float
    var_xi: float
    var_p: float
    hur: float
    mean_energy_pristine: float
    mean_energy_aniso: float
    method: str

    @property
    def sigma_xi(self):
        return math.sqrt(self.var_xi)

    @property
    def sigma_p(self):
        return math.sqrt(self.var_p)


def position_variance(report, params):
    """Variance of the physical coordinate x: var_xi * 2 / omega_zeta."""
    return report.var_xi * 2.0 / params.omega_zeta


# -- series machinery --------------------------------------------------------

_CHUNK = 256
_MAX_TERMS = 400_000


def _pow_log(n, log_s):
    """n * log(s) with the convention 0 * log(0) = 0."""
    if math.isinf(log_s):
        return np.where(n == 0, 0.0, -np.inf)
    return n * log_s


def _log_series(logterm, log_s, start=0):
    """log of sum_{n >= start} exp(logterm(n)) for a series of positive terms.

    Summation stops once the terms are past their peak with ratio r < 1 and the
    geometric remainder last * r / (1 - r) is below machine epsilon of the sum.
    """
    if math.isinf(log_s):
        if start > 0:
            return -math.inf
        return float(logterm(np.array([0.0]))[0])
    pieces = []
    n0 = start
    while n0 - start < _MAX_TERMS:
        n = np.arange(n0, n0 + _CHUNK, dtype=float)
        lt = logterm(n)
        pieces.append(lt)
        total = logsumexp(np.concatenate(pieces))
        step = lt[-1] - lt[-2]
        if step < 0:
            ratio = math.exp(step)
            if lt[-1] + math.log(ratio / (1.0 - ratio)) < total + math.log(1e-17):
                return float(total)
        n0 += _CHUNK
    raise NumericalError("closed-form series did not converge within the term cap")


def _lg(x):
    return gammaln(x)


def _identity_series(s, log_s):
    log_n2 = -s - math.log(2.0 - math.exp(-s)) if s > 0 else 0.0
    # A = e^s + sum_{n>=1} s^n / sqrt((n-1)! (n+1)!)
    log_a = np.logaddexp(
        s,
        _log_series(lambda n: _pow_log(n, log_s) - 0.5 * (_lg(n) + _lg(n + 2)), log_s, 1),
    )
    # B = e^s + sum_{n>=1} sqrt(n+1) s^n / sqrt((n-1)! (n+2)!)
    log_b = np.logaddexp(
        s,
        _log_series(
            lambda n: 0.5 * np.log(n + 1) + _pow_log(n, log_s) - 0.5 * (_lg(n) + _lg(n + 3)),
            log_s,
            1,
        ),
    )
    theta = math.exp(log_n2 + log_a)
    theta2 = math.exp(log_n2 + log_b)
    # 2<N> + 1 = N^2 (1 + 4 s e^s)
    level = math.exp(log_n2) + (4.0 * s * math.exp(log_n2 + s) if s > 0 else 0.0)
    log_e = _log_series(lambda n: 0.5 * np.log(n) + _pow_log(n, log_s) - _lg(n + 1), log_s, 1)
    energy = 2.0 * math.exp(log_n2 + log_e)
    return theta, theta2, level, energy


def _shifted_one_series(s, log_s):
    sum1 = _log_series(
        lambda n: 0.5 * np.log(n + 2) + _pow_log(n, log_s) - 0.5 * (_lg(n + 1) + _lg(n + 2)), log_s
    )
    sum2 = _log_series(
        lambda n: 0.5 * np.log(n + 3) + _pow_log(n, log_s) - 0.5 * (_lg(n + 1) + _lg(n + 2)), log_s
    )
    theta = 0.5 * (1.0 + math.exp(sum1 - s))
    theta2 = 0.5 * (1.0 + math.exp(sum2 - s))
    level = 2.0 + 2.0 * s
    energy = math.exp(
        _log_series(lambda n: 0.5 * np.log(n + 1) + _pow_log(n, log_s) - _lg(n + 1), log_s) - s
    )
    return theta, theta2, level, energy


def _shifted_two_series(s, log_s):
    r = math.sqrt(s)
    if r == 0.0:
        log_m2, ratio21 = 0.0, 0.0
    else:
        log_i1 = log_bessel_i(1, 2.0 * r)
        log_m2 = math.log(r) - log_i1
        ratio21 = math.exp(math.log(r) + log_bessel_i(2, 2.0 * r) - log_i1)
    t1 = _log_series(lambda n: _pow_log(n, log_s) - 0.5 * (_lg(n + 1) + 3 * _lg(n + 2)), log_s)
    t2 = _log_series(
        lambda n: 0.5 * np.log(n + 3) + _pow_log(n, log_s) - 0.5 * (_lg(n + 1) + _lg(n + 3)) - _lg(n + 2),
        log_s,
    )
    u1 = _log_series(
        lambda n: _pow_log(n, log_s) - 0.5 * (_lg(n + 1) + _lg(n + 3)) - _lg(n + 2), log_s
    )
    u2 = _log_series(
        lambda n: 0.5 * np.log(n + 4) + _pow_log(n, log_s) - 0.5 * (_lg(n + 1) + _lg(n + 2)) - _lg(n + 3),
        log_s,
    )
    theta = 0.5 * (math.exp(log_m2 + t1) + math.exp(log_m2 + t2))
    theta2 = 0.5 * (math.exp(log_m2 + u1) + math.exp(log_m2 + u2))
    level = 4.0 + 2.0 * ratio21
    energy = math.exp(
        log_m2
        + _log_series(lambda n: 0.5 * np.log(n + 2) + _pow_log(n, log_s) - _lg(n + 1) - _lg(n + 2), log_s)
    )
    return theta, theta2, level, energy


_SERIES = {
    "identity": _identity_series,
    "shifted1": _shifted_one_series,
    "shifted2": _shifted_two_series,
}


def _closed_forms(state):
    """(K1, K2, level, energy) with <theta^-> = alpha~ K1, <(theta^-)^2> = alpha~^2 K2,
    <2N + 1> = level and mean pristine energy = energy * sqrt(omega_B)."""
    s = abs(state.alpha_tilde) ** 2
    log_s = math.log(s) if s > 0 else -math.inf
    return _SERIES[state.family.kind](s, log_s)


def _series_moments(state, q):
    k1, k2, level, _ = _closed_forms(state)
    a = state.alpha_tilde
    mean = math.sqrt(2.0) * (a.real if q == 0 else a.imag) * k1
    second = 0.5 * (level + (-1) ** q * 2.0 * (a * a).real * k2)
    return mean, second


def _matrix_moments(state, q):
    dim = state.dim + 10
    s_q = quadrature_operator(dim, q).entries
    v = state.embed(dim)
    upper, lower = v[:dim], v[dim:]
    su, sl = s_q @ upper, s_q @ lower
    mean = np.vdot(upper, su) + np.vdot(lower, sl)
    second = np.vdot(su, su) + np.vdot(sl, sl)
    scale = max(1.0, abs(mean))
    if abs(mean.imag) > 1e-12 * scale:
        raise NumericalError(f"<s_{q}> has imaginary part {mean.imag:g}")
    return float(mean.real), float(second.real)


def s_moments(state, q, method="series"):
    """(<S_q>, <S_q^2>) of a coherent state; q = 0 for xi, 1 for p."""
    if q not in (0, 1):
        raise ValueError("q must be 0 or 1")
    if method not in ("series", "matrix"):
        raise ValueError(f"unknown method {method!r}")
    if method == "series" and state.family.builtin:
        return _series_moments(state, q)
    return _matrix_moments(state, q)


def _coefficient_energy(state, params):
    levels = np.arange(state.dim)
    probs = np.abs(state.coeffs) ** 2
    return float(np.dot(probs, np.sqrt(params.omega_B * levels)))


def mean_energy(state, params, method="series"):
    """(pristine, anisotropic) mean energy; anisotropic = sqrt(v_xx v_yy) * pristine."""
    if method == "series" and state.family.builtin:
        pristine = _closed_forms(state)[3] * math.sqrt(params.omega_B)
    else:
        pristine = _coefficient_energy(state, params)
    return pristine, math.sqrt(params.v_xx * params.v_yy) * pristine


def compare_routes(state, params=None):
    """Largest |series - matrix| differences for <S_q>, <S_q^2> and <H>."""
    params = params or AnisotropyParams()
    out = {}
    for q in (0, 1):
        ms, ss = _series_moments(state, q)
        mm, sm = _matrix_moments(state, q)
        out[f"mean_s{q}"] = abs(ms - mm)
        out[f"second_s{q}"] = abs(ss - sm)
    out["energy"] = abs(mean_energy(state, params)[0] - _coefficient_energy(state, params))
    return out


def uncertainty(state, params=None, method="series", cross_check=False):
    """Variances of xi and p, their product and the mean energy of `state`.

    With `cross_check` the closed forms are compared with the matrix route and
    any disagreement above ROUTE_TOL is reported as a ClosedFormMismatch warning.
    """
    params = params or AnisotropyParams()
    used = method if state.family.builtin else "matrix"
    m0, s0 = s_moments(state, 0, used)
    m1, s1 = s_moments(state, 1, used)
    var_xi = max(s0 - m0 * m0, 0.0)
    var_p = max(s1 - m1 * m1, 0.0)
    pristine, aniso = mean_energy(state, params, used)
    if cross_check and state.family.builtin:
        diffs = compare_routes(state, params)
        bad = {k: v for k, v in diffs.items() if v > ROUTE_TOL}
        if bad:
            warnings.warn(
                f"closed form disagrees with matrix route for {state.family.kind}, "
                f"alpha={state.alpha}: {bad}",
                ClosedFormMismatch,
                stacklevel=2,
            )
    return ObservableReport(
        mean_xi=m0,
        mean_p=m1,
        second_xi=s0,
        second_p=s1,
        var_xi=var_xi,
        var_p=var_p,
        hur=math.sqrt(var_xi * var_p),
        mean_energy_pristine=pristine,
        mean_energy_aniso=aniso,
        method=used,
    )


def _components(state, params, x):
    a = state.coeffs
    psi = eigenfunctions(params, max(state.dim - 1, 0), x)
    weights = np.full(len(a), 1.0 / math.sqrt(2.0))
    weights[0] = 1.0
    lower = 1j * ((a * weights) @ psi)
    if len(a) > 1:
        upper = (a[1:] / math.sqrt(2.0)) @ psi[: len(a) - 1]
    else:
        upper = np.zeros(np.shape(x), dtype=complex)
    return upper, lower


def density(state, params, x_grid):
    """Position-space spinor of a coherent state and its density |upper|^2 + |lower|^2."""
    x_grid = _check_grid(x_grid)
    upper, lower = _components(state, params, x_grid)
    return SpinorProfile(x_grid, upper, lower, np.abs(upper) ** 2 + np.abs(lower) ** 2, params)


def density_function(state, params):
    """Vectorized x -> rho(x) for quadrature."""

    def rho(x):
        upper, lower = _components(state, params, np.asarray(x, dtype=float))
        return np.abs(upper) ** 2 + np.abs(lower) ** 2

    return rho
