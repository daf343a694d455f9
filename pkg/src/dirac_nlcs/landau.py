"""Anisotropic Dirac carriers in a uniform perpendicular magnetic field.

Natural units hbar = c = e = 1 with the pristine Fermi velocity v_F = 1, so
the pristine cyclotron parameter is omega_B = 2 B0. The field is taken in the
Landau-like gauge A = B0 x y-hat, which reduces the problem to a shifted
oscillator centred at x0 = -2k/omega_B with frequency omega_zeta = omega_B/zeta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .specfun import hermite_functions

__all__ = [
    "AnisotropyParams",
    "LandauLevel",
    "SpinorProfile",
    "landau_level",
    "spectrum",
    "eigenfunction",
    "eigenfunctions",
    "effective_potential",
    "spinor_state",
    "density_maxima",
    "density_slope",
    "default_grid",
    "strain_to_params",
]


@dataclass(frozen=True)
class AnisotropyParams:
    """Physical configuration. Velocities are in units of v_F.

    `zeta`, `omega_B`, `omega_zeta` and `x0` are derived, never stored, so
    they cannot drift out of sync with the velocities.
    """

    v_xx: float = 1.0
    v_yy: float = 1.0
    B0: float = 0.5
    k: float = 1.0
    delta: float = 0.0

    def __post_init__(self):
        for name in ("v_xx", "v_yy", "B0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not math.isfinite(self.k) or not math.isfinite(self.delta):
            raise ValueError("k and delta must be finite")

    @classmethod
    def from_zeta(cls, zeta, B0=0.5, k=1.0, delta=0.0):
        """Parameters with v_yy held at the pristine value and v_xx = zeta."""
        return cls(v_xx=float(zeta), v_yy=1.0, B0=B0, k=k, delta=delta)

    @property
    def zeta(self):
        return self.v_xx / self.v_yy

    @property
    def omega_B(self):
        return 2.0 * self.B0

    @property
    def omega_zeta(self):
        return self.omega_B / self.zeta

    @property
    def x0(self):
        return -2.0 * self.k / self.omega_B

    def xi(self, x):
        """Dimensionless oscillator coordinate sqrt(omega_zeta/2) (x - x0)."""
        return math.sqrt(self.omega_zeta / 2.0) * (np.asarray(x, dtype=float) - self.x0)

    def x_of_xi(self, xi):
        return self.x0 + np.asarray(xi, dtype=float) / math.sqrt(self.omega_zeta / 2.0)

    def as_dict(self):
        return {
            "v_xx": self.v_xx,
            "v_yy": self.v_yy,
            "zeta": self.zeta,
            "B0": self.B0,
            "k": self.k,
            "delta": self.delta,
            "omega_B": self.omega_B,
            "omega_zeta": self.omega_zeta,
            "x0": self.x0,
        }


@dataclass(frozen=True)
class LandauLevel:
    n: int
    eps: float  # omega_zeta * n, shared by the lower component at n and the upper at n-1
    energy: float  # sqrt(v_xx v_yy omega_B n)


@dataclass(frozen=True)
class SpinorProfile:
    x_grid: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    density: np.ndarray
    params: AnisotropyParams


def _level(n):
    if int(n) != n or n < 0:
        raise ValueError(f"level index must be a non-negative integer, got {n!r}")
    return int(n)


def eps_minus(params, n):
    return params.omega_zeta * _level(n)


def eps_plus(params, n):
    return params.omega_zeta * (_level(n) + 1)


def landau_level(params, n):
    n = _level(n)
    return LandauLevel(
        n=n,
        eps=eps_minus(params, n),
        energy=math.sqrt(params.v_xx * params.v_yy * params.omega_B * n),
    )


def spectrum(params, nmax):
    return [landau_level(params, n) for n in range(_level(nmax) + 1)]


def eigenfunctions(params, nmax, x):
    """psi_0..psi_nmax at positions `x`, L2(dx)-normalized; shape (nmax+1,) + x.shape."""
    scale = (params.omega_zeta / 2.0) ** 0.25
    return scale * hermite_functions(nmax, params.xi(x))


def eigenfunction(params, n, x):
    n = _level(n)
    values = eigenfunctions(params, n, x)[n]
    return float(values) if np.ndim(values) == 0 else values


def effective_potential(params, x, sign=-1):
    """Decoupled potential (omega_zeta^2/4)(x - x0)^2 + sign * omega_zeta/2.

    The quadratic coefficient carries omega_zeta squared; this is the form for
    which psi_n is an eigenfunction with eigenvalue omega_zeta * n (sign=-1)
    at every zeta, not only at omega_zeta = 1.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    w = params.omega_zeta
    d = np.asarray(x, dtype=float) - params.x0
    return 0.25 * w * w * d * d + sign * 0.5 * w


def default_grid(params, n, points=2001):
    w = params.omega_zeta
    half = math.sqrt(2.0 * (2 * n + 1) / w) + 6.0 / math.sqrt(w / 2.0)
    return np.linspace(params.x0 - half, params.x0 + half, points)


def _check_grid(x_grid):
    x_grid = np.asarray(x_grid, dtype=float)
    if x_grid.ndim != 1 or x_grid.size == 0:
        raise ValueError("grid must be a non-empty 1-d sequence")
    if x_grid.size > 1 and np.any(np.diff(x_grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    return x_grid


def spinor_state(params, n, x_grid):
    """Pseudo-spinor eigenstate Psi_n sampled on `x_grid` (the e^{iky} phase is dropped)."""
    n = _level(n)
    x_grid = _check_grid(x_grid)
    psi = eigenfunctions(params, n, x_grid)
    if n == 0:
        upper = np.zeros(x_grid.shape, dtype=complex)
        lower = 1j * psi[0]
    else:
        upper = psi[n - 1] / math.sqrt(2.0) + 0j
        lower = 1j * psi[n] / math.sqrt(2.0)
    density = np.abs(upper) ** 2 + np.abs(lower) ** 2
    return SpinorProfile(x_grid, upper, lower, density, params)


def _reduced_density(n, xi):
    phis = hermite_functions(n, xi)
    if n == 0:
        return phis[0] ** 2
    return 0.5 * (phis[n] ** 2 + phis[n - 1] ** 2)


def density_slope(n, xi):
    """d/dxi of phi_n^2 + phi_{n-1}^2, i.e. the critical-point condition for rho_n.

    In raw Hermite polynomials this is proportional to
    g_n + 2n g_{n-1} with g_n(eta) = H_n(eta) [eta H_n(eta) - H_{n+1}(eta)].
    """
    n = _level(n)
    if n == 0:
        raise ValueError("rho_0 has a single maximum at x0; no slope relation needed")
    phis = hermite_functions(n + 1, xi)
    d_n = math.sqrt(n / 2) * phis[n - 1] - math.sqrt((n + 1) / 2) * phis[n + 1]
    d_nm1 = (math.sqrt((n - 1) / 2) * phis[n - 2] if n > 1 else 0.0) - math.sqrt(n / 2) * phis[n]
    return phis[n] * d_n + phis[n - 1] * d_nm1


def _bisect(f, lo, hi, tol=1e-12, max_iter=200):
    flo = f(lo)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            return mid
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _positive_roots(f, upper, samples):
    eta = np.linspace(0.0, upper, samples + 1)[1:]
    values = f(eta)
    roots = []
    for i in range(len(eta) - 1):
        a, b = values[i], values[i + 1]
        if a == 0.0:
            roots.append(float(eta[i]))
        elif a * b < 0:
            roots.append(_bisect(lambda t: float(f(t)), float(eta[i]), float(eta[i + 1])))
    return roots


def density_maxima(params, n):
    """Positions (x_minus, x_plus) of the global maximum pair of rho_n.

    x_pm = x0 +- sqrt(2/omega_zeta) eta*, where eta* is the positive critical
    point of rho_n with the largest density. Critical points are bracketed on
    (0, sqrt(2n+3)] and refined by bisection to 1e-12.
    """
    n = _level(n)
    x0 = params.x0
    if n == 0:
        return (x0, x0)
    roots = _positive_roots(lambda t: density_slope(n, t), math.sqrt(2 * n + 3), 64 * (n + 2))
    if not roots:
        raise NumericalError(f"no critical point bracketed for n={n}")
    best = max(roots, key=lambda t: float(_reduced_density(n, t)))
    if _reduced_density(n, 0.0) > _reduced_density(n, best):
        return (x0, x0)
    offset = math.sqrt(2.0 / params.omega_zeta) * best
    return (x0 - offset, x0 + offset)


def strain_to_params(direction, epsilon, nu=0.15, beta=2.0, B0=0.5, k=1.0, delta=0.0):
    """Velocities of uniformly strained graphene.

    Stress along x gives v_xx = 1 - beta*eps, v_yy = 1 + beta*nu*eps; along y
    the pair is swapped. zeta is the exact velocity ratio; to first order it is
    1 -+ beta (1 + nu) eps.
    """
    if direction not in ("x", "y"):
        raise ValueError(f"strain direction must be 'x' or 'y', got {direction!r}")
    if not 0.0 <= nu <= 0.5:
        raise ValueError(f"Poisson ratio must lie in [0, 0.5], got {nu!r}")
    if beta <= 0:
        raise ValueError("beta must be positive")
    if not 0.0 <= epsilon < 1.0 / beta:
        raise ValueError(
            f"strain epsilon={epsilon!r} must satisfy 0 <= epsilon < 1/beta = {1.0 / beta:g} "
            "so that both velocities stay positive"
        )
    soft = 1.0 - beta * epsilon
    stiff = 1.0 + beta * nu * epsilon
    if direction == "x":
        return AnisotropyParams(v_xx=soft, v_yy=stiff, B0=B0, k=k, delta=delta)
    return AnisotropyParams(v_xx=stiff, v_yy=soft, B0=B0, k=k, delta=delta)
