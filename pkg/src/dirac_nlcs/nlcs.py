"""Nonlinear (Barut-Girardello) coherent states of the deformed annihilator.

Coefficients over the pseudo-spinor basis follow

    a_1 f(1) = sqrt(2) alpha~ a_0,    a_{n+1} f(n+1) sqrt(n+1) = alpha~ a_n,

with alpha~ = alpha e^{-i delta}. When f vanishes at some level every
coefficient below it is forced to zero, so the state starts at the family's
lowest level (0, 1 or 2 for the built-in families). Magnitudes are generated
in log space so |alpha| in the tens does not overflow.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import NumericalError
from .fockalg import DeformationFamily, deformed_annihilator, spinor_embed
from .specfun import log_bessel_i

__all__ = [
    "CoherentState",
    "Occupation",
    "build_state",
    "closed_form_norm",
    "eigen_residual",
    "occupation_distribution",
    "poisson_pmf",
    "total_variation",
    "D_MAX",
]

D_MAX = 20000
DEFAULT_TOL = 1e-12


class SeriesDivergence(NumericalError):
    """Coefficients were not square-summable within the level cap."""

    def __init__(self, message, partial_mass):
        super().__init__(message)
        self.partial_mass = partial_mass


@dataclass(frozen=True, eq=False)
class CoherentState:
    alpha: complex
    delta: float
    family: DeformationFamily
    coeffs: np.ndarray
    tail_bound: float
    recursion_norm: float  # normalization applied to the unit coefficient at the lowest level

    @property
    def alpha_tilde(self):
        return self.alpha * cmath.exp(-1j * self.delta)

    @property
    def dim(self):
        return len(self.coeffs)

    @property
    def lowest_level(self):
        return self.family.lowest_level

    def embed(self, dim=None):
        return spinor_embed(self.coeffs, dim or self.dim + 2)


def _log_ratio_step(family, n, log_r):
    """log|c_{n+1}/c_n| for the coefficient recursion; inf if f(n+1) = 0."""
    fn1 = family.f(n + 1)
    if fn1 == 0.0:
        return math.inf
    step = log_r - math.log(fn1) - 0.5 * math.log(n + 1)
    if n == 0:
        # a_1 f(1) = sqrt(2) alpha~ a_0 carries no sqrt(n+1) but a sqrt(2)
        step = log_r + 0.5 * math.log(2.0) - math.log(fn1)
    return step


def build_state(family, alpha, delta=0.0, tol=DEFAULT_TOL):
    """Eigenstate of Theta_f^- with eigenvalue `alpha`, truncated with a certified tail.

    Truncation stops at the first level D where the discarded coefficient
    vector has l2 norm times max(1, |alpha|) below `tol`, which also bounds the
    eigen-residual contributed by the cut. The tail is bounded geometrically
    from the current coefficient ratio once the ratio sequence is below 1 and
    non-increasing (below 1/2 for custom families, whose monotonicity is only
    checked locally).
    """
    if not 0 < tol <= 1e-4:
        raise ValueError(f"tol must lie in (0, 1e-4], got {tol!r}")
    alpha = complex(alpha)
    alpha_tilde = alpha * cmath.exp(-1j * delta)
    r = abs(alpha_tilde)
    lowest = family.lowest_level

    if r == 0.0:
        coeffs = np.zeros(lowest + 1, dtype=complex)
        coeffs[lowest] = 1.0
        return CoherentState(alpha, float(delta), family, coeffs, 0.0, 1.0)

    log_r = math.log(r)
    phase = cmath.phase(alpha_tilde)
    amp_scale = max(1.0, r)
    cap = D_MAX
    # monotone ratios are known for the built-in families; custom ones need margin
    threshold = 1.0 if family.builtin else 0.5
    if family.max_level is not None:
        cap = min(cap, family.max_level)

    logs = [0.0]  # log|c_n| for n = lowest, lowest+1, ...
    peak = 0.0
    mass = 1.0  # sum |c|^2 in units of exp(2*peak)
    prev_ratio = math.inf
    n = lowest
    tail = None
    while True:
        if n + 1 > cap:
            raise SeriesDivergence(
                f"coefficients not summable below level {cap} for family {family.kind} "
                f"at |alpha~|={r:g}; partial mass {mass:.6g} (relative to peak)",
                mass,
            )
        step = _log_ratio_step(family, n, log_r)
        if math.isinf(step):
            raise SeriesDivergence(f"f({n + 1}) = 0 above the lowest level {lowest}", mass)
        ratio = math.exp(2.0 * step) if step < 350 else math.inf
        if ratio < threshold and ratio <= prev_ratio * (1 + 1e-12):
            # discarded terms n+1, n+2, ... bounded by a geometric series
            last = math.exp(2.0 * (logs[-1] - peak))
            tail_rel = last * ratio / (1.0 - ratio) / mass
            if math.sqrt(tail_rel) * amp_scale < tol:
                tail = tail_rel
                break
        prev_ratio = ratio
        nxt = logs[-1] + step
        if nxt > peak:
            mass *= math.exp(2.0 * (peak - nxt))
            peak = nxt
        mass += math.exp(2.0 * (nxt - peak))
        logs.append(nxt)
        n += 1

    logs = np.array(logs)
    k = np.arange(len(logs))
    total = mass * (1.0 + tail)
    mags = np.exp(logs - peak) / math.sqrt(total)
    coeffs = np.zeros(lowest + len(logs), dtype=complex)
    coeffs[lowest:] = mags * np.exp(1j * phase * k)
    recursion_norm = math.exp(-peak) / math.sqrt(total)
    return CoherentState(alpha, float(delta), family, coeffs, tail / (1.0 + tail), recursion_norm)


def closed_form_norm(family, alpha_tilde):
    """Analytic normalization of the lowest coefficient for the built-in families.

    identity: 1/sqrt(2 e^{|a|^2} - 1); shifted1: e^{-|a|^2/2};
    shifted2: sqrt(|a| / I_1(2|a|)). Returns None for custom families.
    """
    r = abs(alpha_tilde)
    s = r * r
    if family.kind == "identity":
        return math.exp(-0.5 * s - 0.5 * math.log(2.0 - math.exp(-s)))
    if family.kind == "shifted1":
        return math.exp(-0.5 * s)
    if family.kind == "shifted2":
        if r == 0.0:
            return 1.0
        return math.exp(0.5 * (math.log(r) - log_bessel_i(1, 2.0 * r)))
    return None


def eigen_residual(state, dim=None):
    """||Theta_f^- v - alpha v|| with v the state embedded in a `dim`-level spinor space."""
    if dim is None:
        dim = state.dim + 2
    if dim < state.dim + 2:
        raise ValueError(f"dim must be at least truncation + 2 = {state.dim + 2}")
    if state.family.max_level is not None and dim + 1 > state.family.max_level:
        dim = state.dim + 2
        if dim + 1 > state.family.max_level:
            raise ValueError("custom family table too short for the residual check")
    theta = deformed_annihilator(state.family, state.delta, dim)
    v = state.embed(dim)
    return float(np.linalg.norm(theta @ v - state.alpha * v))


@dataclass(frozen=True, eq=False)
class Occupation:
    levels: np.ndarray
    probabilities: np.ndarray
    poisson: np.ndarray  # pmf with mean |alpha|^2 on the same levels
    tail_bound: float

    def rows(self):
        return list(zip(self.levels.tolist(), self.probabilities.tolist()))


def poisson_pmf(lam, levels, shift=0):
    """Poisson pmf with mean `lam` evaluated at levels - shift (zero below the shift)."""
    levels = np.asarray(levels)
    k = levels - shift
    out = np.zeros(levels.shape)
    ok = k >= 0
    kk = k[ok].astype(float)
    if lam == 0:
        out[ok] = (kk == 0).astype(float)
        return out
    out[ok] = np.exp(kk * math.log(lam) - lam - gammaln(kk + 1))
    return out


def total_variation(p, q):
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def occupation_distribution(state):
    """P(n) = |a_n|^2 paired with the Poisson pmf of mean |alpha|^2."""
    levels = np.arange(state.dim)
    probs = np.abs(state.coeffs) ** 2
    return Occupation(levels, probs, poisson_pmf(abs(state.alpha) ** 2, levels), state.tail_bound)
