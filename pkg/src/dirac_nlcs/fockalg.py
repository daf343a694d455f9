"""Truncated Fock-space operators for the scalar and pseudo-spinor sectors.

Spinor vectors are laid out as ``[upper_0 .. upper_{D-1}, lower_0 .. lower_{D-1}]``
where each component is expanded over the oscillator functions psi_m.
Everything is dense; dimensions stay in the low thousands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FockOperator",
    "DeformationFamily",
    "IDENTITY",
    "SHIFTED_ONE",
    "SHIFTED_TWO",
    "ladder",
    "number",
    "identity",
    "commutator",
    "deformed_annihilator",
    "basis_spinor",
    "spinor_embed",
    "quadrature_operator",
]


@dataclass(frozen=True, eq=False)
class FockOperator:
    dim: int
    entries: np.ndarray
    sector: str = "scalar"

    def __post_init__(self):
        if self.sector not in ("scalar", "spinor"):
            raise ValueError(f"unknown sector {self.sector!r}")
        size = self.dim * (2 if self.sector == "spinor" else 1)
        if self.entries.shape != (size, size):
            raise ValueError(
                f"{self.sector} operator of dim {self.dim} needs a {size}x{size} matrix, "
                f"got {self.entries.shape}"
            )
        self.entries.flags.writeable = False

    @property
    def H(self):
        return FockOperator(self.dim, self.entries.conj().T.copy(), self.sector)

    def _compatible(self, other):
        if self.dim != other.dim or self.sector != other.sector:
            raise ValueError(
                f"operator mismatch: {self.sector}/{self.dim} vs {other.sector}/{other.dim}"
            )

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            self._compatible(other)
            return FockOperator(self.dim, self.entries @ other.entries, self.sector)
        return self.entries @ np.asarray(other)

    def __add__(self, other):
        self._compatible(other)
        return FockOperator(self.dim, self.entries + other.entries, self.sector)

    def __sub__(self, other):
        self._compatible(other)
        return FockOperator(self.dim, self.entries - other.entries, self.sector)

    def __mul__(self, scalar):
        return FockOperator(self.dim, self.entries * scalar, self.sector)

    __rmul__ = __mul__

    def diagonal(self):
        return np.diag(self.entries).copy()

    def expect(self, vector):
        v = np.asarray(vector)
        return np.vdot(v, self.entries @ v)

    def spinor(self):
        """Lift a scalar operator to s ⊗ 1 acting on both spinor components."""
        if self.sector != "scalar":
            raise ValueError("operator is already in the spinor sector")
        return FockOperator(self.dim, np.kron(np.eye(2), self.entries), "spinor")


def _check_dim(dim, minimum):
    if int(dim) != dim or dim < minimum:
        raise ValueError(f"dimension must be an integer >= {minimum}, got {dim!r}")
    return int(dim)


def ladder(dim, which):
    """theta^- (which='minus') or theta^+ (which='plus'), truncated to dim levels."""
    dim = _check_dim(dim, 2)
    if which not in ("minus", "plus"):
        raise ValueError(f"which must be 'minus' or 'plus', got {which!r}")
    m = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    return FockOperator(dim, m if which == "minus" else m.T.copy())


def number(dim):
    dim = _check_dim(dim, 1)
    return FockOperator(dim, np.diag(np.arange(dim, dtype=float)).astype(complex))


def identity(dim, sector="scalar"):
    size = dim * (2 if sector == "spinor" else 1)
    return FockOperator(dim, np.eye(size, dtype=complex), sector)


def commutator(a, b):
    a._compatible(b)
    return a @ b - b @ a


def quadrature_operator(dim, q):
    """s_q = (theta^- + (-1)^q theta^+) / (sqrt(2) i^q): xi for q=0, p for q=1."""
    if q not in (0, 1):
        raise ValueError("q must be 0 or 1")
    lm, lp = ladder(dim, "minus"), ladder(dim, "plus")
    return (lm + lp * (-1) ** q) * (1.0 / (math.sqrt(2.0) * 1j ** q))


@dataclass(frozen=True)
class DeformationFamily:
    """The deformation function f(n) of the number operator.

    Built-in kinds, with f(0) = 0 by convention:

    * ``identity``: f(n) = 1
    * ``shifted1``: f(n) = sqrt(n-1)/sqrt(n), so f(1) = 0
    * ``shifted2``: f(n) = sqrt((n-2)(n-1))/sqrt(n), so f(1) = f(2) = 0
    * ``custom``: tabulated non-negative values f(1), f(2), ...
    """

    kind: str
    table: tuple = field(default=(), repr=False)

    KINDS = ("identity", "shifted1", "shifted2", "custom")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown deformation family {self.kind!r}; choose from {self.KINDS}")
        if self.kind == "custom":
            values = tuple(float(v) for v in self.table)
            if not values:
                raise ValueError("custom family needs at least one tabulated value")
            if any(not math.isfinite(v) or v < 0 for v in values):
                raise ValueError("custom f values must be finite and non-negative")
            object.__setattr__(self, "table", values)
        elif self.table:
            raise ValueError("only custom families take a table")

    @classmethod
    def custom(cls, values):
        return cls("custom", tuple(values))

    @property
    def builtin(self):
        return self.kind != "custom"

    @property
    def max_level(self):
        """Largest n for which f(n) is defined (None for unbounded)."""
        return len(self.table) if self.kind == "custom" else None

    def f(self, n):
        """f evaluated at integer level(s) `n`; vectorized."""
        n = np.asarray(n)
        scalar = n.ndim == 0
        n = np.atleast_1d(n).astype(float)
        if np.any(n < 0):
            raise ValueError("f is only defined for n >= 0")
        out = np.zeros_like(n)
        pos = n >= 1
        if self.kind == "identity":
            out[pos] = 1.0
        elif self.kind == "shifted1":
            out[pos] = np.sqrt((n[pos] - 1) / n[pos])
        elif self.kind == "shifted2":
            m = n >= 2
            out[m] = np.sqrt((n[m] - 2) * (n[m] - 1) / n[m])
        else:
            if np.any(n > len(self.table)):
                raise ValueError(
                    f"custom family is tabulated up to n={len(self.table)}, "
                    f"needed n={int(n.max())}"
                )
            table = np.concatenate([[0.0], self.table])
            out = table[n.astype(int)]
        return float(out[0]) if scalar else out

    def omega(self, n):
        """Omega(n) = (n+1) f^2(n+1) - n f^2(n)."""
        n = np.asarray(n, dtype=float)
        return (n + 1) * self.f(n + 1) ** 2 - n * self.f(n) ** 2

    @property
    def lowest_level(self):
        """Lowest populated level of the coherent states: the largest n with f(n) = 0, n >= 1.

        Below it every coefficient is forced to zero by the recursion.
        """
        if self.kind == "identity":
            return 0
        if self.kind == "shifted1":
            return 1
        if self.kind == "shifted2":
            return 2
        zeros = [i + 1 for i, v in enumerate(self.table) if v == 0.0]
        return max(zeros) if zeros else 0


IDENTITY = DeformationFamily("identity")
SHIFTED_ONE = DeformationFamily("shifted1")
SHIFTED_TWO = DeformationFamily("shifted2")


def deformed_annihilator(family, delta, dim):
    """Spinor-sector matrix of the deformed annihilation operator Theta_f^-.

    Blocks (functions of N act on the level reached after the shift):

        [ cos(d) sqrt(N+2)/sqrt(N+1) f(N+2) theta^-    sin(d) f(N+2)/sqrt(N+1) (theta^-)^2 ]
        [ -sin(d) f(N+1) sqrt(N+1)                     cos(d) f(N+1) theta^-               ]

    On the pseudo-spinor basis this gives
    Theta Psi_n = f(n) e^{i d} sqrt(n) / sqrt(2^{delta_{1n}}) Psi_{n-1}.
    """
    dim = _check_dim(dim, 3)
    j = np.arange(dim, dtype=float)
    f1 = family.f(j + 1)
    f2 = family.f(j + 2)
    lm = ladder(dim, "minus").entries
    c, s = math.cos(delta), math.sin(delta)
    top_left = (c * np.sqrt(j + 2) / np.sqrt(j + 1) * f2)[:, None] * lm
    top_right = (s * f2 / np.sqrt(j + 1))[:, None] * (lm @ lm)
    bottom_left = np.diag(-s * f1 * np.sqrt(j + 1)).astype(complex)
    bottom_right = (c * f1)[:, None] * lm
    entries = np.block([[top_left, top_right], [bottom_left, bottom_right]])
    return FockOperator(dim, entries, "spinor")


def spinor_embed(coeffs, dim):
    """Spinor-sector vector of sum_n a_n Psi_n for coefficients a_0..a_{len-1}."""
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) > dim:
        raise ValueError(f"{len(coeffs)} coefficients do not fit in dimension {dim}")
    v = np.zeros(2 * dim, dtype=complex)
    if len(coeffs) == 0:
        return v
    v[dim] = 1j * coeffs[0]
    rest = coeffs[1:] / math.sqrt(2.0)
    n = np.arange(1, len(coeffs))
    v[n - 1] += rest
    v[dim + n] += 1j * rest
    return v


def basis_spinor(n, dim):
    if not 0 <= n < dim:
        raise ValueError(f"level {n} outside dimension {dim}")
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[n] = 1.0
    return spinor_embed(coeffs, dim)
