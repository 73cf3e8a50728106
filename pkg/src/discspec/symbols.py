"""Analytic weights and test functions: rational symbols, Blaschke
products, logarithmic Bloch test functions, and cocycles.

Rational symbols pole-free on the closed disc are the concrete weight
class: they extend continuously to the boundary, are closed under
composition with Moebius maps, and every weight used by the spectral
theorems lives here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, InternalError
from .moebius import MoebiusTransform, clamp_orbit_drift
from .norms import DiscGrid

POLE_MARGIN = 1e-9
EVAL_TOL = 1e-9

_BOUNDARY_PROBE = np.exp(2j * np.pi * np.arange(1024) / 1024)


def _trim(coeffs) -> np.ndarray:
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if c.ndim != 1 or c.size == 0:
        raise DomainError("coefficients must be a nonempty 1-d sequence")
    top = c.size
    cutoff = np.max(np.abs(c)) * 1e-300
    while top > 1 and abs(c[top - 1]) <= cutoff:
        top -= 1
    return c[:top].copy()


class RationalSymbol:
    """Ratio of complex polynomials with no poles on the closed unit disc.

    Coefficients are stored ascending.  Construction solves for the
    denominator roots (companion-matrix eigenvalues) and requires every
    root to have modulus > 1 + 1e-9.
    """

    def __init__(self, numerator, denominator=(1.0,)):
        self.numerator = _trim(numerator)
        self.denominator = _trim(denominator)
        if np.max(np.abs(self.denominator)) == 0.0:
            raise DomainError("zero denominator")
        if self.denominator.size > 1:
            roots = npoly.polyroots(self.denominator)
            if roots.size and np.min(np.abs(roots)) <= 1.0 + POLE_MARGIN:
                raise DomainError("pole on or near the closed unit disc")
        self._dnum = npoly.polyder(self.numerator)
        self._dden = npoly.polyder(self.denominator)

    @classmethod
    def constant(cls, value: complex) -> "RationalSymbol":
        return cls([complex(value)])

    @classmethod
    def monomial(cls, degree: int, scale: complex = 1.0) -> "RationalSymbol":
        c = np.zeros(degree + 1, dtype=complex)
        c[degree] = scale
        return cls(c)

    @property
    def degree(self):
        return max(self.numerator.size, self.denominator.size) - 1

    def __repr__(self) -> str:
        return (f"RationalSymbol(num={np.round(self.numerator, 6).tolist()}, "
                f"den={np.round(self.denominator, 6).tolist()})")

    def _check_domain(self, z):
        if np.any(np.abs(z) > 1.0 + EVAL_TOL):
            raise DomainError("evaluation outside the closed unit disc")

    def __call__(self, z):
        self._check_domain(z)
        return npoly.polyval(z, self.numerator) / npoly.polyval(z, self.denominator)

    def derivative(self, z):
        """(P'Q - PQ')/Q^2 from the exact polynomial derivatives."""
        self._check_domain(z)
        q = npoly.polyval(z, self.denominator)
        return (npoly.polyval(z, self._dnum) * q
                - npoly.polyval(z, self.numerator) * npoly.polyval(z, self._dden)
                ) / q ** 2

    def eval(self, z, order: int = 0):
        """Value (order 0) or first derivative (order 1) at z."""
        if order == 0:
            return self(z)
        if order == 1:
            return self.derivative(z)
        raise DomainError("order must be 0 or 1")

    def reciprocal(self) -> "RationalSymbol":
        """1/u; valid when u has no zeros on the closed disc."""
        return RationalSymbol(self.denominator, self.numerator)

    def scaled(self, factor: complex) -> "RationalSymbol":
        return RationalSymbol(self.numerator * complex(factor), self.denominator)

    @cached_property
    def boundary_sup(self) -> float:
        """Cached sup of |u| over a fine boundary probe."""
        return float(np.max(np.abs(self(_BOUNDARY_PROBE))))


def compose_with_moebius(u: RationalSymbol,
                         phi: MoebiusTransform) -> RationalSymbol:
    """The exact rational form of u(phi(z)).

    With u = P/Q of degree m, substitute phi = (a z + b)/(c z + d) and
    clear (c z + d)^m from both parts.
    """
    a, b, c, d = phi.a, phi.b, phi.c, phi.d
    m = max(u.numerator.size, u.denominator.size) - 1

    lin_num = np.array([b, a], dtype=complex)
    lin_den = np.array([d, c], dtype=complex)
    # powers[k] = (a z + b)^k * (c z + d)^(m - k)
    pow_num = [np.array([1.0 + 0j])]
    pow_den = [np.array([1.0 + 0j])]
    for _ in range(m):
        pow_num.append(npoly.polymul(pow_num[-1], lin_num))
        pow_den.append(npoly.polymul(pow_den[-1], lin_den))

    def substituted(coeffs: np.ndarray) -> np.ndarray:
        out = np.zeros(m + 1, dtype=complex)
        for k, coef in enumerate(coeffs):
            term = npoly.polymul(pow_num[k], pow_den[m - k]) * coef
            out[:term.size] += term
        return out

    num = substituted(u.numerator)
    den = substituted(u.denominator)
    try:
        return RationalSymbol(num, den)
    except DomainError as exc:
        raise InternalError(
            "composition created a pole on the closed disc") from exc


@dataclass(frozen=True)
class BlaschkeProduct:
    """Finite Blaschke product: unimodular on the circle, contracting inside.

    Factors are z for a zero at the origin and (|a|/a)(a - z)/(1 - conj(a) z)
    otherwise.
    """

    zeros: tuple
    unimodular_factor: complex = 1.0 + 0j

    def __post_init__(self):
        zeros = tuple(complex(a) for a in self.zeros)
        if not zeros:
            raise DomainError("a Blaschke product needs at least one zero")
        if any(abs(a) >= 1.0 for a in zeros):
            raise DomainError("Blaschke zeros must lie inside the disc")
        eta = complex(self.unimodular_factor)
        if abs(eta) == 0.0:
            raise DomainError("unimodular factor must be nonzero")
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "unimodular_factor", eta / abs(eta))

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def _factor_values(self, z):
        vals = []
        for a in self.zeros:
            if a == 0:
                vals.append(np.asarray(z, dtype=complex))
            else:
                vals.append((abs(a) / a) * (a - z) / (1.0 - np.conj(a) * z))
        return vals

    def _factor_derivs(self, z):
        ders = []
        for a in self.zeros:
            if a == 0:
                ders.append(np.ones_like(np.asarray(z, dtype=complex)))
            else:
                ders.append((abs(a) / a) * (abs(a) ** 2 - 1.0)
                            / (1.0 - np.conj(a) * z) ** 2)
        return ders

    def __call__(self, z):
        out = np.full_like(np.asarray(z, dtype=complex), self.unimodular_factor)
        for v in self._factor_values(z):
            out = out * v
        return out if out.shape else complex(out)

    def derivative(self, z):
        """Product rule via prefix/suffix products (no division, so zeros
        of individual factors on the grid are harmless)."""
        vals = self._factor_values(z)
        ders = self._factor_derivs(z)
        n = len(vals)
        base = np.ones_like(np.asarray(z, dtype=complex))
        prefix = [base]
        for v in vals[:-1]:
            prefix.append(prefix[-1] * v)
        suffix = [base]
        for v in reversed(vals[1:]):
            suffix.append(suffix[-1] * v)
        suffix.reverse()
        total = np.zeros_like(base)
        for j in range(n):
            total = total + prefix[j] * ders[j] * suffix[j]
        out = self.unimodular_factor * total
        return out if out.shape else complex(out)


@dataclass(frozen=True)
class LogWeightFunction:
    """f(z) = log(e/(1 - conj(a) z)): the classical Bloch test family.

    Uniformly in the parameter, sup (1-|z|^2)|f'(z)| stays below 2
    (pointwise (1+|z|)|a| < 2), so the Bloch norm stays below
    1 + 2 = 3.  The frequently quoted bound 2 holds for the derivative
    seminorm only: at a = 0.9 the full norm already reaches 2.2536.
    """

    a: complex

    def __post_init__(self):
        if abs(complex(self.a)) >= 1.0:
            raise DomainError("parameter must lie inside the disc")
        object.__setattr__(self, "a", complex(self.a))

    def __call__(self, z):
        return 1.0 - np.log(1.0 - np.conj(self.a) * z)

    def derivative(self, z):
        return np.conj(self.a) / (1.0 - np.conj(self.a) * z)


def cocycle_eval(u, phi, n: int, z):
    """u(z) u(phi(z)) ... u(phi_{n-1}(z)), the weight of the n-th power.

    Evaluated pointwise by running z along the orbit; the expanded
    rational form would have degree n * deg(u) and is numerically
    hopeless for n of cocycle-limit size.
    """
    if n < 0:
        raise DomainError("cocycle order must be nonnegative")
    w = np.asarray(z, dtype=complex)
    acc = np.ones_like(w)
    for _ in range(n):
        acc = acc * u(w)
        w = clamp_orbit_drift(phi(w))
    if acc.shape:
        return acc
    return complex(acc)


def cocycle_log_sup(u, phi, n: int, grid: DiscGrid) -> float:
    """max over the grid of log |u_(n)|, accumulated in log space."""
    if n < 1:
        raise DomainError("cocycle supremum needs n >= 1")
    w = grid.all_points
    acc = np.zeros(w.shape, dtype=float)
    with np.errstate(divide="ignore"):
        for _ in range(n):
            acc += np.log(np.abs(u(w)))
            w = clamp_orbit_drift(phi(w))
    return float(np.max(acc))


def cocycle_sup(u, phi, n: int, grid: DiscGrid) -> float:
    """Grid maximum of |u_(n)|: a lower bound of the true sup-norm.

    The cocycle extends continuously to the closed disc, so the genuine
    supremum sits on the boundary circle; grids should carry the
    boundary ring.
    """
    return math.exp(cocycle_log_sup(u, phi, n, grid))


def blaschke_ratio_bound(b: BlaschkeProduct) -> float:
    """Sum of (1+|a_j|)/(1-|a_j|) over the zeros: a certified upper bound
    for (1 - |B(z)|^2)/(1 - |z|^2) on the disc."""
    return float(sum((1.0 + abs(a)) / (1.0 - abs(a)) for a in b.zeros))


def inf_modulus(u, grid: DiscGrid) -> float:
    """Grid minimum of |u|: an upper bound of the true infimum.

    |u| extends continuously to the closed disc, so the infimum is
    attained there; grids should carry the boundary ring.
    """
    return float(np.min(np.abs(u(grid.all_points))))
