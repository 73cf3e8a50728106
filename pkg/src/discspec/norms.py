"""Grid and quadrature machinery for norms and suprema on the unit disc.

Grid suprema are always lower bounds of the true supremum and never
decrease under refinement (refined grids contain the coarse points).
All reductions run in a fixed order through numpy, so results are
bit-reproducible regardless of caller threading.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DomainError

# Default envelope constant for the pointwise growth bound
# |f(z)| <= alpha * ||f||_Bloch * log(e/(1 - |z|^2)); alpha = 1 is valid:
# |f(z)| <= |f(0)| + beta * atanh|z| and atanh r <= log 2 + log(1/(1-r^2))/2
# with log 2 < 1 gives the inequality with room to spare.
GROWTH_ENVELOPE_ALPHA = 1.0

_MIN_ANGULAR = 64


@dataclass(frozen=True)
class DiscGrid:
    """Boundary-refined sampling of the unit disc.

    Radii follow 1 - 2**(-k*beta) for k = 0..radial_levels-1 (so the
    origin is always a sample).  Each ring carries at least
    ceil(2*pi/(1 - r)) angles, rounded up to an even count so that the
    points +-1 and +-i land on the rings exactly.  With
    `include_boundary` a ring on |z| = 1 is added for functions that
    extend continuously to the closed disc.
    """

    radial_levels: int = 10
    beta: float = 0.75
    include_boundary: bool = True
    angular_multiplier: int = 1
    min_angular: int = _MIN_ANGULAR

    def __post_init__(self):
        if self.radial_levels < 1:
            raise DomainError("need at least one radial level")
        if not (self.beta > 0.0):
            raise DomainError("refinement exponent must be positive")
        if self.angular_multiplier < 1:
            raise DomainError("angular multiplier must be >= 1")

    @cached_property
    def radii(self) -> np.ndarray:
        k = np.arange(self.radial_levels, dtype=float)
        return 1.0 - 2.0 ** (-k * self.beta)

    def _count_at(self, r: float) -> int:
        if r == 0.0:
            return 1
        m = max(self.min_angular, math.ceil(2.0 * math.pi / (1.0 - r)))
        m += m % 2
        return m * self.angular_multiplier

    @cached_property
    def angular_counts(self) -> list:
        return [self._count_at(r) for r in self.radii]

    @cached_property
    def interior_points(self) -> np.ndarray:
        rings = []
        for r, m in zip(self.radii, self.angular_counts):
            if r == 0.0:
                rings.append(np.zeros(1, dtype=complex))
            else:
                rings.append(r * np.exp(2j * np.pi * np.arange(m) / m))
        return np.concatenate(rings)

    @cached_property
    def boundary_points(self) -> np.ndarray:
        m = self.angular_counts[-1]
        m = max(m, self.min_angular + self.min_angular % 2)
        return np.exp(2j * np.pi * np.arange(m) / m)

    @cached_property
    def all_points(self) -> np.ndarray:
        if self.include_boundary:
            return np.concatenate([self.interior_points, self.boundary_points])
        return self.interior_points

    def refine(self) -> "DiscGrid":
        """Double the radial levels and every angular count (nested)."""
        return DiscGrid(2 * self.radial_levels, self.beta,
                        self.include_boundary, 2 * self.angular_multiplier,
                        self.min_angular)

    def deepen(self, extra_levels: int) -> "DiscGrid":
        """Add radial levels toward the boundary, keeping angular density.

        Nested like `refine` but with bounded cost: the per-ring angular
        rule makes literal level doubling exponentially expensive.
        """
        return DiscGrid(self.radial_levels + extra_levels, self.beta,
                        self.include_boundary, self.angular_multiplier,
                        self.min_angular)

    @property
    def descriptor(self) -> str:
        return (f"R{self.radial_levels}-beta{self.beta:g}"
                f"-m{self.angular_multiplier}-B{int(self.include_boundary)}")


@dataclass(frozen=True)
class QuadratureRule:
    """Area quadrature on |z| <= r_max against normalized Lebesgue measure.

    Gauss-Legendre in t = r**2 (monomial moments integrate exactly at low
    order) crossed with an equispaced angular rule.  With r_max = 1 the
    rule integrates the whole disc and sum(weights) = 1 exactly; smaller
    r_max gives the truncated-disc rule used for one-sided bounds.
    """

    radial_order: int = 32
    angular_count: int = 128
    r_max: float = 1.0

    def __post_init__(self):
        if self.radial_order < 1 or self.angular_count < 1:
            raise DomainError("quadrature orders must be positive")
        if not (0.0 < self.r_max <= 1.0):
            raise DomainError("r_max must lie in (0, 1]")

    @cached_property
    def _nodes_weights(self):
        x, w = np.polynomial.legendre.leggauss(self.radial_order)
        t = 0.5 * (x + 1.0) * self.r_max ** 2
        wt = 0.5 * w * self.r_max ** 2
        r = np.sqrt(t)
        theta = 2.0 * np.pi * np.arange(self.angular_count) / self.angular_count
        z = r[:, None] * np.exp(1j * theta)[None, :]
        weights = np.broadcast_to(
            (wt / self.angular_count)[:, None],
            (self.radial_order, self.angular_count)).copy()
        return z, weights

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes_weights[0]

    @property
    def weights(self) -> np.ndarray:
        return self._nodes_weights[1]

    def integrate(self, fn: Callable) -> float:
        """Integral of fn(z) (real-valued) over the rule's disc."""
        z, w = self._nodes_weights
        return float(np.sum(w * fn(z)))

    def refine(self) -> "QuadratureRule":
        return QuadratureRule(2 * self.radial_order, 2 * self.angular_count,
                              self.r_max)

    @property
    def descriptor(self) -> str:
        return f"Q{self.radial_order}-M{self.angular_count}-r{self.r_max:g}"


@dataclass(frozen=True)
class NormEstimate:
    """A norm value plus the provenance needed to judge it.

    Sup-type estimates are lower bounds that only grow under refinement;
    quadrature values carry no one-sided guarantee.  `refinement_delta`
    is the change over the previous refinement level when a ladder was
    evaluated, else None.
    """

    value: float
    kind: str  # "lower_bound_of_sup" | "quadrature_value"
    grid_descriptor: str
    refinement_delta: Optional[float] = None


@dataclass(frozen=True)
class ConditionSuprema:
    """The boundedness/multiplier suprema for a weight-selfmap pair."""

    c24: NormEstimate
    c25: NormEstimate
    c26: NormEstimate
    sup_u: NormEstimate


def _sup_ladder(values_at: Callable[[DiscGrid], float], grid: DiscGrid,
                levels: int):
    """Evaluate a grid supremum on `levels` nested refinements.

    Returns (final value, delta to previous level or None, ladder list).
    """
    vals = []
    g = grid
    for _ in range(max(1, levels)):
        vals.append(float(values_at(g)))
        g = g.refine()
    delta = vals[-1] - vals[-2] if len(vals) > 1 else None
    return vals[-1], delta, vals


def bloch_norm(f, grid: DiscGrid, levels: int = 1) -> NormEstimate:
    """|f(0)| + sup (1 - |z|^2) |f'(z)| over the open-disc grid points."""

    def at(g: DiscGrid) -> float:
        z = g.interior_points
        return float(np.max((1.0 - np.abs(z) ** 2) * np.abs(f.derivative(z))))

    value, delta, _ = _sup_ladder(at, grid, levels)
    return NormEstimate(abs(complex(f(0j))) + value, "lower_bound_of_sup",
                        grid.descriptor, delta)


def dirichlet_norm(f, rule: QuadratureRule, levels: int = 1) -> NormEstimate:
    """sqrt(|f(0)|^2 + integral |f'|^2 dA) by the area quadrature."""
    vals = []
    r = rule
    for _ in range(max(1, levels)):
        energy = r.integrate(lambda z: np.abs(f.derivative(z)) ** 2)
        vals.append(math.sqrt(abs(complex(f(0j))) ** 2 + energy))
        r = r.refine()
    delta = vals[-1] - vals[-2] if len(vals) > 1 else None
    return NormEstimate(vals[-1], "quadrature_value", rule.descriptor, delta)


def weighted_sup_norm(f, s: float, grid: DiscGrid,
                      levels: int = 1) -> NormEstimate:
    """sup (1 - |z|^2)**s |f(z)|; s = 0 is the plain sup-norm.

    For s = 0 the boundary ring participates when the grid carries one;
    for s > 0 the weight vanishes there and interior points suffice.
    """
    if s < 0:
        raise DomainError("weight exponent must be nonnegative")

    def at(g: DiscGrid) -> float:
        z = g.all_points if s == 0 else g.interior_points
        return float(np.max((1.0 - np.abs(z) ** 2) ** s * np.abs(f(z))))

    value, delta, _ = _sup_ladder(at, grid, levels)
    return NormEstimate(value, "lower_bound_of_sup", grid.descriptor, delta)


def _log_weight(z: np.ndarray) -> np.ndarray:
    return np.log(np.e / (1.0 - np.abs(z) ** 2))


def log_growth_ratio(f, grid: DiscGrid) -> float:
    """sup |f(z)| / log(e/(1 - |z|^2)) over the interior grid points."""
    z = grid.interior_points
    return float(np.max(np.abs(f(z)) / _log_weight(z)))


def condition_suprema(u, phi, grid: DiscGrid, levels: int = 2,
                      selfmap_tol: float = 1e-9) -> ConditionSuprema:
    """Grid estimates of the four boundedness/multiplier suprema.

    c24 = sup (1-|z|^2) |u'(z)| log(e/(1-|phi(z)|^2))
    c25 = sup (1-|z|^2)/(1-|phi(z)|^2) |u(z) phi'(z)|
    c26 = sup (1-|z|^2) |u'(z)| log(e/(1-|z|^2))
    sup_u = sup |u(z)|  (boundary ring included when available)
    """

    def pieces(g: DiscGrid):
        z = g.interior_points
        w = phi(z)
        if np.any(np.abs(w) >= 1.0 + selfmap_tol):
            raise DomainError("not a selfmap of the disc")
        gap_z = 1.0 - np.abs(z) ** 2
        gap_w = np.maximum(1.0 - np.abs(w) ** 2, 1e-300)
        du = np.abs(u.derivative(z))
        c24 = np.max(gap_z * du * np.log(np.e / gap_w))
        c25 = np.max(gap_z / gap_w * np.abs(u(z)) * np.abs(phi.derivative(z)))
        c26 = np.max(gap_z * du * _log_weight(z))
        sup_u = np.max(np.abs(u(g.all_points)))
        if g.include_boundary:
            # The c25 integrand extends continuously to the circle: where
            # |phi| = 1 there, the gap ratio tends to 1/|phi'| (angular
            # derivative), leaving exactly |u|; where |phi| < 1 it
            # vanishes.  Without this limit the supremum, attained on the
            # boundary for automorphic phi, converges in O(1 - r) only.
            zb = g.boundary_points
            wb = phi(zb)
            boundary_vals = np.where(np.abs(wb) >= 1.0 - 1e-9,
                                     np.abs(u(zb)), 0.0)
            c25 = max(c25, np.max(boundary_vals))
        return float(c24), float(c25), float(c26), float(sup_u)

    ladders = [[], [], [], []]
    g = grid
    for _ in range(max(1, levels)):
        for ladder, val in zip(ladders, pieces(g)):
            ladder.append(val)
        g = g.refine()

    def estimate(ladder):
        delta = ladder[-1] - ladder[-2] if len(ladder) > 1 else None
        return NormEstimate(ladder[-1], "lower_bound_of_sup",
                            grid.descriptor, delta)

    return ConditionSuprema(*(estimate(l) for l in ladders))
