"""Disc automorphisms: exact coefficient algebra, classification, dynamics.

Every object here is an immutable value and every function is pure, so
unrestricted concurrent use is safe.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import DomainError, NumericalError

# Absolute tolerances on unit-determinant coefficients (all O(1) after
# normalization, so absolute and relative agree).
DET_TOL = 1e-12
BOUNDARY_SNAP_TOL = 1e-9
PARABOLIC_DISC_TOL = 1e-10
UNSTABLE_DISC_TOL = 1e-12
AUTOMORPHISM_TOL = 1e-9
IDENTITY_TOL = 1e-12

_BOUNDARY_SAMPLES = np.exp(2j * np.pi * np.arange(32) / 32)


class MoebiusTransform:
    """The map z -> (a*z + b)/(c*z + d) with unit determinant a*d - b*c = 1.

    Coefficients are renormalized on construction: first by the largest
    entry (so the determinant of the scaled matrix cannot overflow even
    for deep iterates, whose entries legitimately grow like mu**(-n/2)),
    then by a square root of the determinant.
    """

    __slots__ = ("a", "b", "c", "d", "_aut_flag")

    def __init__(self, a: complex, b: complex, c: complex, d: complex):
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        scale = max(abs(a), abs(b), abs(c), abs(d))
        if scale == 0.0 or not math.isfinite(scale):
            raise DomainError("degenerate Moebius coefficients")
        a, b, c, d = a / scale, b / scale, c / scale, d / scale
        det = a * d - b * c
        # Deep hyperbolic iterates are unit-determinant with entries of
        # size mu**(-n/2), so their scaled determinant is legitimately
        # tiny; only an (almost) exactly rank-one matrix is rejected.
        if abs(det) < 1e-30:
            raise DomainError("singular Moebius coefficient matrix")
        root = cmath.sqrt(det)
        object.__setattr__(self, "a", a / root)
        object.__setattr__(self, "b", b / root)
        object.__setattr__(self, "c", c / root)
        object.__setattr__(self, "d", d / root)
        object.__setattr__(self, "_aut_flag", None)

    def __setattr__(self, name, value):
        raise AttributeError("MoebiusTransform is immutable")

    def __repr__(self) -> str:
        return (f"MoebiusTransform(a={self.a:.6g}, b={self.b:.6g}, "
                f"c={self.c:.6g}, d={self.d:.6g})")

    @classmethod
    def identity(cls) -> "MoebiusTransform":
        return cls(1.0, 0.0, 0.0, 1.0)

    # -- evaluation -------------------------------------------------------

    def __call__(self, z):
        """Evaluate at a complex scalar or ndarray."""
        return (self.a * z + self.b) / (self.c * z + self.d)

    def derivative(self, z):
        """First derivative (a*d - b*c)/(c*z + d)^2 at scalar or ndarray z."""
        det = self.a * self.d - self.b * self.c
        return det / (self.c * z + self.d) ** 2

    # -- algebra ----------------------------------------------------------

    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def compose(self, other: "MoebiusTransform") -> "MoebiusTransform":
        """The composition self(other(z)) via coefficient matrix product."""
        return MoebiusTransform(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "MoebiusTransform":
        return MoebiusTransform(self.d, -self.b, -self.c, self.a)

    def iterate(self, n: int) -> "MoebiusTransform":
        """The n-th iterate by square-and-multiply on the coefficient matrix.

        The trailing squaring is skipped: for hyperbolic maps each squaring
        doubles the coefficient exponent and a wasted one can overflow.
        """
        if n < 0 or n != int(n):
            raise DomainError("iterate order must be a nonnegative integer")
        result = MoebiusTransform.identity()
        base = self
        n = int(n)
        while n:
            if n & 1:
                result = result.compose(base)
            n >>= 1
            if n:
                base = base.compose(base)
        return result

    # -- disc geometry ----------------------------------------------------

    def is_disc_automorphism(self, tol: float = AUTOMORPHISM_TOL) -> bool:
        """True when the map sends the unit circle to itself and 0 inside."""
        cached = self._aut_flag
        if cached is not None:
            return cached
        w = self(_BOUNDARY_SAMPLES)
        on_circle = bool(np.max(np.abs(np.abs(w) - 1.0)) <= tol)
        inside = abs(self(0.0)) < 1.0
        flag = on_circle and inside
        object.__setattr__(self, "_aut_flag", flag)
        return flag

    def trace(self) -> complex:
        return self.a + self.d

    def fixed_point_discriminant(self) -> complex:
        """Discriminant of c*z^2 + (d - a)*z - b = 0; equals trace^2 - 4."""
        return (self.d - self.a) ** 2 + 4.0 * self.b * self.c


def clamp_orbit_drift(w):
    """Project points that rounding pushed outside the circle back onto it.

    A selfmap never leaves the closed disc, but near a repulsive boundary
    fixed point each iteration amplifies an outward rounding excursion by
    the reciprocal multiplier, so long boundary orbits blow up without
    this projection.
    """
    mag = np.abs(w)
    return np.where(mag > 1.0, w / np.maximum(mag, 1e-300), w)


@dataclass(frozen=True)
class IteratedMap:
    """phi_n evaluated by pointwise orbit iteration.

    The coefficient matrix of a deep hyperbolic iterate has entries of
    size mu**(-n/2), and its determinant (which the derivative needs) is
    then a catastrophic cancellation; running each point along the orbit
    and multiplying the chain-rule factors is stable at every depth.
    """

    base: MoebiusTransform
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise DomainError("iterate order must be nonnegative")

    def __call__(self, z):
        w = np.asarray(z, dtype=complex)
        for _ in range(self.order):
            w = clamp_orbit_drift(self.base(w))
        return w if w.shape else complex(w)

    def derivative(self, z):
        w = np.asarray(z, dtype=complex)
        acc = np.ones_like(w)
        for _ in range(self.order):
            acc = acc * self.base.derivative(w)
            w = clamp_orbit_drift(self.base(w))
        return acc if acc.shape else complex(acc)


class AutomorphismType(Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class AutomorphismClass:
    """Classification of a disc automorphism.

    `fixed_points` lists the fixed points in the closed disc as
    (location, derivative) pairs: one interior point for elliptic maps,
    one boundary point for parabolic, the attractive and repulsive
    boundary points for hyperbolic.  Identity has no distinguished ones.
    """

    tag: AutomorphismType
    fixed_points: tuple
    attractive: Optional[complex] = None
    repulsive: Optional[complex] = None
    multiplier: Optional[float] = None
    diagnostic: Optional[str] = None


def build_disc_automorphism(theta: float, p: complex) -> MoebiusTransform:
    """The automorphism z -> e^{i theta} (z - p)/(1 - conj(p) z)."""
    p = complex(p)
    if abs(p) >= 1.0:
        raise DomainError("not a disc automorphism")
    rot = cmath.exp(1j * theta)
    return MoebiusTransform(rot, -rot * p, -p.conjugate(), 1.0)


def build_canonical_hyperbolic(mu: float) -> MoebiusTransform:
    """Hyperbolic automorphism fixing -1 and 1 with multiplier mu at 1.

    z -> ((1 + mu) z + (1 - mu)) / ((1 - mu) z + (1 + mu)), 0 < mu < 1.
    """
    if not (0.0 < mu < 1.0):
        raise DomainError("multiplier must lie in (0, 1)")
    return MoebiusTransform(1.0 + mu, 1.0 - mu, 1.0 - mu, 1.0 + mu)


def build_parabolic_translation(t: float = 1.0) -> MoebiusTransform:
    """Parabolic automorphism fixing 1: the Cayley conjugate of w -> w + t."""
    if t == 0.0:
        raise DomainError("translation length must be nonzero")
    return MoebiusTransform(2j - t, t, -t, t + 2j)


def _stable_quadratic_roots(phi: MoebiusTransform):
    """Roots of c*z^2 + (d - a)*z - b = 0, larger-magnitude root first.

    Cancellation is avoided by forming the larger root from the branch of
    sqrt(disc) aligned with (a - d); the other root comes from Vieta.
    """
    a, b, c, d = phi.a, phi.b, phi.c, phi.d
    disc = phi.fixed_point_discriminant()
    s = cmath.sqrt(disc)
    lin = a - d
    if (lin.conjugate() * s).real < 0.0:
        s = -s
    q = lin + s
    if abs(q) < 1e-300:
        raise NumericalError("degenerate fixed-point quadratic")
    z1 = q / (2.0 * c)
    # product of roots is -b/c
    z2 = (-b / c) / z1 if abs(z1) > 0 else (a - d) / c
    return z1, z2


def classify(phi: MoebiusTransform,
             parabolic_tol: float = PARABOLIC_DISC_TOL) -> AutomorphismClass:
    """Classify a disc automorphism and locate its fixed points.

    Boundary fixed points are snapped to modulus exactly 1 when within
    1e-9.  Hyperbolic attractive/repulsive roles are assigned by the
    derivative modulus (|phi'| < 1 at the attractive point).
    """
    if not phi.is_disc_automorphism():
        raise DomainError("not a disc automorphism")
    a, b, c, d = phi.a, phi.b, phi.c, phi.d

    if abs(b) <= IDENTITY_TOL and abs(c) <= IDENTITY_TOL and abs(a - d) <= IDENTITY_TOL:
        return AutomorphismClass(tag=AutomorphismType.IDENTITY, fixed_points=())

    if abs(c) <= 1e-13:
        # rotation about the origin: fixed points 0 and infinity
        deriv = a / d
        return AutomorphismClass(
            tag=AutomorphismType.ELLIPTIC,
            fixed_points=((0j, deriv),),
        )

    disc = phi.fixed_point_discriminant()
    diagnostic = None
    if 0.0 < abs(disc) < UNSTABLE_DISC_TOL:
        diagnostic = "classification unstable"

    if abs(disc) <= parabolic_tol:
        z_star = (a - d) / (2.0 * c)
        z_star = _snap_to_boundary(z_star)
        return AutomorphismClass(
            tag=AutomorphismType.PARABOLIC,
            fixed_points=((z_star, complex(phi.derivative(z_star))),),
            diagnostic=diagnostic,
        )

    z1, z2 = _stable_quadratic_roots(phi)
    # Fixed points of a disc automorphism pair as (z, 1/conj(z)): either
    # both sit on the unit circle or exactly one is interior.
    if abs(abs(z1) - 1.0) <= BOUNDARY_SNAP_TOL:
        z1 = _snap_to_boundary(z1)
        z2 = _snap_to_boundary(z2)
        m1 = complex(phi.derivative(z1))
        m2 = complex(phi.derivative(z2))
        if abs(m1) < 1.0:
            att, rep, m_att, m_rep = z1, z2, m1, m2
        else:
            att, rep, m_att, m_rep = z2, z1, m2, m1
        if not (0.0 < abs(m_att) < 1.0 < abs(m_rep)):
            raise NumericalError("hyperbolic derivative pattern violated")
        return AutomorphismClass(
            tag=AutomorphismType.HYPERBOLIC,
            fixed_points=((att, m_att), (rep, m_rep)),
            attractive=att,
            repulsive=rep,
            multiplier=float(m_att.real),
            diagnostic=diagnostic,
        )

    interior = z1 if abs(z1) < 1.0 else z2
    if abs(interior) >= 1.0:
        raise NumericalError("no interior fixed point for an elliptic map")
    return AutomorphismClass(
        tag=AutomorphismType.ELLIPTIC,
        fixed_points=((interior, complex(phi.derivative(interior))),),
        diagnostic=diagnostic,
    )


def _snap_to_boundary(z: complex) -> complex:
    r = abs(z)
    if abs(r - 1.0) <= BOUNDARY_SNAP_TOL and r > 0.0:
        return z / r
    return z


def hyperbolic_distance(z: complex, w: complex) -> float:
    """The invariant metric rho(z, w) = atanh |(z - w)/(1 - conj(z) w)|."""
    z, w = complex(z), complex(w)
    if abs(z) >= 1.0 or abs(w) >= 1.0:
        raise DomainError("hyperbolic distance needs interior points")
    r = abs((z - w) / (1.0 - z.conjugate() * w))
    return math.atanh(min(r, 1.0 - 1e-17))


def _orbit_log_chain(phi: MoebiusTransform, n_max: int):
    """Orbit z_n = phi_n(0) together with log(1 - |z_n|^2), computed stably.

    For automorphisms 1 - |phi(z)|^2 = |phi'(z)| (1 - |z|^2), so the
    log-gap accumulates as sum of log|phi'| along the orbit.  Direct
    subtraction 1 - |z_n| loses everything once the orbit is within
    machine epsilon of the boundary (n around 30 already for mu = 0.3).
    """
    z = 0j
    acc = 0.0
    orbit = []
    log_gaps = []
    for _ in range(n_max):
        acc += math.log(abs(phi.derivative(z)))
        z = complex(phi(z))
        orbit.append(z)
        log_gaps.append(acc)
    return orbit, log_gaps


def denjoy_wolff_sequence(phi: MoebiusTransform, n_terms: int):
    """First n_terms of (1 - |phi_n(0)|)^(1/n) for a parabolic or
    hyperbolic automorphism.

    The tail approaches the derivative at the Denjoy-Wolff point: the
    multiplier mu for hyperbolic maps, 1 for parabolic ones.
    """
    if n_terms < 1:
        raise DomainError("need at least one term")
    tag = classify(phi).tag
    if tag not in (AutomorphismType.PARABOLIC, AutomorphismType.HYPERBOLIC):
        raise DomainError(
            "boundary Denjoy-Wolff point required: "
            "the automorphism must be parabolic or hyperbolic")
    orbit, log_gaps = _orbit_log_chain(phi, n_terms)
    out = []
    for n in range(1, n_terms + 1):
        r = min(abs(orbit[n - 1]), 1.0)
        log_one_minus = log_gaps[n - 1] - math.log1p(r)
        out.append(math.exp(log_one_minus / n))
    return out


def orbit_distance_sequence(phi: MoebiusTransform, n_terms: int):
    """rho(phi_n(0), 0) for n = 1..n_terms, stable for deep orbits.

    Uses rho = log1p(|z_n|) - log(1 - |z_n|^2)/2 with the log-gap chain,
    valid for every disc automorphism.
    """
    if not phi.is_disc_automorphism():
        raise DomainError("not a disc automorphism")
    orbit, log_gaps = _orbit_log_chain(phi, n_terms)
    return [math.log1p(min(abs(z), 1.0)) - 0.5 * g
            for z, g in zip(orbit, log_gaps)]


def random_automorphism(rng: np.random.Generator,
                        kind: Optional[str] = None) -> MoebiusTransform:
    """Draw a random disc automorphism, optionally of a requested class.

    Class-specific draws conjugate a canonical representative by a
    generic automorphism, which preserves the classification exactly.
    """
    theta = rng.uniform(0.0, 2.0 * math.pi)
    radius = math.sqrt(rng.uniform(0.0, 0.81))
    angle = rng.uniform(0.0, 2.0 * math.pi)
    g = build_disc_automorphism(theta, radius * cmath.exp(1j * angle))
    if kind is None:
        return g
    if kind == "hyperbolic":
        core = build_canonical_hyperbolic(rng.uniform(0.15, 0.85))
    elif kind == "parabolic":
        sign = 1.0 if rng.uniform() < 0.5 else -1.0
        core = build_parabolic_translation(sign * rng.uniform(0.5, 2.0))
    elif kind == "elliptic":
        core = build_disc_automorphism(rng.uniform(0.2, 2.0 * math.pi - 0.2), 0.0)
    else:
        raise DomainError(f"unknown automorphism kind {kind!r}")
    return g.compose(core).compose(g.inverse())
