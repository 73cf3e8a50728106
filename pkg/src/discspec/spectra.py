"""Spectral predictions and the numerical estimators that cross-check
them: boundary-circle and annulus laws, elliptic root clouds, cocycle
spectral-radius limits, and exploratory truncation probes.

Predicted shapes follow the classification of the inducing automorphism;
every prediction records which law fired and which hypotheses were
verified.  The truncation-matrix machinery is exploratory only and never
feeds a pass/fail verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, NumericalError, PreconditionError
from .moebius import AutomorphismType, MoebiusTransform, classify
from .norms import DiscGrid
from .operators import (Space, TruncationMatrix, Verdict,
                        WeightedCompositionOp, check_bounded, check_invertible,
                        taylor_truncation)
from .symbols import cocycle_eval, cocycle_log_sup

MAX_ROTATION_PERIOD = 1024
_PERIOD_TOL = 1e-10
EQUAL_MODULI_RTOL = 1e-9


@dataclass(frozen=True)
class Circle:
    radius: float


@dataclass(frozen=True)
class Annulus:
    r_min: float
    r_max: float
    exact: bool


@dataclass(frozen=True, eq=False)
class RootSetClosure:
    period: int
    points: np.ndarray


Shape = Union[Circle, Annulus, RootSetClosure]


@dataclass(frozen=True)
class SpectrumPrediction:
    """A predicted spectrum with its provenance and hypothesis audit.

    `assumptions_checked` records whether invertibility held, whether the
    weight lies in the boundary-continuous class, and whether the selfmap
    classification succeeded.
    """

    shape: Shape
    provenance: str
    assumptions_checked: dict


@dataclass(frozen=True)
class SpectralRadiusEstimate:
    """Cocycle sup-roots against the fixed-point prediction.

    `sequence` holds grid values of the n-th root of the cocycle
    supremum for each n in the schedule; `extrapolated` applies one
    Aitken delta-squared step to the tail; `relative_gap` compares the
    raw last value against the prediction and is always reported.
    """

    schedule: tuple
    sequence: tuple
    extrapolated: float
    predicted: float
    relative_gap: float


def detect_rotation_period(phi: MoebiusTransform,
                           max_period: int = MAX_ROTATION_PERIOD
                           ) -> Optional[int]:
    """Smallest m <= max_period with phi_m = identity, else None.

    An elliptic automorphism is periodic exactly when its rotation
    multiplier is a root of unity; candidates from the multiplier are
    confirmed on sample points.  Larger periods are numerically
    indistinguishable from aperiodic rotation and report None.
    """
    info = classify(phi)
    if info.tag is AutomorphismType.IDENTITY:
        return 1
    if info.tag is not AutomorphismType.ELLIPTIC:
        return None
    multiplier = info.fixed_points[0][1]
    power = 1.0 + 0j
    samples = 0.7 * np.exp(2j * np.pi * np.arange(16) / 16)
    for m in range(1, max_period + 1):
        power *= multiplier
        if abs(power - 1.0) < _PERIOD_TOL:
            iterate = phi.iterate(m)
            if np.max(np.abs(iterate(samples) - samples)) < 1e-8:
                return m
    return None


def _exact_roots_of_unity(m: int) -> np.ndarray:
    """exp(2 pi i j / m) with entries snapped to exact +-1, +-i where
    representable, so that half-turn symmetry of root clouds is exact."""
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    for part in (roots.real, roots.imag):
        for target in (-1.0, 0.0, 1.0):
            part[np.abs(part - target) < 1e-14] = target
    return roots


def _assumption_audit(op: WeightedCompositionOp, invertible: bool) -> dict:
    return {
        "invertible": bool(invertible),
        "weight_boundary_continuous": True,  # guaranteed by the weight class
        "classification": True,
    }


def elliptic_root_cloud(op: WeightedCompositionOp,
                        grid: DiscGrid) -> SpectrumPrediction:
    """Sampled m-th roots of the period-m cocycle for a periodic elliptic
    automorphism: the root-set closure law for the spectrum.

    Every emitted point lambda satisfies lambda^m = u_(m)(z) for a grid
    sample z, and the cloud is closed under multiplication by the m-th
    roots of unity by construction.
    """
    info = classify(op.phi)
    if info.tag not in (AutomorphismType.ELLIPTIC, AutomorphismType.IDENTITY):
        raise PreconditionError("root clouds need an elliptic automorphism")
    period = detect_rotation_period(op.phi)
    if period is None:
        raise PreconditionError(
            "aperiodic elliptic rotation: use predict_spectrum")
    verdict = check_bounded(op, grid)
    if not verdict.bounded:
        raise PreconditionError(
            f"operator not certified bounded ({verdict.verdict.value})")

    values = cocycle_eval(op.u, op.phi, period, grid.all_points)
    principal = np.asarray(values, dtype=complex) ** (1.0 / period)
    cloud = np.concatenate([principal * w for w in _exact_roots_of_unity(period)])
    inv = check_invertible(op, grid)
    return SpectrumPrediction(
        shape=RootSetClosure(period=period, points=cloud),
        provenance="elliptic-periodic-root-set",
        assumptions_checked=_assumption_audit(op, inv.invertible),
    )


def cloud_refinement_distance(op: WeightedCompositionOp, grid: DiscGrid,
                              sample_cap: int = 2000) -> float:
    """Symmetric Hausdorff distance between the root cloud on the grid
    and on its refinement: a coverage diagnostic, not a certificate."""
    a = elliptic_root_cloud(op, grid).shape.points
    b = elliptic_root_cloud(op, grid.refine()).shape.points

    def subsample(pts):
        if pts.size <= sample_cap:
            return pts
        idx = np.linspace(0, pts.size - 1, sample_cap).astype(int)
        return pts[idx]

    a, b = subsample(a), subsample(b)
    dist = np.abs(a[:, None] - b[None, :])
    return float(max(dist.min(axis=1).max(), dist.min(axis=0).max()))


def _boundary_weight_values(op: WeightedCompositionOp, info) -> dict:
    out = {}
    if info.tag is AutomorphismType.PARABOLIC:
        out["fixed"] = abs(complex(op.u(info.fixed_points[0][0])))
    elif info.tag is AutomorphismType.HYPERBOLIC:
        out["attractive"] = abs(complex(op.u(info.attractive)))
        out["repulsive"] = abs(complex(op.u(info.repulsive)))
    elif info.tag is AutomorphismType.ELLIPTIC:
        out["fixed"] = abs(complex(op.u(info.fixed_points[0][0])))
    return out


def predict_spectrum(op: WeightedCompositionOp, grid: DiscGrid,
                     equal_moduli_rtol: float = EQUAL_MODULI_RTOL
                     ) -> SpectrumPrediction:
    """Dispatch the spectral laws on the classification of the selfmap.

    Parabolic: the circle |lambda| = |u(a)| at the boundary fixed point.
    Hyperbolic: the annulus between |u(a)| and |u(b)| (inclusion only),
    collapsing to an exact circle on the Bloch space when the two
    boundary moduli agree.  Elliptic: root-set closure for periodic
    rotations (boundedness suffices there), the circle |lambda| = |u(p)|
    at the interior fixed point for aperiodic ones.  Identity selfmap:
    the closure of the weight's image, as a period-1 root set.
    """
    if not isinstance(op.phi, MoebiusTransform):
        raise DomainError("spectral predictions need a Moebius automorphism")
    info = classify(op.phi)

    if info.tag is AutomorphismType.IDENTITY:
        verdict = check_bounded(op, grid)
        if not verdict.bounded:
            raise PreconditionError(
                f"operator not certified bounded ({verdict.verdict.value})")
        points = np.asarray(op.u(grid.all_points), dtype=complex)
        inv = check_invertible(op, grid)
        return SpectrumPrediction(
            shape=RootSetClosure(period=1, points=points),
            provenance="identity-multiplier-image",
            assumptions_checked=_assumption_audit(op, inv.invertible),
        )

    if info.tag is AutomorphismType.ELLIPTIC:
        period = detect_rotation_period(op.phi)
        if period is not None:
            return elliptic_root_cloud(op, grid)

    result = check_invertible(op, grid)
    if not result.invertible:
        raise PreconditionError(
            f"spectral law needs an invertible operator: {result.reason}")
    moduli = _boundary_weight_values(op, info)

    if info.tag is AutomorphismType.PARABOLIC:
        return SpectrumPrediction(
            shape=Circle(radius=moduli["fixed"]),
            provenance="parabolic-boundary-circle",
            assumptions_checked=_assumption_audit(op, True),
        )

    if info.tag is AutomorphismType.HYPERBOLIC:
        lo = min(moduli["attractive"], moduli["repulsive"])
        hi = max(moduli["attractive"], moduli["repulsive"])
        equal = (hi - lo) <= equal_moduli_rtol * max(hi, 1e-300)
        if equal and op.space is Space.BLOCH:
            return SpectrumPrediction(
                shape=Circle(radius=0.5 * (lo + hi)),
                provenance="hyperbolic-equal-moduli-circle",
                assumptions_checked=_assumption_audit(op, True),
            )
        return SpectrumPrediction(
            shape=Annulus(r_min=lo, r_max=hi, exact=False),
            provenance="hyperbolic-annulus",
            assumptions_checked=_assumption_audit(op, True),
        )

    # aperiodic elliptic
    return SpectrumPrediction(
        shape=Circle(radius=moduli["fixed"]),
        provenance="elliptic-aperiodic-circle",
        assumptions_checked=_assumption_audit(op, True),
    )


def _aitken(values: Sequence[float]) -> float:
    """One Aitken delta-squared step on the last three entries, falling
    back to the raw tail when the differences degenerate."""
    if len(values) < 3:
        return float(values[-1])
    x0, x1, x2 = values[-3], values[-2], values[-1]
    denom = x2 - 2.0 * x1 + x0
    if abs(denom) < 1e-14 * max(abs(x2), 1.0):
        return float(x2)
    return float(x2 - (x2 - x1) ** 2 / denom)


def spectral_radius_estimate(op: WeightedCompositionOp,
                             n_schedule: Sequence[int],
                             grid: DiscGrid) -> SpectralRadiusEstimate:
    """Cocycle sup-roots ||u_(n)||^(1/n) against the fixed-point formula.

    The prediction is |u(a)| at the boundary fixed point (parabolic),
    max of the two boundary values (hyperbolic), |u(p)| at the interior
    fixed point (aperiodic elliptic), and the largest root-cloud modulus
    for periodic rotations, where the same limit collapses to
    ||u_(m)||^(1/m).
    """
    if not isinstance(op.phi, MoebiusTransform) or not op.phi.is_disc_automorphism():
        raise DomainError("spectral radius estimation needs an automorphism")
    schedule = tuple(int(n) for n in n_schedule)
    if not schedule or any(n < 1 for n in schedule):
        raise DomainError("schedule must list positive cocycle orders")

    info = classify(op.phi)
    moduli = _boundary_weight_values(op, info)
    if info.tag is AutomorphismType.PARABOLIC:
        predicted = moduli["fixed"]
    elif info.tag is AutomorphismType.HYPERBOLIC:
        predicted = max(moduli.values())
    elif info.tag is AutomorphismType.IDENTITY:
        predicted = float(np.max(np.abs(op.u(grid.all_points))))
    else:
        period = detect_rotation_period(op.phi)
        if period is None:
            predicted = moduli["fixed"]
        else:
            predicted = math.exp(
                cocycle_log_sup(op.u, op.phi, period, grid) / period)

    sequence = tuple(
        math.exp(cocycle_log_sup(op.u, op.phi, n, grid) / n) for n in schedule)
    gap = abs(sequence[-1] - predicted) / max(predicted, 1e-300)
    return SpectralRadiusEstimate(
        schedule=schedule,
        sequence=sequence,
        extrapolated=_aitken(sequence),
        predicted=predicted,
        relative_gap=gap,
    )


def truncation_eigenvalues(matrix: TruncationMatrix) -> np.ndarray:
    """Eigenvalues of the finite section by a dense nonsymmetric solve
    (LAPACK: balancing, Hessenberg reduction, shifted QR)."""
    try:
        return np.linalg.eigvals(matrix.entries)
    except np.linalg.LinAlgError as exc:
        norm = float(np.linalg.norm(matrix.entries))
        raise NumericalError(
            f"eigenvalue iteration failed for truncation order "
            f"{matrix.order} (matrix norm {norm:.3g})") from exc


@dataclass(frozen=True)
class ResolventSample:
    """Resolvent norms of the finite sections at one probe point."""

    point: complex
    region: str  # "inside-annulus" | "boundary" | "outside"
    orders: tuple
    resolvent_norms: tuple

    @property
    def growth_ratio(self) -> float:
        return self.resolvent_norms[-1] / max(self.resolvent_norms[0], 1e-300)


@dataclass(frozen=True)
class ConjectureProbe:
    """Exploratory evidence for the open full-annulus question.

    No pass/fail semantics: resolvent growth across truncation orders is
    suggestive, not probative, and is labeled as such.
    """

    annulus: Annulus
    samples: tuple
    exploratory: bool = True


def conjecture_probe(op: WeightedCompositionOp, lambda_samples: int,
                     grid: DiscGrid,
                     orders: Sequence[int] = (16, 32, 64, 128),
                     rng: Optional[np.random.Generator] = None
                     ) -> ConjectureProbe:
    """Probe the conjectured full annulus for hyperbolic symbols with
    distinct boundary moduli by sweeping resolvent norms of finite
    sections across lambda samples in and around the annulus."""
    info = classify(op.phi)
    if info.tag is not AutomorphismType.HYPERBOLIC:
        raise PreconditionError("the annulus conjecture concerns hyperbolic symbols")
    moduli = _boundary_weight_values(op, info)
    lo, hi = min(moduli.values()), max(moduli.values())
    if (hi - lo) <= EQUAL_MODULI_RTOL * hi:
        raise PreconditionError(
            "equal boundary moduli: the circle law already settles this symbol")
    if lambda_samples < 1:
        raise DomainError("need at least one probe point")

    rng = rng or np.random.default_rng(0)
    orders = tuple(sorted(int(n) for n in orders))
    top = taylor_truncation(op, orders[-1]).entries

    radii = np.linspace(0.6 * lo, hi + 0.6, lambda_samples)
    samples = []
    for r in radii:
        lam = r * np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
        norms = []
        for n in orders:
            section = top[:n, :n]
            smallest = np.linalg.svd(
                lam * np.eye(n) - section, compute_uv=False)[-1]
            norms.append(1.0 / max(smallest, 1e-300))
        if abs(abs(lam) - lo) < 1e-9 or abs(abs(lam) - hi) < 1e-9:
            region = "boundary"
        elif lo < abs(lam) < hi:
            region = "inside-annulus"
        else:
            region = "outside"
        samples.append(ResolventSample(
            point=complex(lam), region=region, orders=orders,
            resolvent_norms=tuple(norms)))
    return ConjectureProbe(annulus=Annulus(lo, hi, False), samples=tuple(samples))
