"""The reproduction suite behind the `verify` command.

Each check compares a predicted value against an observed one at a
stated tolerance and carries a provenance tag naming the law it
exercises.  Checks are deterministic given the seed; tolerance overrides
come from the experiment configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .moebius import (build_canonical_hyperbolic, build_disc_automorphism,
                      build_parabolic_translation, classify,
                      denjoy_wolff_sequence, hyperbolic_distance,
                      orbit_distance_sequence, random_automorphism)
from .norms import (DiscGrid, GROWTH_ENVELOPE_ALPHA, QuadratureRule,
                    bloch_norm, condition_suprema, dirichlet_norm,
                    log_growth_ratio)
from .operators import (Space, WeightedCompositionOp,
                        binomial_identity_residual, check_invertible,
                        composition_norm_bound, composition_norm_lower_bound)
from .spectra import (Annulus, Circle, elliptic_root_cloud, predict_spectrum,
                      spectral_radius_estimate)
from .symbols import (BlaschkeProduct, LogWeightFunction, RationalSymbol,
                      blaschke_ratio_bound)


@dataclass(frozen=True)
class CheckRecord:
    """One verified claim: what was predicted, what was observed, and
    whether the gap respects the tolerance."""

    name: str
    provenance: str
    predicted: float
    observed: float
    tolerance: float
    passed: bool
    detail: str = ""


def _record(name: str, provenance: str, predicted: float, observed: float,
            tolerance: float, detail: str = "") -> CheckRecord:
    gap = abs(observed - predicted)
    return CheckRecord(name, provenance, float(predicted), float(observed),
                       float(tolerance), bool(gap <= tolerance), detail)


def _bound_record(name: str, provenance: str, excess: float,
                  tolerance: float, detail: str = "") -> CheckRecord:
    """A one-sided check: `excess` is observed minus allowed, so any
    value at or below the tolerance passes."""
    return CheckRecord(name, provenance, 0.0, float(excess), float(tolerance),
                       bool(excess <= tolerance), detail)


def _weight_two_plus_z() -> RationalSymbol:
    return RationalSymbol([2.0, 1.0])


def _random_bounded_weight(rng: np.random.Generator) -> RationalSymbol:
    """A polynomial weight bounded away from zero on the closed disc."""
    coeffs = [2.5 + 0j]
    budget = 1.0
    for _ in range(3):
        c = budget * 0.3 * (rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1))
        coeffs.append(c)
    return RationalSymbol(coeffs)


def _random_blaschke(rng: np.random.Generator) -> BlaschkeProduct:
    degree = int(rng.integers(1, 6))
    zeros = [math.sqrt(rng.uniform(0.0, 0.64))
             * np.exp(1j * rng.uniform(0.0, 2 * math.pi))
             for _ in range(degree)]
    return BlaschkeProduct(tuple(zeros))


# ---------------------------------------------------------------------------
# individual checks; each returns a list of CheckRecords

def check_denjoy_wolff_limits(rng, grid) -> list:
    records = []
    for mu in (0.3, 0.5, 0.7):
        seq = denjoy_wolff_sequence(build_canonical_hyperbolic(mu), 200)
        records.append(_record(
            f"denjoy-wolff-limit-hyperbolic-mu{mu:g}", "boundary-orbit-rate",
            predicted=mu, observed=seq[-1], tolerance=1e-2))
    seq = denjoy_wolff_sequence(build_parabolic_translation(), 400)
    records.append(_record(
        "denjoy-wolff-limit-parabolic", "boundary-orbit-rate",
        predicted=1.0, observed=seq[-1], tolerance=5e-2))
    return records


def check_hyperbolic_radius(rng, grid) -> list:
    op = WeightedCompositionOp(_weight_two_plus_z(),
                               build_canonical_hyperbolic(0.5), Space.BLOCH)
    est = spectral_radius_estimate(op, [25, 50, 100], grid)
    return [_record("hyperbolic-radius", "cocycle-sup-limit-hyperbolic",
                    predicted=3.0, observed=est.sequence[-1],
                    tolerance=0.02 * 3.0)]


def check_parabolic_radius(rng, grid) -> list:
    op = WeightedCompositionOp(_weight_two_plus_z(),
                               build_parabolic_translation(), Space.BLOCH)
    est = spectral_radius_estimate(op, [25, 50, 100], grid)
    records = [_record("parabolic-radius", "cocycle-sup-limit-parabolic",
                       predicted=3.0, observed=est.sequence[-1],
                       tolerance=0.05 * 3.0)]
    prediction = predict_spectrum(op, grid)
    radius = prediction.shape.radius if isinstance(prediction.shape, Circle) else -1.0
    records.append(_record("parabolic-circle-radius",
                           "parabolic-boundary-circle",
                           predicted=3.0, observed=radius, tolerance=1e-9))
    return records


def check_elliptic_root_cloud(rng, grid) -> list:
    op = WeightedCompositionOp(_weight_two_plus_z(),
                               build_disc_automorphism(math.pi, 0.0),
                               Space.BLOCH)
    cloud = elliptic_root_cloud(op, grid).shape.points
    moduli = np.abs(cloud)
    excess = max(math.sqrt(3.0) - float(moduli.min()),
                 float(moduli.max()) - math.sqrt(5.0))
    records = [_bound_record("elliptic-root-cloud-bounds",
                             "elliptic-periodic-root-set",
                             excess=excess, tolerance=1e-9)]
    contains = max(float(np.min(np.abs(cloud - 2.0))),
                   float(np.min(np.abs(cloud + 2.0))))
    records.append(_record("elliptic-root-cloud-contains-pm2",
                           "elliptic-periodic-root-set",
                           predicted=0.0, observed=contains, tolerance=1e-6))
    half = cloud.size // 2
    symmetric = float(np.max(np.abs(cloud[:half] + cloud[half:])))
    records.append(_record("elliptic-root-cloud-half-turn-symmetry",
                           "elliptic-periodic-root-set",
                           predicted=0.0, observed=symmetric, tolerance=0.0))
    return records


def check_binomial_identity(rng, grid) -> list:
    worst = 0.0
    for _ in range(100):
        phi = random_automorphism(rng)
        u = _random_bounded_weight(rng)
        op = WeightedCompositionOp(u, phi, Space.BLOCH)
        lam = 3.0 * np.exp(1j * rng.uniform(0, 2 * math.pi))
        f = RationalSymbol([rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
                            for _ in range(3)])
        z = math.sqrt(rng.uniform(0, 0.81)) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        worst = max(worst, binomial_identity_residual(op, lam, 10, f, z))
    return [_record("binomial-power-expansion", "operator-power-cocycle",
                    predicted=0.0, observed=worst, tolerance=1e-9)]


def check_orbit_distance_chain(rng, grid) -> list:
    worst = -math.inf
    for _ in range(50):
        phi = random_automorphism(rng)
        rho1 = hyperbolic_distance(complex(phi(0j)), 0j)
        seq = orbit_distance_sequence(phi, 100)
        for n, rho_n in enumerate(seq, start=1):
            worst = max(worst, rho_n - n * rho1)
    return [_bound_record("orbit-distance-chain", "composition-norm-chain",
                          excess=worst, tolerance=1e-10)]


def check_composition_norm_sandwich(rng, grid) -> list:
    small = DiscGrid(radial_levels=8, beta=0.5)
    worst_excess = -math.inf
    lowest = math.inf
    for _ in range(8):
        phi = random_automorphism(rng)
        for n in (1, 5, 20, 50):
            observed = composition_norm_lower_bound(phi, n, Space.BLOCH, small)
            bound = composition_norm_bound(phi, n, Space.BLOCH)
            worst_excess = max(worst_excess, observed - bound)
            lowest = min(lowest, observed)
    return [
        _bound_record("composition-norm-upper", "composition-norm-chain",
                      excess=worst_excess, tolerance=1e-9),
        _record("composition-norm-attains-identity", "composition-norm-chain",
                predicted=1.0, observed=min(lowest, 1.0), tolerance=1e-9),
    ]


def check_growth_envelope(rng, grid) -> list:
    family = [LogWeightFunction(0.9), LogWeightFunction(0.5 + 0.3j),
              RationalSymbol([1.0]), RationalSymbol([0.2, 1.0, -0.5])]
    for _ in range(10):
        family.append(RationalSymbol(
            [rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1) for _ in range(5)]))
    alpha_needed = 0.0
    for f in family:
        norm = bloch_norm(f, grid).value
        if norm > 0:
            alpha_needed = max(alpha_needed, log_growth_ratio(f, grid) / norm)
    return [_bound_record("growth-envelope-ratio", "bloch-growth-envelope",
                          excess=alpha_needed - GROWTH_ENVELOPE_ALPHA,
                          tolerance=1e-9,
                          detail=f"needed alpha {alpha_needed:.6f}")]


def check_condition_suprema_identity(rng, grid) -> list:
    phi = build_canonical_hyperbolic(0.5)
    sup = condition_suprema(RationalSymbol([1.0]), phi, grid)
    records = [
        _record("unweighted-conditions-c25", "boundedness-suprema",
                predicted=1.0, observed=sup.c25.value, tolerance=1e-9),
        _record("unweighted-conditions-c24", "boundedness-suprema",
                predicted=0.0, observed=sup.c24.value, tolerance=1e-12),
        _record("unweighted-conditions-c26", "boundedness-suprema",
                predicted=0.0, observed=sup.c26.value, tolerance=1e-12),
    ]
    return records


def check_blaschke_bound(rng, grid) -> list:
    worst = -math.inf
    z = grid.interior_points
    gap = 1.0 - np.abs(z) ** 2
    for _ in range(20):
        b = _random_blaschke(rng)
        ratio = (1.0 - np.abs(b(z)) ** 2) / gap
        worst = max(worst, float(np.max(ratio)) - blaschke_ratio_bound(b))
    return [_bound_record("blaschke-derivative-ratio-bound",
                          "blaschke-factor-sum",
                          excess=worst, tolerance=1e-9)]


def check_inverse_roundtrip(rng, grid) -> list:
    grid = DiscGrid(radial_levels=8, beta=0.5)
    worst_identity = 0.0
    worst_duality = 0.0
    for _ in range(20):
        phi = random_automorphism(rng)
        u = _random_bounded_weight(rng)
        op = WeightedCompositionOp(u, phi, Space.BLOCH)
        result = check_invertible(op, grid)
        if not result.invertible:
            continue
        inv = result.inverse
        for _ in range(50):
            f = RationalSymbol([rng.uniform(-1, 1) + 1j * rng.uniform(-1, 1)
                                for _ in range(3)])
            z = (math.sqrt(rng.uniform(0, 0.9))
                 * np.exp(1j * rng.uniform(0, 2 * math.pi)))
            fwd = op.apply(lambda w: inv.apply(f, w), z)
            back = inv.apply(lambda w: op.apply(f, w), z)
            target = complex(f(z))
            worst_identity = max(worst_identity, abs(fwd - target),
                                 abs(back - target))
        shape = predict_spectrum(op, grid).shape
        inv_shape = predict_spectrum(inv, grid).shape
        if isinstance(shape, Circle) and isinstance(inv_shape, Circle):
            worst_duality = max(worst_duality,
                                abs(inv_shape.radius - 1.0 / shape.radius))
        elif isinstance(shape, Annulus) and isinstance(inv_shape, Annulus):
            worst_duality = max(
                worst_duality,
                abs(inv_shape.r_min - 1.0 / shape.r_max),
                abs(inv_shape.r_max - 1.0 / shape.r_min))
    return [
        _record("inverse-formula-roundtrip", "inverse-weighted-composition",
                predicted=0.0, observed=worst_identity, tolerance=1e-9),
        _record("spectrum-reciprocal-duality", "inverse-weighted-composition",
                predicted=0.0, observed=worst_duality, tolerance=1e-9),
    ]


def check_dirichlet_norms(rng, grid) -> list:
    rule = QuadratureRule(radial_order=32, angular_count=128)
    worst = 0.0
    for n in range(1, 21):
        est = dirichlet_norm(RationalSymbol.monomial(n), rule)
        worst = max(worst, abs(est.value - math.sqrt(n)))
    records = [_record("dirichlet-monomial-norms", "dirichlet-energy",
                       predicted=0.0, observed=worst, tolerance=1e-8)]

    psi = build_canonical_hyperbolic(0.5)
    worst_excess = -math.inf
    for j in range(0, 51, 5):
        observed = composition_norm_lower_bound(psi, j, Space.DIRICHLET)
        bound = composition_norm_bound(psi, j, Space.DIRICHLET)
        worst_excess = max(worst_excess, observed - bound)
    records.append(_bound_record("dirichlet-composition-bound",
                                 "dirichlet-composition-growth",
                                 excess=worst_excess, tolerance=1e-12))
    return records


def check_unweighted_radius(rng, grid) -> list:
    one = RationalSymbol([1.0])
    worst = 0.0
    for _ in range(20):
        phi = random_automorphism(rng)
        for space in (Space.BLOCH, Space.DIRICHLET):
            est = spectral_radius_estimate(
                WeightedCompositionOp(one, phi, space), [1, 5, 25], grid)
            worst = max(worst, max(abs(v - 1.0) for v in est.sequence))
    return [_record("unweighted-radius-exact", "unimodular-cocycle",
                    predicted=0.0, observed=worst, tolerance=0.0)]


_CHECKS: dict = {
    "denjoy-wolff": check_denjoy_wolff_limits,
    "hyperbolic-radius": check_hyperbolic_radius,
    "parabolic-radius": check_parabolic_radius,
    "elliptic-root-cloud": check_elliptic_root_cloud,
    "binomial-identity": check_binomial_identity,
    "orbit-distance-chain": check_orbit_distance_chain,
    "composition-norm-sandwich": check_composition_norm_sandwich,
    "growth-envelope": check_growth_envelope,
    "condition-suprema": check_condition_suprema_identity,
    "blaschke-bound": check_blaschke_bound,
    "inverse-roundtrip": check_inverse_roundtrip,
    "dirichlet-norms": check_dirichlet_norms,
    "unweighted-radius": check_unweighted_radius,
}


def available_checks() -> list:
    return sorted(_CHECKS)


def run_verification(grid: Optional[DiscGrid] = None, seed: int = 0,
                     tolerances: Optional[dict] = None,
                     checks: Optional[Sequence[str]] = None) -> list:
    """Run the reproduction suite and return its records.

    `tolerances` overrides individual record tolerances by record name;
    `checks` restricts the run to the named check groups.
    """
    grid = grid or DiscGrid(radial_levels=12, beta=0.75, include_boundary=True)
    tolerances = tolerances or {}
    names = list(checks) if checks is not None else available_checks()
    records = []
    for name in names:
        if name not in _CHECKS:
            raise KeyError(f"unknown check group {name!r}")
        rng = np.random.default_rng(seed)
        for rec in _CHECKS[name](rng, grid):
            if rec.name in tolerances:
                tol = float(tolerances[rec.name])
                rec = CheckRecord(rec.name, rec.provenance, rec.predicted,
                                  rec.observed, tol,
                                  abs(rec.observed - rec.predicted) <= tol,
                                  rec.detail)
            records.append(rec)
    return records
