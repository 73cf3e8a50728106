"""Disc automorphism algebra, classification, and orbit dynamics."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discspec.errors import DomainError
from discspec.moebius import (AutomorphismType, IteratedMap, MoebiusTransform,
                              build_canonical_hyperbolic,
                              build_disc_automorphism,
                              build_parabolic_translation, classify,
                              denjoy_wolff_sequence, hyperbolic_distance,
                              orbit_distance_sequence, random_automorphism)


def _random_disc_points(rng, n, radius=0.95):
    r = np.sqrt(rng.uniform(0.0, radius ** 2, n))
    theta = rng.uniform(0.0, 2 * math.pi, n)
    return r * np.exp(1j * theta)


def test_unit_determinant_after_construction_and_composition():
    rng = np.random.default_rng(0)
    for _ in range(50):
        f = random_automorphism(rng)
        g = random_automorphism(rng)
        assert abs(f.determinant() - 1.0) < 1e-12
        assert abs(f.compose(g).determinant() - 1.0) < 1e-12


def test_singular_coefficients_rejected():
    with pytest.raises(DomainError):
        MoebiusTransform(1.0, 1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        MoebiusTransform(0.0, 0.0, 0.0, 0.0)


def test_build_identity_map():
    phi = build_disc_automorphism(0.0, 0.0)
    z = _random_disc_points(np.random.default_rng(1), 20)
    assert np.max(np.abs(phi(z) - z)) < 1e-14


def test_build_rejects_exterior_parameter():
    with pytest.raises(DomainError, match="not a disc automorphism"):
        build_disc_automorphism(0.3, 1.0)
    with pytest.raises(DomainError, match="not a disc automorphism"):
        build_disc_automorphism(0.3, 1.2 + 0.1j)


def test_rotation_by_pi_has_period_two():
    phi = build_disc_automorphism(math.pi, 0.0)
    z = _random_disc_points(np.random.default_rng(2), 20)
    assert np.max(np.abs(phi(z) + z)) < 1e-14
    assert np.max(np.abs(phi(phi(z)) - z)) < 1e-14


def test_canonical_hyperbolic_equals_cleared_fraction():
    # mu = 1/2 gives ((3/2)z + 1/2)/((1/2)z + 3/2) = (3z + 1)/(z + 3)
    psi = build_canonical_hyperbolic(0.5)
    z = _random_disc_points(np.random.default_rng(3), 50)
    expected = (3.0 * z + 1.0) / (z + 3.0)
    assert np.max(np.abs(psi(z) - expected)) < 1e-14


def test_canonical_hyperbolic_values():
    psi = build_canonical_hyperbolic(0.5)
    assert abs(psi(0.0) - 1.0 / 3.0) < 1e-15
    assert abs(psi(1.0) - 1.0) < 1e-15
    assert abs(psi(-1.0) + 1.0) < 1e-15


@pytest.mark.parametrize("mu", [0.1, 0.3, 0.5, 0.8, 0.95])
def test_canonical_hyperbolic_derivative_at_one(mu):
    psi = build_canonical_hyperbolic(mu)
    assert abs(psi.derivative(1.0) - mu) < 1e-13


def test_canonical_hyperbolic_rejects_bad_multiplier():
    for mu in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(DomainError):
            build_canonical_hyperbolic(mu)


def test_parabolic_translation_matches_cayley_conjugation():
    # translation by 1 conjugated through i(1+z)/(1-z) is
    # ((2i-1)z + 1)/(-z + 1 + 2i)
    phi = build_parabolic_translation(1.0)
    z = _random_disc_points(np.random.default_rng(4), 50)
    expected = ((2j - 1) * z + 1) / (-z + 1 + 2j)
    assert np.max(np.abs(phi(z) - expected)) < 1e-14
    assert abs(phi(1.0) - 1.0) < 1e-15
    assert abs(phi.derivative(1.0) - 1.0) < 1e-14


def test_classify_rotation_is_elliptic():
    phi = build_disc_automorphism(math.pi / 3, 0.0)
    info = classify(phi)
    assert info.tag is AutomorphismType.ELLIPTIC
    location, derivative = info.fixed_points[0]
    assert abs(location) < 1e-14
    assert abs(derivative - cmath.exp(1j * math.pi / 3)) < 1e-14


def test_classify_canonical_hyperbolic():
    info = classify(build_canonical_hyperbolic(0.5))
    assert info.tag is AutomorphismType.HYPERBOLIC
    assert abs(info.attractive - 1.0) < 1e-12
    assert abs(info.repulsive + 1.0) < 1e-12
    assert abs(info.multiplier - 0.5) < 1e-12
    derivs = dict(info.fixed_points)
    assert abs(derivs[info.repulsive] - 2.0) < 1e-12
    # derivative product identity at the two boundary fixed points
    assert abs(derivs[info.attractive] * derivs[info.repulsive] - 1.0) < 1e-9


def test_classify_parabolic_cayley():
    info = classify(build_parabolic_translation(1.0))
    assert info.tag is AutomorphismType.PARABOLIC
    location, derivative = info.fixed_points[0]
    assert abs(location - 1.0) < 1e-12
    assert abs(abs(location) - 1.0) < 1e-15  # snapped to the circle
    assert abs(derivative - 1.0) < 1e-9


def test_classify_identity():
    info = classify(build_disc_automorphism(0.0, 0.0))
    assert info.tag is AutomorphismType.IDENTITY
    assert info.fixed_points == ()


def test_classify_rejects_non_automorphism():
    expanding = MoebiusTransform(2.0, 0.0, 0.0, 1.0)
    with pytest.raises(DomainError, match="not a disc automorphism"):
        classify(expanding)


def test_classification_matches_root_finding_oracle():
    # fixed points from a companion-matrix root solve; the tag must agree
    # with the derivative moduli there
    rng = np.random.default_rng(5)
    for _ in range(200):
        kind = rng.choice([None, "hyperbolic", "parabolic", "elliptic"])
        phi = random_automorphism(rng, kind)
        info = classify(phi)
        if info.tag is AutomorphismType.IDENTITY:
            continue
        if abs(phi.c) < 1e-13:
            roots = [0j]
        else:
            roots = np.roots([phi.c, phi.d - phi.a, -phi.b])
        moduli = sorted(abs(abs(r) - 1.0) for r in roots)
        derivs = [abs(phi.derivative(r)) for r in roots]
        if info.tag is AutomorphismType.HYPERBOLIC:
            assert all(m < 1e-6 for m in moduli)
            assert min(derivs) < 1.0 - 1e-6 and max(derivs) > 1.0 + 1e-6
        elif info.tag is AutomorphismType.PARABOLIC:
            # double root on the boundary with derivative 1
            assert all(m < 1e-4 for m in moduli)
            assert all(abs(d - 1.0) < 1e-4 for d in derivs)
        else:
            interior = [r for r in roots if abs(r) < 1.0 - 1e-9]
            assert len(interior) == 1
            assert abs(abs(phi.derivative(interior[0])) - 1.0) < 1e-9


def test_iterate_zero_is_identity():
    phi = build_canonical_hyperbolic(0.3)
    ident = phi.iterate(0)
    z = _random_disc_points(np.random.default_rng(6), 20)
    assert np.max(np.abs(ident(z) - z)) < 1e-14


def test_iterate_rotation_is_additive():
    theta = 0.7
    phi = build_disc_automorphism(theta, 0.0)
    z = _random_disc_points(np.random.default_rng(7), 20)
    for n in (1, 2, 5, 11):
        expected = np.exp(1j * n * theta) * z
        assert np.max(np.abs(phi.iterate(n)(z) - expected)) < 1e-12


def test_iterate_canonical_twice_at_origin():
    # psi(1/3) = (3*(1/3) + 1)/((1/3) + 3) = 3/5
    psi2 = build_canonical_hyperbolic(0.5).iterate(2)
    assert abs(psi2(0.0) - 0.6) < 1e-14


def test_iterate_group_law():
    rng = np.random.default_rng(8)
    z = _random_disc_points(rng, 30)
    for _ in range(20):
        phi = random_automorphism(rng)
        m, n = int(rng.integers(0, 9)), int(rng.integers(0, 9))
        lhs = phi.iterate(m + n)(z)
        rhs = phi.iterate(m)(phi.iterate(n)(z))
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_inverse_composes_to_identity_on_grid():
    rng = np.random.default_rng(9)
    z = _random_disc_points(rng, 100)
    for _ in range(20):
        phi = random_automorphism(rng)
        roundtrip = phi.compose(phi.inverse())
        assert np.max(np.abs(roundtrip(z) - z)) < 1e-10


def test_automorphism_derivative_identity():
    # |phi'(z)| = (1 - |phi(z)|^2)/(1 - |z|^2) for automorphisms
    rng = np.random.default_rng(10)
    z = _random_disc_points(rng, 200)
    for _ in range(20):
        phi = random_automorphism(rng)
        lhs = np.abs(phi.derivative(z))
        rhs = (1.0 - np.abs(phi(z)) ** 2) / (1.0 - np.abs(z) ** 2)
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_automorphism_boundary_invariants():
    rng = np.random.default_rng(11)
    circle = np.exp(2j * np.pi * np.arange(64) / 64)
    inside = _random_disc_points(rng, 64)
    for _ in range(20):
        phi = random_automorphism(rng)
        assert np.max(np.abs(np.abs(phi(circle)) - 1.0)) < 1e-9
        assert np.max(np.abs(phi(inside))) < 1.0


def test_hyperbolic_distance_basic_values():
    assert hyperbolic_distance(0.0, 0.0) == 0.0
    assert abs(hyperbolic_distance(0.0, 0.5) - 0.5 * math.log(3.0)) < 1e-12
    assert abs(hyperbolic_distance(0.0, 0.5) - 0.549306) < 1e-6


def test_hyperbolic_distance_rejects_boundary():
    with pytest.raises(DomainError):
        hyperbolic_distance(1.0, 0.0)
    with pytest.raises(DomainError):
        hyperbolic_distance(0.0, -1.0)


def test_hyperbolic_distance_invariance_example():
    psi = build_canonical_hyperbolic(0.5)
    z, w = 0.2j, -0.3
    lhs = hyperbolic_distance(complex(psi(z)), complex(psi(w)))
    assert abs(lhs - hyperbolic_distance(z, w)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 10 ** 6))
def test_hyperbolic_distance_moebius_invariance(seed_a, seed_b):
    rng = np.random.default_rng(seed_a + (seed_b << 20))
    z, w = _random_disc_points(rng, 2, radius=0.9)
    phi = random_automorphism(rng)
    base = hyperbolic_distance(complex(z), complex(w))
    moved = hyperbolic_distance(complex(phi(z)), complex(phi(w)))
    assert abs(base - moved) < 1e-10
    assert base >= 0.0
    assert abs(base - hyperbolic_distance(complex(w), complex(z))) < 1e-12


def test_denjoy_wolff_first_term_is_gap():
    psi = build_canonical_hyperbolic(0.4)
    seq = denjoy_wolff_sequence(psi, 1)
    assert abs(seq[0] - (1.0 - abs(psi(0.0)))) < 1e-14


@pytest.mark.parametrize("mu", [0.3, 0.5, 0.7])
def test_denjoy_wolff_hyperbolic_limit(mu):
    seq = denjoy_wolff_sequence(build_canonical_hyperbolic(mu), 200)
    assert abs(seq[-1] - mu) < 1e-2


def test_denjoy_wolff_parabolic_limit():
    seq = denjoy_wolff_sequence(build_parabolic_translation(1.0), 400)
    assert abs(seq[-1] - 1.0) < 5e-2


def test_denjoy_wolff_rejects_elliptic():
    with pytest.raises(DomainError, match="Denjoy-Wolff"):
        denjoy_wolff_sequence(build_disc_automorphism(1.0, 0.0), 10)
    with pytest.raises(DomainError, match="Denjoy-Wolff"):
        denjoy_wolff_sequence(build_disc_automorphism(0.0, 0.0), 10)


def test_orbit_distance_chain_subadditive():
    rng = np.random.default_rng(12)
    for _ in range(10):
        phi = random_automorphism(rng)
        rho_one = hyperbolic_distance(complex(phi(0j)), 0j)
        seq = orbit_distance_sequence(phi, 100)
        for n, rho_n in enumerate(seq, start=1):
            assert rho_n <= n * rho_one + 1e-10


def test_orbit_distance_matches_direct_formula_when_shallow():
    phi = random_automorphism(np.random.default_rng(13))
    seq = orbit_distance_sequence(phi, 10)
    z = 0j
    for n in range(1, 11):
        z = complex(phi(z))
        if abs(z) < 0.999999:
            assert abs(seq[n - 1] - hyperbolic_distance(z, 0j)) < 1e-10


def test_iterated_map_matches_coefficient_iterate():
    rng = np.random.default_rng(14)
    z = _random_disc_points(rng, 30)
    phi = random_automorphism(rng)
    for n in (0, 1, 3, 7):
        pointwise = IteratedMap(phi, n)
        direct = phi.iterate(n)
        assert np.max(np.abs(pointwise(z) - direct(z))) < 1e-12
        assert np.max(np.abs(pointwise.derivative(z) - direct.derivative(z))) < 1e-10


def test_iterated_map_stable_at_depth():
    # The canonical family is a semigroup, so the 50-th iterate of
    # psi_{1/2} is exactly psi_{2^-50}: a closed-form oracle at a depth
    # where the unit-determinant coefficient matrix is cancellation-dead.
    phi = build_canonical_hyperbolic(0.5)
    deep = IteratedMap(phi, 50)
    oracle = build_canonical_hyperbolic(2.0 ** -50)
    z = _random_disc_points(np.random.default_rng(15), 20, radius=0.8)
    assert np.max(np.abs(deep(z) - oracle(z))) < 1e-12
    assert np.max(np.abs(deep.derivative(z) / oracle.derivative(z) - 1.0)) < 1e-10
