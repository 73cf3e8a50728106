"""Rational weights, Blaschke products, log test functions, cocycles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from discspec.errors import DomainError
from discspec.moebius import (build_canonical_hyperbolic,
                              build_disc_automorphism,
                              build_parabolic_translation,
                              random_automorphism)
from discspec.norms import DiscGrid, bloch_norm
from discspec.symbols import (BlaschkeProduct, LogWeightFunction,
                              RationalSymbol, blaschke_ratio_bound,
                              cocycle_eval, cocycle_sup, compose_with_moebius,
                              inf_modulus)


def _horner(coeffs, z):
    acc = 0j
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _random_disc_points(rng, n, radius=0.95):
    r = np.sqrt(rng.uniform(0.0, radius ** 2, n))
    return r * np.exp(1j * rng.uniform(0.0, 2 * math.pi, n))


# -- RationalSymbol ---------------------------------------------------------

def test_pole_inside_disc_rejected():
    with pytest.raises(DomainError, match="pole"):
        RationalSymbol([1.0], [1.0, -2.0])  # pole at 1/2
    with pytest.raises(DomainError, match="pole"):
        RationalSymbol([1.0], [-1.0, 1.0])  # pole at 1, on the circle
    RationalSymbol([1.0], [2.0, -1.0])  # pole at 2 is fine


def test_evaluation_matches_horner():
    rng = np.random.default_rng(0)
    num = rng.normal(size=4) + 1j * rng.normal(size=4)
    den = np.array([3.0, 0.5, 0.25])  # roots outside
    u = RationalSymbol(num, den)
    for z in _random_disc_points(rng, 20):
        expected = _horner(num, z) / _horner(den, z)
        assert abs(u(z) - expected) < 1e-12


def test_symbol_eval_examples():
    u = RationalSymbol([2.0, 1.0])
    assert abs(u.eval(0.0, 0) - 2.0) < 1e-15
    for z in (0.0, 0.5j, -0.7):
        assert abs(u.eval(z, 1) - 1.0) < 1e-15
    geom = RationalSymbol([1.0], [2.0, -1.0])  # 1/(2 - z)
    assert abs(geom.eval(1.0, 1) - 1.0) < 1e-14


def test_symbol_eval_rejects_exterior_and_bad_order():
    u = RationalSymbol([2.0, 1.0])
    with pytest.raises(DomainError):
        u(1.5)
    with pytest.raises(DomainError):
        u.eval(0.0, 2)


def test_reciprocal_requires_zero_free_weight():
    u = RationalSymbol([2.0, 1.0])
    recip = u.reciprocal()
    z = _random_disc_points(np.random.default_rng(1), 20)
    assert np.max(np.abs(recip(z) * u(z) - 1.0)) < 1e-13
    with pytest.raises(DomainError):
        RationalSymbol([0.0, 1.0]).reciprocal()  # u(0) = 0


# -- composition with Moebius maps -----------------------------------------

def test_compose_identity_weight_reproduces_map():
    psi = build_canonical_hyperbolic(0.5)
    composed = compose_with_moebius(RationalSymbol([0.0, 1.0]), psi)
    z = _random_disc_points(np.random.default_rng(2), 50)
    assert np.max(np.abs(composed(z) - psi(z))) < 1e-13


def test_compose_affine_weight_hand_algebra():
    # 2 + psi_{1/2}(z) = (2(z+3) + (3z+1))/(z+3) = (5z+7)/(z+3)
    psi = build_canonical_hyperbolic(0.5)
    composed = compose_with_moebius(RationalSymbol([2.0, 1.0]), psi)
    z = _random_disc_points(np.random.default_rng(3), 50)
    expected = (5.0 * z + 7.0) / (z + 3.0)
    assert np.max(np.abs(composed(z) - expected)) < 1e-11


def test_compose_constant_weight_invariant():
    phi = random_automorphism(np.random.default_rng(4))
    composed = compose_with_moebius(RationalSymbol([3.0 - 1j]), phi)
    z = _random_disc_points(np.random.default_rng(5), 20)
    assert np.max(np.abs(composed(z) - (3.0 - 1j))) < 1e-13


def test_compose_agrees_with_pointwise_composition():
    rng = np.random.default_rng(6)
    u = RationalSymbol(rng.normal(size=4) + 1j * rng.normal(size=4),
                       [3.0, 1.0, 0.5])
    for _ in range(10):
        phi = random_automorphism(rng)
        composed = compose_with_moebius(u, phi)
        z = _random_disc_points(rng, 30)
        assert np.max(np.abs(composed(z) - u(phi(z)))) < 1e-11


def test_compose_associates_with_iterates():
    rng = np.random.default_rng(7)
    u = RationalSymbol([1.0, 0.5, 0.25j])
    phi = random_automorphism(rng)
    z = _random_disc_points(rng, 30)
    for m, n in ((1, 2), (3, 4), (2, 5)):
        lhs = compose_with_moebius(
            compose_with_moebius(u, phi.iterate(m)), phi.iterate(n))
        rhs = compose_with_moebius(u, phi.iterate(m + n))
        assert np.max(np.abs(lhs(z) - rhs(z))) < 1e-10


# -- cocycles ---------------------------------------------------------------

def test_cocycle_order_zero_is_one():
    u = RationalSymbol([2.0, 1.0])
    phi = build_canonical_hyperbolic(0.5)
    z = _random_disc_points(np.random.default_rng(8), 20)
    assert np.max(np.abs(cocycle_eval(u, phi, 0, z) - 1.0)) == 0.0


def test_cocycle_collapses_at_fixed_point():
    u = RationalSymbol([2.0, 1.0, -0.3])
    phi = build_disc_automorphism(0.9, 0.0)  # fixes 0
    for n in (1, 3, 10):
        assert abs(cocycle_eval(u, phi, n, 0.0) - complex(u(0.0)) ** n) < 1e-12


def test_cocycle_hand_value():
    # u(0) * u(psi(0)) = 2 * (2 + 1/3) = 14/3
    u = RationalSymbol([2.0, 1.0])
    psi = build_canonical_hyperbolic(0.5)
    assert abs(cocycle_eval(u, psi, 2, 0.0) - 14.0 / 3.0) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 10 ** 6))
def test_cocycle_multiplicativity(m, n, seed):
    rng = np.random.default_rng(seed)
    u = RationalSymbol([2.0, 0.4, 0.2j])
    phi = random_automorphism(rng)
    z = complex(_random_disc_points(rng, 1)[0])
    lhs = cocycle_eval(u, phi, m + n, z)
    zm = complex(phi.iterate(m)(z))
    rhs = cocycle_eval(u, phi, m, z) * cocycle_eval(u, phi, n, zm)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


def test_cocycle_sup_constant_weight():
    u = RationalSymbol([1.5j])
    phi = build_canonical_hyperbolic(0.5)
    grid = DiscGrid(6, 0.5, True)
    for n in (1, 5, 20):
        assert abs(cocycle_sup(u, phi, n, grid) - 1.5 ** n) < 1e-9 * 1.5 ** n


def test_cocycle_sup_hyperbolic_limit():
    # limit of the sup root is max{|u(1)|, |u(-1)|} = 3
    u = RationalSymbol([2.0, 1.0])
    psi = build_canonical_hyperbolic(0.5)
    grid = DiscGrid(12, 0.75, True)
    root = cocycle_sup(u, psi, 100, grid) ** (1.0 / 100.0)
    assert abs(root - 3.0) < 0.02 * 3.0


def test_cocycle_sup_parabolic_limit():
    # unique boundary fixed point 1: the limit is |u(1)| = 3
    u = RationalSymbol([2.0, 1.0])
    phi = build_parabolic_translation(1.0)
    grid = DiscGrid(12, 0.75, True)
    root = cocycle_sup(u, phi, 100, grid) ** (1.0 / 100.0)
    assert abs(root - 3.0) < 0.05 * 3.0


# -- Blaschke products ------------------------------------------------------

def test_blaschke_boundary_modulus():
    rng = np.random.default_rng(9)
    theta = np.exp(2j * np.pi * np.arange(1024) / 1024)
    for _ in range(10):
        zeros = _random_disc_points(rng, int(rng.integers(1, 6)), radius=0.8)
        b = BlaschkeProduct(tuple(zeros))
        assert np.max(np.abs(np.abs(b(theta)) - 1.0)) < 1e-9


def test_blaschke_contracts_interior():
    rng = np.random.default_rng(10)
    z = _random_disc_points(rng, 100)
    b = BlaschkeProduct((0.3, -0.5j, 0.1 + 0.2j))
    assert np.max(np.abs(b(z))) < 1.0


def test_blaschke_rejects_bad_zeros():
    with pytest.raises(DomainError):
        BlaschkeProduct((1.0,))
    with pytest.raises(DomainError):
        BlaschkeProduct(())


def test_blaschke_ratio_bound_examples():
    assert blaschke_ratio_bound(BlaschkeProduct((0.0,))) == 1.0
    assert abs(blaschke_ratio_bound(BlaschkeProduct((0.5,))) - 3.0) < 1e-15
    assert abs(blaschke_ratio_bound(BlaschkeProduct((0.0, 0.5))) - 4.0) < 1e-15


def test_blaschke_ratio_bound_holds_on_grid():
    rng = np.random.default_rng(11)
    grid = DiscGrid(8, 0.5)
    z = grid.interior_points
    gap = 1.0 - np.abs(z) ** 2
    for _ in range(20):
        zeros = _random_disc_points(rng, int(rng.integers(1, 6)), radius=0.8)
        b = BlaschkeProduct(tuple(zeros))
        ratio = (1.0 - np.abs(b(z)) ** 2) / gap
        assert np.max(ratio) <= blaschke_ratio_bound(b) + 1e-9


def test_blaschke_single_zero_at_origin_is_identity_factor():
    b = BlaschkeProduct((0.0,))
    z = _random_disc_points(np.random.default_rng(12), 20)
    assert np.max(np.abs(b(z) - z)) == 0.0
    gap = 1.0 - np.abs(z) ** 2
    assert np.max(np.abs((1.0 - np.abs(b(z)) ** 2) / gap - 1.0)) < 1e-12


def test_blaschke_derivative_matches_finite_differences():
    b = BlaschkeProduct((0.4, -0.2 + 0.3j))
    h = 1e-6
    for z in (0.1 + 0.2j, -0.5j, 0.6):
        numeric = (b(z + h) - b(z - h)) / (2 * h)
        assert abs(b.derivative(z) - numeric) < 1e-8


# -- logarithmic test functions --------------------------------------------

@pytest.mark.parametrize("a", [0.0, 0.3, 0.9, -0.5j, 0.6 + 0.3j, 0.99])
def test_log_weight_norm_bounds(a):
    # the derivative seminorm stays below 2 uniformly; the full Bloch
    # norm only below 3 (the often-quoted 2 fails already at a = 0.9)
    f = LogWeightFunction(a)
    grid = DiscGrid(10, 0.75)
    norm = bloch_norm(f, grid).value
    seminorm = norm - abs(complex(f(0j)))
    assert seminorm <= 2.0 + 1e-9
    assert norm <= 3.0 + 1e-9


def test_log_weight_norm_exceeds_two_for_extreme_parameter():
    # frozen counterexample: hand-maximized seminorm at a = 0.9 is
    # 0.9 (1 - x^2)/(1 - 0.9 x) at x = (2 - sqrt(4 - 3.24))/1.8
    x = (2.0 - math.sqrt(4.0 - 3.24)) / 1.8
    value = 1.0 + 0.9 * (1.0 - x * x) / (1.0 - 0.9 * x)
    assert value > 2.25
    grid = DiscGrid(12, 0.75)
    measured = bloch_norm(LogWeightFunction(0.9), grid).value
    assert measured > 2.2
    assert abs(measured - value) < 1e-3


def test_log_weight_derivative_matches_finite_differences():
    f = LogWeightFunction(0.4 - 0.2j)
    h = 1e-6
    for z in (0.0, 0.3 + 0.1j, -0.8):
        numeric = (f(z + h) - f(z - h)) / (2 * h)
        assert abs(f.derivative(z) - numeric) < 1e-8


def test_log_weight_rejects_boundary_parameter():
    with pytest.raises(DomainError):
        LogWeightFunction(1.0)


# -- infimum of the modulus -------------------------------------------------

def test_inf_modulus_examples():
    grid = DiscGrid(8, 0.5, True)
    assert abs(inf_modulus(RationalSymbol([2.0, 1.0]), grid) - 1.0) < 1e-12
    assert inf_modulus(RationalSymbol([0.0, 1.0]), grid) == 0.0
    assert abs(inf_modulus(RationalSymbol([5.0]), grid) - 5.0) == 0.0


def test_inf_modulus_is_upper_bound_of_infimum():
    # grid minimum can only overestimate the true infimum
    u = RationalSymbol([2.0, 1.0])  # true infimum 1 at z = -1
    for levels in (4, 8, 12):
        grid = DiscGrid(levels, 0.5, True)
        assert inf_modulus(u, grid) >= 1.0 - 1e-12


def test_boundary_sup_cached_metadata():
    u = RationalSymbol([2.0, 1.0])
    assert abs(u.boundary_sup - 3.0) < 1e-9
