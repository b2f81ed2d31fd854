"""Tests for the quantum-torus algebra, bundles, divisors, stability, and
finite-monodromy detection."""

import cmath
import math

import numpy as np
import pytest

from eqconn.category import K0Class, MonodromyPair, k0_class, tensor, unit_object
from eqconn.exceptions import ValidationFailure
from eqconn.torus import (
    Divisor,
    FreeBundle,
    Omega,
    TorusPoly,
    build_extension,
    central_charge,
    check_intertwine,
    divisor_equivalent,
    extension_morphism_residuals,
    is_nori_finite,
    k0_to_divisor,
    k_swap,
    modular_apply,
    phase,
    psi_delta_residual,
    psi_embed,
    psi_star,
    reduce_mod_lattice,
    std_bundle_data,
)
from util import STRIP, TAU, THETA, random_normal_form

TWO_PI_I = 2j * math.pi


def rand_poly(rng, theta, size=6, bound=4):
    coeffs = {}
    for _ in range(size):
        key = (int(rng.integers(-bound, bound + 1)), int(rng.integers(-bound, bound + 1)))
        coeffs[key] = complex(*rng.normal(size=2))
    return TorusPoly(theta, coeffs)


# --- twisted product -----------------------------------------------------------

def test_commutation_relation():
    u1, u2 = TorusPoly.u1(THETA), TorusPoly.u2(THETA)
    lhs = u2 * u1
    rhs = (u1 * u2).scale(cmath.exp(TWO_PI_I * THETA))
    assert lhs.distance(rhs) < 1e-15


def test_normal_order_product():
    u1, u2 = TorusPoly.u1(THETA), TorusPoly.u2(THETA)
    prod = u1 * u2
    assert prod.coeffs == {(1, 1): 1.0 + 0.0j}
    square = prod * prod
    assert set(square.coeffs) == {(2, 2)}
    assert abs(square.coeffs[(2, 2)] - cmath.exp(TWO_PI_I * THETA)) < 1e-15


def test_product_associative_random():
    rng = np.random.default_rng(0)
    for _ in range(25):
        x, y, z = (rand_poly(rng, THETA) for _ in range(3))
        lhs = (x * y) * z
        rhs = x * (y * z)
        scale = max(1.0, x.norm() * y.norm() * z.norm())
        assert lhs.distance(rhs) < 1e-12 * scale


def test_theta_mismatch_rejected():
    with pytest.raises(ValidationFailure):
        TorusPoly.u1(0.3) * TorusPoly.u1(0.4)


# --- derivations ------------------------------------------------------------------

def test_basic_derivations_on_generators():
    u1 = TorusPoly.u1(THETA)
    d1 = u1.delta(1)
    assert d1.coeffs == {(1, 0): TWO_PI_I}
    assert u1.delta(2).is_zero()
    x = TorusPoly.monomial(THETA, 2, 1)
    dt = x.delta_omega(Omega(TAU, 1.0))
    assert abs(dt.coeffs[(2, 1)] - TWO_PI_I * (2 * TAU + 1.0)) < 1e-14


def test_delta_omega_is_a_derivation():
    rng = np.random.default_rng(1)
    w = Omega(complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
    for _ in range(10):
        x, y = rand_poly(rng, THETA), rand_poly(rng, THETA)
        lhs = (x * y).delta_omega(w)
        rhs = x.delta_omega(w) * y + x * y.delta_omega(w)
        assert lhs.distance(rhs) < 1e-11 * max(1.0, x.norm() * y.norm())


def test_omega_must_be_nonzero():
    with pytest.raises(ValidationFailure):
        Omega(0.0, 0.0)


# --- modular automorphisms -----------------------------------------------------------

def test_generator_images():
    u1 = TorusPoly.u1(THETA)
    assert modular_apply("g1", u1).coeffs == {(1, 1): 1.0 + 0.0j}
    assert modular_apply("g1", TorusPoly.u2(THETA)).coeffs == {(0, 1): 1.0 + 0.0j}
    assert modular_apply("g2", u1).coeffs == {(0, -1): 1.0 + 0.0j}
    assert modular_apply("g2", TorusPoly.u2(THETA)).coeffs == {(1, 0): 1.0 + 0.0j}


def test_generator_inverses_random():
    rng = np.random.default_rng(2)
    for token in ("g1", "g2"):
        inv = token + "_inv"
        for _ in range(10):
            x = rand_poly(rng, THETA, size=10)
            assert modular_apply([inv, token], x).distance(x) < 1e-11 * max(1.0, x.norm())
            assert modular_apply([token, inv], x).distance(x) < 1e-11 * max(1.0, x.norm())


def test_automorphisms_are_multiplicative():
    rng = np.random.default_rng(3)
    for token in ("g1", "g2"):
        for _ in range(50):
            x, y = rand_poly(rng, THETA), rand_poly(rng, THETA)
            lhs = modular_apply([token], x * y)
            rhs = modular_apply([token], x) * modular_apply([token], y)
            assert lhs.distance(rhs) < 1e-12 * max(1.0, x.norm() * y.norm())


def test_intertwining_identity():
    rng = np.random.default_rng(4)
    for token in ("g1", "g2"):
        for _ in range(5):
            w = Omega(complex(*rng.normal(size=2)), complex(*rng.normal(size=2)))
            assert check_intertwine(token, w, bound=3) < 1e-12
    # the empty word is the identity automorphism
    x = rand_poly(rng, THETA)
    assert modular_apply([], x).distance(x) == 0.0


# --- the embedding ---------------------------------------------------------------------

def test_psi_embed_values():
    img = psi_embed({1: 1.0}, THETA)
    assert img.coeffs == {(1, 0): 1.0 + 0.0j}
    assert psi_embed({0: 1.0}, THETA).coeffs == {(0, 0): 1.0 + 0.0j}
    mixed = psi_embed({-2: 1.0, 1: 3.0}, THETA)
    assert mixed.coeffs == {(-2, 0): 1.0 + 0.0j, (1, 0): 3.0 + 0.0j}


def test_psi_embed_is_multiplicative():
    # the image is commutative: powers of U1 only
    f = psi_embed({1: 2.0, 0: 1.0}, THETA)
    g = psi_embed({-1: 1.0}, THETA)
    prod = f * g
    assert prod.coeffs == {(0, 0): 2.0 + 0.0j, (-1, 0): 1.0 + 0.0j}


def test_psi_delta_intertwining():
    rng = np.random.default_rng(5)
    for _ in range(10):
        f = {int(k): complex(*rng.normal(size=2))
             for k in rng.integers(-6, 7, size=5)}
        assert psi_delta_residual(f, TAU, THETA) < 1e-12


# --- free bundles --------------------------------------------------------------------

def test_psi_star_scalar_object():
    zprime = 0.3 * TAU
    nf = random_normal_form(np.random.default_rng(6), 1)
    nf = type(nf)(np.array([[zprime]]), np.array([[2.0]]), STRIP, THETA, TAU)
    fb = psi_star(nf)
    assert fb.n == 1
    assert abs(fb.diagonal()[0] - TWO_PI_I * zprime) < 1e-12


def test_psi_star_unit_and_nilpotent():
    fb = psi_star(unit_object(THETA, TAU, STRIP))
    assert abs(fb.diagonal()[0]) < 1e-12
    from eqconn.category import NormalForm
    nil = NormalForm(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex),
                     np.eye(2, dtype=complex), STRIP, THETA, TAU)
    fb = psi_star(nil)
    assert fb.n == 2
    assert all(abs(d) < 1e-12 for d in fb.diagonal())
    assert fb.conn[1][0].is_zero()


def test_free_bundle_rejects_bad_shapes():
    theta = THETA
    lower = [[TorusPoly.unit(theta), TorusPoly(theta)],
             [TorusPoly.unit(theta), TorusPoly.unit(theta)]]
    with pytest.raises(ValidationFailure):
        FreeBundle(theta, TAU, lower)
    nonscalar = [[TorusPoly.u1(theta)]]
    with pytest.raises(ValidationFailure):
        FreeBundle(theta, TAU, nonscalar)


def test_extension_of_unit_by_unit():
    base = FreeBundle(THETA, TAU, [[TorusPoly(THETA)]])
    ext = build_extension(0.0, [TorusPoly(THETA)], base)
    assert ext.n == 2
    assert ext.diagonal() == [0.0, 0.0]


def test_extension_two_by_two_case():
    zp, zpp = TWO_PI_I * 0.2, TWO_PI_I * 0.7
    base = FreeBundle(THETA, TAU, [[TorusPoly(THETA, {(0, 0): zpp})]])
    b_entry = TorusPoly(THETA, {(1, 2): 1.5, (0, 0): -0.3})
    ext = build_extension(zp, [b_entry], base)
    res_iota, res_pi = extension_morphism_residuals(ext, base, zp)
    assert res_iota == 0.0 and res_pi == 0.0
    assert ext.diagonal() == [zp, zpp]
    # class bookkeeping on the diagonal: the extension adds one new label
    assert ext.diagonal()[1:] == base.diagonal()


def test_extension_row_length_checked():
    base = FreeBundle(THETA, TAU, [[TorusPoly(THETA)]])
    with pytest.raises(ValidationFailure):
        build_extension(0.0, [], base)


# --- standard bundles and stability -------------------------------------------------

def test_std_bundle_values():
    assert std_bundle_data(0, 1, THETA) == (0, 1.0, 0.0)
    m, rk, mu = std_bundle_data(1, 0, THETA)
    assert (m, rk) == (1, THETA) and abs(mu - 1.0 / THETA) < 1e-15
    m, rk, mu = std_bundle_data(1, 1, 0.4)
    assert rk == 1.4 and abs(mu - 1.0 / 1.4) < 1e-15


def test_std_bundle_errors():
    with pytest.raises(ValidationFailure):
        std_bundle_data(2, 4, THETA)
    with pytest.raises(ValidationFailure):
        std_bundle_data(-1, 0, THETA)  # rank -theta < 0


def test_k_swap_labels():
    assert k_swap(0, 1, THETA) == (1.0, 0)
    assert k_swap(0, 5, THETA) == (5.0, 0)
    deg, rk = k_swap(1, 0, THETA)
    assert deg == THETA and rk == -1


def test_central_charge_and_phase():
    assert central_charge(0, 1, THETA) == 1j
    assert phase(0, 1, THETA) == 0.5
    for n in range(1, 6):
        assert phase(0, n, THETA) == 0.5
    z = central_charge(1, 0, 0.4)
    assert z == complex(-1.0, 0.4)
    assert 0.5 < phase(1, 0, 0.4) < 1.0
    assert central_charge(-1, 1, 0.4) == complex(1.0, 0.6)
    assert 0.0 < phase(-1, 1, 0.4) < 0.5
    with pytest.raises(ValidationFailure):
        central_charge(0, 0, THETA)


def test_phase_monotone_with_slope():
    theta = 0.4
    grid = [(m, n) for m in range(-3, 4) for n in range(-3, 4)
            if (m, n) != (0, 0) and m * theta + n > 0.05]
    graded = sorted(grid, key=lambda mn: mn[0] / (mn[0] * theta + mn[1]))
    phases = [phase(m, n, theta) for m, n in graded]
    assert all(p1 <= p2 + 1e-12 for p1, p2 in zip(phases, phases[1:]))


# --- divisors ---------------------------------------------------------------------------

def test_reduce_mod_lattice():
    point, (s, t) = reduce_mod_lattice(0.3 + 0.4 * TAU, TAU)
    assert abs(point - (0.3 + 0.4 * TAU)) < 1e-12
    point, (s, t) = reduce_mod_lattice(1.3 + 2.0 * TAU - 5.0, TAU)
    assert abs(point - 0.3) < 1e-12
    with pytest.raises(ValidationFailure):
        reduce_mod_lattice(1.0, 2.0)  # real tau


def test_kmap_single_entry():
    zp = 0.25 * TAU + 0.1
    cls = K0Class(STRIP, [(2.0, zp, 1)])
    div = k0_to_divisor(cls)
    assert div.degree() == 1
    expected, _ = reduce_mod_lattice(-zp, TAU)
    assert abs(div.points[0][0] - expected) < 1e-12


def test_kmap_empty_and_b_forgotten():
    assert k0_to_divisor(K0Class(STRIP)).points == ()
    zp = 0.1 + 0.2 * TAU
    cls = K0Class(STRIP, [(2.0, zp, 1), (3.0 + 1.0j, zp, -1)])
    assert k0_to_divisor(cls).points == ()


def test_divisor_equivalence_criterion():
    a, b = 0.21 + 0.13 * TAU, 0.55 + 0.4 * TAU
    d1 = Divisor(TAU, [(a, 1), (b, 1)])
    d2 = Divisor(TAU, [(0.0, 1), (a + b, 1)])
    assert divisor_equivalent(d1, d1)
    assert divisor_equivalent(d1, d2)
    d3 = Divisor(TAU, [(a, 1)])
    d4 = Divisor(TAU, [(a + 0.5, 1)])
    assert not divisor_equivalent(d3, d4)
    # degree mismatch short-circuits
    assert not divisor_equivalent(d1, d3)


def test_divisor_equivalence_is_equivalence_relation():
    rng = np.random.default_rng(7)
    pts = [complex(rng.uniform(0, 1), 0) + rng.uniform(0, 1) * TAU for _ in range(3)]
    d = [Divisor(TAU, [(p, 1)]) for p in pts]
    principal = Divisor(TAU, [(pts[0], 1), (pts[1], 1), (0.0, -1),
                              (pts[0] + pts[1], -1)])
    zero = Divisor(TAU)
    assert divisor_equivalent(principal, zero)
    assert divisor_equivalent(d[2] + principal, d[2])
    # symmetry and transitivity on an equivalent chain
    shifted = Divisor(TAU, [(pts[0] + 1.0, 1)])
    assert divisor_equivalent(d[0], shifted) and divisor_equivalent(shifted, d[0])


def test_k0_to_divisor_additive_over_tensor_classes():
    rng = np.random.default_rng(8)
    x = random_normal_form(rng, 2)
    y = random_normal_form(rng, 2)
    cls = k0_class(tensor(x, y))
    div = k0_to_divisor(cls)
    assert div.degree() == cls.total_degree() == 4


def test_k0_to_divisor_additive_over_exact_sequences():
    from eqconn.category import Morphism, NormalForm, image, kernel
    import eqconn.category as category
    rng = np.random.default_rng(9)
    src = NormalForm(np.diag([0.1 * TAU, 0.5 * TAU]), np.diag([2.0, 3.0]),
                     STRIP, THETA, TAU)
    tgt = NormalForm(np.diag([0.1 * TAU, 0.8 * TAU]), np.diag([2.0, 7.0]),
                     STRIP, THETA, TAU)
    phi = np.zeros((2, 2), dtype=complex)
    phi[0, 0] = 1.0
    m = Morphism(src, tgt, phi)
    ker, _ = kernel(m)
    img, _ = image(m)
    lhs = k0_to_divisor(k0_class(src))
    rhs = k0_to_divisor(k0_class(ker) + k0_class(img))
    assert lhs == rhs


# --- finite monodromy -----------------------------------------------------------------

def test_nori_finite_cases():
    assert is_nori_finite(np.diag([1.0j, -1.0]), d_max=64)
    golden = np.array([[cmath.exp(TWO_PI_I * THETA)]])
    assert not is_nori_finite(golden, d_max=64)
    assert not is_nori_finite(np.array([[1.0, 1.0], [0.0, 1.0]]), d_max=64)


def test_nori_finite_pairs_and_errors():
    rep = MonodromyPair(np.diag([1.0j, -1.0j]), np.diag([-1.0, 1.0]))
    assert is_nori_finite(rep, d_max=8)
    rep_bad = MonodromyPair(np.diag([1.0j, -1.0j]),
                            np.diag([cmath.exp(TWO_PI_I * THETA), 1.0]))
    assert not is_nori_finite(rep_bad, d_max=64)
    with pytest.raises(ValidationFailure):
        is_nori_finite(np.diag([1.0, 0.0]))
    with pytest.raises(ValidationFailure):
        is_nori_finite(np.eye(2), d_max=0)
