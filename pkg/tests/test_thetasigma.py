"""Riemann theta, the sigma function and its identity checks."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from wsigma.curve import WCurve
from wsigma.errors import NotPositiveDefinite, SuiteFailure, ValidationError
from wsigma.semigroup import young_diagram
from wsigma.thetasigma import (
    ThetaCharacteristic,
    build_context,
    check_quadratic_form,
    sigma_taylor_1d,
    theta,
    verify_suite,
    weierstrass_sigma_coefficients,
)


def theta_brute(z, tau, d1, d2, N):
    g = len(z)
    total = 0j
    for n in itertools.product(range(-N, N + 1), repeat=g):
        v = np.array(n) + d2
        total += np.exp(1j * np.pi * (v @ tau @ v + 2 * v @ (z + d1)))
    return total


def test_theta_genus_one_brute_force():
    tau = np.array([[1j]])
    n = np.arange(-5000, 5001)
    for z in [0.1 + 0.2j, -0.3 + 0.05j, 0.0]:
        want = np.sum(np.exp(1j * np.pi * n * n * 1j + 2j * np.pi * n * z))
        assert abs(theta([z], tau) - want) < 1e-13 * max(1, abs(want))


def test_theta_genus_two_with_characteristic():
    tau = np.array([[1.1j + 0.2, 0.3 + 0.1j], [0.3 + 0.1j, 0.9j - 0.4]])
    ch = ThetaCharacteristic([0.5, 0], [0.5, 0.5])
    z = np.array([0.2 - 0.1j, -0.3 + 0.25j])
    want = theta_brute(z, tau, ch.delta1, ch.delta2, 12)
    assert abs(theta(z, tau, ch) - want) < 1e-12 * abs(want)


def test_theta_quasi_periodicity():
    tau = np.array([[1.1j + 0.2, 0.3 + 0.1j], [0.3 + 0.1j, 0.9j - 0.4]])
    ch = ThetaCharacteristic([0.5, 0.5], [0, 0.5])
    z = np.array([0.1 + 0.1j, -0.2j])
    m = np.array([1, -1])
    t0 = theta(z, tau, ch)
    assert abs(theta(z + m, tau, ch) - np.exp(2j * np.pi * ch.delta2 @ m) * t0) < 1e-12
    fac = np.exp(-1j * np.pi * m @ tau @ m - 2j * np.pi * m @ (z + ch.delta1))
    assert abs(theta(z + tau @ m, tau, ch) - fac * t0) < 1e-11 * abs(fac * t0)


def test_theta_derivative_by_differences():
    tau = np.array([[1.3j, 0.2], [0.2, 0.8j + 0.1]])
    z = np.array([0.1 + 0.2j, 0.3 - 0.1j])
    h = 1e-5
    e = np.array([0, 1.0])
    fd = (theta(z + h * e, tau) - theta(z - h * e, tau)) / (2 * h)
    assert abs(theta(z, tau, derivs=[1]) - fd) < 1e-7 * abs(fd)
    d = np.array([0.3, -0.7])
    fd2 = (theta(z + h * d, tau) - 2 * theta(z, tau) + theta(z - h * d, tau)) / h**2
    assert abs(theta(z, tau, derivs=[d, d]) - fd2) < 1e-4 * abs(fd2)


def test_characteristic_parity():
    tau = np.array([[1.1j + 0.2, 0.3 + 0.1j], [0.3 + 0.1j, 0.9j - 0.4]])
    z = np.array([0.2 - 0.1j, -0.3 + 0.25j])
    for c in itertools.product((0, 0.5), repeat=4):
        ch = ThetaCharacteristic(c[:2], c[2:])
        assert abs(theta(-z, tau, ch) - ch.parity * theta(z, tau, ch)) < 1e-12


def test_theta_rejects_bad_tau():
    with pytest.raises(NotPositiveDefinite):
        theta([0.0], np.array([[-1j]]))


# classical Weierstrass sigma: u - g2 u^5/240 - g3 u^7/840 - g2^2 u^9/161280 + O(u^11)
def weierstrass_closed_form(g2, g3):
    c = np.zeros(10, dtype=complex)
    c[1], c[5], c[7], c[9] = 1, -g2 / 240, -g3 / 840, -(g2**2) / 161280
    return c


@pytest.mark.parametrize("a,b", [(-1, 0), (-2, 1), (1, 1)])
def test_genus_one_sigma_is_weierstrass(a, b):
    ctx = build_context(WCurve(2, 3, {(2, 1): -a, (2, 0): -b}))
    got = sigma_taylor_1d(ctx, 9)
    want = weierstrass_closed_form(-4 * a, -4 * b)
    assert np.max(np.abs(got - want)) < 1e-10
    assert np.max(np.abs(weierstrass_sigma_coefficients(-4 * a, -4 * b, 9) - want)) < 1e-15


def test_wp_from_sigma_matches_abel_map(ctx_g1):
    # x = wp(u) = -(log sigma)'' and 2 y = wp'(u) at u = w(P)
    rng = np.random.default_rng(3)
    for _ in range(3):
        x = complex(*rng.normal(size=2))
        y = ctx_g1.curve.y_roots(x)[0]
        u = ctx_g1.abel((x, y))[0]
        h = 1e-3
        ls = [np.log(ctx_g1.sigma([u + k * h])) for k in (-2, -1, 0, 1, 2)]
        d2 = (-ls[0] + 16 * ls[1] - 30 * ls[2] + 16 * ls[3] - ls[4]) / (12 * h**2)
        assert abs(-d2 - x) < 1e-6 * max(1, abs(x))


def test_sigma_is_modular_invariant(ctx_g2):
    gamma = np.array([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    other = ctx_g2.with_periods(ctx_g2.periods.transformed(gamma))
    for u in [np.array([0.3 + 0.1j, -0.2j]), np.array([-0.5, 0.4 + 0.4j])]:
        assert abs(other.sigma(u) - ctx_g2.sigma(u)) < 1e-10 * abs(ctx_g2.sigma(u))


def test_quadratic_form_symmetric(ctx_g1, ctx_g2):
    assert check_quadratic_form(ctx_g1).passed and check_quadratic_form(ctx_g2).passed


def test_parity_sign_follows_diagram_size(ctx_g1, ctx_g2):
    for ctx in (ctx_g1, ctx_g2):
        size = young_diagram(ctx.curve.semigroup).size
        r = verify_suite(ctx, ["parity"])[0]
        assert r.passed and r.details["sign"] == (-1) ** size


def test_genus_three_hyperelliptic_even_diagram():
    # <2,7> has Lambda = (3,2,1), so sigma is even and its leading term has weight 6
    ctx = build_context(WCurve(2, 7, {(2, 0): -1, (2, 1): 1}))
    res = {r.check: r for r in verify_suite(ctx, ["legendre", "translation", "parity", "schur"])}
    assert all(r.passed for r in res.values()), {k: r.to_dict() for k, r in res.items()}
    assert res["parity"].details["sign"] == 1


def test_sigma_vanishes_at_origin_and_is_normalized(ctx_g2):
    assert abs(ctx_g2.sigma(np.zeros(2))) < 1e-12
    assert abs(ctx_g2.schur_normalized().scale - 1) < 1e-6


def test_verify_suite_errors(ctx_g1):
    with pytest.raises(ValidationError):
        verify_suite(ctx_g1, ["nonsense"])
    with pytest.raises(SuiteFailure):
        verify_suite(ctx_g1, ["parity"], raise_on_failure=True, tolerance=1e-300)


def test_genus_one_sigma_lemniscatic_zero_lattice(ctx_g1):
    # sigma vanishes exactly on the period lattice
    pm = ctx_g1.periods
    for m1, m2 in [(1, 0), (0, 1), (1, -1)]:
        ell = pm.lattice_vector([m1], [m2])
        assert abs(ctx_g1.sigma(ell)) < 1e-12 * max(1, abs(ctx_g1.sigma(0.5 * ell)))


def test_theta_truncation_self_consistent():
    tau = np.array([[0.4 + 0.8j, 0.1 + 0.3j, 0], [0.1 + 0.3j, 1.0j, 0.2], [0, 0.2, 0.2 + 0.7j]])
    z = np.array([0.3 + 0.4j, -0.2 - 0.6j, 0.1j])
    a, b = theta(z, tau), theta(z, tau, eps=1e-28)  # larger ellipsoid
    assert abs(a - b) < 1e-12 * abs(b)
