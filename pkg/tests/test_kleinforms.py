"""Differentials, the fundamental two-form and third-kind integrals."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy as sp

from conftest import genus_two, genus_two_mixed, lemniscatic, trigonal
from wsigma.curve import WCurve
from wsigma.kleinforms import (
    differential_bases,
    klein_limit,
    monomial_kernel_oracle,
    nuI_basis,
    pairing,
    pi_integral,
    sigma_form_series,
    sigma_H,
    trace_kernel,
)
from wsigma.periods import random_points
from wsigma.semigroup import build_semigroup


@pytest.mark.parametrize("curve", [lemniscatic(), genus_two(), trigonal(), WCurve(3, 5, {(3, 0): -1})])
def test_first_kind_orders_are_gaps(curve):
    # nu^I_i = (t^{g_i - 1} + ...) dt up to sign; leading exponents run over the gaps
    got = sorted(d.weight + 1 for d in nuI_basis(curve))
    assert got == list(curve.semigroup.gaps)


def test_pairing_is_antisymmetric():
    B = differential_bases(genus_two_mixed())
    for a in B.nuI + B.nuII:
        for b in B.nuI + B.nuII:
            assert pairing(a, b) == -pairing(b, a)


@pytest.mark.parametrize("curve", [genus_two(), genus_two_mixed(), trigonal()])
def test_fundamental_form_symmetric_with_double_pole(curve):
    B = differential_bases(curve)
    P, Q = random_points(curve, 2, np.random.default_rng(2))
    assert abs(B.omega(P, Q) - B.omega(Q, P)) < 1e-10 * abs(B.omega(P, Q))
    h = 1e-4
    x = P[0] + h
    ys = curve.y_roots(x)
    y = ys[np.argmin(np.abs(ys - P[1]))]
    assert abs(B.omega(P, (x, y)) * h**2 - 1) < 1e-6


def test_klein_limit_finite():
    B = differential_bases(genus_two())
    P = random_points(genus_two(), 1, np.random.default_rng(5))[0]
    assert np.isfinite(klein_limit(B, P))


def test_trace_kernel_is_fibre_projector():
    c = trigonal()
    B = differential_bases(c)
    x = 0.3 - 0.4j
    ys = c.y_roots(x)
    for i, yi in enumerate(ys):
        for j, yj in enumerate(ys):
            assert abs(trace_kernel(B.kernel, (x, yi), (x, yj)) - (i == j)) < 1e-10


def test_pi_reciprocity():
    c = genus_two_mixed()
    B = differential_bases(c)
    P, Q, R, S = random_points(c, 4, np.random.default_rng(0))
    a = pi_integral(B, P, Q, R, S)
    b = pi_integral(B, R, S, P, Q)
    assert abs(a - b) < 1e-9 * max(1.0, abs(a))


@pytest.mark.parametrize("gens", [(2, 3), (2, 5), (3, 4), (3, 5), (4, 5)])
def test_monomial_kernel_closed_forms(gens):
    O = monomial_kernel_oracle(build_semigroup(gens))
    assert sp.simplify(O.dsigma - O.dsigma_closed) == 0
    assert O.singular_count() == build_semigroup(gens).genus
    # expand around t_Q = 0 with |t_Q| < |t_P| and compare the polar part
    tP, tQ = O.tP, O.tQ
    lead = max(O.e) - O.r + 2
    ser = sp.series(O.dsigma, tQ, 0, 1).removeO()
    polar = sum(ser.coeff(tQ, -k) * tQ ** (-k) for k in range(1, lead + 1))
    assert sp.simplify(sp.expand(polar) - sp.expand(O.singular_part())) == 0


def test_series_against_oracle_for_deformed_curve():
    # the leading coefficient sees only the monomial part
    c = WCurve(2, 5, {(2, 0): -1, (2, 3): 2})
    for u in [Fraction(3), Fraction(1, 2)]:
        ser = sigma_form_series(c, u, order=12)
        assert ser[0] == sigma_H(c, u)
