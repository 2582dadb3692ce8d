"""Schur polynomials, power-sum substitution and the truncation sign."""

from __future__ import annotations

from fractions import Fraction
from math import factorial, prod

import pytest
import sympy as sp

from wsigma.schur import WeightedPolynomial, epsilon_sign, partition_count_check, schur_in_u, schur_polynomial, schur_value
from wsigma.semigroup import YoungDiagram, build_semigroup, young_diagram


def bialternant(rows, n):
    """det(x_i^{lambda_j + n - j}) / Vandermonde, computed by sympy."""
    x = sp.symbols(f"x1:{n + 1}")
    lam = list(rows) + [0] * (n - len(rows))
    num = sp.Matrix(n, n, lambda i, j: x[i] ** (lam[j] + n - j - 1)).det()
    den = sp.Matrix(n, n, lambda i, j: x[i] ** (n - j - 1)).det()
    return sp.expand(sp.cancel(num / den)), x


def to_sympy(p: WeightedPolynomial, syms):
    return sp.expand(sum(sp.Rational(c.numerator, c.denominator) * prod(s**e for s, e in zip(syms, ex)) for ex, c in p.terms.items()))


@pytest.mark.parametrize("rows,n", [((1,), 2), ((2, 1), 3), ((2, 2), 3), ((3, 1, 1), 3), ((2, 1), 2)])
def test_schur_polynomial_matches_bialternant(rows, n):
    want, x = bialternant(rows, n)
    assert to_sympy(schur_polynomial(YoungDiagram(rows), n), x) == want


def test_schur_value_exact():
    lam = YoungDiagram((2, 1))
    # s_(2,1)(1, 2, 3) = sum of monomials of shape (2,1) and 2 * x1 x2 x3
    assert schur_value(lam, [1, 2, 3]) == Fraction(60)


def hook_formula(lam: YoungDiagram) -> int:
    return factorial(lam.size) // prod(lam.all_hook_lengths())


@pytest.mark.parametrize("rows", [(1,), (2, 1), (3, 2, 1), (4, 2), (2, 2, 1, 1)])
def test_standard_tableaux_count(rows):
    lam = YoungDiagram(rows)
    assert partition_count_check(lam) == hook_formula(lam)


def test_schur_in_u_small_cases():
    u1, u2, u3 = sp.symbols("u1:4")
    assert to_sympy(schur_in_u(YoungDiagram((1,))), [u1]) == u1
    assert to_sympy(schur_in_u(YoungDiagram((2, 1))), [u1, u2]) == sp.expand(-u1 + u2**3 / 3)
    S = schur_in_u(young_diagram(build_semigroup((3, 4))))
    # weighted homogeneous of degree |Lambda| with weights Lambda_i + g - i
    assert S.weighted_degrees() == {young_diagram(build_semigroup((3, 4))).size}


@pytest.mark.parametrize("gens", [(2, 3), (2, 5), (2, 7), (3, 4), (3, 5)])
def test_epsilon_sign_is_unit(gens):
    lam = young_diagram(build_semigroup(gens))
    for k in range(lam.length):
        assert epsilon_sign(lam, k).epsilon in (1, -1)


def test_epsilon_symbolic_and_sampled_agree():
    lam = young_diagram(build_semigroup((3, 5)))
    for k in range(1, lam.length):
        assert epsilon_sign(lam, k, symbolic=True).epsilon == epsilon_sign(lam, k, symbolic=False).epsilon


def test_weighted_polynomial_algebra():
    x = WeightedPolynomial.variable(2, 0)
    y = WeightedPolynomial.variable(2, 1)
    p = (x + y) ** 2 - x * x - 2 * x * y
    assert p == y * y
    assert p.diff(1) == 2 * y
    assert p.evaluate([Fraction(1, 2), Fraction(3)]) == 9
