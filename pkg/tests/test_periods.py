"""Homology cycles, period matrices, the Abel map and the Riemann constant."""

from __future__ import annotations

import json

import numpy as np
import pytest

from conftest import genus_two, genus_two_mixed, lemniscatic, trigonal
from wsigma.curve import WCurve
from wsigma.errors import SymplecticViolation
from wsigma.periods import PeriodMatrices, homology_cycles, period_matrices, symplectic_basis


def J(g):
    return np.block([[np.zeros((g, g), int), np.eye(g, dtype=int)], [-np.eye(g, dtype=int), np.zeros((g, g), int)]])


@pytest.mark.parametrize("curve", [lemniscatic(), genus_two(), trigonal(), WCurve(2, 7, {(2, 0): -1, (2, 2): 1})])
def test_cycles_are_symplectic(curve):
    cs = homology_cycles(curve)
    assert cs.genus == curve.genus
    assert np.array_equal(np.array(cs.intersection, dtype=int), J(curve.genus))
    assert abs(round(np.linalg.det(np.array(cs.basis, dtype=float)))) == 1


@pytest.mark.parametrize("curve", [lemniscatic(), genus_two(), trigonal(), genus_two_mixed()])
def test_full_period_relations(curve):
    pm = period_matrices(curve)
    assert pm.symplectic_residual < 1e-8
    assert pm.legendre_residual < 1e-8
    assert pm.tau_symmetry < 1e-9
    assert np.all(np.linalg.eigvalsh(pm.tau.imag) > 0)


def sigma_k(n, k):
    return sum(d**k for d in range(1, n + 1) if n % d == 0)


def invariants_from_lattice(w1, tau, terms=60):
    """g2, g3 of the lattice 2 w1 (Z + tau Z) from Eisenstein q-series."""
    q = np.exp(2j * np.pi * tau)
    E4 = 1 + 240 * sum(sigma_k(n, 3) * q**n for n in range(1, terms))
    E6 = 1 - 504 * sum(sigma_k(n, 5) * q**n for n in range(1, terms))
    w = 2 * w1
    return 60 * (np.pi**4 / 45) * E4 / w**4, 140 * (2 * np.pi**6 / 945) * E6 / w**6


@pytest.mark.parametrize("a,b", [(-1, 0), (-2, 1), (1, 1), (0.5, -3)])
def test_elliptic_invariants_from_periods(a, b):
    # y^2 = x^3 + a x + b with nu^I = dx / 2y: x = wp(u) for g2 = -4a, g3 = -4b
    pm = period_matrices(WCurve(2, 3, {(2, 1): -a, (2, 0): -b}))
    g2, g3 = invariants_from_lattice(pm.omega1[0, 0], pm.tau[0, 0])
    assert abs(g2 + 4 * a) < 1e-9 and abs(g3 + 4 * b) < 1e-9


def test_symplectic_basis_recovers_J():
    rng = np.random.default_rng(1)
    g = 3
    U = np.eye(2 * g, dtype=int)
    for _ in range(12):  # random unimodular matrix from elementary moves
        i, j = rng.choice(2 * g, 2, replace=False)
        U[i] += rng.integers(-2, 3) * U[j]
    K = U @ J(g) @ U.T
    B = np.array(symplectic_basis(K), dtype=int)
    assert np.array_equal(B @ K @ B.T, J(g))


def test_symplectic_basis_rejects_degenerate():
    with pytest.raises(SymplecticViolation):
        symplectic_basis(np.zeros((2, 2), dtype=int))


def test_basis_change_preserves_relations():
    pm = period_matrices(genus_two())
    gamma = np.array([[1, 0, 1, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    pt = pm.transformed(gamma)
    assert pt.legendre_residual < 1e-8
    assert pt.tau_symmetry < 1e-9 and np.all(np.linalg.eigvalsh(pt.tau.imag) > 0)


def test_cache_round_trip(tmp_path):
    c = genus_two()
    a = period_matrices(c, cache_dir=tmp_path)
    files = list(tmp_path.iterdir())
    assert len(files) == 1 and json.loads(files[0].read_text())
    b = period_matrices(c, cache_dir=tmp_path)
    for k in ("omega1", "omega2", "eta1", "eta2"):
        assert np.array_equal(getattr(a, k), getattr(b, k))
    assert np.array_equal(PeriodMatrices.from_dict(a.to_dict()).tau, a.tau)


def test_abel_map_derivative_is_first_kind_form(ctx_g2):
    c, ab = ctx_g2.curve, ctx_g2.abel
    x0 = 0.6 + 0.5j
    y0 = c.y_roots(x0)[0]
    h = 1e-5
    vals = []
    for dx in (h, -h):
        ys = c.y_roots(x0 + dx)
        vals.append(ab((x0 + dx, ys[np.argmin(np.abs(ys - y0))])))
    deriv = (vals[0] - vals[1]) / (2 * h)
    want = np.array([d.dx_coefficient(x0, y0) for d in ab.nuI])
    assert np.max(np.abs(deriv - want)) < 1e-7


def test_riemann_constant_characteristics(ctx_g1, ctx_g2):
    # genus one: the odd characteristic (1/2, 1/2); genus two: an odd half characteristic
    assert np.allclose(ctx_g1.characteristic.delta1, 0.5) and np.allclose(ctx_g1.characteristic.delta2, 0.5)
    assert ctx_g2.characteristic.parity == -1
    assert set(np.round(2 * ctx_g2.characteristic.delta1).astype(int)) <= {0, 1}


def lattice_coordinates(pm, v):
    """Real coordinates of ``v`` in the basis ``2 omega'``, ``2 omega''``."""
    L = np.hstack([2 * pm.omega1, 2 * pm.omega2])
    R = np.vstack([L.real, L.imag])
    return np.linalg.solve(R, np.concatenate([v.real, v.imag]))


def test_period_lattice_has_full_rank(ctx_g2):
    L = np.hstack([2 * ctx_g2.periods.omega1, 2 * ctx_g2.periods.omega2])
    assert np.linalg.cond(np.vstack([L.real, L.imag])) < 1e6


def test_involution_sum_is_a_lattice_vector(ctx_g2):
    # P + sigma(P) ~ 2 infinity on a hyperelliptic curve
    c, ab = ctx_g2.curve, ctx_g2.abel
    for x in [0.4 + 0.7j, -1.2 + 0.1j, 2.0 - 0.5j]:
        y = c.y_roots(x)[0]
        k = lattice_coordinates(ctx_g2.periods, ab((x, y)) + ab((x, -y)))
        assert np.max(np.abs(k - np.round(k))) < 1e-7
