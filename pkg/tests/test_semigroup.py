"""Numerical semigroups, Young diagrams and natural indices."""

from __future__ import annotations

from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsigma.errors import EmptyGenerators, GenusZero, IndexOutOfRange, NonCoprimeGenerators, ValidationError
from wsigma.semigroup import (
    YoungDiagram,
    bezout_pair,
    build_semigroup,
    dual_weight_sets,
    natural_index,
    semigroup_of_diagram,
    standard_basis,
    truncate_diagram,
    young_diagram,
)


def brute_gaps(gens, bound=400):
    """Gaps by closing {0} under addition up to ``bound``."""
    reach = [False] * (bound + 1)
    reach[0] = True
    for n in range(1, bound + 1):
        reach[n] = any(n >= a and reach[n - a] for a in gens)
    return tuple(n for n in range(bound + 1) if not reach[n])


generator_sets = st.lists(st.integers(2, 13), min_size=1, max_size=4).filter(lambda g: gcd(*g) == 1)


@settings(max_examples=60, deadline=None)
@given(generator_sets)
def test_gaps_match_brute_force(gens):
    H = build_semigroup(gens)
    assert H.gaps == brute_gaps(gens)
    assert H.conductor == (H.gaps[-1] + 1 if H.gaps else 0)


@settings(max_examples=60, deadline=None)
@given(generator_sets)
def test_diagram_round_trip_and_hooks(gens):
    H = build_semigroup(gens)
    if H.genus == 0:
        return
    lam = young_diagram(H)
    assert semigroup_of_diagram(lam).gaps == H.gaps
    # first-column hook lengths are exactly the gaps
    assert sorted(lam.hook_length(i, 1) for i in range(1, lam.length + 1)) == list(H.gaps)
    assert lam.size == sum(H.gaps) - H.genus * (H.genus - 1) // 2
    assert lam.is_self_conjugate == H.is_symmetric


@pytest.mark.parametrize("a,b", [(2, 3), (2, 7), (3, 4), (3, 5), (4, 7), (5, 6)])
def test_two_generator_closed_forms(a, b):
    H = build_semigroup((a, b))
    assert H.genus == (a - 1) * (b - 1) // 2
    assert H.frobenius_number == a * b - a - b
    assert H.is_symmetric
    i_s, i_r = bezout_pair(a, b)
    assert i_s * b - i_r * a == 1 and i_s > 0 and i_r >= 0


def test_element_indexing():
    H = build_semigroup((3, 7, 8))
    assert [H.N(i) for i in range(6)] == [0, 3, 6, 7, 8, 9]
    assert [H.Nc(i) for i in range(H.genus)] == [1, 2, 4, 5]
    with pytest.raises(IndexOutOfRange):
        H.Nc(4)
    with pytest.raises(IndexOutOfRange):
        H.N(-1)


def test_standard_basis_minimal_in_class():
    H = build_semigroup((5, 7, 11))
    sb = standard_basis(H)
    for i, e in enumerate(sb.tilde_e):
        assert e % 5 == i and e in H
        assert all(e - 5 * k not in H for k in range(1, e // 5 + 1))


def test_frobenius_coordinates_of_hand_diagram():
    lam = YoungDiagram((4, 2, 1))
    # diagonal boxes (1,1), (2,2): legs 2, 0 and arms 3, 0
    assert lam.frobenius == ((0, 2), (0, 3))
    assert lam.conjugate == (3, 2, 1, 1)


def test_truncation_and_natural_index():
    H = build_semigroup((5, 7, 11))
    g = H.genus
    for k in range(g):
        nat = natural_index(H, k)
        assert nat[0] == k + 1
        assert len(nat) == young_diagram(truncate_diagram(H, k).lower_semigroup).rank
    assert natural_index(build_semigroup((2, 5)), 0) == (1,)


def test_dual_weight_sets_have_genus_elements():
    H = build_semigroup((3, 4))
    hat, star = dual_weight_sets(H, 8)
    assert len(hat) == len(star) == H.genus


@pytest.mark.parametrize(
    "gens,exc",
    [((), EmptyGenerators), ((4, 6), NonCoprimeGenerators), ((1, 2), GenusZero)],
)
def test_invalid_input(gens, exc):
    with pytest.raises(exc):
        young_diagram(build_semigroup(gens))


def test_non_partition_rejected():
    with pytest.raises(ValidationError):
        YoungDiagram((1, 2))
    # (3, 1) has gaps {1, 4}, which cannot be a semigroup complement
    with pytest.raises(ValidationError):
        semigroup_of_diagram(YoungDiagram((3, 1)))
