"""Shared curves and sigma contexts (built once per session)."""

from __future__ import annotations

import pytest

from wsigma.curve import WCurve
from wsigma.thetasigma import build_context


def lemniscatic() -> WCurve:
    """y^2 = x^3 - x."""
    return WCurve(2, 3, {(2, 1): 1})


def genus_two() -> WCurve:
    """y^2 = x^5 + 1."""
    return WCurve(2, 5, {(2, 0): -1})


def trigonal() -> WCurve:
    """y^3 = x^4 + 1, genus 3."""
    return WCurve(3, 4, {(3, 0): -1})


def genus_two_mixed() -> WCurve:
    """A (2,5) curve with a y x^2 term, so the two kernel extensions differ."""
    return WCurve(2, 5, {(1, 2): 1, (2, 0): -1, (2, 3): -2, (1, 0): 3})


@pytest.fixture(scope="session")
def ctx_g1():
    return build_context(lemniscatic())


@pytest.fixture(scope="session")
def ctx_g2():
    return build_context(genus_two())
