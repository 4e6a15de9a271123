"""Shared fixtures for selmer_pairing tests."""

import pytest

from selmer_pairing.descent import new_curve


@pytest.fixture
def congruent_one():
    """y^2 = x^3 - x, rank 0."""
    return new_curve(-1, 0, 1)


@pytest.fixture
def congruent_six():
    """y^2 = x^3 - 36x, rank 1 with generator (-3, 9)."""
    return new_curve(-6, 0, 6)
