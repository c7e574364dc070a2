# tests/fixtures/__init__.py
"""Fixtures package for test data and helper functions."""

from tests.fixtures.registration_fixtures import (
    RegistrationFixtures,
    constant_objective,
    ones_count_objective,
    unsigned_value_objective,
    zero_lattice,
)

__all__ = [
    "RegistrationFixtures",
    "constant_objective",
    "ones_count_objective",
    "unsigned_value_objective",
    "zero_lattice",
]
