"""Shared fixtures: the two zero-potential reference configurations.

R0 has a trivial weight (alpha = 1) so everything has elementary closed
forms; R1 doubles the weight on the right half so the jump machinery is
actually exercised.
"""
import pytest

from diracbvp.model import (PI, BoundaryParams, PotentialSpec, ProblemConfig,
                            Weight)


def reference_config(alpha: float = 1.0, grid_points: int = 1024,
                     potential: PotentialSpec = None) -> ProblemConfig:
    return ProblemConfig(
        boundary=BoundaryParams(0.0, -1.0, 1.0, 0.0, 0.0, -1.0, 1.0, 0.0),
        weight=Weight(alpha=alpha, a=PI / 2.0),
        potential=potential if potential is not None else PotentialSpec.zero(),
        grid_points=grid_points)


@pytest.fixture(scope="session")
def r0():
    return reference_config(1.0, 1024)


@pytest.fixture(scope="session")
def r1():
    return reference_config(2.0, 1024)
