import numpy as np
import pytest

from extremalflow import ProblemParams


@pytest.fixture(scope="session")
def params():
    """Reference configuration used across the suite."""
    return ProblemParams(A=1.0, a=0.5, grid_n=201)


@pytest.fixture(scope="session")
def params_coarse():
    return ProblemParams(A=1.0, a=0.5, grid_n=101)


def pinned_curve(x, y):
    """Build a SampledCurve with the endpoint heights forced to exactly 0."""
    from extremalflow import SampledCurve

    y = np.asarray(y, dtype=float).copy()
    y[0] = 0.0
    y[-1] = 0.0
    return SampledCurve(np.column_stack([x, y]))
