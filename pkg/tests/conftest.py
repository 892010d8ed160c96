import numpy as np
import pytest

from quasiarc import MetricSpace, DiscreteArc, generate_from_string


@pytest.fixture(scope="session")
def line100():
    return MetricSpace.euclidean([(float(i),) for i in range(100)])


@pytest.fixture(scope="session")
def grid8():
    return generate_from_string("grid2d:8x8")


@pytest.fixture(scope="session")
def koch_small():
    return generate_from_string("koch:2:4")


def random_cloud_space(seed, n=24, dim=2):
    """Step-connected random cloud: rho from the spanning structure."""
    rng = np.random.default_rng(seed)
    coords = rng.uniform(0.0, 10.0, size=(n, dim))
    coords = np.unique(np.round(coords, 3), axis=0)
    space = MetricSpace.euclidean(coords)
    # grow rho until connected; keeps the sample honest but usable
    rho = 1.5 * space.h
    while True:
        space = MetricSpace.euclidean(coords, step_radius=rho)
        if space.is_step_connected():
            return space
        rho *= 1.3


def line_arc(space):
    return DiscreteArc(tuple(range(space.n)))
