import numpy as np
import pytest

from weakgroup.conformance import GeneratorSpec, generate_pair, random_square


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.fixture
def pair():
    """A generic 6x5 pair with nontrivial nilpotent parts on both sides."""
    return generate_pair(GeneratorSpec(core_dim=3, nil_dim_x=2, nil_dim_y=3), seed=5)


@pytest.fixture
def singular_square(rng):
    """Square matrix of index 3 with a 3-dimensional invertible core."""
    return random_square(rng, core_dim=3, nil_dim=3)
