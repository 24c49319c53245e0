import numpy as np
import pytest

from bellsplit.smallmat import haar_unitary


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(202406))


def haar_ensemble(n, count, base_seed=1000):
    """Deterministic list of Haar unitaries for property loops."""
    return [haar_unitary(n, base_seed + i) for i in range(count)]
