import numpy as np
import pytest

from hoid.tensor import TuckerDecomp, tucker_to_full


def rng_for(seed):
    return np.random.Generator(np.random.PCG64(seed))


def random_orthonormal(n, k, seed):
    Q, _ = np.linalg.qr(rng_for(seed).standard_normal((n, k)))
    return Q


def random_tucker(dims, ranks, seed):
    rng = rng_for(seed)
    core = rng.standard_normal(ranks)
    factors = [rng.standard_normal((I, r)) for I, r in zip(dims, ranks)]
    T = TuckerDecomp(core, factors)
    return tucker_to_full(T), T


def kahan(n, c=0.285, tau=1e-13):
    """Kahan matrix with a slight column scaling so greedy pivoting keeps the natural order."""
    s = np.sqrt(1.0 - c * c)
    K = np.eye(n) - c * np.triu(np.ones((n, n)), 1)
    K = np.diag(s ** np.arange(n)) @ K
    return K * (1.0 - tau) ** np.arange(n)


@pytest.fixture
def rng():
    return rng_for(12345)
