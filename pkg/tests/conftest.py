import numpy as np
import pytest

from boundent import kernels
from boundent.optimize import OptimizerOptions


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the jit kernels once so timed tests measure the algorithms
    kernels.warmup()


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv("QENT_SEED", raising=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def quick_opts():
    return OptimizerOptions(restarts=16, seed=7)


def random_ket_array(rng, n_parties=3, count=1):
    dim = 2**n_parties
    raw = rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim))
    return raw / np.linalg.norm(raw, axis=1, keepdims=True)


def haar_unitary(rng, dim=2):
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(raw)
    return q * (np.diag(r) / np.abs(np.diag(r)))
