import numpy as np
import pytest

from chronoseg.synth import gen_corpus


@pytest.fixture(scope="session")
def tiny_corpus():
    """3 patients + 3 controls x 4 days; enough rows for quick model checks."""
    return gen_corpus(3, 3, 4, seed=7)


@pytest.fixture(scope="session")
def separable_data():
    """Two well-separated gaussian blobs, 200 rows, 5 features."""
    rng = np.random.default_rng(42)
    X = np.vstack([rng.normal(0, 1, (100, 5)), rng.normal(4, 1, (100, 5))])
    y = np.r_[np.zeros(100, dtype=int), np.ones(100, dtype=int)]
    perm = rng.permutation(200)
    return X[perm], y[perm]
