import numpy as np
import pytest

from modelavg.model import Dataset, DesignMatrix


def random_dataset(rng, n=None, allow_badly_scaled=False):
    """A random well-posed dataset for oracle comparisons."""
    if n is None:
        n = int(rng.integers(3, 30))
    scale = 10.0 ** rng.uniform(-2, 2) if allow_badly_scaled else 1.0
    while True:
        x1 = rng.normal(0.0, scale, n)
        x2 = rng.normal(rng.uniform(-2, 2), scale, n)
        try:
            design = DesignMatrix(x1, x2)
        except Exception:
            continue
        gram = np.array([[x1 @ x1, x1 @ x2], [x1 @ x2, x2 @ x2]])
        # Keep the oracle comparisons away from near-singular corners.
        if np.linalg.det(gram) > 1e-6 * gram[0, 0] * gram[1, 1]:
            break
    y = rng.normal(0.0, 1.0, n)
    return Dataset(design, y)


def ols_normal_equation_oracle(dataset):
    """Independent least-squares solve: stacked design, numpy linear algebra."""
    x = np.column_stack([dataset.design.x1, dataset.design.x2])
    coef = np.linalg.solve(x.T @ x, x.T @ dataset.y)
    return float(coef[0]), float(coef[1])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
