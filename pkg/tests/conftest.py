import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from splitbench.data import ExpressionMatrix


@pytest.fixture
def small_matrix() -> ExpressionMatrix:
    values = np.array(
        [
            [-1.0, 0.0],
            [1.0, 0.0],
            [0.0, 0.0],
        ]
    )
    return ExpressionMatrix(("s1", "s2", "s3"), ("f1", "f2"), values)


def random_matrix(rng: np.random.Generator, n: int, p: int) -> ExpressionMatrix:
    return ExpressionMatrix(
        tuple(f"s{i}" for i in range(n)),
        tuple(f"g{j}" for j in range(p)),
        rng.normal(size=(n, p)),
    )
