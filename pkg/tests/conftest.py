import numpy as np
import pytest

from neurocycles import Params, equilibria

# The three-nested-cycle witness from the parameter-plane study.
WITNESS = Params(a=16.0, b=130.0, c=111.165)


@pytest.fixture(scope="session")
def witness_params() -> Params:
    return WITNESS


@pytest.fixture(scope="session")
def witness_eq(witness_params):
    eqs = equilibria(witness_params)
    assert len(eqs) == 1
    return eqs[0]


def random_params(rng: np.random.Generator, n: int) -> list[Params]:
    """Moderate-range random parameter points, mixing 1- and 3-state cases."""
    out = []
    for _ in range(n):
        if rng.random() < 0.5:
            a = float(rng.uniform(0.2, 8.0))
            b = float(rng.uniform(0.2, 12.0))
            c = float(rng.uniform(-8.0, 8.0))
        else:
            # push into (or near) the multi-state wedge: a - b > 1
            a = float(rng.uniform(2.5, 20.0))
            b = float(rng.uniform(0.2, max(0.3, a - 1.2)))
            c = float(rng.uniform(-0.6 * a, 0.2 * a))
        out.append(Params(a=a, b=b, c=c))
    return out
