import numpy as np
import pytest

from fractal_fourier.ifs import (
    SelfSimilarIFS,
    SimilarityMap,
    cantor_ifs,
    ifs_1d,
    uniform_ifs,
)


@pytest.fixture(scope="session")
def cantor():
    return cantor_ifs()


@pytest.fixture(scope="session")
def uniform01():
    return uniform_ifs(0.0, 1.0)


@pytest.fixture(scope="session")
def uniform12():
    return uniform_ifs(1.0, 2.0)


@pytest.fixture(scope="session")
def mixed_ratios():
    # Non-homogeneous: ratios {1/2, 1/4}, attractor inside [0, 1].
    return ifs_1d([0.5, 0.25], [0.0, 0.75])


@pytest.fixture(scope="session")
def square_2d():
    # Four-corner system on the unit square (SSC), ratio 1/3.
    maps = []
    eye = np.eye(2)
    for tx in (0.0, 2 / 3):
        for ty in (0.0, 2 / 3):
            maps.append(SimilarityMap(1 / 3, eye, np.array([tx, ty])))
    return SelfSimilarIFS(tuple(maps), (0.25, 0.25, 0.25, 0.25))


def random_orthogonal(rng, k):
    q, r = np.linalg.qr(rng.normal(size=(k, k)))
    q = q * np.sign(np.diag(r))
    return q


def random_similarity(rng, k):
    return SimilarityMap(
        ratio=rng.uniform(0.05, 0.95),
        orientation=random_orthogonal(rng, k),
        translation=rng.normal(size=k),
    )
