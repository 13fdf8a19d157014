import numpy as np
import pytest

from pinchlab.mesh import make_clifford_torus, make_geodesic_sphere, make_perturbed_sphere, north_pole
from pinchlab.operators import assemble


@pytest.fixture(scope="session")
def pole():
    return north_pole()


@pytest.fixture(scope="session")
def sphere3(pole):
    return make_geodesic_sphere(pole, np.pi / 4, 3)


@pytest.fixture(scope="session")
def sphere4(pole):
    return make_geodesic_sphere(pole, np.pi / 4, 4)


@pytest.fixture(scope="session")
def torus24():
    return make_clifford_torus(1, 1, 24, 24)


@pytest.fixture(scope="session")
def torus48():
    return make_clifford_torus(1, 1, 48, 48)


@pytest.fixture(scope="session")
def bumpy3(pole):
    return make_perturbed_sphere(pole, np.pi / 4, 0.05, 2, 3)


@pytest.fixture(scope="session")
def ops_sphere4(sphere4):
    return assemble(sphere4)


@pytest.fixture(scope="session")
def ops_torus48(torus48):
    return assemble(torus48)


def random_rotation(rng, dim=4):
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))
