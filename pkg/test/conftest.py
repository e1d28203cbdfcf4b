"""
Configuration for pytest.
"""
import numpy as np
import pytest

from EPAP.mesh import Mesh
from EPAP.physics import EosParams
from EPAP.integrator import initial_state


@pytest.fixture
def mesh1d() -> Mesh:
    """
    A 16 cell periodic mesh on [0,1].
    """
    return Mesh((16,), (1.0,))


@pytest.fixture
def mesh2d() -> Mesh:
    """
    An 8x8 periodic mesh on [0,1]^2.
    """
    return Mesh((8, 8), (1.0, 1.0))


@pytest.fixture
def eos() -> EosParams:
    """
    The default equation of state.
    """
    return EosParams.quadratic()


@pytest.fixture
def random_state():
    """
    Factory of admissible states with mean-free density perturbations
    and a consistent potential.
    """
    def make(mesh: Mesh, lam: float, seed: int = 0, amplitude: float = 0.1):
        rng = np.random.default_rng(seed)
        drho = rng.uniform(-1, 1, mesh.shape)
        rho = 1 + amplitude*(drho - np.mean(drho))
        q = 1 + amplitude*rng.uniform(-1, 1, (mesh.dim,) + mesh.shape)
        return initial_state(mesh, rho, q, lam)
    return make


@pytest.fixture
def uniform_state():
    """
    Factory of exact quasi-neutral uniform states.
    """
    def make(mesh: Mesh, lam: float, velocity: float = 0.7):
        rho = np.ones(mesh.shape)
        q = velocity*np.ones((mesh.dim,) + mesh.shape)
        return initial_state(mesh, rho, q, lam)
    return make
