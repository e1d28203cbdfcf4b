"""
Tests for `EPAP.physics`
"""
import numpy as np
import pytest

from EPAP import config
from EPAP.mesh import Mesh
from EPAP.physics import (
    AdmissibilityError, EosParams, PlasmaState, check_admissible, pressure,
    momentum_flux, flux_tensor, velocity, characteristic_speeds, interface_wave_speed
)


class TestEosParams:
    def test_default(self):
        assert EosParams().gamma == 2.0
        assert EosParams.quadratic().gamma == 2.0
        assert EosParams.isothermal().gamma == 1.0

    def test_invalid(self):
        with pytest.raises(ValueError):
            EosParams(0.5)

    def test_from_dict(self):
        assert EosParams.from_dict({'gamma': 1.4}).gamma == 1.4
        assert EosParams.from_dict({}).gamma == 2.0


def test_check_admissible():
    check_admissible(np.ones(4))
    with pytest.raises(AdmissibilityError):
        check_admissible(np.array([1.0, np.nan, 1.0]))
    with pytest.raises(AdmissibilityError):
        check_admissible(np.array([1.0, 0.1*config.DENSITY_FLOOR]))
    with pytest.raises(AdmissibilityError):
        check_admissible(np.array([1.0, -1.0]))
    assert issubclass(AdmissibilityError, ValueError)


class TestPlasmaState:
    def test_init(self, mesh1d):
        state = PlasmaState(mesh1d, np.ones(16), np.zeros((1, 16)), np.zeros(16), lam=0.1)
        assert state.lambda2 == pytest.approx(0.01)
        assert state.time == 0.0
        assert state.is_finite()

    def test_shapes(self, mesh1d, mesh2d):
        with pytest.raises(ValueError):
            PlasmaState(mesh1d, np.ones(15), np.zeros((1, 16)), np.zeros(16), lam=0.1)
        with pytest.raises(ValueError):
            PlasmaState(mesh1d, np.ones(16), np.zeros(16), np.zeros(16), lam=0.1)
        with pytest.raises(ValueError):
            PlasmaState(mesh2d, np.ones((8, 8)), np.zeros((1, 8, 8)), np.zeros((8, 8)), lam=0.1)

    def test_negative_lambda(self, mesh1d):
        with pytest.raises(ValueError):
            PlasmaState(mesh1d, np.ones(16), np.zeros((1, 16)), np.zeros(16), lam=-1.0)

    def test_evolve(self, mesh1d):
        state = PlasmaState(mesh1d, np.ones(16), np.zeros((1, 16)), np.zeros(16), lam=0.1)
        new = state.evolve(rho=2*np.ones(16), time=0.5)
        assert new is not state
        assert np.all(new.rho == 2)
        assert np.all(state.rho == 1)
        assert new.time == 0.5
        assert new.lam == state.lam
        assert new.q is state.q

    def test_not_finite(self, mesh1d):
        phi = np.zeros(16)
        phi[3] = np.inf
        state = PlasmaState(mesh1d, np.ones(16), np.zeros((1, 16)), phi, lam=0.1)
        assert not state.is_finite()


class TestFluxes:
    def test_pressure(self, eos):
        rho = np.array([0.5, 1.0, 2.0])
        np.testing.assert_allclose(pressure(rho, eos), rho**2)
        np.testing.assert_allclose(pressure(rho, EosParams.isothermal()), rho)
        with pytest.raises(AdmissibilityError):
            pressure(np.array([0.0, 1.0]), eos)

    def test_momentum_flux_1d(self, eos):
        rho = np.array([1.0, 2.0])
        q = np.array([[3.0, 4.0]])
        flux = momentum_flux(rho, q, eos)
        assert flux.shape == (1, 1, 2)
        np.testing.assert_allclose(flux[0, 0], q[0]**2/rho + rho**2)

    def test_flux_tensor_2d(self, mesh2d, eos):
        rng = np.random.default_rng(3)
        rho = 1 + 0.1*rng.random((8, 8))
        q = rng.random((2, 8, 8))
        state = PlasmaState(mesh2d, rho, q, np.zeros((8, 8)), lam=1.0)
        flux = flux_tensor(state, eos)
        assert flux.shape == (2, 2, 8, 8)
        np.testing.assert_allclose(flux[0, 1], q[0]*q[1]/rho)
        np.testing.assert_allclose(flux[1, 0], flux[0, 1])
        np.testing.assert_allclose(flux[1, 1], q[1]**2/rho + rho**2)

    def test_velocity(self, mesh1d):
        state = PlasmaState(mesh1d, 2*np.ones(16), np.ones((1, 16)), np.zeros(16), lam=0.1)
        np.testing.assert_allclose(velocity(state), 0.5)
        bad = state.evolve(rho=np.zeros(16))
        with pytest.raises(AdmissibilityError):
            velocity(bad)

    def test_characteristic_speeds(self):
        u = np.array([-1.0, 0.5])
        speeds = characteristic_speeds(u)
        assert speeds.shape == (4, 2)
        np.testing.assert_allclose(speeds[:, 0], [0, -1, -1, -2])

    def test_interface_wave_speed(self):
        rho_l = np.array([1.0, 2.0])
        rho_r = np.array([1.0, 1.0])
        q_l = np.array([[1.0, 2.0]])
        q_r = np.array([[-3.0, 0.5]])
        alpha = interface_wave_speed(rho_l, q_l, rho_r, q_r, 0)
        np.testing.assert_allclose(alpha, [6.0, 2.0])
        with pytest.raises(AdmissibilityError):
            interface_wave_speed(np.array([0.0, 1.0]), q_l, rho_r, q_r, 0)


def test_mesh_mismatch():
    mesh = Mesh((8,), (1.0,))
    with pytest.raises(ValueError):
        PlasmaState(mesh, np.ones(16), np.zeros((1, 16)), np.zeros(16), lam=0.1)
