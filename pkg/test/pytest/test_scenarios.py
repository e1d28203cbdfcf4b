"""
Tests for `EPAP.scenarios`
"""
import numpy as np
import pytest

from EPAP import scenarios
from EPAP.mesh import Mesh
from EPAP.physics import AdmissibilityError
from EPAP.scenarios import (
    Scenario, qn_perturbation_1d, maxwellian_perturbation, aoc_setup, qn_2d,
    preset_data, preset_names
)


class TestBuilders:
    def test_qn_perturbation(self):
        s = qn_perturbation_1d()
        assert s.mesh == Mesh((100,), (1.0,))
        assert s.lam == 1e-4
        assert s.cfl == 0.45
        assert s.t_final == 0.1
        rho, q = s.initial_fields()
        np.testing.assert_array_equal(rho, 1.0)
        assert q.shape == (1, 100)
        assert q[0, 0] == 1 + 1e-8
        assert np.max(np.abs(q - 1)) == pytest.approx(1e-8)

    def test_qn_density(self):
        rho, q = qn_perturbation_1d(delta2=1e-2, rho_delta=1e-2).initial_fields()
        x, = Mesh((100,), (1.0,)).coordinates()
        wave = np.cos(32*np.pi*x)
        np.testing.assert_allclose(rho, 1 + 1e-2*wave)
        np.testing.assert_allclose(q[0], rho*(1 + 1e-2*wave))
        assert abs(np.mean(rho) - 1) < 1e-14

    @pytest.mark.parametrize('K', [0, -1, 2.5])
    def test_invalid_wave_number(self, K):
        with pytest.raises(ValueError):
            qn_perturbation_1d(K=K)

    def test_maxwellian(self):
        s = maxwellian_perturbation()
        assert s.dt_max == pytest.approx(5e-3)
        assert s.t_final == 0.035
        rho, q = s.initial_fields()
        np.testing.assert_array_equal(q, 0.0)
        assert np.max(np.abs(rho - 1)) <= 1e-2
        assert np.max(np.abs(rho - 1)) > 5e-3
        # the aliased mode is mean-free on 100 nodes
        assert abs(np.mean(rho - 1)) < 1e-13

    def test_aoc(self):
        s = aoc_setup(1e-3)
        assert s.mesh.length == (20.0,)
        assert s.n_list == (320, 640, 1280, 2560)
        assert s.params['delta2'] == 1e-2
        assert s.with_mesh(640).mesh.dx == pytest.approx((20/640,))

    def test_qn_2d(self):
        s = qn_2d(1e-3, n=32)
        rho, q = s.initial_fields()
        np.testing.assert_array_equal(rho, 1.0)
        assert q.shape == (2, 32, 32)
        assert s.mesh.dim == 2

    def test_qn_2d_divergence(self):
        # the shear part is discretely divergence free
        s = qn_2d(0.0, K=2, n=32)
        _, q = s.initial_fields()
        assert np.max(np.abs(s.mesh.central_divergence(q))) < 1e-12
        divs = []
        for lam in (1e-2, 1e-3):
            _, q = qn_2d(lam, K=2, n=32).initial_fields()
            divs.append(np.max(np.abs(s.mesh.central_divergence(q))))
        assert divs[0]/divs[1] == pytest.approx(10, rel=1e-6)

    def test_qn_2d_needs_2d(self):
        s = qn_2d(1e-3, n=16)
        with pytest.raises(ValueError):
            s.initial_fields(Mesh((16,), (1.0,)))


class TestScenario:
    def test_invalid(self):
        mesh = Mesh((8,), (1.0,))
        with pytest.raises(ValueError):
            Scenario('x', 'shock_tube', mesh, 1e-3)
        with pytest.raises(ValueError):
            Scenario('x', 'maxwellian', mesh, -1e-3)

    def test_inadmissible(self):
        s = Scenario('x', 'maxwellian', Mesh((8,), (1.0,)), 1e-3, params={'delta': 2.0, 'kappa': 2.0})
        with pytest.raises(AdmissibilityError):
            s.initial_fields()

    def test_replace(self):
        s = qn_perturbation_1d()
        t = s.replace(lam=1e-3, dt=1e-4)
        assert t.lam == 1e-3
        assert t.dt == 1e-4
        assert s.lam == 1e-4
        assert s.dt is None
        assert t.with_mesh(50).mesh.n == (50,)

    def test_initial_fields_mesh(self):
        s = qn_perturbation_1d(n=100)
        rho, q = s.initial_fields(Mesh((200,), (1.0,)))
        assert rho.shape == (200,)

    def test_round_trip(self):
        s = qn_2d(1e-3, n=16)
        t = Scenario.from_dict(s.to_dict())
        assert t.mesh == s.mesh
        assert t.params == {'K': 16.0}
        assert t.lam == s.lam
        assert t.to_dict() == s.to_dict() | {'params': {'K': 16.0}}

    def test_from_dict_scalars(self):
        s = Scenario.from_dict({'kind': 'qn_2d', 'n': 8, 'length': 2.0, 'lam': 0.1, 'bc': 'dirichlet0'})
        assert s.mesh.n == (8, 8)
        assert s.mesh.length == (2.0, 2.0)
        assert s.bc == ('dirichlet0', 'dirichlet0')
        assert s.name == 'qn_2d'


class TestPresets:
    @pytest.mark.parametrize('name', ['case1', 'case1_fine', 'case2', 'ap_study', 'maxwellian',
                                      'maxwellian_classical', 'aoc', 'qn2d'])
    def test_load(self, name):
        s = Scenario.from_preset(name)
        assert s.name == name
        assert isinstance(s.lam, float)
        assert name in preset_names()

    def test_case1(self):
        s = Scenario.from_preset('case1')
        assert s.mesh.n == (100,)
        assert s.lam == 1e-4
        assert s.params == {'delta2': 1e-8, 'K': 16.0, 'rho_delta': 0.0}
        assert Scenario.from_preset('case1_fine').mesh.n == (10000,)

    def test_case2(self):
        s = Scenario.from_preset('case2')
        assert s.cfl == 0.25
        assert s.params['delta2'] == 1e-2

    def test_maxwellian(self):
        assert Scenario.from_preset('maxwellian').dt_max == 5e-3
        assert Scenario.from_preset('maxwellian_classical').dt == 5e-3

    def test_overrides(self):
        s = Scenario.from_dict({'preset': 'case1', 'lam': 1e-6, 'n': 200, 'params': {'K': 4}})
        assert s.lam == 1e-6
        assert s.mesh.n == (200,)
        assert s.params == {'delta2': 1e-8, 'K': 4.0, 'rho_delta': 0.0}
        assert s.name == 'case1'

    def test_unknown(self):
        with pytest.raises(KeyError):
            preset_data('case99')
        with pytest.raises(KeyError):
            Scenario.from_dict({'preset': 'case99'})

    def test_preset_data_is_a_copy(self):
        data = preset_data('case1')
        data['lam'] = 1.0
        assert preset_data('case1')['lam'] == 1e-4
        assert scenarios.preset_data('aoc')['n_list'] == [320, 640, 1280, 2560]
