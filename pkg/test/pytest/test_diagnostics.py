"""
Tests for `EPAP.diagnostics`
"""
import numpy as np
import pytest
from astropy.table import Table

from EPAP.diagnostics import (
    METRIC_COLUMNS, ApMetrics, ap_metrics, l2_error, restrict,
    ConvergenceRow, observed_orders, RunReport
)
from EPAP.integrator import InstabilityError
from EPAP.mesh import Mesh
from EPAP.physics import PlasmaState


class TestApMetrics:
    def test_uniform(self, mesh2d, uniform_state):
        m = ap_metrics(uniform_state(mesh2d, 0.1), dt=0.01)
        assert m.dev_rho_linf == 0
        assert m.div_u_linf == 0
        assert m.phi_linf == 0
        assert m.mass == pytest.approx(1.0)
        assert not m.blown_up
        assert m.dt == 0.01

    def test_norms(self, mesh1d):
        x, = mesh1d.coordinates()
        rho = 1 + 0.1*np.cos(2*np.pi*x)
        state = PlasmaState(mesh1d, rho, rho[np.newaxis], 2*np.ones(16), lam=0.1, time=0.3)
        m = ap_metrics(state)
        assert m.t == 0.3
        assert m.dev_rho_linf == pytest.approx(0.1)
        # mean of cos^2 over a period is 1/2
        assert m.dev_rho_l2 == pytest.approx(0.1/np.sqrt(2))
        assert m.phi_l2 == pytest.approx(2.0)
        assert m.div_u_linf == 0

    def test_nan(self, mesh1d):
        rho = np.ones(16)
        rho[2] = np.nan
        state = PlasmaState(mesh1d, rho, np.ones((1, 16)), np.zeros(16), lam=0.1)
        m = ap_metrics(state)
        assert m.blown_up
        assert np.isnan(m.div_u_l2)
        assert np.isnan(m.mass)

    def test_threshold(self, mesh1d):
        state = PlasmaState(mesh1d, np.ones(16), np.ones((1, 16)), 1e9*np.ones(16), lam=0.1)
        assert ap_metrics(state).blown_up
        assert not ap_metrics(state, threshold=1e10).blown_up

    def test_frozen(self, mesh1d, uniform_state):
        m = ap_metrics(uniform_state(mesh1d, 0.1))
        with pytest.raises(AttributeError):
            m.t = 1.0


class TestErrors:
    def test_l2_error(self, mesh2d):
        assert l2_error(np.full((8, 8), 3.0), np.full((8, 8), 1.0), mesh2d) == pytest.approx(2.0)
        mesh = Mesh((10,), (4.0,))
        assert l2_error(np.ones(10), np.zeros(10), mesh) == pytest.approx(2.0)
        with pytest.raises(ValueError):
            l2_error(np.ones(9), np.zeros(10), mesh)

    def test_restrict(self):
        coarse = Mesh((4,), (1.0,))
        fine = np.arange(16, dtype=float)
        np.testing.assert_array_equal(restrict(fine, coarse), [0, 4, 8, 12])
        with pytest.raises(ValueError):
            restrict(np.arange(10.0), coarse)
        with pytest.raises(ValueError):
            restrict(np.zeros((8, 8)), coarse)

    def test_restrict_2d(self):
        coarse = Mesh((4, 4), (1.0, 1.0))
        fine = np.arange(64, dtype=float).reshape(8, 8)
        out = restrict(fine, coarse)
        assert out.shape == (4, 4)
        assert out[1, 1] == fine[2, 2]

    def test_restrict_coordinates(self):
        coarse = Mesh((8,), (1.0,))
        fine = coarse.refined(4)
        x_fine, = fine.coordinates()
        x_coarse, = coarse.coordinates()
        np.testing.assert_allclose(restrict(x_fine, coarse), x_coarse)


class TestObservedOrders:
    def test_second_order(self):
        rows = observed_orders([(320, 4e-4), (640, 1e-4), (1280, 2.5e-5)])
        assert (rows[0].n_cells, rows[0].error) == (320, 4e-4)
        assert isinstance(rows[0], ConvergenceRow)
        assert np.isnan(rows[0].order)
        assert rows[1].order == pytest.approx(2.0)
        assert rows[2].order == pytest.approx(2.0)

    def test_reported_values(self):
        rows = observed_orders([(640, 1.0), (1280, 2**-1.77)])
        assert rows[1].order == pytest.approx(1.77)

    def test_zero_error(self):
        rows = observed_orders([(4, 1.0), (8, 0.0)])
        assert np.isnan(rows[1].order)

    def test_not_doubling(self):
        with pytest.raises(ValueError):
            observed_orders([(100, 1.0), (300, 0.1)])


class TestRunReport:
    def make(self, mesh, uniform_state):
        report = RunReport(mesh, meta={'scenario': 'test'})
        state = uniform_state(mesh, 0.1)
        report.record(ap_metrics(state), 0)
        report.snapshot(state, 0)
        new = state.evolve(time=0.5)
        report.record(ap_metrics(new, dt=0.5), 1)
        report.finish(new, 1, 0.5)
        return report

    def test_finish(self, mesh1d, uniform_state):
        report = self.make(mesh1d, uniform_state)
        assert report.completed
        assert report.steps == 1
        assert len(report.rows) == 2
        assert len(report.snapshots) == 2
        assert 'Reached' in report.message
        assert report.to_dict()['final']['t'] == 0.5

    def test_finish_records_skipped(self, mesh1d, uniform_state):
        report = RunReport(mesh1d)
        state = uniform_state(mesh1d, 0.1)
        report.record(ap_metrics(state), 0)
        report.finish(state.evolve(time=1.0), 3, 0.25)
        assert [step for step, _ in report.rows] == [0, 3]
        assert report.metrics[-1].dt == 0.25

    def test_marks(self, mesh1d):
        report = RunReport(mesh1d)
        report.mark_instability(InstabilityError('boom', stage=2, time=0.1), 4)
        assert report.status == 'instability'
        assert 'step 4' in report.message
        assert report.error.stage == 2
        report = RunReport(mesh1d)
        report.mark_blowup(7)
        assert report.status == 'blown_up'
        assert not report.completed

    def test_metrics_table(self, mesh1d, uniform_state):
        table = self.make(mesh1d, uniform_state).metrics_table()
        assert table.colnames == ['step'] + list(METRIC_COLUMNS)
        assert list(table['step']) == [0, 1]
        assert table['t'][1] == 0.5
        assert table.meta['scenario'] == 'test'

    def test_fields_table(self, mesh2d, uniform_state):
        table = self.make(mesh2d, uniform_state).fields_table()
        assert table.colnames == ['x1', 'x2', 'rho', 'q1', 'q2', 'u1', 'u2', 'phi']
        assert len(table) == 64
        assert table['x2'][1] == pytest.approx(1/8)
        assert table.meta['t'] == 0.5

    def test_write(self, tmp_path, mesh1d, uniform_state):
        report = self.make(mesh1d, uniform_state)
        report.write(tmp_path)
        metrics = Table.read(tmp_path / 'metrics.csv', format='ascii.csv')
        assert len(metrics) == 2
        assert 'dev_rho_l2' in metrics.colnames
        first_line = (tmp_path / 'metrics.csv').read_text(encoding='UTF-8').splitlines()[0]
        assert 'completed' in first_line
        fields = Table.read(tmp_path / 'fields' / 'fields_00001.csv', format='ascii.csv')
        assert fields.colnames == ['x', 'rho', 'q1', 'u1', 'phi']
        assert np.all(fields['u1'] == 0.7)

    def test_write_no_fields(self, tmp_path, mesh1d, uniform_state):
        self.make(mesh1d, uniform_state).write(tmp_path, write_fields=False)
        assert (tmp_path / 'metrics.csv').exists()
        assert not (tmp_path / 'fields').exists()
