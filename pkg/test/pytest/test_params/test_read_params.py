"""
Tests for `EPAP.params.read`
"""
from pathlib import Path

import pytest

from EPAP import config
from EPAP.params.read import (
    Header, OutputParameters, SchemeParameters, StudyParameters, ExperimentParameters
)

cfg_path = Path(__file__).parent / 'test.yaml'


class TestHeader:
    def test_from_dict(self):
        header = Header.from_dict({'data_path': 'abc', 'verbose': 2})
        assert header.data_path == config.EPAP_PARENT_PATH / 'abc'
        assert header.verbose == 2
        assert header.desc is None
        assert header.workers == 1

    def test_defaults(self):
        header = Header.from_dict({})
        assert header.data_path == config.EPAP_PARENT_PATH / 'run'

    def test_workers(self):
        with pytest.raises(ValueError):
            Header('run', workers=0)

    def test_to_dict(self):
        d = Header('out', desc='x').to_dict()
        assert d == {'data_path': 'out', 'verbose': 1, 'desc': 'x', 'workers': 1}


class TestOutputParameters:
    def test_defaults(self):
        out = OutputParameters.from_dict({})
        assert out.metrics_every == 1
        assert out.snapshot_every == 0
        assert out.write_fields

    def test_invalid(self):
        with pytest.raises(ValueError):
            OutputParameters(metrics_every=0)
        with pytest.raises(ValueError):
            OutputParameters(snapshot_every=-1)


class TestSchemeParameters:
    def test_defaults(self):
        scheme = SchemeParameters.from_dict({})
        assert scheme.kind == 'penalized'
        assert scheme.tableau == 'DP2A242'
        assert scheme.dt is None
        built = scheme.build()
        assert built.tableau.name == 'DP2A242'

    def test_build(self):
        scheme = SchemeParameters.from_dict({'kind': 'limit', 'tableau': 'ARS222', 'gamma': 0.25, 'dt': '1e-3'})
        assert scheme.dt == 1e-3
        built = scheme.build()
        assert built.kind == 'limit'
        assert built.tableau.a_im[1, 1] == 0.25
        assert scheme.build('DP1A242').tableau.name == 'DP1A242'

    def test_first_order(self):
        built = SchemeParameters(kind='first-order', tableau='ARS222').build()
        assert built.tableau.name == 'FirstOrder'

    def test_invalid(self):
        with pytest.raises(ValueError):
            SchemeParameters(kind='explicit').build()
        with pytest.raises(ValueError):
            SchemeParameters(tableau='RK4').build()


class TestStudyParameters:
    def test_defaults(self):
        study = StudyParameters.from_dict({})
        assert study.lambdas == (1e-4, 1e-5, 1e-6)
        assert study.tableaux == ('DP2A242', 'DP1A242', 'ARS222')
        assert study.reference == 'limit'
        assert study.n_list is None

    def test_invalid(self):
        with pytest.raises(ValueError):
            StudyParameters(lambdas=[])
        with pytest.raises(ValueError):
            StudyParameters(lambdas=[1e-3], reference='exact')


class TestExperimentParameters:
    def test_from_yaml(self):
        params = ExperimentParameters.from_yaml(cfg_path)
        assert params.header.data_path == config.EPAP_PARENT_PATH / 'test_run'
        assert params.header.verbose == 0
        assert params.scenario.name == 'test_qn'
        assert params.scenario.mesh.n == (32,)
        assert params.scheme.tableau == 'ARS222'
        assert params.output.metrics_every == 2
        assert params.study.reference == 'finest'
        assert params.n_list() == (16, 32, 64)
        assert params.scheme_kind().tableau.name == 'ARS222'

    def test_minimal(self):
        params = ExperimentParameters.from_dict({'scenario': {'preset': 'case1'}})
        assert params.scenario.name == 'case1'
        assert params.scheme.kind == 'penalized'
        assert params.n_list() == (100,)
        with pytest.raises(KeyError):
            ExperimentParameters.from_dict({})

    def test_n_list_priority(self):
        params = ExperimentParameters.from_dict({
            'scenario': {'preset': 'aoc'},
            'study': {'n_list': [8, 16]},
        })
        assert params.n_list() == (8, 16)

    def test_run_scenario(self):
        params = ExperimentParameters.from_dict({
            'scenario': {'preset': 'maxwellian'},
            'scheme': {'dt': 1e-3, 'dt_max': 2e-3},
        })
        scenario = params.run_scenario()
        assert scenario.dt == 1e-3
        assert scenario.dt_max == 2e-3
        assert params.scenario.dt is None
        plain = ExperimentParameters.from_dict({'scenario': {'preset': 'maxwellian'}})
        assert plain.run_scenario() is plain.scenario
