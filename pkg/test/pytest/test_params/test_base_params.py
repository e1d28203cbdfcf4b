"""
Test BaseParameters
"""
import pytest

from EPAP.params.base import BaseParameters


def test_base_parameters_from_dict():
    params_dict = {'param1': 1, 'param2': 2}
    params = BaseParameters.from_dict(params_dict)
    assert params.param1 == 1
    assert params.param2 == 2


def test_base_parameters_to_dict():
    inner = BaseParameters(value=(1, 2))
    params = BaseParameters(inner=inner, name='x', _hidden=3)
    assert params.to_dict() == {'inner': {'value': [1, 2]}, 'name': 'x'}


def test_base_parameters_no_preset():
    with pytest.raises(NotImplementedError):
        BaseParameters.from_preset('anything')


class Limiter(BaseParameters):
    """
    A minimal subclass with a preset file.
    """
    def __init__(self, name: str, theta: float = 1.0):
        self.name = name
        self.theta = theta

    @classmethod
    def _from_dict(cls, d: dict, theta: float = None):
        return cls(d['name'], float(d.get('theta', 1.0)) if theta is None else theta)

    @classmethod
    def upwind(cls):
        return cls('upwind', 0.0)


@pytest.fixture
def limiter_presets(tmp_path, monkeypatch):
    path = tmp_path / 'limiters.yaml'
    path.write_text('minmod:\n  name: minmod\nsuperbee:\n  name: superbee\n  theta: 2.0\n', encoding='UTF-8')
    monkeypatch.setattr(Limiter, '_PRESET_PATH', path, raising=False)
    return path


def test_preset_file(limiter_presets):
    assert Limiter.preset_names() == ('minmod', 'superbee')
    assert Limiter.from_preset('superbee').theta == 2.0
    assert Limiter.from_preset('superbee', 1.5).theta == 1.5
    data = Limiter.preset_data('minmod')
    data['name'] = 'changed'
    assert Limiter.preset_data('minmod') == {'name': 'minmod'}
    with pytest.raises(KeyError):
        Limiter.preset_data('vanleer')


def test_preset_dispatch(limiter_presets):
    assert Limiter.from_dict({'preset': 'upwind'}).theta == 0.0
    assert Limiter.from_dict({'preset': 'superbee'}).name == 'superbee'
    assert Limiter.from_dict({'name': 'mc', 'theta': 1.5}).theta == 1.5
