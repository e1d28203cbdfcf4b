"""
Base parameter class
"""
from typing import Tuple

import yaml


class BaseParameters:
    """
    Base class for Parameters

    Subclasses set ``_PRESET_PATH`` to a YAML file of named
    dictionaries to get ``from_preset``.
    """
    def __init__(self, **kwargs):
        for key, value in kwargs.items():
            self.__setattr__(key, value)

    @classmethod
    def _from_dict(cls, d: dict, *args):
        return cls(**d)

    @classmethod
    def from_dict(cls, d: dict, *args):
        """
        Construct a BaseParameters (or subclass) instance from a dictionary.

        Parameters
        ----------
        d : dict
            The dictionary containing the parameters.

        Returns
        -------
        BaseParameters or subclass
            An instance initialized with the provided parameters.

        Notes
        -----
        A ``preset`` key selects a classmethod of the same name (``-``
        read as ``_``) if there is one, and otherwise the entry of the
        preset file.
        """
        if 'preset' in d.keys():
            name = str(d['preset'])
            factory = getattr(cls, name.replace('-', '_'), None)
            if callable(factory):
                return factory()
            return cls.from_preset(name, *args)
        return cls._from_dict(d, *args)

    @classmethod
    def _read_presets(cls) -> dict:
        path = getattr(cls, '_PRESET_PATH', None)
        if path is None:
            raise NotImplementedError(f'{cls.__name__} does not have a ``_PRESET_PATH`` attribute.')
        with open(path, 'r', encoding='UTF-8') as file:
            return yaml.safe_load(file) or {}

    @classmethod
    def preset_names(cls) -> Tuple[str, ...]:
        """
        The names in the preset file.
        """
        return tuple(cls._read_presets().keys())

    @classmethod
    def preset_data(cls, name: str) -> dict:
        """
        A copy of the raw dictionary of a preset.

        Raises
        ------
        KeyError
            If `name` is not in the preset file.
        NotImplementedError
            If the class has no preset file.
        """
        presets = cls._read_presets()
        if name not in presets:
            raise KeyError(f'Unknown {cls.__name__} preset {name!r}. Choose from {tuple(presets.keys())}.')
        return dict(presets[name])

    @classmethod
    def from_preset(cls, name: str, *args):
        """
        Load an instance from the preset file.

        Parameters
        ----------
        name : str
            The name of the preset to load.
        *args
            Passed on to ``_from_dict``.

        Returns
        -------
        BaseParameters
            The class instance loaded from a preset.
        """
        return cls._from_dict(cls.preset_data(name), *args)

    def to_dict(self) -> dict:
        """
        The parameters as plain python values, for logging and CSV headers.
        """
        out = {}
        for key, value in vars(self).items():
            if key.startswith('_'):
                continue
            if isinstance(value, BaseParameters):
                value = value.to_dict()
            elif isinstance(value, tuple):
                value = list(value)
            out[key] = value
        return out
