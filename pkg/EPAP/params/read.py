"""
Module to read parameters
"""
from pathlib import Path
from typing import Sequence, Tuple

import yaml

from .. import config
from ..integrator import SchemeKind
from ..scenarios import Scenario
from ..tableaux import load as load_tableau
from .base import BaseParameters

REFERENCE_KINDS = ('limit', 'finest')
"""
Reference solutions of a convergence study.

:type: tuple of str
"""


class Header(BaseParameters):
    """
    Header for an EPAP experiment

    Parameters
    ----------
    data_path : pathlib.Path
        The path to store run data.
    verbose : int, default=1
        The level of verbosity.
    desc : str, default=None
        A description of the run.
    workers : int, default=1
        The number of concurrent jobs of a sweep.

    Attributes
    ----------
    data_path : pathlib.Path
        The path to store run data.
    verbose : int
        The level of verbosity.
    desc : str or None
        A description of the run.
    workers : int
        The number of concurrent jobs of a sweep.
    """
    _defaults = {
        'data_path': 'run',
        'verbose': 1,
        'desc': None,
        'workers': 1
    }

    def __init__(
        self,
        data_path: Path,
        verbose: int = 1,
        desc: str = None,
        workers: int = 1
    ):
        if workers < 1:
            raise ValueError(f'At least one worker is needed, got {workers}.')
        self.data_path = Path(data_path)
        self.verbose = verbose
        self.desc = desc
        self.workers = workers

    @classmethod
    def _from_dict(cls, d: dict):
        return cls(
            data_path=config.EPAP_PARENT_PATH / d.get('data_path', cls._defaults['data_path']),
            verbose=int(d.get('verbose', cls._defaults['verbose'])),
            desc=None if d.get('desc', None) is None else str(d['desc']),
            workers=int(d.get('workers', cls._defaults['workers']))
        )

    def to_dict(self) -> dict:
        return {
            'data_path': str(self.data_path),
            'verbose': self.verbose,
            'desc': self.desc,
            'workers': self.workers
        }


class OutputParameters(BaseParameters):
    """
    What a run records.

    Parameters
    ----------
    metrics_every : int, default=1
        Record the metrics every this many steps. The first and last
        states are always recorded.
    snapshot_every : int, default=0
        Keep the fields every this many steps, 0 to keep only the final state.
    write_fields : bool, default=True
        Write the field snapshots to disk.
    """
    _defaults = {
        'metrics_every': 1,
        'snapshot_every': 0,
        'write_fields': True
    }

    def __init__(
        self,
        metrics_every: int = 1,
        snapshot_every: int = 0,
        write_fields: bool = True
    ):
        if metrics_every < 1:
            raise ValueError(f'metrics_every must be positive, got {metrics_every}.')
        if snapshot_every < 0:
            raise ValueError(f'snapshot_every must be non-negative, got {snapshot_every}.')
        self.metrics_every = metrics_every
        self.snapshot_every = snapshot_every
        self.write_fields = write_fields

    @classmethod
    def _from_dict(cls, d: dict):
        return cls(
            metrics_every=int(d.get('metrics_every', cls._defaults['metrics_every'])),
            snapshot_every=int(d.get('snapshot_every', cls._defaults['snapshot_every'])),
            write_fields=bool(d.get('write_fields', cls._defaults['write_fields']))
        )


class SchemeParameters(BaseParameters):
    """
    The time stepper of an experiment.

    Parameters
    ----------
    kind : str, default='penalized'
        ``'penalized'``, ``'first-order'``, ``'classical'`` or ``'limit'``.
    tableau : str, default='DP2A242'
        A builtin tableau name or the path of a tableau YAML file.
    gamma : float, optional
        The :math:`\\gamma` of the tableau.
    limiter : str, default='minmod'
        The slope limiter.
    dt : float, optional
        A fixed time step overriding the scenario.
    dt_max : float, optional
        A cap on the CFL step overriding the scenario.
    """
    _defaults = {
        'kind': 'penalized',
        'tableau': 'DP2A242',
        'gamma': None,
        'limiter': 'minmod',
        'dt': None,
        'dt_max': None
    }

    def __init__(
        self,
        kind: str = 'penalized',
        tableau: str = 'DP2A242',
        gamma: float = None,
        limiter: str = 'minmod',
        dt: float = None,
        dt_max: float = None
    ):
        self.kind = kind
        self.tableau = tableau
        self.gamma = gamma
        self.limiter = limiter
        self.dt = dt
        self.dt_max = dt_max

    @classmethod
    def _from_dict(cls, d: dict):
        def optional_float(key):
            value = d.get(key, cls._defaults[key])
            return None if value is None else float(value)
        return cls(
            kind=str(d.get('kind', cls._defaults['kind'])),
            tableau=str(d.get('tableau', cls._defaults['tableau'])),
            gamma=optional_float('gamma'),
            limiter=str(d.get('limiter', cls._defaults['limiter'])),
            dt=optional_float('dt'),
            dt_max=optional_float('dt_max')
        )

    def build(self, tableau: str = None) -> SchemeKind:
        """
        The ``SchemeKind`` these parameters describe.

        Parameters
        ----------
        tableau : str, optional
            Replaces ``self.tableau``.

        Returns
        -------
        EPAP.integrator.SchemeKind
            The scheme.

        Raises
        ------
        EPAP.tableaux.TableauError
            If the tableau cannot be resolved.
        ValueError
            If the kind or limiter is unknown or the tableau is not GSA.
        """
        name = self.tableau if tableau is None else tableau
        if self.kind == 'first-order':
            return SchemeKind.first_order(self.limiter)
        return SchemeKind(self.kind, load_tableau(name, self.gamma), self.limiter)


class StudyParameters(BaseParameters):
    """
    The sweep of a convergence or AP study.

    Parameters
    ----------
    lambdas : sequence of float
        The Debye lengths.
    n_list : sequence of int, optional
        The mesh sizes of a convergence study, doubling. Default is
        the ``n_list`` of the scenario.
    tableaux : sequence of str
        The tableaux of an AP study.
    reference : str, default='limit'
        ``'limit'`` compares each run to the quasi-neutral limit scheme
        on the same mesh. ``'finest'`` compares to the finest run.
    """
    _defaults = {
        'lambdas': [1e-4, 1e-5, 1e-6],
        'n_list': None,
        'tableaux': ['DP2A242', 'DP1A242', 'ARS222'],
        'reference': 'limit'
    }

    def __init__(
        self,
        lambdas: Sequence[float],
        n_list: Sequence[int] = None,
        tableaux: Sequence[str] = ('DP2A242',),
        reference: str = 'limit'
    ):
        if reference not in REFERENCE_KINDS:
            raise ValueError(f'Unknown reference {reference!r}. Choose from {REFERENCE_KINDS}.')
        if len(lambdas) == 0:
            raise ValueError('The study needs at least one lambda.')
        self.lambdas: Tuple[float, ...] = tuple(lambdas)
        self.n_list = None if n_list is None else tuple(n_list)
        self.tableaux: Tuple[str, ...] = tuple(tableaux)
        self.reference = reference

    @classmethod
    def _from_dict(cls, d: dict):
        n_list = d.get('n_list', cls._defaults['n_list'])
        return cls(
            lambdas=[float(lam) for lam in d.get('lambdas', cls._defaults['lambdas'])],
            n_list=None if n_list is None else [int(n) for n in n_list],
            tableaux=[str(t) for t in d.get('tableaux', cls._defaults['tableaux'])],
            reference=str(d.get('reference', cls._defaults['reference']))
        )


class ExperimentParameters(BaseParameters):
    """
    Class to store the parameters of an EPAP experiment.

    Parameters
    ----------
    header : Header
        The experiment header.
    scenario : EPAP.scenarios.Scenario
        The initial data and run defaults.
    scheme : SchemeParameters
        The time stepper.
    output : OutputParameters
        The recording cadence.
    study : StudyParameters
        The sweep of the ``convergence`` and ``ap-study`` commands.
    """

    def __init__(
        self,
        header: Header,
        scenario: Scenario,
        scheme: SchemeParameters,
        output: OutputParameters,
        study: StudyParameters
    ):
        self.header = header
        self.scenario = scenario
        self.scheme = scheme
        self.output = output
        self.study = study

    @classmethod
    def _from_dict(cls, d: dict):
        return cls(
            header=Header.from_dict(d.get('header', {})),
            scenario=Scenario.from_dict(d['scenario']),
            scheme=SchemeParameters.from_dict(d.get('scheme', {})),
            output=OutputParameters.from_dict(d.get('output', {})),
            study=StudyParameters.from_dict(d.get('study', {}))
        )

    @classmethod
    def from_dict(cls, d: dict) -> 'ExperimentParameters':
        """
        Create an `ExperimentParameters` instance from a dictionary.

        Parameters
        ----------
        d : dict
            The dictionary to construct the class from. Only the
            ``scenario`` section is required.

        Returns
        -------
        ExperimentParameters
            An instance of `ExperimentParameters`.
        """
        return super().from_dict(d)

    @classmethod
    def from_yaml(cls, path: Path) -> 'ExperimentParameters':
        """
        Create an `ExperimentParameters` instance from a YAML file.

        Parameters
        ----------
        path : Path
            The path to the YAML file.

        Returns
        -------
        ExperimentParameters
            An instance of the `ExperimentParameters` class.
        """
        with open(path, 'r', encoding='UTF-8') as file:
            data = yaml.safe_load(file)
        return cls.from_dict(data)

    def scheme_kind(self, tableau: str = None) -> SchemeKind:
        """
        The time stepper.
        """
        return self.scheme.build(tableau)

    def run_scenario(self) -> Scenario:
        """
        The scenario with the step overrides of the scheme section applied.
        """
        overrides = {}
        if self.scheme.dt is not None:
            overrides['dt'] = self.scheme.dt
        if self.scheme.dt_max is not None:
            overrides['dt_max'] = self.scheme.dt_max
        return self.scenario.replace(**overrides) if overrides else self.scenario

    def n_list(self) -> Tuple[int, ...]:
        """
        The mesh sizes of a convergence study.
        """
        if self.study.n_list is not None:
            return self.study.n_list
        if self.scenario.n_list is not None:
            return self.scenario.n_list
        return (self.scenario.mesh.n[0],)
