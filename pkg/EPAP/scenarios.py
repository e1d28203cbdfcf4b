"""
Initial conditions

The test cases of the Euler-Poisson solver: quasi-neutral perturbations
in 1D and 2D, a Maxwellian perturbation of a plasma at rest and the
setup of the asymptotic convergence study. Every default can be
overridden from a configuration file.
"""
from typing import Sequence, Tuple

import numpy as np

from EPAP import config
from EPAP.mesh import Mesh
from EPAP.params.base import BaseParameters
from EPAP.physics import EosParams, check_admissible

SCENARIO_KINDS = ('qn_perturbation', 'maxwellian', 'qn_2d')
"""
Families of initial data.

:type: tuple of str
"""


class Scenario(BaseParameters):
    """
    Initial data, mesh and run defaults of one test case.

    Parameters
    ----------
    name : str
        Identifier used in output files.
    kind : str
        One of ``SCENARIO_KINDS``.
    mesh : EPAP.mesh.Mesh
        The grid. Its boundary kinds are those of the potential.
    lam : float
        The Debye length :math:`\\lambda \\geq 0`.
    eos : EPAP.physics.EosParams, optional
        Default is :math:`\\gamma = 2`.
    params : dict, optional
        Perturbation parameters of the family (``delta2``, ``K``,
        ``rho_delta`` or ``delta``, ``kappa``).
    cfl : float, default=0.45
        The CFL number.
    t_final : float, default=0.1
        The final time.
    dt : float, optional
        A fixed time step overriding the CFL rule.
    dt_max : float, optional
        Cap of the CFL step.
    n_list : sequence of int, optional
        Mesh sizes of a convergence study.

    Raises
    ------
    ValueError
        If the kind is unknown or `lam` is negative.
    """
    _PRESET_PATH = config.SCENARIO_PRESET_PATH
    _defaults = {
        'gamma': 2.0,
        'cfl': 0.45,
        't_final': 0.1,
        'length': 1.0,
        'bc': 'periodic',
    }

    def __init__(
        self,
        name: str,
        kind: str,
        mesh: Mesh,
        lam: float,
        eos: EosParams = None,
        params: dict = None,
        cfl: float = 0.45,
        t_final: float = 0.1,
        dt: float = None,
        dt_max: float = None,
        n_list: Sequence[int] = None
    ):
        if kind not in SCENARIO_KINDS:
            raise ValueError(f'Unknown scenario kind {kind!r}. Choose from {SCENARIO_KINDS}.')
        if lam < 0:
            raise ValueError(f'The Debye length must be non-negative, got {lam}.')
        self.name = str(name)
        self.kind = kind
        self.mesh = mesh
        self.lam = float(lam)
        self.eos = EosParams() if eos is None else eos
        self.params = dict(params or {})
        self.cfl = float(cfl)
        self.t_final = float(t_final)
        self.dt = None if dt is None else float(dt)
        self.dt_max = None if dt_max is None else float(dt_max)
        self.n_list = None if n_list is None else tuple(int(n) for n in n_list)

    def __repr__(self):
        return f'Scenario({self.name!r}, kind={self.kind!r}, n={self.mesh.n}, lam={self.lam})'

    @property
    def bc(self) -> Tuple[str, ...]:
        """
        Boundary kind of the potential per direction.
        """
        return self.mesh.bc

    def replace(self, **kwargs) -> 'Scenario':
        """
        A copy with some fields replaced.
        """
        fields = {
            'name': self.name,
            'kind': self.kind,
            'mesh': self.mesh,
            'lam': self.lam,
            'eos': self.eos,
            'params': self.params,
            'cfl': self.cfl,
            't_final': self.t_final,
            'dt': self.dt,
            'dt_max': self.dt_max,
            'n_list': self.n_list,
        }
        fields.update(kwargs)
        return Scenario(**fields)

    def with_mesh(self, n: int) -> 'Scenario':
        """
        The same scenario on a mesh with `n` cells per direction.
        """
        mesh = Mesh((int(n),)*self.mesh.dim, self.mesh.length, self.mesh.bc)
        return self.replace(mesh=mesh)

    def initial_fields(self, mesh: Mesh = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Sample the initial density and momentum.

        Parameters
        ----------
        mesh : EPAP.mesh.Mesh, optional
            Default is ``self.mesh``.

        Returns
        -------
        rho : np.ndarray
            The density.
        q : np.ndarray
            The momentum.

        Raises
        ------
        EPAP.physics.AdmissibilityError
            If the sampled density is not positive.
        """
        mesh = self.mesh if mesh is None else mesh
        x = mesh.coordinates()
        p = self.params
        match self.kind:
            case 'qn_perturbation':
                k = float(p.get('K', 16))
                wave = np.cos(2*k*np.pi*x[0])
                rho = 1 + float(p.get('rho_delta', 0.0))*wave
                u = 1 + float(p.get('delta2', 1e-8))*wave
                q = (rho*u)[np.newaxis]
            case 'maxwellian':
                rho = 1 + float(p.get('delta', 1e-2))*np.sin(float(p.get('kappa', 2220))*np.pi*x[0])
                q = mesh.zeros_vector()
            case 'qn_2d':
                if mesh.dim != 2:
                    raise ValueError('The qn_2d scenario needs a 2D mesh.')
                k = float(p.get('K', 16))
                minus = np.sin(k*np.pi*(x[0] - x[1]))
                plus = k*np.pi*(x[0] + x[1])
                rho = np.ones(mesh.shape)
                q = np.stack([
                    1 + minus + self.lam*np.sin(plus),
                    1 + minus + self.lam*np.cos(plus),
                ])
        check_admissible(rho)
        return rho, q

    @classmethod
    def _from_dict(cls, d: dict):
        kind = str(d['kind'])
        dim = 2 if kind == 'qn_2d' else 1
        n = d.get('n')
        n = (int(n),)*dim if np.isscalar(n) else tuple(int(nm) for nm in n)
        length = d.get('length', cls._defaults['length'])
        length = (float(length),)*dim if np.isscalar(length) else tuple(float(lm) for lm in length)
        mesh = Mesh(n, length, d.get('bc', cls._defaults['bc']))
        return cls(
            name=str(d.get('name', kind)),
            kind=kind,
            mesh=mesh,
            lam=float(d['lam']),
            eos=EosParams(gamma=float(d.get('gamma', cls._defaults['gamma']))),
            params={key: float(value) for key, value in dict(d.get('params', {})).items()},
            cfl=float(d.get('cfl', cls._defaults['cfl'])),
            t_final=float(d.get('t_final', cls._defaults['t_final'])),
            dt=None if d.get('dt', None) is None else float(d['dt']),
            dt_max=None if d.get('dt_max', None) is None else float(d['dt_max']),
            n_list=None if d.get('n_list', None) is None else [int(nm) for nm in d['n_list']]
        )

    @classmethod
    def from_dict(cls, d: dict):
        """
        Construct a scenario from a dictionary.

        Parameters
        ----------
        d : dict
            The scenario fields. A ``preset`` key loads the named entry
            of ``presets/scenarios.yaml`` and the other keys override it.

        Returns
        -------
        Scenario
            The scenario.

        Raises
        ------
        KeyError
            If the preset does not exist or a required key is missing.
        """
        if 'preset' in d.keys():
            data = preset_data(d['preset'])
            overrides = {key: value for key, value in d.items() if key != 'preset'}
            params = dict(data.get('params', {}))
            params.update(overrides.pop('params', {}))
            data.update(overrides)
            data['params'] = params
            return cls._from_dict(data)
        return cls._from_dict(d)

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'kind': self.kind,
            'n': list(self.mesh.n),
            'length': list(self.mesh.length),
            'bc': list(self.mesh.bc),
            'lam': self.lam,
            'gamma': self.eos.gamma,
            'params': dict(self.params),
            'cfl': self.cfl,
            't_final': self.t_final,
            'dt': self.dt,
            'dt_max': self.dt_max,
            'n_list': None if self.n_list is None else list(self.n_list),
        }


def preset_data(name: str) -> dict:
    """
    The raw dictionary of a named scenario preset.

    Raises
    ------
    KeyError
        If `name` is not a preset.
    """
    return Scenario.preset_data(name)


def preset_names() -> Tuple[str, ...]:
    """
    The names of the scenario presets.
    """
    return Scenario.preset_names()


def qn_perturbation_1d(
    delta2: float = 1e-8,
    K: int = 16,
    lam: float = 1e-4,
    n: int = 100,
    cfl: float = 0.45,
    t_final: float = 0.1,
    rho_delta: float = 0.0,
    name: str = None
) -> Scenario:
    """
    Cosine velocity perturbation of a quasi-neutral flow on :math:`[0,1]`.

    .. math::

        \\rho^0 = 1 + \\rho_\\delta\\cos(2K\\pi x), \\quad u^0 = 1 + \\delta^2\\cos(2K\\pi x)

    With :math:`\\delta^2 = \\lambda^2` and :math:`\\rho_\\delta = 0` the data
    are well prepared. With :math:`\\delta^2 = 10^{-2}` they are not.

    Parameters
    ----------
    delta2 : float, default=1e-8
        The velocity amplitude.
    K : int, default=16
        The wave number.
    lam : float, default=1e-4
        The Debye length.
    n : int, default=100
        The number of cells.
    cfl : float, default=0.45
        The CFL number.
    t_final : float, default=0.1
        The final time.
    rho_delta : float, default=0
        The density amplitude.
    name : str, optional
        Default is ``'qn_perturbation_1d'``.

    Returns
    -------
    Scenario
        The scenario.

    Raises
    ------
    ValueError
        If `K` is not a positive integer.
    """
    if int(K) != K or K < 1:
        raise ValueError(f'K must be a positive integer, got {K}.')
    return Scenario(
        name=name or 'qn_perturbation_1d',
        kind='qn_perturbation',
        mesh=Mesh((n,), (1.0,)),
        lam=lam,
        params={'delta2': delta2, 'K': K, 'rho_delta': rho_delta},
        cfl=cfl,
        t_final=t_final
    )


def maxwellian_perturbation(
    delta: float = 1e-2,
    kappa: float = 2220,
    lam: float = 1e-4,
    n: int = 100,
    cfl: float = 0.45,
    t_final: float = 0.035,
    dt_max: float = None
) -> Scenario:
    """
    Sine density perturbation of a plasma at rest on :math:`[0,1]`.

    .. math::

        \\rho^0 = 1 + \\delta\\sin(\\kappa\\pi x), \\quad u^0 = 0

    The CFL rule is degenerate at rest, so the step starts at `dt_max`,
    by default half a cell width.
    """
    mesh = Mesh((n,), (1.0,))
    return Scenario(
        name='maxwellian',
        kind='maxwellian',
        mesh=mesh,
        lam=lam,
        params={'delta': delta, 'kappa': kappa},
        cfl=cfl,
        t_final=t_final,
        dt_max=0.5*mesh.dx[0] if dt_max is None else dt_max
    )


def aoc_setup(lam: float, n: int = 320, t_final: float = 0.1) -> Scenario:
    """
    Setup of the asymptotic convergence study.

    The velocity perturbation :math:`u^0 = 1 + 10^{-2}\\cos(2\\pi x)` on
    :math:`[0,20]`, with the mesh sequence 320, 640, 1280, 2560.
    """
    return Scenario(
        name='aoc',
        kind='qn_perturbation',
        mesh=Mesh((n,), (20.0,)),
        lam=lam,
        params={'delta2': 1e-2, 'K': 1, 'rho_delta': 0.0},
        cfl=0.45,
        t_final=t_final,
        n_list=(320, 640, 1280, 2560)
    )


def qn_2d(lam: float, K: int = 16, n: int = 64, t_final: float = 0.5) -> Scenario:
    """
    Two dimensional quasi-neutral perturbation on :math:`[0,1]^2`.

    .. math::

        u_1^0 = 1 + \\sin(K\\pi(x_1 - x_2)) + \\lambda\\sin(K\\pi(x_1 + x_2))

        u_2^0 = 1 + \\sin(K\\pi(x_1 - x_2)) + \\lambda\\cos(K\\pi(x_1 + x_2))

    with :math:`\\rho^0 = 1`, so that :math:`\\nabla\\cdot u^0 = O(\\lambda)`.
    """
    return Scenario(
        name='qn2d',
        kind='qn_2d',
        mesh=Mesh((n, n), (1.0, 1.0)),
        lam=lam,
        params={'K': K},
        cfl=0.45,
        t_final=t_final
    )
