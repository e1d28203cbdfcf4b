"""
Euler-Poisson model quantities

The one-fluid isentropic Euler-Poisson system

.. math::

    \\partial_t \\rho + \\nabla\\cdot q = 0

    \\partial_t q + \\nabla\\cdot\\left(\\frac{q\\otimes q}{\\rho} + p(\\rho) I\\right) = \\rho\\nabla\\phi

    \\lambda^2 \\Delta\\phi = \\rho - 1

with :math:`p(\\rho) = \\rho^\\gamma` and a uniform ion background equal to 1.
"""
import numpy as np

from EPAP import config
from EPAP.mesh import Mesh
from EPAP.params.base import BaseParameters


class AdmissibilityError(ValueError):
    """
    The density dropped below the positivity floor.
    """


class EosParams(BaseParameters):
    """
    Isentropic equation of state :math:`p = \\rho^\\gamma`.

    Parameters
    ----------
    gamma : float
        The isentropic exponent.

    Raises
    ------
    ValueError
        If `gamma` is less than 1.
    """

    def __init__(self, gamma: float = 2.0):
        gamma = float(gamma)
        if gamma < 1:
            raise ValueError(f'The isentropic exponent must be >= 1, got {gamma}.')
        self.gamma = gamma

    @classmethod
    def _from_dict(cls, d: dict):
        return cls(gamma=float(d.get('gamma', 2.0)))

    @classmethod
    def isothermal(cls):
        """
        :math:`\\gamma = 1`.
        """
        return cls(gamma=1.0)

    @classmethod
    def quadratic(cls):
        """
        :math:`\\gamma = 2`, the default of every scenario.
        """
        return cls(gamma=2.0)


def check_admissible(rho: np.ndarray) -> None:
    """
    Check that a density field is finite and above the positivity floor.

    Parameters
    ----------
    rho : np.ndarray
        The density.

    Raises
    ------
    AdmissibilityError
        If any entry is non-finite or below ``config.DENSITY_FLOOR``.
    """
    rho = np.asarray(rho)
    if not np.all(np.isfinite(rho)):
        raise AdmissibilityError('Non-finite density.')
    rho_min = np.min(rho)
    if rho_min < config.DENSITY_FLOOR:
        raise AdmissibilityError(f'Density {rho_min:.3e} below the positivity floor.')


class PlasmaState:
    """
    The discrete unknowns of the Euler-Poisson system at one time.

    Parameters
    ----------
    mesh : EPAP.mesh.Mesh
        The grid.
    rho : np.ndarray
        The electron density.
    q : np.ndarray
        The momentum :math:`\\rho u`, shape ``(dim, *mesh.shape)``.
    phi : np.ndarray
        The electric potential.
    lam : float
        The scaled Debye length :math:`\\lambda \\geq 0`.
    time : float, default=0
        The simulation time.

    Raises
    ------
    ValueError
        If a field does not live on `mesh` or `lam` is negative.

    Notes
    -----
    States are not modified in place by the solvers. ``evolve`` returns
    a new state.
    """

    def __init__(
        self,
        mesh: Mesh,
        rho: np.ndarray,
        q: np.ndarray,
        phi: np.ndarray,
        lam: float,
        time: float = 0.0
    ):
        rho = np.asarray(rho, dtype=float)
        q = np.asarray(q, dtype=float)
        phi = np.asarray(phi, dtype=float)
        mesh.check_scalar(rho)
        mesh.check_vector(q)
        mesh.check_scalar(phi)
        if lam < 0:
            raise ValueError(f'The Debye length must be non-negative, got {lam}.')
        self.mesh = mesh
        self.rho = rho
        self.q = q
        self.phi = phi
        self.lam = float(lam)
        self.time = float(time)

    def __repr__(self):
        return f'PlasmaState(mesh={self.mesh!r}, lam={self.lam}, time={self.time})'

    @property
    def lambda2(self) -> float:
        """
        :math:`\\lambda^2`.

        :type: float
        """
        return self.lam**2

    def evolve(self, **kwargs) -> 'PlasmaState':
        """
        A new state with some of the fields replaced.

        Parameters
        ----------
        **kwargs
            Any of ``rho``, ``q``, ``phi``, ``lam``, ``time``.

        Returns
        -------
        PlasmaState
            The new state.
        """
        fields = {
            'rho': self.rho,
            'q': self.q,
            'phi': self.phi,
            'lam': self.lam,
            'time': self.time,
        }
        fields.update(kwargs)
        return PlasmaState(self.mesh, **fields)

    def is_finite(self) -> bool:
        """
        ``True`` if no field has a NaN or infinite entry.
        """
        return bool(np.all(np.isfinite(self.rho)) and np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.phi)))


def pressure(rho: np.ndarray, eos: EosParams) -> np.ndarray:
    """
    Isentropic pressure :math:`\\rho^\\gamma`.

    Parameters
    ----------
    rho : np.ndarray
        The density.
    eos : EosParams
        The equation of state.

    Returns
    -------
    np.ndarray
        The pressure.

    Raises
    ------
    AdmissibilityError
        If the density is not admissible.
    """
    check_admissible(rho)
    return np.asarray(rho, dtype=float)**eos.gamma


def momentum_flux(rho: np.ndarray, q: np.ndarray, eos: EosParams) -> np.ndarray:
    """
    The tensor :math:`F = q\\otimes q/\\rho + p(\\rho) I` from raw arrays.

    Parameters
    ----------
    rho : np.ndarray
        The density, any shape ``S``.
    q : np.ndarray
        The momentum, shape ``(d, *S)``.
    eos : EosParams
        The equation of state.

    Returns
    -------
    np.ndarray
        The flux, shape ``(d, d, *S)``.
    """
    p = pressure(rho, eos)
    d = q.shape[0]
    eye = np.eye(d).reshape((d, d) + (1,)*np.ndim(rho))
    return np.einsum('m...,n...->mn...', q, q)/rho + p*eye


def flux_tensor(state: PlasmaState, eos: EosParams) -> np.ndarray:
    """
    The momentum flux tensor of a state.

    Parameters
    ----------
    state : PlasmaState
        The state.
    eos : EosParams
        The equation of state.

    Returns
    -------
    np.ndarray
        :math:`F_{mn} = q_m q_n/\\rho + p\\delta_{mn}`, shape ``(dim, dim, *mesh.shape)``.
    """
    return momentum_flux(state.rho, state.q, eos)


def velocity(state: PlasmaState) -> np.ndarray:
    """
    The velocity :math:`u = q/\\rho`.

    Raises
    ------
    AdmissibilityError
        If the density is not admissible.
    """
    check_admissible(state.rho)
    return state.q/state.rho


def characteristic_speeds(u_m: np.ndarray) -> np.ndarray:
    """
    Eigenvalues of the flux Jacobian in direction `m` used for the CFL rule.

    Parameters
    ----------
    u_m : np.ndarray
        The velocity component in direction `m`.

    Returns
    -------
    np.ndarray
        Shape ``(4, *u_m.shape)``: :math:`0, u_m, u_m, 2u_m`.
    """
    return np.stack([np.zeros_like(u_m), u_m, u_m, 2*u_m])


def interface_wave_speed(
    rho_left: np.ndarray,
    q_left: np.ndarray,
    rho_right: np.ndarray,
    q_right: np.ndarray,
    m: int
) -> np.ndarray:
    """
    Rusanov dissipation speed :math:`\\alpha = 2\\max(|u_m^-|, |u_m^+|)`.

    Parameters
    ----------
    rho_left, rho_right : np.ndarray
        The densities on each side of the interfaces.
    q_left, q_right : np.ndarray
        The momenta on each side, shape ``(d, ...)``.
    m : int
        The normal direction.

    Returns
    -------
    np.ndarray
        One non-negative speed per interface.

    Raises
    ------
    AdmissibilityError
        If either density is not admissible.
    """
    check_admissible(rho_left)
    check_admissible(rho_right)
    return 2*np.maximum(np.abs(q_left[m]/rho_left), np.abs(q_right[m]/rho_right))
