"""
Finite volume space discretization

Second order MUSCL reconstruction with a Rusanov flux for the
momentum, a central flux for the mass, and the centred potential
gradient in the electric source. Interface fields are stored so that
index ``k`` holds the interface :math:`k+\\frac{1}{2}` of the direction
concerned.
"""
from typing import Tuple

import numpy as np

from EPAP import config
from EPAP.mesh import finite_output
from EPAP.physics import (
    EosParams, PlasmaState, momentum_flux, interface_wave_speed,
    characteristic_speeds, velocity
)

LIMITERS = ('minmod', 'none')
"""
Available slope limiters. ``'none'`` gives unlimited centred slopes.

:type: tuple of str
"""


def minmod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    The minmod function.

    Returns the argument of smallest magnitude if `a` and `b` share a
    sign, zero otherwise.
    """
    return np.where(a*b > 0, np.sign(a)*np.minimum(np.abs(a), np.abs(b)), 0.0)


def slopes(w: np.ndarray, m: int, limiter: str = 'minmod') -> np.ndarray:
    """
    Undivided cell slopes of `w` in direction `m`.

    Parameters
    ----------
    w : np.ndarray
        A scalar field.
    m : int
        The direction (array axis).
    limiter : str, default='minmod'
        ``'minmod'`` or ``'none'``.

    Returns
    -------
    np.ndarray
        The slopes.

    Raises
    ------
    ValueError
        If the limiter is unknown.
    """
    forward = np.roll(w, -1, axis=m) - w
    backward = w - np.roll(w, 1, axis=m)
    match limiter:
        case 'minmod':
            return minmod(forward, backward)
        case 'none':
            return 0.5*(forward + backward)
        case _:
            raise ValueError(f'Unknown limiter {limiter!r}. Choose from {LIMITERS}.')


def reconstruct(w: np.ndarray, m: int, limiter: str = 'minmod') -> Tuple[np.ndarray, np.ndarray]:
    """
    Piecewise linear interface values of a cell field.

    Parameters
    ----------
    w : np.ndarray
        A scalar field.
    m : int
        The direction.
    limiter : str, default='minmod'
        The slope limiter.

    Returns
    -------
    w_minus : np.ndarray
        :math:`w_k + \\frac{1}{2}s_k`, the left value at interface :math:`k+\\frac{1}{2}`.
    w_plus : np.ndarray
        :math:`w_{k+1} - \\frac{1}{2}s_{k+1}`, the right value at interface :math:`k+\\frac{1}{2}`.
    """
    s = slopes(w, m, limiter)
    w_minus = w + 0.5*s
    w_plus = np.roll(w - 0.5*s, -1, axis=m)
    return w_minus, w_plus


def rusanov_momentum_flux(
    state: PlasmaState,
    eos: EosParams,
    m: int,
    limiter: str = 'minmod'
) -> np.ndarray:
    """
    Rusanov numerical flux of the momentum through the interfaces normal to `m`.

    .. math::

        \\mathcal{F}_{m,k+\\frac{1}{2}} = \\frac{1}{2}\\left(F_m(U^+) + F_m(U^-)\\right)
        - \\frac{\\alpha}{2}(q^+ - q^-)

    Parameters
    ----------
    state : PlasmaState
        The cell state.
    eos : EosParams
        The equation of state.
    m : int
        The normal direction.
    limiter : str, default='minmod'
        The slope limiter.

    Returns
    -------
    np.ndarray
        The flux of every momentum component, shape ``(dim, *mesh.shape)``.

    Raises
    ------
    EPAP.physics.AdmissibilityError
        If a reconstructed density is not admissible.
    """
    state.mesh._check_direction(m)
    rho_l, rho_r = reconstruct(state.rho, m, limiter)
    pairs = [reconstruct(qn, m, limiter) for qn in state.q]
    q_l = np.stack([left for left, _ in pairs])
    q_r = np.stack([right for _, right in pairs])
    flux_l = momentum_flux(rho_l, q_l, eos)[m]
    flux_r = momentum_flux(rho_r, q_r, eos)[m]
    alpha = interface_wave_speed(rho_l, q_l, rho_r, q_r, m)
    return 0.5*(flux_r + flux_l) - 0.5*alpha*(q_r - q_l)


def central_mass_flux(q: np.ndarray, m: int) -> np.ndarray:
    """
    Central mass flux :math:`\\frac{1}{2}(q_{m,k+e_m} + q_{m,k})`.

    Parameters
    ----------
    q : np.ndarray
        The momentum, shape ``(dim, ...)``.
    m : int
        The normal direction.

    Returns
    -------
    np.ndarray
        The flux at the interfaces normal to `m`.
    """
    return 0.5*(np.roll(q[m], -1, axis=m) + q[m])


def mass_flux_divergence(q: np.ndarray, mesh) -> np.ndarray:
    """
    Flux difference of ``central_mass_flux`` summed over directions.
    """
    return sum(
        (central_mass_flux(q, m) - np.roll(central_mass_flux(q, m), 1, axis=m))/mesh.dx[m]
        for m in range(mesh.dim)
    )


@finite_output
def momentum_flux_divergence(
    state: PlasmaState,
    eos: EosParams,
    limiter: str = 'minmod'
) -> np.ndarray:
    """
    Discrete :math:`\\nabla\\cdot F` from the Rusanov flux differences.

    Parameters
    ----------
    state : PlasmaState
        The state.
    eos : EosParams
        The equation of state.
    limiter : str, default='minmod'
        The slope limiter.

    Returns
    -------
    np.ndarray
        Shape ``(dim, *mesh.shape)``.
    """
    mesh = state.mesh
    div = mesh.zeros_vector()
    for m in range(mesh.dim):
        flux = rusanov_momentum_flux(state, eos, m, limiter)
        # component axis comes first
        div += (flux - np.roll(flux, 1, axis=m+1))/mesh.dx[m]
    return div


@finite_output
def explicit_momentum_rhs(
    state: PlasmaState,
    eos: EosParams,
    limiter: str = 'minmod'
) -> np.ndarray:
    """
    The explicit momentum terms :math:`\\nabla\\cdot F - (\\rho - 1)\\nabla\\phi`.

    Parameters
    ----------
    state : PlasmaState
        The state, with its current potential.
    eos : EosParams
        The equation of state.
    limiter : str, default='minmod'
        The slope limiter.

    Returns
    -------
    np.ndarray
        Shape ``(dim, *mesh.shape)``.
    """
    grad_phi = state.mesh.central_gradient(state.phi)
    return momentum_flux_divergence(state, eos, limiter) - (state.rho - 1)*grad_phi


def cfl_dt(state: PlasmaState, nu: float, dt_max: float = None) -> float:
    """
    The CFL time step.

    .. math::

        \\Delta t = \\nu / \\max_k\\max_m \\frac{2|u_{m,k}|}{\\Delta x_m}

    Parameters
    ----------
    state : PlasmaState
        The state.
    nu : float
        The CFL number, :math:`0 < \\nu < 1`.
    dt_max : float, optional
        Upper bound of the step, returned for a fluid at rest.
        Default is ``config.DT_MAX_FACTOR`` times the largest domain length.

    Returns
    -------
    float
        The time step.

    Raises
    ------
    ValueError
        If `nu` is not in (0, 1).
    """
    if not 0 < nu < 1:
        raise ValueError(f'The CFL number must lie in (0,1), got {nu}.')
    mesh = state.mesh
    if dt_max is None:
        dt_max = config.DT_MAX_FACTOR*max(mesh.length)
    u = velocity(state)
    rate = max(
        float(np.max(np.abs(characteristic_speeds(u[m]))))/mesh.dx[m]
        for m in range(mesh.dim)
    )
    if rate == 0:
        return float(dt_max)
    return float(min(nu/rate, dt_max))
