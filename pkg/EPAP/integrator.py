"""
Time integration

Penalized IMEX Runge-Kutta steppers for the Euler-Poisson system. The
momentum equation is written with :math:`\\nabla\\phi` added to and
subtracted from the source, so that the implicit part of every stage
reduces to a closed-form density projection followed by one linear
Poisson solve.

Also provides the first order penalized scheme written out directly,
an unpenalized baseline and the quasi-neutral limit scheme.
"""
import logging
import warnings

import numpy as np
from scipy.sparse.linalg import cg, LinearOperator
from tqdm.auto import tqdm

from EPAP import config
from EPAP import poisson
from EPAP.diagnostics import RunReport, ap_metrics
from EPAP.mesh import Mesh, NonFiniteFieldError
from EPAP.params.base import BaseParameters
from EPAP.physics import EosParams, PlasmaState, AdmissibilityError, check_admissible
from EPAP.spatial import explicit_momentum_rhs, mass_flux_divergence, momentum_flux_divergence, cfl_dt, LIMITERS
from EPAP.tableaux import DoubleButcherTableau, is_gsa, load as load_tableau

logger = logging.getLogger(__name__)

SCHEME_KINDS = ('penalized', 'first-order', 'classical', 'limit')
"""
Names of the available time steppers.

:type: tuple of str
"""

_UNSTABLE = (AdmissibilityError, NonFiniteFieldError,
             poisson.PoissonSolvabilityError, poisson.PoissonConvergenceError)


class InstabilityError(RuntimeError):
    """
    A step failed because the discrete solution lost admissibility.

    Parameters
    ----------
    message : str
        Description of the failure.
    stage : int, default=0
        The 1-based stage index that failed, 0 outside the stage loop.
    time : float, optional
        The time at the start of the failing step.

    Attributes
    ----------
    stage : int
        The failing stage.
    time : float or None
        The time at the start of the failing step.
    """

    def __init__(self, message: str, stage: int = 0, time: float = None):
        super().__init__(message)
        self.stage = stage
        self.time = time

    @property
    def solver_failure(self) -> bool:
        """
        ``True`` if the Poisson solver rather than the state failed.
        """
        return isinstance(self.__cause__, (poisson.PoissonSolvabilityError, poisson.PoissonConvergenceError))


class StageWorkspace:
    """
    Storage for the stages of one IMEX step.

    Parameters
    ----------
    mesh : EPAP.mesh.Mesh
        The grid.
    s : int
        The number of stages.

    Attributes
    ----------
    rho, q, phi : np.ndarray
        Stage values, leading axis is the stage index.
    div_q : np.ndarray
        :math:`\\nabla_h\\cdot q^{(j)}`.
    grad_phi : np.ndarray
        :math:`\\nabla_h \\phi^{(j)}`.
    explicit : np.ndarray
        The explicit momentum terms of each stage.
    rho_hat, q_hat : np.ndarray
        The hat variables of the current stage.
    completed : int
        The number of completed stages.
    """

    def __init__(self, mesh: Mesh, s: int):
        self.mesh = mesh
        self.s = s
        vec = (mesh.dim,) + mesh.shape
        self.rho = np.zeros((s,) + mesh.shape)
        self.q = np.zeros((s,) + vec)
        self.phi = np.zeros((s,) + mesh.shape)
        self.div_q = np.zeros((s,) + mesh.shape)
        self.grad_phi = np.zeros((s,) + vec)
        self.explicit = np.zeros((s,) + vec)
        self.rho_hat = mesh.zeros()
        self.q_hat = mesh.zeros_vector()
        self.completed = 0

    def fits(self, mesh: Mesh, s: int) -> bool:
        """
        ``True`` if the workspace can hold `s` stages on `mesh`.
        """
        return self.mesh == mesh and self.s == s

    def store(self, i: int, rho: np.ndarray, q: np.ndarray, phi: np.ndarray):
        """
        Store stage `i` (0-based) and its derived operators.
        """
        if not 0 <= i < self.s:
            raise IndexError(f'Stage {i} out of range for {self.s} stages.')
        self.rho[i] = rho
        self.q[i] = q
        self.phi[i] = phi
        self.div_q[i] = mass_flux_divergence(q, self.mesh)
        self.grad_phi[i] = self.mesh.central_gradient(phi)
        self.completed = i + 1


def _workspace(state: PlasmaState, s: int, workspace: StageWorkspace = None) -> StageWorkspace:
    if workspace is not None and workspace.fits(state.mesh, s):
        workspace.completed = 0
        return workspace
    if workspace is not None:
        raise ValueError('The workspace does not match the mesh or the stage count.')
    return StageWorkspace(state.mesh, s)


def _explicit_needed(a_ex: np.ndarray, j: int) -> bool:
    return bool(np.any(a_ex[j+1:, j] != 0))


def _mean_free(mesh: Mesh, residual: np.ndarray) -> np.ndarray:
    # mean-free in exact arithmetic on periodic meshes
    if mesh.is_periodic:
        return residual - mesh.mean(residual)
    return residual


def _imex_stages(
    state: PlasmaState,
    tableau: DoubleButcherTableau,
    eos: EosParams,
    dt: float,
    limiter: str,
    ws: StageWorkspace,
    limit: bool
) -> PlasmaState:
    mesh = state.mesh
    lam2 = 0.0 if limit else state.lambda2
    a_ex, a_im = tableau.a_ex, tableau.a_im
    for i in range(tableau.s):
        try:
            rho_hat = state.rho - dt*np.tensordot(a_im[i, :i], ws.div_q[:i], axes=1)
            q_hat = state.q - dt*np.tensordot(a_ex[i, :i], ws.explicit[:i], axes=1) \
                + dt*np.tensordot(a_im[i, :i], ws.grad_phi[:i], axes=1)
            ws.rho_hat, ws.q_hat = rho_hat, q_hat
            a = a_im[i, i]
            if a == 0:
                if lam2 > 0:
                    rho_i = rho_hat
                    phi_i = poisson.solve(poisson.PoissonProblem(mesh, lam2, rho_i - 1))
                else:
                    rho_i = np.ones(mesh.shape)
                    phi_i = mesh.zeros()
            else:
                residual = rho_hat - 1 - dt*a*mass_flux_divergence(q_hat, mesh)
                if lam2 > 0:
                    rho_i = 1 + lam2/(lam2 + (dt*a)**2)*residual
                    phi_i = poisson.solve(poisson.PoissonProblem(mesh, lam2, rho_i - 1))
                else:
                    rho_i = np.ones(mesh.shape)
                    phi_i = poisson.solve_limit(mesh, _mean_free(mesh, residual)/(dt*a)**2)
            q_i = q_hat + dt*a*mesh.central_gradient(phi_i)
            check_admissible(rho_i)
            ws.store(i, rho_i, q_i, phi_i)
            if _explicit_needed(a_ex, i):
                ws.explicit[i] = explicit_momentum_rhs(
                    state.evolve(rho=rho_i, q=q_i, phi=phi_i), eos, limiter)
            logger.debug('stage %d: max|rho-1|=%.3e max|phi|=%.3e',
                         i+1, np.max(np.abs(rho_i - 1)), np.max(np.abs(phi_i)))
        except _UNSTABLE as err:
            raise InstabilityError(f'Stage {i+1} failed at t={state.time}: {err}', stage=i+1, time=state.time) from err
    last = tableau.s - 1
    return state.evolve(rho=ws.rho[last].copy(), q=ws.q[last].copy(), phi=ws.phi[last].copy(), time=state.time + dt)


def step_penalized(
    state: PlasmaState,
    tableau: DoubleButcherTableau,
    eos: EosParams,
    dt: float,
    limiter: str = 'minmod',
    workspace: StageWorkspace = None
) -> PlasmaState:
    """
    One step of the penalized IMEX-RK scheme.

    For each stage :math:`i`:

    .. math::

        \\hat\\rho^{(i)} = \\rho^n - \\Delta t\\sum_{j<i} a_{ij}\\nabla_h\\cdot q^{(j)}

        \\hat q^{(i)} = q^n - \\Delta t\\sum_{j<i}\\left[\\tilde a_{ij}\\left(\\nabla\\cdot F^{(j)}
        - (\\rho^{(j)} - 1)\\nabla_h\\phi^{(j)}\\right) - a_{ij}\\nabla_h\\phi^{(j)}\\right]

        \\rho^{(i)} = 1 + \\frac{\\lambda^2}{\\lambda^2 + \\Delta t^2 a_{ii}^2}
        \\left(\\hat\\rho^{(i)} - 1 - \\Delta t a_{ii}\\nabla_h\\cdot\\hat q^{(i)}\\right)

        \\lambda^2\\Delta_h\\phi^{(i)} = \\rho^{(i)} - 1

        q^{(i)} = \\hat q^{(i)} + \\Delta t a_{ii}\\nabla_h\\phi^{(i)}

    The tableau is globally stiffly accurate, so the new state is the
    last stage.

    Parameters
    ----------
    state : EPAP.physics.PlasmaState
        The state at :math:`t^n`.
    tableau : EPAP.tableaux.DoubleButcherTableau
        A GSA tableau.
    eos : EPAP.physics.EosParams
        The equation of state.
    dt : float
        The time step.
    limiter : str, default='minmod'
        The slope limiter of the momentum flux.
    workspace : StageWorkspace, optional
        Filled with the stage values if given.

    Returns
    -------
    EPAP.physics.PlasmaState
        The state at :math:`t^n + \\Delta t`.

    Raises
    ------
    InstabilityError
        If a stage loses admissibility, produces non-finite values
        or the Poisson solve fails.

    Notes
    -----
    Stages with :math:`a_{ii} = 0` skip the projection:
    :math:`\\rho^{(i)} = \\hat\\rho^{(i)}`. At :math:`\\lambda = 0` the
    projection gives :math:`\\rho^{(i)} = 1` and the potential solves
    :math:`\\Delta_h\\phi^{(i)} = (\\hat\\rho^{(i)} - 1 - \\Delta t a_{ii}\\nabla_h\\cdot\\hat q^{(i)})/(\\Delta t a_{ii})^2`.
    """
    if not is_gsa(tableau):
        raise ValueError(f'Tableau {tableau.name} is not globally stiffly accurate.')
    ws = _workspace(state, tableau.s, workspace)
    return _imex_stages(state, tableau, eos, dt, limiter, ws, limit=state.lam == 0)


def step_limit(
    state: PlasmaState,
    tableau: DoubleButcherTableau,
    eos: EosParams,
    dt: float,
    limiter: str = 'minmod',
    workspace: StageWorkspace = None
) -> PlasmaState:
    """
    One step of the IMEX scheme for the quasi-neutral limit model.

    The density is held at 1 and every stage imposes the limit
    elliptic relation

    .. math::

        a_{ii}\\Delta_h\\phi^{(i)} = \\sum_{j<i}\\tilde a_{ij}\\nabla^2:(u^{(j)}\\otimes u^{(j)})
        - \\sum_{j<i} a_{ij}\\Delta_h\\phi^{(j)}

    in the form it takes as the :math:`\\lambda \\to 0` limit of
    ``step_penalized``. Start from divergence-free data, see
    ``project_divergence_free``.

    Parameters
    ----------
    state : EPAP.physics.PlasmaState
        The state at :math:`t^n`. Its density is replaced by 1.
    tableau : EPAP.tableaux.DoubleButcherTableau
        The tableau.
    eos : EPAP.physics.EosParams
        The equation of state.
    dt : float
        The time step.
    limiter : str, default='minmod'
        The slope limiter.
    workspace : StageWorkspace, optional
        Filled with the stage values if given.

    Returns
    -------
    EPAP.physics.PlasmaState
        The state at :math:`t^n + \\Delta t`, with :math:`\\rho \\equiv 1`.
    """
    ws = _workspace(state, tableau.s, workspace)
    state = state.evolve(rho=np.ones(state.mesh.shape))
    return _imex_stages(state, tableau, eos, dt, limiter, ws, limit=True)


def step_first_order(
    state: PlasmaState,
    eos: EosParams,
    dt: float,
    limiter: str = 'minmod',
    expand_source: bool = False
) -> PlasmaState:
    """
    One step of the first order penalized scheme, written out directly.

    .. math::

        \\rho^{n+1} = 1 + \\frac{\\lambda^2}{\\lambda^2 + \\Delta t^2}B^n,
        \\quad \\Delta_h\\phi^{n+1} = \\frac{B^n}{\\lambda^2 + \\Delta t^2}

        q^{n+1} = q^n - \\Delta t\\nabla\\cdot F^n + \\Delta t(\\rho^n - 1)\\nabla_h\\phi^n
        + \\Delta t\\nabla_h\\phi^{n+1}

    with :math:`B^n = \\rho^n - 1 - \\Delta t\\nabla_h\\cdot q^n + \\Delta t^2\\nabla^2:F^n
    - \\Delta t^2\\nabla_h\\cdot((\\rho^n - 1)\\nabla_h\\phi^n)`.

    Parameters
    ----------
    state : EPAP.physics.PlasmaState
        The state at :math:`t^n`.
    eos : EPAP.physics.EosParams
        The equation of state.
    dt : float
        The time step.
    limiter : str, default='minmod'
        The slope limiter.
    expand_source : bool, default=False
        Replace :math:`\\nabla_h\\cdot((\\rho^n-1)\\nabla_h\\phi^n)` by its product
        rule expansion :math:`\\nabla_h\\rho^n\\cdot\\nabla_h\\phi^n + (\\rho^n-1)^2/\\lambda^2`.
        The two agree up to the consistency error of the stencils.

    Returns
    -------
    EPAP.physics.PlasmaState
        The state at :math:`t^n + \\Delta t`.

    Raises
    ------
    InstabilityError
        If the new state is not admissible or a solve fails.
    ValueError
        If `expand_source` is set and :math:`\\lambda = 0`.
    """
    mesh = state.mesh
    lam2 = state.lambda2
    if expand_source and lam2 == 0:
        raise ValueError('The expanded source needs lambda > 0.')
    try:
        div_flux = momentum_flux_divergence(state, eos, limiter)
        grad_phi = mesh.central_gradient(state.phi)
        if expand_source:
            source = sum(mesh.central_diff(state.rho, m)*grad_phi[m] for m in range(mesh.dim)) \
                + (state.rho - 1)**2/lam2
        else:
            source = mesh.central_divergence((state.rho - 1)*grad_phi)
        bracket = state.rho - 1 - dt*mass_flux_divergence(state.q, mesh) \
            + dt**2*mesh.central_divergence(div_flux) - dt**2*source
        if lam2 > 0:
            rho = 1 + lam2/(lam2 + dt**2)*bracket
        else:
            rho = np.ones(mesh.shape)
        phi = poisson.solve_limit(mesh, _mean_free(mesh, bracket)/(lam2 + dt**2))
        q = state.q - dt*div_flux + dt*(state.rho - 1)*grad_phi + dt*mesh.central_gradient(phi)
        check_admissible(rho)
    except _UNSTABLE as err:
        raise InstabilityError(f'First order step failed at t={state.time}: {err}', stage=1, time=state.time) from err
    return state.evolve(rho=rho, q=q, phi=phi, time=state.time + dt)


def step_classical(
    state: PlasmaState,
    tableau: DoubleButcherTableau,
    eos: EosParams,
    dt: float,
    limiter: str = 'minmod',
    workspace: StageWorkspace = None
) -> PlasmaState:
    """
    One step of the unpenalized IMEX baseline.

    The whole electric source :math:`\\rho\\nabla\\phi` is explicit and the
    Poisson equation is imposed on each stage density:

    .. math::

        q^{(i)} = q^n - \\Delta t\\sum_{j<i}\\tilde a_{ij}\\left(\\nabla\\cdot F^{(j)} - \\rho^{(j)}\\nabla_h\\phi^{(j)}\\right)

        \\rho^{(i)} = \\rho^n - \\Delta t\\sum_{j\\leq i} a_{ij}\\nabla_h\\cdot q^{(j)}

        \\lambda^2\\Delta_h\\phi^{(i)} = \\rho^{(i)} - 1

    It is stable only for :math:`\\Delta t \\lesssim \\lambda`.

    Parameters
    ----------
    state : EPAP.physics.PlasmaState
        The state at :math:`t^n`, with :math:`\\lambda > 0`.
    tableau : EPAP.tableaux.DoubleButcherTableau
        A GSA tableau.
    eos : EPAP.physics.EosParams
        The equation of state.
    dt : float
        The time step.
    limiter : str, default='minmod'
        The slope limiter.
    workspace : StageWorkspace, optional
        Filled with the stage values if given.

    Returns
    -------
    EPAP.physics.PlasmaState
        The state at :math:`t^n + \\Delta t`.

    Raises
    ------
    InstabilityError
        If a stage loses admissibility or a solve fails.
    ValueError
        If the tableau is not GSA or :math:`\\lambda = 0`.
    """
    if not is_gsa(tableau):
        raise ValueError(f'Tableau {tableau.name} is not globally stiffly accurate.')
    if state.lam == 0:
        raise ValueError('The unpenalized scheme needs lambda > 0.')
    mesh = state.mesh
    lam2 = state.lambda2
    ws = _workspace(state, tableau.s, workspace)
    a_ex, a_im = tableau.a_ex, tableau.a_im
    for i in range(tableau.s):
        try:
            q_i = state.q - dt*np.tensordot(a_ex[i, :i], ws.explicit[:i], axes=1)
            rho_i = state.rho - dt*np.tensordot(a_im[i, :i], ws.div_q[:i], axes=1) \
                - dt*a_im[i, i]*mass_flux_divergence(q_i, mesh)
            check_admissible(rho_i)
            phi_i = poisson.solve(poisson.PoissonProblem(mesh, lam2, rho_i - 1))
            ws.store(i, rho_i, q_i, phi_i)
            if _explicit_needed(a_ex, i):
                stage = state.evolve(rho=rho_i, q=q_i, phi=phi_i)
                ws.explicit[i] = explicit_momentum_rhs(stage, eos, limiter) - ws.grad_phi[i]
        except _UNSTABLE as err:
            raise InstabilityError(f'Stage {i+1} failed at t={state.time}: {err}', stage=i+1, time=state.time) from err
    last = tableau.s - 1
    return state.evolve(rho=ws.rho[last].copy(), q=ws.q[last].copy(), phi=ws.phi[last].copy(), time=state.time + dt)


def project_divergence_free(u: np.ndarray, mesh: Mesh, tol: float = config.POISSON_TOL):
    """
    Remove the discrete gradient part of a velocity field.

    Solves :math:`\\nabla_h\\cdot\\nabla_h\\psi = \\nabla_h\\cdot u` by conjugate
    gradients on the mean-free subspace and returns
    :math:`u - \\nabla_h\\psi`, whose centred divergence vanishes.

    Parameters
    ----------
    u : np.ndarray
        The velocity, shape ``(dim, *mesh.shape)``.
    mesh : EPAP.mesh.Mesh
        The grid.
    tol : float, optional
        Relative residual tolerance of the solve.

    Returns
    -------
    u_proj : np.ndarray
        The projected velocity.
    psi : np.ndarray
        The mean-free potential of the removed part.

    Raises
    ------
    EPAP.poisson.PoissonConvergenceError
        If the iteration does not converge.
    """
    div = mesh.central_divergence(u)
    if not np.any(div):
        return np.array(u, dtype=float), mesh.zeros()

    def matvec(x):
        # -div(grad) is symmetric positive semi-definite
        return -mesh.central_divergence(mesh.central_gradient(x.reshape(mesh.shape))).ravel()
    operator = LinearOperator((mesh.size, mesh.size), matvec=matvec, dtype=float)
    psi, info = cg(operator, -div.ravel(), rtol=tol, atol=0.0, maxiter=config.POISSON_MAXITER)
    if info != 0:
        raise poisson.PoissonConvergenceError(f'Velocity projection did not converge (info={info}).')
    psi = psi.reshape(mesh.shape)
    psi -= np.mean(psi)
    return u - mesh.central_gradient(psi), psi


def initial_state(
    mesh: Mesh,
    rho: np.ndarray,
    q: np.ndarray,
    lam: float,
    eos: EosParams = None,
    limiter: str = 'minmod'
) -> PlasmaState:
    """
    Build a state whose potential solves the Poisson equation.

    Parameters
    ----------
    mesh : EPAP.mesh.Mesh
        The grid.
    rho : np.ndarray
        The initial density.
    q : np.ndarray
        The initial momentum.
    lam : float
        The Debye length.
    eos : EPAP.physics.EosParams, optional
        Only used at :math:`\\lambda = 0`.
    limiter : str, default='minmod'
        Only used at :math:`\\lambda = 0`.

    Returns
    -------
    EPAP.physics.PlasmaState
        The state at :math:`t = 0`.

    Notes
    -----
    For :math:`\\lambda > 0`, :math:`\\lambda^2\\Delta_h\\phi^0 = \\rho^0 - 1`.
    For :math:`\\lambda = 0` the density must be 1 and :math:`\\phi^0` solves
    the limit relation :math:`\\Delta_h\\phi^0 = \\nabla_h\\cdot(\\nabla\\cdot(u^0\\otimes u^0))`.
    """
    check_admissible(rho)
    state = PlasmaState(mesh, rho, q, mesh.zeros(), lam)
    if lam > 0:
        phi = poisson.solve(poisson.PoissonProblem(mesh, state.lambda2, state.rho - 1))
    else:
        if np.any(state.rho != 1):
            raise ValueError('A quasi-neutral state needs rho = 1.')
        div_flux = momentum_flux_divergence(state, eos or EosParams(), limiter)
        phi = poisson.solve_limit(mesh, _mean_free(mesh, mesh.central_divergence(div_flux)))
    return state.evolve(phi=phi)


class SchemeKind(BaseParameters):
    """
    A time stepper and its tableau.

    Parameters
    ----------
    kind : str
        One of ``'penalized'``, ``'first-order'``, ``'classical'`` or ``'limit'``.
    tableau : EPAP.tableaux.DoubleButcherTableau, optional
        Required except for ``'first-order'``, which always uses the
        ``FirstOrder`` tableau.
    limiter : str, default='minmod'
        The slope limiter of the momentum flux.

    Raises
    ------
    ValueError
        If the kind or limiter is unknown, or a penalized or classical
        scheme gets a tableau that is not GSA.
    """

    def __init__(
        self,
        kind: str,
        tableau: DoubleButcherTableau = None,
        limiter: str = 'minmod'
    ):
        if kind not in SCHEME_KINDS:
            raise ValueError(f'Unknown scheme {kind!r}. Choose from {SCHEME_KINDS}.')
        if limiter not in LIMITERS:
            raise ValueError(f'Unknown limiter {limiter!r}. Choose from {LIMITERS}.')
        if kind == 'first-order':
            tableau = DoubleButcherTableau.first_order()
        if tableau is None:
            raise ValueError(f'Scheme {kind!r} needs a tableau.')
        if kind in ('penalized', 'classical') and not is_gsa(tableau):
            raise ValueError(f'Scheme {kind!r} needs a GSA tableau, {tableau.name} is not.')
        self.kind = kind
        self.tableau = tableau
        self.limiter = limiter

    def __repr__(self):
        return f'SchemeKind({self.kind!r}, {self.tableau.name!r})'

    @classmethod
    def _from_dict(cls, d: dict):
        kind = str(d.get('kind', 'penalized'))
        gamma = d.get('gamma', None)
        tableau = None
        if kind != 'first-order':
            tableau = load_tableau(str(d.get('tableau', 'DP2A242')), None if gamma is None else float(gamma))
        return cls(kind=kind, tableau=tableau, limiter=str(d.get('limiter', 'minmod')))

    def to_dict(self) -> dict:
        return {'kind': self.kind, 'tableau': self.tableau.name, 'limiter': self.limiter}

    @classmethod
    def penalized(cls, tableau: DoubleButcherTableau, limiter: str = 'minmod'):
        """
        Penalized IMEX-RK.
        """
        return cls('penalized', tableau, limiter)

    @classmethod
    def first_order(cls, limiter: str = 'minmod'):
        """
        First order penalized scheme.
        """
        return cls('first-order', limiter=limiter)

    @classmethod
    def classical(cls, tableau: DoubleButcherTableau, limiter: str = 'minmod'):
        """
        Unpenalized baseline.
        """
        return cls('classical', tableau, limiter)

    @classmethod
    def limit(cls, tableau: DoubleButcherTableau, limiter: str = 'minmod'):
        """
        Quasi-neutral limit scheme.
        """
        return cls('limit', tableau, limiter)

    def step(
        self,
        state: PlasmaState,
        eos: EosParams,
        dt: float,
        workspace: StageWorkspace = None
    ) -> PlasmaState:
        """
        Advance `state` by `dt` with this scheme.
        """
        match self.kind:
            case 'penalized':
                return step_penalized(state, self.tableau, eos, dt, self.limiter, workspace)
            case 'first-order':
                return step_first_order(state, eos, dt, self.limiter)
            case 'classical':
                return step_classical(state, self.tableau, eos, dt, self.limiter, workspace)
            case 'limit':
                return step_limit(state, self.tableau, eos, dt, self.limiter, workspace)

    def prepare(self, mesh: Mesh, rho: np.ndarray, q: np.ndarray, lam: float, eos: EosParams) -> PlasmaState:
        """
        The initial state of a run with this scheme.

        The limit scheme starts from :math:`\\rho = 1` and the divergence-free
        projection of the initial velocity.
        """
        if self.kind == 'limit':
            u = q/rho
            u_proj, _ = project_divergence_free(u, mesh)
            return initial_state(mesh, np.ones(mesh.shape), u_proj, 0.0, eos, self.limiter).evolve(lam=lam)
        return initial_state(mesh, rho, q, lam, eos, self.limiter)


def run(
    scenario,
    scheme: SchemeKind,
    eos: EosParams = None,
    t_final: float = None,
    cfl: float = None,
    outputs=None,
    dt: float = None,
    progress: bool = False,
    meta: dict = None
) -> RunReport:
    """
    Integrate a scenario up to a final time.

    Parameters
    ----------
    scenario : EPAP.scenarios.Scenario
        The initial data and its defaults.
    scheme : SchemeKind
        The time stepper.
    eos : EPAP.physics.EosParams, optional
        Default is ``scenario.eos``.
    t_final : float, optional
        Default is ``scenario.t_final``.
    cfl : float, optional
        Default is ``scenario.cfl``.
    outputs : EPAP.params.read.OutputParameters, optional
        Recording cadence. Default records metrics every step and
        fields at the end only.
    dt : float, optional
        A fixed time step overriding the CFL rule. Default is ``scenario.dt``.
    progress : bool, default=False
        Show a progress bar.
    meta : dict, optional
        The resolved configuration, stored in the report.

    Returns
    -------
    EPAP.diagnostics.RunReport
        The time series and snapshots. A run stopped by an instability
        or a blow-up is truncated and marked, not raised.
    """
    eos = scenario.eos if eos is None else eos
    t_final = scenario.t_final if t_final is None else float(t_final)
    cfl = scenario.cfl if cfl is None else float(cfl)
    dt_fixed = scenario.dt if dt is None else float(dt)
    metrics_every = getattr(outputs, 'metrics_every', 1)
    snapshot_every = getattr(outputs, 'snapshot_every', 0)
    if t_final < 0:
        raise ValueError(f'The final time must be non-negative, got {t_final}.')
    if dt_fixed is not None and not dt_fixed > 0:
        raise ValueError(f'The fixed time step must be positive, got {dt_fixed}.')
    mesh = scenario.mesh
    rho0, q0 = scenario.initial_fields(mesh)
    state = scheme.prepare(mesh, rho0, q0, scenario.lam, eos)
    report = RunReport(mesh, meta=meta)
    report.record(ap_metrics(state), step=0)
    if snapshot_every:
        report.snapshot(state, step=0)
    logger.info('Running %s with %s on %r up to t=%g', scenario.name, scheme, mesh, t_final)
    workspace = StageWorkspace(mesh, scheme.tableau.s)
    bar = tqdm(total=t_final, desc='Run', unit='t') if progress and t_final > 0 else None
    step = 0
    last_dt = 0.0
    end_tol = 1e-12*max(t_final, 1.0)
    while t_final - state.time > end_tol:
        try:
            step_dt = dt_fixed if dt_fixed is not None else cfl_dt(state, cfl, scenario.dt_max)
        except AdmissibilityError as err:
            report.mark_instability(InstabilityError(str(err), 0, state.time), step)
            break
        if state.time + step_dt >= t_final - end_tol:
            step_dt = t_final - state.time
            if dt_fixed is None and step_dt < 1e-6*last_dt:
                warnings.warn(f'Final step truncated to dt={step_dt:.3e}.', RuntimeWarning)
        try:
            new = scheme.step(state, eos, step_dt, workspace)
        except InstabilityError as err:
            logger.warning('Run stopped at step %d: %s', step + 1, err)
            report.mark_instability(err, step + 1)
            break
        step += 1
        last_dt = step_dt
        metrics = ap_metrics(new, dt=step_dt)
        state = new
        if bar is not None:
            bar.update(step_dt)
        done = t_final - state.time <= end_tol
        if metrics.blown_up:
            logger.warning('Blow-up detected at step %d, t=%g', step, state.time)
            report.record(metrics, step=step)
            report.mark_blowup(step)
            break
        if step % metrics_every == 0 or done:
            report.record(metrics, step=step)
        if snapshot_every and step % snapshot_every == 0:
            report.snapshot(state, step=step)
    if bar is not None:
        bar.close()
    report.finish(state, step, last_dt)
    logger.info('Finished after %d steps at t=%g (%s)', step, state.time, report.status)
    return report
