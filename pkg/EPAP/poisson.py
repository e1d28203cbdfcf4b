"""
Discrete Poisson solver

Solves :math:`\\lambda^2 \\Delta_h \\phi = r` with the compact
three-point Laplacian. Periodic problems are solved on the mean-free
subspace. 1D problems use a banded direct solve, 2D periodic problems
use conjugate gradients and 2D problems with a Dirichlet direction use
a sparse direct solve.
"""
import logging
from functools import lru_cache

import numpy as np
from scipy import sparse
from scipy.linalg import solve_banded
from scipy.sparse.linalg import cg, spsolve, LinearOperator

from EPAP import config
from EPAP.mesh import Mesh

logger = logging.getLogger(__name__)


class PoissonSolvabilityError(ValueError):
    """
    A periodic right hand side has a non-negligible mean.
    """


class PoissonConvergenceError(RuntimeError):
    """
    The solver did not reach the requested residual.
    """


class PoissonProblem:
    """
    The linear problem :math:`\\lambda^2 \\Delta_h \\phi = r`.

    Parameters
    ----------
    mesh : EPAP.mesh.Mesh
        The grid.
    lambda2 : float
        :math:`\\lambda^2 > 0`.
    rhs : np.ndarray
        The right hand side, usually :math:`\\rho - 1`.
    bc : tuple of str, optional
        Boundary kind per direction. Default is ``mesh.bc``.
    tol : float, optional
        Residual tolerance. Default is ``config.POISSON_TOL``.

    Raises
    ------
    ValueError
        If `lambda2` is not positive or `rhs` does not live on `mesh`.
    PoissonSolvabilityError
        If the problem is periodic and ``mean(rhs)`` exceeds the
        solvability tolerance.
    """

    def __init__(
        self,
        mesh: Mesh,
        lambda2: float,
        rhs: np.ndarray,
        bc=None,
        tol: float = config.POISSON_TOL
    ):
        if not lambda2 > 0:
            raise ValueError(f'lambda2 must be positive, got {lambda2}.')
        rhs = np.asarray(rhs, dtype=float)
        mesh.check_scalar(rhs)
        if bc is not None:
            mesh = mesh.with_bc(bc)
        self.mesh = mesh
        self.lambda2 = float(lambda2)
        self.rhs = rhs
        self.tol = float(tol)
        if self.periodic:
            bound = config.SOLVABILITY_RTOL*np.max(np.abs(rhs)) + config.SOLVABILITY_ATOL
            offset = np.mean(rhs)
            if abs(offset) > bound:
                raise PoissonSolvabilityError(
                    f'Periodic right hand side has mean {offset:.3e} > {bound:.3e}.')

    @property
    def bc(self):
        """
        Boundary kind per direction.
        """
        return self.mesh.bc

    @property
    def periodic(self) -> bool:
        """
        ``True`` if every direction is periodic.
        """
        return self.mesh.is_periodic


@lru_cache(maxsize=32)
def _second_difference_matrix(n: int, dx: float, bc: str) -> sparse.csr_matrix:
    main = -2*np.ones(n)
    off = np.ones(n-1)
    mat = sparse.diags([off, main, off], [-1, 0, 1], format='lil')
    if bc == 'periodic':
        mat[0, n-1] = 1
        mat[n-1, 0] = 1
    return (mat/dx**2).tocsr()


@lru_cache(maxsize=32)
def laplacian_matrix(mesh: Mesh) -> sparse.csr_matrix:
    """
    The compact discrete Laplacian of `mesh` as a sparse matrix.

    Fields are flattened in C order. Dirichlet directions drop the
    wrap-around couplings, which imposes zero ghost values.

    Parameters
    ----------
    mesh : EPAP.mesh.Mesh
        The grid.

    Returns
    -------
    scipy.sparse.csr_matrix
        Shape ``(mesh.size, mesh.size)``.
    """
    mats = [_second_difference_matrix(n, dx, bc) for n, dx, bc in zip(mesh.n, mesh.dx, mesh.bc)]
    if mesh.dim == 1:
        return mats[0]
    eye0 = sparse.identity(mesh.n[0], format='csr')
    eye1 = sparse.identity(mesh.n[1], format='csr')
    return (sparse.kron(mats[0], eye1) + sparse.kron(eye0, mats[1])).tocsr()


def _tridiagonal_bands(n: int, dx: float) -> np.ndarray:
    ab = np.empty((3, n))
    ab[0] = 1/dx**2
    ab[1] = -2/dx**2
    ab[2] = 1/dx**2
    return ab


def _solve_1d(p: PoissonProblem, rhs: np.ndarray) -> np.ndarray:
    n = p.mesh.n[0]
    dx = p.mesh.dx[0]
    if p.periodic:
        # pin phi[n-1] = 0, the dropped row is implied by mean(rhs) = 0
        ab = _tridiagonal_bands(n-1, dx)
        inner = solve_banded((1, 1), ab, rhs[:-1]/p.lambda2)
        return np.append(inner, 0.0)
    return solve_banded((1, 1), _tridiagonal_bands(n, dx), rhs/p.lambda2)


def _solve_cg(p: PoissonProblem, rhs: np.ndarray) -> np.ndarray:
    mat = laplacian_matrix(p.mesh)
    # -lambda2*L is positive semi-definite
    operator = LinearOperator(
        mat.shape, matvec=lambda x: -p.lambda2*(mat @ x), dtype=float)
    inv_diag = 1/(-p.lambda2*mat.diagonal())
    precond = LinearOperator(mat.shape, matvec=lambda x: inv_diag*x, dtype=float)
    iterations = 0

    def count(_):
        nonlocal iterations
        iterations += 1
    # a 2-norm tolerance scaled so that it bounds the max-norm residual
    x, info = cg(
        operator, -rhs.ravel(), rtol=p.tol/np.sqrt(p.mesh.size), atol=0.0,
        maxiter=config.POISSON_MAXITER, M=precond, callback=count
    )
    logger.debug('CG converged in %d iterations (info=%d)', iterations, info)
    if info > 0:
        raise PoissonConvergenceError(f'CG did not converge in {info} iterations.')
    if info < 0:
        raise PoissonConvergenceError('CG breakdown.')
    return x.reshape(p.mesh.shape)


def _solve_direct(p: PoissonProblem, rhs: np.ndarray) -> np.ndarray:
    mat = laplacian_matrix(p.mesh)
    return spsolve((p.lambda2*mat).tocsc(), rhs.ravel()).reshape(p.mesh.shape)


def backward_error(p: PoissonProblem, phi: np.ndarray, rhs: np.ndarray = None) -> float:
    """
    Normwise backward error of a candidate solution.

    `rhs` replaces ``p.rhs``, e.g. by its mean-free projection.

    .. math::

        \\frac{\\|\\lambda^2 \\Delta_h \\phi - r\\|_\\infty}
        {\\|\\lambda^2 \\Delta_h\\|_\\infty \\|\\phi\\|_\\infty + \\|r\\|_\\infty}
    """
    rhs = p.rhs if rhs is None else rhs
    residual = p.lambda2*(laplacian_matrix(p.mesh) @ phi.ravel()) - rhs.ravel()
    scale = p.lambda2*4*sum(1/dx**2 for dx in p.mesh.dx)*np.max(np.abs(phi)) + np.max(np.abs(rhs))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(residual))/scale)


def solve(p: PoissonProblem) -> np.ndarray:
    """
    Solve a Poisson problem.

    Parameters
    ----------
    p : PoissonProblem
        The problem.

    Returns
    -------
    np.ndarray
        The potential. It has zero mean if the problem is periodic.

    Raises
    ------
    PoissonConvergenceError
        If the iteration cap is hit or the backward error of the
        solution exceeds ``p.tol``.
    """
    rhs = p.rhs
    if not np.any(rhs):
        return p.mesh.zeros()
    if p.periodic:
        rhs = rhs - np.mean(rhs)
    if p.mesh.dim == 1:
        phi = _solve_1d(p, rhs)
    elif p.periodic:
        phi = _solve_cg(p, rhs)
    else:
        phi = _solve_direct(p, rhs)
    if p.periodic:
        phi = phi - np.mean(phi)
    error = backward_error(p, phi, rhs)
    if not error <= p.tol:
        raise PoissonConvergenceError(f'Poisson backward error {error:.3e} exceeds {p.tol:.1e}.')
    return phi


def solve_limit(mesh: Mesh, rhs: np.ndarray, tol: float = config.POISSON_TOL) -> np.ndarray:
    """
    Solve :math:`\\Delta_h \\phi = r`, the quasi-neutral elliptic relation.

    Parameters
    ----------
    mesh : EPAP.mesh.Mesh
        The grid, whose boundary kinds are used.
    rhs : np.ndarray
        The right hand side.
    tol : float, optional
        Residual tolerance.

    Returns
    -------
    np.ndarray
        The potential.
    """
    return solve(PoissonProblem(mesh, 1.0, rhs, tol=tol))
