"""
Structured periodic grids

A ``Mesh`` is a 1D or 2D tensor grid with node-collocated cells
:math:`x_{m,k} = k \\Delta x_m`, :math:`\\Delta x_m = L_m / N_m`.
Scalar fields are ``numpy`` arrays of shape ``mesh.shape``, vector
fields have shape ``(mesh.dim, *mesh.shape)``. Every stencil wraps
periodically. The boundary kind only matters to the Poisson solver.
"""
from functools import wraps
from typing import Tuple, Sequence

import numpy as np

BOUNDARY_KINDS = ('periodic', 'dirichlet0')
"""
Allowed boundary kinds for the electric potential.

:type: tuple of str
"""


class NonFiniteFieldError(FloatingPointError):
    """
    A field operation produced a NaN or an infinite value.
    """


def finite_output(func):
    """
    Decorator that checks the returned field for non-finite entries.

    Raises
    ------
    NonFiniteFieldError
        If any entry of the output is NaN or infinite.
    """
    @wraps(func)
    def wrapper(*args, **kwargs):
        out = func(*args, **kwargs)
        if not np.all(np.isfinite(out)):
            raise NonFiniteFieldError(
                f'{func.__name__} produced a non-finite field')
        return out
    return wrapper


class Mesh:
    """
    Periodic structured grid in one or two dimensions.

    Parameters
    ----------
    n : sequence of int
        The number of cells :math:`N_m` in each direction.
    length : sequence of float
        The domain length :math:`L_m` in each direction.
    bc : sequence of str, optional
        The boundary kind of the potential in each direction,
        ``'periodic'`` or ``'dirichlet0'``. Default is periodic.

    Attributes
    ----------
    n : tuple of int
        Cells per direction.
    length : tuple of float
        Domain length per direction.
    dx : tuple of float
        Grid spacing per direction.
    bc : tuple of str
        Boundary kind of the potential per direction.

    Raises
    ------
    ValueError
        If the dimension is not 1 or 2, a direction has fewer than
        4 cells, or a boundary kind is unknown.
    """

    def __init__(
        self,
        n: Sequence[int],
        length: Sequence[float],
        bc: Sequence[str] = None
    ):
        n = tuple(int(nm) for nm in np.atleast_1d(n))
        length = tuple(float(lm) for lm in np.atleast_1d(length))
        if bc is None:
            bc = ('periodic',)*len(n)
        elif isinstance(bc, str):
            bc = (bc,)*len(n)
        bc = tuple(str(b) for b in bc)
        if len(n) not in (1, 2):
            raise ValueError(f'Only 1D and 2D meshes are supported, got {len(n)}D.')
        if not len(length) == len(n) == len(bc):
            raise ValueError('`n`, `length` and `bc` must have one entry per direction.')
        if min(n) < 4:
            raise ValueError(f'Every direction needs at least 4 cells, got {n}.')
        if min(length) <= 0:
            raise ValueError(f'Domain lengths must be positive, got {length}.')
        for b in bc:
            if b not in BOUNDARY_KINDS:
                raise ValueError(f'Unknown boundary kind {b!r}.')
        self.n = n
        self.length = length
        self.dx = tuple(lm/nm for lm, nm in zip(length, n))
        self.bc = bc

    def __repr__(self):
        return f'Mesh(n={self.n}, length={self.length}, bc={self.bc})'

    def __eq__(self, other):
        if not isinstance(other, Mesh):
            return NotImplemented
        return self._key == other._key

    def __hash__(self):
        return hash(self._key)

    @property
    def _key(self):
        return (self.n, self.length, self.bc)

    @property
    def dim(self) -> int:
        """
        The number of space dimensions.

        :type: int
        """
        return len(self.n)

    @property
    def shape(self) -> Tuple[int, ...]:
        """
        The shape of a scalar field on this mesh.

        :type: tuple of int
        """
        return self.n

    @property
    def size(self) -> int:
        """
        The number of cells.

        :type: int
        """
        return int(np.prod(self.n))

    @property
    def cell_volume(self) -> float:
        """
        The product of the grid spacings.

        :type: float
        """
        return float(np.prod(self.dx))

    @property
    def is_periodic(self) -> bool:
        """
        ``True`` if the potential is periodic in every direction.

        :type: bool
        """
        return all(b == 'periodic' for b in self.bc)

    def axis(self, m: int) -> np.ndarray:
        """
        The node coordinates :math:`k \\Delta x_m` of direction `m`.

        Parameters
        ----------
        m : int
            The direction.

        Returns
        -------
        np.ndarray
            The 1D coordinate array.
        """
        self._check_direction(m)
        return np.arange(self.n[m])*self.dx[m]

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """
        The cell coordinates as full-shape arrays (``'ij'`` indexing).

        Returns
        -------
        tuple of np.ndarray
            One array of shape ``self.shape`` per direction.
        """
        return tuple(np.meshgrid(*[self.axis(m) for m in range(self.dim)], indexing='ij'))

    def with_bc(self, bc: Sequence[str] | str) -> 'Mesh':
        """
        A copy of this mesh with another potential boundary kind.
        """
        return Mesh(self.n, self.length, bc)

    def refined(self, factor: int = 2) -> 'Mesh':
        """
        The mesh with `factor` times more cells in every direction.
        """
        return Mesh(tuple(nm*factor for nm in self.n), self.length, self.bc)

    def zeros(self) -> np.ndarray:
        """
        A scalar field of zeros.
        """
        return np.zeros(self.shape)

    def zeros_vector(self) -> np.ndarray:
        """
        A vector field of zeros.
        """
        return np.zeros((self.dim,)+self.shape)

    def _check_direction(self, m: int):
        if not 0 <= m < self.dim:
            raise ValueError(f'Direction {m} out of range for a {self.dim}D mesh.')

    def check_scalar(self, f: np.ndarray):
        """
        Check that `f` is a scalar field on this mesh.

        Raises
        ------
        ValueError
            If the shape does not match.
        """
        if np.shape(f) != self.shape:
            raise ValueError(f'Expected a field of shape {self.shape}, got {np.shape(f)}.')

    def check_vector(self, v: np.ndarray):
        """
        Check that `v` is a vector field on this mesh.

        Raises
        ------
        ValueError
            If the shape does not match.
        """
        if np.shape(v) != (self.dim,)+self.shape:
            raise ValueError(
                f'Expected a field of shape {(self.dim,)+self.shape}, got {np.shape(v)}.')

    @finite_output
    def central_diff(self, f: np.ndarray, m: int) -> np.ndarray:
        """
        Centred first difference :math:`(f_{k+e_m} - f_{k-e_m})/(2\\Delta x_m)`.

        Parameters
        ----------
        f : np.ndarray
            The scalar field.
        m : int
            The direction.

        Returns
        -------
        np.ndarray
            The difference field.
        """
        self._check_direction(m)
        self.check_scalar(f)
        return (np.roll(f, -1, axis=m) - np.roll(f, 1, axis=m))/(2*self.dx[m])

    @finite_output
    def second_diff(self, f: np.ndarray, m: int) -> np.ndarray:
        """
        Three-point second difference
        :math:`(f_{k+e_m} - 2f_k + f_{k-e_m})/\\Delta x_m^2`.

        Parameters
        ----------
        f : np.ndarray
            The scalar field.
        m : int
            The direction.

        Returns
        -------
        np.ndarray
            The difference field.
        """
        self._check_direction(m)
        self.check_scalar(f)
        return (np.roll(f, -1, axis=m) - 2*f + np.roll(f, 1, axis=m))/self.dx[m]**2

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        """
        Compact discrete Laplacian, the sum of ``second_diff`` over directions.
        """
        return sum(self.second_diff(f, m) for m in range(self.dim))

    def central_gradient(self, f: np.ndarray) -> np.ndarray:
        """
        Centred gradient, the vector of ``central_diff`` over directions.
        """
        return np.stack([self.central_diff(f, m) for m in range(self.dim)])

    def central_divergence(self, v: np.ndarray) -> np.ndarray:
        """
        Centred divergence :math:`\\sum_m \\delta_{x_m}\\mu_{x_m} v_m / \\Delta x_m`.

        Parameters
        ----------
        v : np.ndarray
            The vector field.

        Returns
        -------
        np.ndarray
            The divergence.
        """
        self.check_vector(v)
        return sum(self.central_diff(v[m], m) for m in range(self.dim))

    def mean(self, f: np.ndarray) -> float:
        """
        Arithmetic average over all cells.
        """
        self.check_scalar(f)
        return float(np.mean(f))
