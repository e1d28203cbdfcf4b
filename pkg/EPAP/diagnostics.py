"""
Diagnostics

Norms of the asymptotic constraint quantities
(:math:`\\rho - 1`, :math:`\\nabla\\cdot u`, :math:`\\phi`), blow-up
detection, convergence orders and the record of a run.
"""
from dataclasses import dataclass, asdict
from pathlib import Path
from typing import List, Sequence, Tuple

import numpy as np
from astropy.table import Table

from EPAP import config
from EPAP.helpers import get_filename, write_table
from EPAP.mesh import Mesh, NonFiniteFieldError
from EPAP.physics import PlasmaState

METRIC_COLUMNS = ('t', 'dev_rho_l2', 'dev_rho_linf', 'div_u_l2', 'div_u_linf',
                  'phi_l2', 'phi_linf', 'mass', 'dt')
"""
Columns of the metrics file, after ``step``.

:type: tuple of str
"""


@dataclass(frozen=True)
class ApMetrics:
    """
    The asymptotic-preserving metrics of one state.

    Attributes
    ----------
    t : float
        The time.
    dev_rho_l2, dev_rho_linf : float
        Norms of :math:`\\rho - 1`.
    div_u_l2, div_u_linf : float
        Norms of :math:`\\nabla_h\\cdot u`.
    phi_l2, phi_linf : float
        Norms of :math:`\\phi`.
    mass : float
        :math:`\\sum_k \\rho_k \\prod_m \\Delta x_m`.
    blown_up : bool
        ``True`` if a field is non-finite or
        :math:`\\|\\phi\\|_\\infty` exceeds the blow-up threshold.
    dt : float
        The step that produced the state, 0 for the initial state.
    """
    t: float
    dev_rho_l2: float
    dev_rho_linf: float
    div_u_l2: float
    div_u_linf: float
    phi_l2: float
    phi_linf: float
    mass: float
    blown_up: bool
    dt: float = 0.0


def _norms(f: np.ndarray, mesh: Mesh) -> Tuple[float, float]:
    return float(np.sqrt(np.sum(f**2)*mesh.cell_volume)), float(np.max(np.abs(f)))


def ap_metrics(state: PlasmaState, dt: float = 0.0, threshold: float = config.BLOWUP_THRESHOLD) -> ApMetrics:
    """
    Compute the AP metrics of a state.

    Never raises on bad data: non-finite fields give NaN norms and
    ``blown_up=True``.

    Parameters
    ----------
    state : EPAP.physics.PlasmaState
        The state.
    dt : float, default=0
        The step that produced the state.
    threshold : float, optional
        Blow-up threshold on :math:`\\|\\phi\\|_\\infty`.

    Returns
    -------
    ApMetrics
        The metrics.
    """
    mesh = state.mesh
    with np.errstate(all='ignore'):
        u = state.q/state.rho
        try:
            div_u = mesh.central_divergence(u)
        except NonFiniteFieldError:
            div_u = np.full(mesh.shape, np.nan)
        dev_l2, dev_linf = _norms(state.rho - 1, mesh)
        div_l2, div_linf = _norms(div_u, mesh)
        phi_l2, phi_linf = _norms(state.phi, mesh)
        mass = float(np.sum(state.rho)*mesh.cell_volume)
    finite = state.is_finite() and np.all(np.isfinite(u))
    blown_up = not finite or not phi_linf <= threshold
    return ApMetrics(
        t=state.time,
        dev_rho_l2=dev_l2,
        dev_rho_linf=dev_linf,
        div_u_l2=div_l2,
        div_u_linf=div_linf,
        phi_l2=phi_l2,
        phi_linf=phi_linf,
        mass=mass,
        blown_up=bool(blown_up),
        dt=float(dt)
    )


def l2_error(a: np.ndarray, b: np.ndarray, mesh: Mesh) -> float:
    """
    Discrete :math:`L^2` distance :math:`\\sqrt{\\sum_k (a_k - b_k)^2 \\prod_m \\Delta x_m}`.

    Raises
    ------
    ValueError
        If `a` or `b` does not live on `mesh`.
    """
    mesh.check_scalar(a)
    mesh.check_scalar(b)
    return float(np.sqrt(np.sum((np.asarray(a) - np.asarray(b))**2)*mesh.cell_volume))


def restrict(fine: np.ndarray, coarse: Mesh) -> np.ndarray:
    """
    Restrict a field to a coarser nested mesh by index subsampling.

    Node-collocated cells make coarse cell ``k`` coincide with fine
    cell ``r*k``.

    Parameters
    ----------
    fine : np.ndarray
        A scalar field on a mesh with ``r`` times more cells per direction.
    coarse : EPAP.mesh.Mesh
        The target mesh.

    Returns
    -------
    np.ndarray
        The restricted field.

    Raises
    ------
    ValueError
        If the meshes do not nest.
    """
    fine = np.asarray(fine)
    if fine.ndim != coarse.dim:
        raise ValueError(f'Cannot restrict a {fine.ndim}D field to a {coarse.dim}D mesh.')
    ratios = []
    for n_fine, n_coarse in zip(fine.shape, coarse.n):
        if n_fine % n_coarse:
            raise ValueError(f'{n_coarse} cells do not nest in {n_fine}.')
        ratios.append(n_fine//n_coarse)
    return fine[tuple(slice(None, None, r) for r in ratios)]


@dataclass(frozen=True)
class ConvergenceRow:
    """
    One row of a convergence table.

    Attributes
    ----------
    n_cells : int
        The number of cells per direction.
    error : float
        The :math:`L^2` error against the reference.
    order : float
        :math:`\\log_2(e_{N/2}/e_N)` relative to the previous row,
        NaN for the coarsest row or if an error is not positive.
    """
    n_cells: int
    error: float
    order: float = float('nan')


def observed_orders(rows: Sequence[Tuple[int, float]]) -> List[ConvergenceRow]:
    """
    Experimental orders of convergence.

    Parameters
    ----------
    rows : sequence of (int, float)
        Pairs ``(N, error)`` sorted by increasing ``N``, each ``N``
        twice the previous one.

    Returns
    -------
    list of ConvergenceRow
        One row per input pair. The order is stored on the finer mesh.

    Raises
    ------
    ValueError
        If the meshes do not form a doubling sequence.
    """
    out = []
    for i, (n, error) in enumerate(rows):
        order = float('nan')
        if i > 0:
            n_prev, error_prev = rows[i-1]
            if n != 2*n_prev:
                raise ValueError(f'Mesh sizes must double, got {n_prev} then {n}.')
            if error > 0 and error_prev > 0:
                order = float(np.log2(error_prev/error))
        out.append(ConvergenceRow(int(n), float(error), order))
    return out


class RunReport:
    """
    The record of one run.

    Parameters
    ----------
    mesh : EPAP.mesh.Mesh
        The grid of the run.
    meta : dict, optional
        The resolved configuration, written as a comment in every file.

    Attributes
    ----------
    rows : list of (int, ApMetrics)
        Step index and metrics of the recorded states.
    snapshots : list of (int, PlasmaState)
        Step index and recorded field states.
    status : str
        ``'completed'``, ``'instability'`` or ``'blown_up'``.
    message : str
        Description of the stopping reason.
    steps : int
        Number of completed steps.
    error : Exception or None
        The instability that stopped the run.
    final_state : PlasmaState or None
        The last accepted state.
    """
    STATUSES = ('completed', 'instability', 'blown_up')

    def __init__(self, mesh: Mesh, meta: dict = None):
        self.mesh = mesh
        self.meta = dict(meta or {})
        self.rows: List[Tuple[int, ApMetrics]] = []
        self.snapshots: List[Tuple[int, PlasmaState]] = []
        self.status = 'completed'
        self.message = ''
        self.steps = 0
        self.error = None
        self.final_state = None

    def __repr__(self):
        return f'RunReport(status={self.status!r}, steps={self.steps}, records={len(self.rows)})'

    def record(self, metrics: ApMetrics, step: int):
        """
        Append a metrics row.
        """
        self.rows.append((int(step), metrics))

    def snapshot(self, state: PlasmaState, step: int):
        """
        Append a field snapshot.
        """
        self.snapshots.append((int(step), state))

    def mark_instability(self, err: Exception, step: int):
        """
        Mark the run as stopped by an instability in step `step`.
        """
        self.status = 'instability'
        self.error = err
        self.message = f'Instability in step {step}: {err}'

    def mark_blowup(self, step: int):
        """
        Mark the run as stopped by the blow-up detector after step `step`.
        """
        self.status = 'blown_up'
        self.message = f'Blow-up detected after step {step}'

    def finish(self, state: PlasmaState, steps: int, dt: float = 0.0):
        """
        Close the report with the last accepted state.

        The last state is recorded if the cadence skipped it. `dt` is
        the step that produced it.
        """
        self.final_state = state
        self.steps = int(steps)
        if not self.rows or self.rows[-1][0] != self.steps:
            self.record(ap_metrics(state, dt=dt), self.steps)
        if not self.snapshots or self.snapshots[-1][0] != self.steps:
            self.snapshot(state, self.steps)
        if not self.message:
            self.message = f'Reached t={state.time} in {self.steps} steps'

    @property
    def completed(self) -> bool:
        """
        ``True`` if the run reached its final time.
        """
        return self.status == 'completed'

    @property
    def metrics(self) -> List[ApMetrics]:
        """
        The recorded metrics without step indices.
        """
        return [m for _, m in self.rows]

    def metrics_table(self) -> Table:
        """
        The metrics time series.

        Returns
        -------
        astropy.table.Table
            Columns ``step`` and ``METRIC_COLUMNS``.
        """
        data = {'step': np.array([step for step, _ in self.rows], dtype=int)}
        for name in METRIC_COLUMNS:
            data[name] = np.array([getattr(m, name) for _, m in self.rows], dtype=float)
        table = Table(data)
        table.meta.update(self.meta)
        return table

    def fields_table(self, index: int = -1) -> Table:
        """
        The cell values of one snapshot.

        Parameters
        ----------
        index : int, default=-1
            Position in ``snapshots``. Default is the final state.

        Returns
        -------
        astropy.table.Table
            Columns ``x`` (1D) or ``x1, x2`` (2D), then ``rho``,
            ``q1[, q2]``, ``u1[, u2]`` and ``phi``, one row per cell in
            C order.
        """
        _, state = self.snapshots[index]
        mesh = state.mesh
        coords = mesh.coordinates()
        data = {}
        if mesh.dim == 1:
            data['x'] = coords[0].ravel()
        else:
            for m, c in enumerate(coords):
                data[f'x{m+1}'] = c.ravel()
        data['rho'] = state.rho.ravel()
        with np.errstate(all='ignore'):
            u = state.q/state.rho
        for m in range(mesh.dim):
            data[f'q{m+1}'] = state.q[m].ravel()
        for m in range(mesh.dim):
            data[f'u{m+1}'] = u[m].ravel()
        data['phi'] = state.phi.ravel()
        table = Table(data)
        table.meta['t'] = state.time
        return table

    def write(self, path: Path, write_fields: bool = True) -> None:
        """
        Write ``metrics.csv`` and ``fields/fields_<index>.csv`` under `path`.
        """
        path = Path(path)
        meta = dict(self.meta, status=self.status)
        write_table(self.metrics_table(), path / 'metrics.csv', meta)
        if not write_fields:
            return
        for i, (step, state) in enumerate(self.snapshots):
            filename = get_filename(i, config.N_ZFILL, 'csv')
            write_table(self.fields_table(i), path / 'fields' / filename,
                        dict(meta, step=step, t=state.time))

    def to_dict(self) -> dict:
        """
        Summary of the run, for logging and study tables.
        """
        last = self.rows[-1][1] if self.rows else None
        return {
            'status': self.status,
            'steps': self.steps,
            'message': self.message,
            'final': asdict(last) if last is not None else None,
        }

