"""EPAP main module

This module performs all of EPAP's interaction with the user.
It contains the `Experiment` class, which runs single simulations,
convergence studies and asymptotic-preserving studies from one
set of parameters and writes their results.
"""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
import warnings
import logging
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from astropy.table import Table
from tqdm.auto import tqdm

from EPAP.diagnostics import RunReport, ap_metrics, l2_error, observed_orders, restrict
from EPAP.helpers import check_and_build_dir, write_table
from EPAP.integrator import InstabilityError, SchemeKind, StageWorkspace, run
from EPAP.params.read import ExperimentParameters, OutputParameters
from EPAP.scenarios import Scenario
from EPAP.spatial import cfl_dt


def _status(report: RunReport) -> str:
    if isinstance(report.error, InstabilityError) and report.error.solver_failure:
        return 'solver_failure'
    return report.status


def _convergence_job(job: Tuple[Scenario, SchemeKind, SchemeKind, OutputParameters]) -> Tuple[str, np.ndarray, np.ndarray]:
    """
    Run one mesh of a convergence study and its limit reference.

    The reference is skipped if `job[2]` is ``None``.
    """
    scenario, scheme, reference, outputs = job
    report = run(scenario, scheme, outputs=outputs)
    phi = report.final_state.phi
    if not report.completed or reference is None:
        return _status(report), phi, None
    ref_report = run(scenario, reference, outputs=outputs)
    if not ref_report.completed:
        return _status(ref_report), phi, None
    return 'completed', phi, ref_report.final_state.phi


def _ap_job(job: Tuple[Scenario, SchemeKind]) -> Dict[str, float]:
    """
    Two steps of one scheme on one scenario, with the AP measurements.

    Both steps use the CFL step of the initial state.
    """
    scenario, scheme = job
    row = {
        'tableau': scheme.tableau.name,
        'lam': scenario.lam,
        'dt': np.nan,
        'dev_rho_1': np.nan,
        'div_u_1': np.nan,
        'dev_rho_2': np.nan,
        'div_u_2': np.nan,
        'phi1_linf': np.nan,
        'status': 'completed',
    }
    mesh = scenario.mesh
    rho, q = scenario.initial_fields(mesh)
    state = scheme.prepare(mesh, rho, q, scenario.lam, scenario.eos)
    dt = scenario.dt if scenario.dt is not None else cfl_dt(state, scenario.cfl, scenario.dt_max)
    row['dt'] = dt
    workspace = StageWorkspace(mesh, scheme.tableau.s)
    if scheme.kind == 'first-order':
        row['phi1_linf'] = float(np.max(np.abs(state.phi)))
    try:
        for k in (1, 2):
            try:
                state = scheme.step(state, scenario.eos, dt, workspace)
            finally:
                # the first stage is kept even if a later one fails
                if k == 1 and scheme.kind != 'first-order' and workspace.completed:
                    row['phi1_linf'] = float(np.max(np.abs(workspace.phi[0])))
            metrics = ap_metrics(state, dt)
            row[f'dev_rho_{k}'] = metrics.dev_rho_linf
            row[f'div_u_{k}'] = metrics.div_u_linf
            if metrics.blown_up:
                row['status'] = 'blown_up'
                break
    except InstabilityError as err:
        row['status'] = 'solver_failure' if err.solver_failure else 'instability'
    return row


class Experiment:
    """
    Main class that stores the information of this experiment.

    Parameters
    ----------
    params : EPAP.params.read.ExperimentParameters
        The global parameters describing the experiment.

    Examples
    --------
    >>> experiment = Experiment.from_yaml('case1.yaml')
    >>> report = experiment.run()
    Run: 100%|██████████| 0.1/0.1 [00:00<00:00,  2.31t/s]
    >>> report.status
    'completed'
    """

    def __init__(
        self,
        params: ExperimentParameters
    ):
        if isinstance(params, (Path, str)):
            msg = 'Please use the `from_yaml` classmethod'
            raise TypeError(msg)
        self.params = params
        self.verbose = params.header.verbose
        self._build_directories()
        self.logger = logging.getLogger('EPAP')
        self.logger.setLevel(logging.DEBUG if self.verbose > 1 else logging.INFO)
        self._handler = logging.FileHandler(self.directories['parent'] / 'epap.log', mode='w')
        self._handler.setLevel(logging.DEBUG)
        self._handler.setFormatter(logging.Formatter('%(asctime)s %(name)s %(levelname)s: %(message)s'))
        self.logger.addHandler(self._handler)
        scenario = params.run_scenario()
        if params.scheme.kind == 'classical' and scenario.dt is None:
            msg = 'The unpenalized scheme with a CFL step is unstable for dt >> lambda.'
            warnings.warn(msg, RuntimeWarning)

    @classmethod
    def from_yaml(cls, config_path: Path):
        """
        Initialize an experiment from a YAML file.

        Parameters
        ----------
        config_path : pathlib.Path
            The path to the YAML file.
        """
        params = ExperimentParameters.from_yaml(config_path)
        return cls(params)

    _directories = {
        'parent': '',
        'fields': 'fields',
    }

    @property
    def directories(self) -> dict:
        """
        The directory structure for the experiment.

        Returns
        -------
        dict
            Keys represent the identifiers of directories, and the values are
            `pathlib.Path` objects.
        """
        parent_dir = self.params.header.data_path
        dir_dict = {key: parent_dir/value for key,
                    value in self._directories.items()}
        return dir_dict

    def _wrap_iterator(self, iterator, **kwargs):
        """
        Wrapper for iterators so that `tqdm` can be used
        only if `self.verbose` > 0

        Parameters
        ----------
        iterator : iterable
            Iterator to be passed to `tqdm`
        **kwargs : dict
            The keywords to pass to `tqdm`

        Returns
        -------
        iterable
            The iterator wrapped appropriately.
        """
        if self.verbose > 0:
            return tqdm(iterator, **kwargs)
        else:
            return iterator

    def _build_directories(self):
        """
        Build the file system for this experiment.
        """
        for _, path in self.directories.items():
            check_and_build_dir(path)

    def close(self):
        """
        Detach the log file handler.
        """
        self.logger.removeHandler(self._handler)
        self._handler.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    @property
    def meta(self) -> dict:
        """
        The resolved configuration, written as a comment in every output file.
        """
        return {
            'header': self.params.header.to_dict(),
            'scenario': self.params.run_scenario().to_dict(),
            'scheme': self.params.scheme.to_dict(),
            'output': self.params.output.to_dict(),
            'study': self.params.study.to_dict(),
        }

    def _map(self, func: Callable, jobs: Sequence, desc: str) -> List:
        """
        Apply `func` to every job, concurrently if more than one worker
        is configured. Results keep the order of `jobs`.
        """
        workers = min(self.params.header.workers, len(jobs))
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                return list(self._wrap_iterator(pool.map(func, jobs), total=len(jobs), desc=desc))
        return [func(job) for job in self._wrap_iterator(jobs, total=len(jobs), desc=desc)]

    def run(self) -> RunReport:
        """
        Run the scenario with the configured scheme and write the results.

        Returns
        -------
        EPAP.diagnostics.RunReport
            The report, also written to ``metrics.csv`` and
            ``fields/`` under the data path.
        """
        scenario = self.params.run_scenario()
        scheme = self.params.scheme_kind()
        self.logger.info('Run %s with %s', scenario, scheme)
        report = run(
            scenario, scheme,
            outputs=self.params.output,
            progress=self.verbose > 0,
            meta=self.meta
        )
        report.write(self.directories['parent'], write_fields=self.params.output.write_fields)
        if not report.completed:
            self.logger.warning(report.message)
        self.logger.info('Run finished with status %s after %d steps', report.status, report.steps)
        return report

    def convergence(self) -> Table:
        """
        Measure the convergence of the potential for every configured lambda.

        Returns
        -------
        astropy.table.Table
            Columns ``lam``, ``n``, ``error``, ``order`` and ``status``,
            also written to ``convergence.csv``.

        Raises
        ------
        ValueError
            If fewer than two meshes are configured or they do not double.
        """
        n_list = sorted(self.params.n_list())
        if len(n_list) < 2:
            raise ValueError(f'A convergence study needs at least two meshes, got {n_list}.')
        for coarse, fine in zip(n_list[:-1], n_list[1:]):
            if fine != 2*coarse:
                raise ValueError(f'Mesh sizes must double, got {coarse} then {fine}.')
        scenario = self.params.run_scenario()
        scheme = self.params.scheme_kind()
        use_limit = self.params.study.reference == 'limit'
        reference = SchemeKind.limit(scheme.tableau, scheme.limiter) if use_limit else None
        lambdas = self.params.study.lambdas
        jobs = [
            (scenario.replace(lam=lam).with_mesh(n), scheme, reference, self.params.output)
            for lam in lambdas for n in n_list
        ]
        results = self._map(_convergence_job, jobs, desc='Convergence')
        rows = []
        for i, lam in enumerate(lambdas):
            block = results[i*len(n_list):(i+1)*len(n_list)]
            statuses = [status for status, _, _ in block]
            if use_limit:
                errors = [
                    l2_error(phi, ref, scenario.with_mesh(n).mesh) if ref is not None else np.nan
                    for n, (_, phi, ref) in zip(n_list, block)
                ]
                sizes = n_list
            else:
                finest = block[-1][1]
                ok = statuses[-1] == 'completed'
                errors = [
                    l2_error(phi, restrict(finest, scenario.with_mesh(n).mesh), scenario.with_mesh(n).mesh)
                    if ok and status == 'completed' else np.nan
                    for n, (status, phi, _) in zip(n_list[:-1], block[:-1])
                ]
                sizes = n_list[:-1]
                statuses = [status if ok else statuses[-1] for status in statuses[:-1]]
            for row, status in zip(observed_orders(list(zip(sizes, errors))), statuses):
                rows.append((lam, row.n_cells, row.error, row.order, status))
                self.logger.info('lam=%g N=%d error=%.4e order=%.3f %s', lam, row.n_cells, row.error, row.order, status)
        table = Table(rows=rows, names=('lam', 'n', 'error', 'order', 'status'),
                      dtype=(float, int, float, float, str))
        write_table(table, self.directories['parent'] / 'convergence.csv', self.meta)
        return table

    def ap_study(self) -> Tuple[Table, Table]:
        """
        Measure the asymptotic scalings for every (lambda, tableau) pair.

        Returns
        -------
        measurements : astropy.table.Table
            One row per pair: ``max|rho-1|`` and ``max|div u|`` after one
            and two steps and ``max|phi^(1)|``. Written to ``ap_study.csv``.
        ratios : astropy.table.Table
            For each tableau and consecutive lambdas ``lam_hi > lam_lo``:
            ``dev_rho_ratio`` and ``div_u_ratio`` (value at ``lam_hi`` over
            value at ``lam_lo``, after two steps), ``phi1_ratio`` (value at
            ``lam_lo`` over value at ``lam_hi``) and the reference
            ``lam_ratio_sq``. Written to ``ap_ratios.csv``.
        """
        scenario = self.params.run_scenario()
        lambdas = sorted(self.params.study.lambdas, reverse=True)
        schemes = [self.params.scheme_kind(name) for name in self.params.study.tableaux]
        jobs = [(scenario.replace(lam=lam), scheme) for scheme in schemes for lam in lambdas]
        rows = self._map(_ap_job, jobs, desc='AP study')
        names = ('tableau', 'lam', 'dt', 'dev_rho_1', 'div_u_1', 'dev_rho_2', 'div_u_2', 'phi1_linf', 'status')
        measurements = Table(rows=[[row[name] for name in names] for row in rows], names=names)
        ratio_rows = []
        for k, scheme in enumerate(schemes):
            block = rows[k*len(lambdas):(k+1)*len(lambdas)]
            for hi, lo in zip(block[:-1], block[1:]):
                with np.errstate(all='ignore'):
                    ratio_rows.append((
                        scheme.tableau.name, hi['lam'], lo['lam'],
                        float(np.divide(hi['dev_rho_2'], lo['dev_rho_2'])),
                        float(np.divide(hi['div_u_2'], lo['div_u_2'])),
                        float(np.divide(lo['phi1_linf'], hi['phi1_linf'])),
                        (hi['lam']/lo['lam'])**2,
                    ))
        ratios = Table(
            rows=ratio_rows,
            names=('tableau', 'lam_hi', 'lam_lo', 'dev_rho_ratio', 'div_u_ratio', 'phi1_ratio', 'lam_ratio_sq'),
            dtype=(str, float, float, float, float, float, float)
        )
        for row in ratio_rows:
            self.logger.info('%s lam %g/%g: rho ratio %.3g, div u ratio %.3g, phi1 ratio %.3g', *row[:6])
        write_table(measurements, self.directories['parent'] / 'ap_study.csv', self.meta)
        write_table(ratios, self.directories['parent'] / 'ap_ratios.csv', self.meta)
        return measurements, ratios
