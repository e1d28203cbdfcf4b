"""
Command line interface

``epap run``, ``epap convergence`` and ``epap ap-study`` read an
experiment from a YAML file or a scenario preset, apply the flag
overrides (flags win) and write CSV results.

Exit codes: 0 success, 2 configuration error, 3 run stopped by an
instability or a blow-up, 4 solver failure.
"""
import argparse
import logging
from pathlib import Path
from typing import List, Sequence

import yaml

from EPAP.integrator import SCHEME_KINDS
from EPAP.main import Experiment
from EPAP.mesh import BOUNDARY_KINDS
from EPAP.params.read import ExperimentParameters, REFERENCE_KINDS
from EPAP.poisson import PoissonConvergenceError, PoissonSolvabilityError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INSTABILITY = 3
EXIT_SOLVER = 4

DEFAULT_SCENARIOS = {
    'run': 'case1',
    'convergence': 'aoc',
    'ap-study': 'ap_study',
}

logger = logging.getLogger('EPAP')


def _single(values: Sequence, flag: str):
    if values is None:
        return None
    if len(values) != 1:
        raise ValueError(f'`run` takes a single {flag}, got {list(values)}.')
    return values[0]


def build_config(args: argparse.Namespace) -> dict:
    """
    The configuration dictionary of a command: the config file, or the
    default preset of the command, with the flags applied.

    Raises
    ------
    FileNotFoundError
        If the config file does not exist.
    ValueError
        If ``run`` gets more than one value for a list flag.
    """
    if args.config is not None:
        path = Path(args.config)
        if not path.exists():
            raise FileNotFoundError(f'Config file not found: {path}')
        with open(path, 'r', encoding='UTF-8') as file:
            d = yaml.safe_load(file) or {}
    else:
        d = {}
    d = {key: dict(d.get(key) or {}) for key in ('header', 'scenario', 'scheme', 'output', 'study')}
    if args.scenario is not None:
        d['scenario'] = {'preset': args.scenario}
    elif not d['scenario']:
        d['scenario'] = {'preset': DEFAULT_SCENARIOS[args.command]}
    scenario, scheme, study = d['scenario'], d['scheme'], d['study']
    is_run = args.command == 'run'
    if args.n is not None:
        if is_run:
            scenario['n'] = _single(args.n, '--n')
        else:
            study['n_list'] = list(args.n)
            scenario['n'] = min(args.n)
    if args.lam is not None:
        if is_run:
            scenario['lam'] = _single(args.lam, '--lambda')
        else:
            study['lambdas'] = list(args.lam)
    if args.tableau is not None:
        if is_run or args.command == 'convergence':
            scheme['tableau'] = _single(args.tableau, '--tableau')
        else:
            study['tableaux'] = list(args.tableau)
    for flag, key in (('cfl', 'cfl'), ('t_final', 't_final'), ('bc_phi', 'bc')):
        value = getattr(args, flag)
        if value is not None:
            scenario[key] = value
    if args.scheme is not None:
        scheme['kind'] = args.scheme
    if args.dt is not None:
        scheme['dt'] = args.dt
    if getattr(args, 'reference', None) is not None:
        study['reference'] = args.reference
    if args.workers is not None:
        d['header']['workers'] = args.workers
    if args.quiet:
        d['header']['verbose'] = 0
    elif args.verbose:
        d['header']['verbose'] = 1 + args.verbose
    return d


def _experiment(args: argparse.Namespace) -> Experiment:
    params = ExperimentParameters.from_dict(build_config(args))
    if args.out is not None:
        params.header.data_path = Path(args.out)
    return Experiment(params)


def _study_exit(statuses: Sequence[str]) -> int:
    statuses = set(statuses)
    if 'solver_failure' in statuses:
        return EXIT_SOLVER
    if statuses & {'instability', 'blown_up'}:
        return EXIT_INSTABILITY
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    """
    Run one scenario and write ``metrics.csv`` and the field snapshots.
    """
    with _experiment(args) as experiment:
        report = experiment.run()
    if report.completed:
        return EXIT_OK
    logger.warning(report.message)
    return _study_exit(['solver_failure' if getattr(report.error, 'solver_failure', False) else report.status])


def cmd_convergence(args: argparse.Namespace) -> int:
    """
    Measure the convergence of the potential and write ``convergence.csv``.
    """
    with _experiment(args) as experiment:
        table = experiment.convergence()
    for row in table:
        logger.info('lam=%g N=%d error=%.4e order=%.3f', row['lam'], row['n'], row['error'], row['order'])
    return _study_exit(list(table['status']))


def cmd_ap_study(args: argparse.Namespace) -> int:
    """
    Measure the AP scalings and write ``ap_study.csv`` and ``ap_ratios.csv``.
    """
    with _experiment(args) as experiment:
        measurements, ratios = experiment.ap_study()
    for row in ratios:
        logger.info(
            '%s lam %g/%g: rho %.3g div u %.3g phi1 %.3g (lam^2 ratio %.3g)',
            row['tableau'], row['lam_hi'], row['lam_lo'],
            row['dev_rho_ratio'], row['div_u_ratio'], row['phi1_ratio'], row['lam_ratio_sq']
        )
    return _study_exit(list(measurements['status']))


COMMANDS = {
    'run': cmd_run,
    'convergence': cmd_convergence,
    'ap-study': cmd_ap_study,
}


def build_parser() -> argparse.ArgumentParser:
    """
    The argument parser of the ``epap`` command.
    """
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--config', type=str, default=None, help='Path to a YAML experiment file.')
    shared.add_argument('--out', type=str, default=None, help='Output directory.')
    shared.add_argument('--scenario', type=str, default=None, help='Name of a scenario preset.')
    shared.add_argument('--scheme', choices=SCHEME_KINDS, default=None, help='Time stepper.')
    shared.add_argument('--tableau', nargs='+', default=None,
                        help='Builtin tableau name or tableau YAML file. ap-study accepts several.')
    shared.add_argument('--n', nargs='+', type=int, default=None,
                        help='Cells per direction. convergence accepts a doubling list.')
    shared.add_argument('--lambda', dest='lam', nargs='+', type=float, default=None,
                        help='Debye length. Studies accept several.')
    shared.add_argument('--cfl', type=float, default=None, help='CFL number.')
    shared.add_argument('--t-final', dest='t_final', type=float, default=None, help='Final time.')
    shared.add_argument('--dt', type=float, default=None, help='Fixed time step.')
    shared.add_argument('--bc-phi', dest='bc_phi', choices=BOUNDARY_KINDS, default=None,
                        help='Boundary kind of the potential.')
    shared.add_argument('--workers', type=int, default=None, help='Concurrent jobs of a sweep.')
    shared.add_argument('-v', '--verbose', action='count', default=0, help='More output.')
    shared.add_argument('-q', '--quiet', action='store_true', help='Warnings only.')

    parser = argparse.ArgumentParser(
        prog='epap',
        description='Asymptotic-preserving IMEX solver for the Euler-Poisson system.'
    )
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('run', parents=[shared], help='Run one scenario.')
    conv = sub.add_parser('convergence', parents=[shared], help='Convergence study of the potential.')
    conv.add_argument('--reference', choices=REFERENCE_KINDS, default=None,
                      help='Reference solution: limit scheme or finest run.')
    sub.add_parser('ap-study', parents=[shared], help='Asymptotic scaling study.')
    return parser


def _configure_logging(args: argparse.Namespace):
    if args.quiet:
        level = logging.WARNING
    elif args.verbose > 1:
        level = logging.DEBUG
    else:
        level = logging.INFO
    if not any(isinstance(h, logging.StreamHandler) and not isinstance(h, logging.FileHandler)
               for h in logger.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
        logger.addHandler(handler)
    for handler in logger.handlers:
        if not isinstance(handler, logging.FileHandler):
            handler.setLevel(level)


def main(argv: List[str] = None) -> int:
    """
    Entry point of the ``epap`` command.

    Parameters
    ----------
    argv : list of str, optional
        The arguments. Default is ``sys.argv[1:]``.

    Returns
    -------
    int
        The exit code.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        return COMMANDS[args.command](args)
    except (PoissonConvergenceError, PoissonSolvabilityError) as err:
        logger.error('Solver failure: %s', err)
        return EXIT_SOLVER
    except (ValueError, KeyError, TypeError, OSError, yaml.YAMLError) as err:
        logger.error('Configuration error: %s', err)
        return EXIT_CONFIG
    except FloatingPointError as err:
        logger.error('Non-finite field: %s', err)
        return EXIT_INSTABILITY


if __name__ == '__main__':
    raise SystemExit(main())
