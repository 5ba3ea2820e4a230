#!python3
"""Script for Teichmüller distance estimates on windows of surfaces.

Available options:
```bash
teichwin -h
teichwin surface -h
```
Exit codes: 0 on success, 1 when a hard invariant check fails and 2 for
usage errors.
"""
from typing import Optional, Sequence
import argparse
import json
import sys

from .data_handler import SurfaceManager
from .environment import RunConfig
from .exceptions import InvariantViolation, TeichWindowError
from .helpers import argparse_actions as actions
from .helpers import argparse_parents as parents
from .scenarios import SCENARIOS

def _get_manager(args: argparse.Namespace) -> None:
    """Generate a run configuration and its surface manager."""
    args.run = RunConfig(args.command,
                         template=args.template,
                         surfaces=args.surface or [],
                         window=args.window,
                         max_chain=args.max_chain,
                         max_wind=args.max_wind,
                         scenario=getattr(args, 'scenario', None),
                         n_max=getattr(args, 'n_max', None),
                         fmt=args.fmt,
                         out=args.out,
                         jobs=args.jobs,
                         seed=args.seed,
                         scan=args.scan,
                         template_dump=getattr(args, 'template_dump', False),
                         configfile=args.config)
    args.manager = SurfaceManager(args.run)

def _surface(args: argparse.Namespace) -> None:
    """Validate and write a surface."""
    args.log.info('*' * 15)
    args.log.info('Surface:')
    args.log.info('*' * 15)
    H = args.manager.surfaces[0]
    args.manager.write(args.manager.surface_report(H))

def _metric(args: argparse.Namespace) -> None:
    """Estimate distances between two surfaces."""
    args.log.info('*' * 15)
    args.log.info('Metric estimates:')
    args.log.info('*' * 15)
    A, B = args.manager.surfaces
    args.manager.write(args.manager.metric_report(A, B))

def _scenario(args: argparse.Namespace) -> None:
    """Run a scenario table."""
    args.log.info('*' * 15)
    args.log.info('Scenario %s:', args.scenario)
    args.log.info('*' * 15)
    table = args.manager.scenario_table()
    if table.certificate is not None:
        args.log.info('Certificate: %s', table.certificate.verdict)
    args.manager.write(table)

def _build_parser() -> argparse.ArgumentParser:
    args_parents = [parents.logger('debug_teichwin.log'),
                    parents.enumeration(),
                    parents.output()]
    parser = argparse.ArgumentParser(
        description='Teichmüller distance estimates on surface windows.',
        add_help=True,
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        conflict_handler='resolve',
    )
    subparsers = parser.add_subparsers(dest='command', required=True)

    # Common arguments
    common = argparse.ArgumentParser(add_help=False, parents=args_parents)
    common.add_argument('-c', '--config', action=actions.CheckFile,
                        default=None,
                        help='Configuration file')
    common.add_argument('--template', default='builtin:flute',
                        help='Template file or builtin:NAME')
    common.add_argument('--surface', action=actions.ReadJSON, default=None,
                        help='Surface JSON file (repeatable)')
    common.add_argument('--seed', type=int, default=0,
                        help='Seed of randomized steps')
    common.add_argument('--scan', action=actions.NonNegative, default=None,
                        help='Index range of FN distances and Shiga scans')

    surface = subparsers.add_parser(
        'surface', parents=[common],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        conflict_handler='resolve',
        help='Normalize and validate a surface')
    surface.add_argument('--template-dump', action='store_true',
                         help='Include the template document')
    surface.set_defaults(pipe=[_get_manager, _surface])

    metric = subparsers.add_parser(
        'metric', parents=[common],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        conflict_handler='resolve',
        help='Distances between two surfaces')
    metric.set_defaults(pipe=[_get_manager, _metric])

    scenario = subparsers.add_parser(
        'scenario', parents=[common],
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        conflict_handler='resolve',
        help='Convergence tables')
    scenario.add_argument('--scenario', required=True,
                          help=f'Scenario name: {", ".join(SCENARIOS)}')
    scenario.add_argument('--n-max', action=actions.NonNegative,
                          default=None,
                          help='Number of rows')
    scenario.set_defaults(pipe=[_get_manager, _scenario])

    parser.set_defaults(manager=None, run=None)

    return parser

def teichwin(args: Optional[Sequence[str]] = None) -> int:
    """teichwin main program.

    Args:
      args: optional; command line args.

    Returns:
      The exit code.
    """
    parser = _build_parser()
    if args is None:
        args = sys.argv[1:]
    try:
        args = parser.parse_args(args)
    except json.JSONDecodeError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f'teichwin: error: invalid JSON: {exc}\n')
        return 2
    except SystemExit as exc:
        return exc.code

    try:
        for step in args.pipe:
            step(args)
            args.log.info('=' * 80)
    except InvariantViolation as exc:
        args.log.error('Invariant check failed: %s', exc)
        return 1
    except (TeichWindowError, OSError) as exc:
        args.log.error('%s', exc)
        return 2

    return 0

def main() -> None:
    sys.exit(teichwin())

if __name__ == '__main__':
    main()
