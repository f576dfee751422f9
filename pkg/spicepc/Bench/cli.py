"""Command-line entry point `spicepc-bench`.

Subcommands:
  run     solve one QCQP instance and write its history CSV and JSON summary
  table   iteration counts of PC, Spice rho=1 and Spice e^{beta t} per row
  figure  histories of the four rho schedules on one instance

Exit codes: 0 converged, 1 solver failure, 2 usage error.
"""
import argparse
import json
import logging
import sys
from spicepc.Bench.RunSpec import RunSpec, RHO_KINDS, PROBLEMS
from spicepc.Bench.Runner import execute, figure, format_table, table, write_table
from spicepc.Data.constants import (
    DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_MU, DEFAULT_TOL, DEFAULT_GAP_TOL,
    DEFAULT_MAX_ITERS, EXIT_USAGE
)

logger = logging.getLogger(__name__)

def _add_common(parser):
    parser.add_argument('--problem', choices=PROBLEMS, default='single')
    parser.add_argument('--n', type=int, help='dimension of x')
    parser.add_argument('--m', type=int, help='dimension of y (separable)')
    parser.add_argument('--q', type=int, help='rows of every W_i and V_i')
    parser.add_argument('--p', type=int, help='number of quadratic constraints')
    parser.add_argument('--p-eq', type=int, default=0, help='linear equality rows')
    parser.add_argument('--seed', type=int, default=0)
    parser.add_argument('--rho', choices=tuple(RHO_KINDS), default='const')
    parser.add_argument('--alpha', type=float, default=DEFAULT_ALPHA)
    parser.add_argument('--beta', type=float, default=DEFAULT_BETA)
    parser.add_argument('--mu', type=float, default=DEFAULT_MU)
    parser.add_argument('--tol', type=float, default=DEFAULT_TOL)
    parser.add_argument(
        '--gap-tol', type=float, default=DEFAULT_GAP_TOL,
        help='relative prediction gap needed to report convergence'
    )
    parser.add_argument('--max-iters', type=int, default=DEFAULT_MAX_ITERS)
    parser.add_argument('--mode', choices=('spice', 'pc'), default='spice')
    parser.add_argument('--norm', choices=('spectral', 'frobenius'), default='spectral')
    parser.add_argument(
        '--frozen-rho-at', type=int, default=None,
        help='use rho(T) at every iteration'
    )
    parser.add_argument(
        '--pi', type=float, default=None,
        help='constraint bound (default: standard value at paper scale, '
        'otherwise half the smallest constraint value at the least-squares point)'
    )
    parser.add_argument('--out', default=None, help='output directory')
    parser.add_argument(
        '--diagnostics', action='store_true',
        help='store iterates for contraction checks'
    )
    parser.add_argument(
        '--paper-scale', action='store_true',
        help='default to n=m=300, q=400, p=20 instead of the desk-scale sizes'
    )
    parser.add_argument(
        '--timing', action='store_true', help='report wall time in the summary'
    )
    parser.add_argument(
        '--log-level', default='WARNING',
        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR')
    )

def build_parser():
    parser = argparse.ArgumentParser(
        prog='spicepc-bench',
        description='QCQP benchmarks of the scaling-aware prediction-correction solver.'
    )
    subparsers = parser.add_subparsers(dest='command', required=True)
    run_parser = subparsers.add_parser('run', help='solve one instance')
    _add_common(run_parser)
    table_parser = subparsers.add_parser(
        'table', help='iteration counts of PC and Spice configurations'
    )
    _add_common(table_parser)
    table_parser.add_argument(
        '--dims', nargs=3, type=int, action='append', metavar=('N', 'M', 'P'),
        help='one table row (repeatable); defaults to the --n/--m/--p sizes'
    )
    table_parser.add_argument(
        '--seeds', type=int, default=1, help='seeds per cell, median reported'
    )
    table_parser.add_argument(
        '--cache', default=None, help='directory of reusable run summaries'
    )
    figure_parser = subparsers.add_parser(
        'figure', help='histories of all rho schedules on one instance'
    )
    _add_common(figure_parser)
    return parser

def spec_from_args(args, **overrides):
    kwargs = dict(
        problem=args.problem, n=args.n, m=args.m, q=args.q, p=args.p,
        seed=args.seed, rho=args.rho, alpha=args.alpha, beta=args.beta,
        mu=args.mu, tol=args.tol, gap_tol=args.gap_tol,
        max_iters=args.max_iters, mode=args.mode,
        pi=args.pi, out=args.out, diagnostics=args.diagnostics,
        p_eq=args.p_eq, norm=args.norm, frozen_rho_at=args.frozen_rho_at,
        timing=args.timing, paper_scale=args.paper_scale
    )
    kwargs.update(overrides)
    return RunSpec(**kwargs)

def _cmd_run(args):
    result = execute(spec_from_args(args))
    print(json.dumps(result.summary, indent=2, sort_keys=True))
    return result.exit_code

def _cmd_table(args):
    if args.dims:
        specs = [spec_from_args(args, n=n, m=m, p=p) for n, m, p in args.dims]
    else:
        specs = [spec_from_args(args)]
    df, exit_code = table(specs, seeds=args.seeds, cache_dir=args.cache)
    print(format_table(df))
    if args.out is not None:
        write_table(df, args.out)
    return exit_code

def _cmd_figure(args):
    frames, exit_code = figure(spec_from_args(args))
    for label, df in frames.items():
        print(f'{label}: {len(df)} iterations')
    return exit_code

COMMANDS = {'run': _cmd_run, 'table': _cmd_table, 'figure': _cmd_figure}

def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format='%(asctime)s %(name)s %(levelname)s: %(message)s'
    )
    try:
        return COMMANDS[args.command](args)
    except (ValueError, TypeError) as exc:
        print(f'spicepc-bench: error: {exc}', file=sys.stderr)
        return EXIT_USAGE

if __name__ == '__main__':
    raise SystemExit(main())
