"""Execution of benchmark runs: single runs, the iteration-count table across
PC and Spice configurations, and the per-schedule convergence histories."""
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import hashlib
import json
import logging
import os
from pathlib import Path
import numpy as np
import pandas as pd
from spicepc.Data.constants import EXIT_CONVERGED, EXIT_SOLVER_FAILURE
from spicepc.IO.HistoryWriter import (
    run_summary, write_history_csv, write_long_csv, write_summary_json,
    read_summary_json
)
from spicepc.Qcqp.QcqpGenerator import build_instance, generate_data
from spicepc.Solver.SpiceSolver import SpiceSolver

logger = logging.getLogger(__name__)

RunResult = namedtuple('RunResult', ['spec', 'history', 'summary', 'exit_code'])

TABLE_COLUMNS = ('PC', 'Spice rho=1', 'Spice exp')
FIGURE_SCHEDULES = ('const', 'power', 'exp', 'powerexp')
FAIL = 'FAIL'

def table_variants(spec):
    """The three solver configurations of one table row, keyed by column."""
    return {
        'PC': spec.replace(mode='pc', rho='const'),
        'Spice rho=1': spec.replace(mode='spice', rho='const'),
        'Spice exp': spec.replace(mode='spice', rho='exp'),
    }

def thread_cap():
    """Worker count for parallel runs, capped by SPICE_THREADS."""
    value = os.environ.get('SPICE_THREADS')
    default = os.cpu_count() or 1
    if value is None:
        return default
    try:
        cap = int(value)
    except ValueError as exc:
        raise ValueError(f'SPICE_THREADS must be an integer, got {value!r}') from exc
    if cap < 1:
        raise ValueError(f'SPICE_THREADS must be >= 1, got {cap}')
    return min(cap, default)

def output_paths(spec, out_dir=None):
    out_dir = Path(out_dir if out_dir is not None else spec.out)
    return {
        'history': out_dir/f'{spec.label}.history.csv',
        'summary': out_dir/f'{spec.label}.summary.json',
        'iterates': out_dir/f'{spec.label}.iterates.npz',
    }

def _write_iterates(history, path):
    np.savez(
        path,
        iterates=np.array([w.stacked() for w in history.iterates]),
        predictors=np.array([w.stacked() for w in history.predictors]),
    )

def execute(spec, data=None):
    """Generate the instance of `spec` (unless `data` is given), solve it from
    the origin with zero multipliers and write the outputs if spec.out is
    set."""
    if data is None:
        data = generate_data(spec.qcqp_config())
    inst = build_instance(data, name=spec.label)
    solver = SpiceSolver(inst, spec.solve_config())
    y0 = None if data.m is None else np.zeros(data.m)
    history = solver.solve(np.zeros(data.n), np.zeros(inst.p), y0)
    wall_time_ms = None
    if spec.timing:
        wall_time_ms = 1000.0*history.wall_time
    summary = run_summary(history, wall_time_ms)
    if not history.converged:
        summary['message'] = history.message
    exit_code = EXIT_CONVERGED if history.converged else EXIT_SOLVER_FAILURE
    if spec.out is not None:
        paths = output_paths(spec)
        paths['history'].parent.mkdir(parents=True, exist_ok=True)
        write_history_csv(history.to_dataframe(), paths['history'])
        write_summary_json(summary, paths['summary'])
        if spec.diagnostics:
            _write_iterates(history, paths['iterates'])
    logger.info(
        '%s: %s in %d iterations', spec.label, history.status,
        history.iterations
    )
    return RunResult(spec, history, summary, exit_code)

def run(spec):
    """Execute one spec and return its exit code (0 converged, 1 otherwise)."""
    return execute(spec).exit_code

def cache_path(spec, cache_dir):
    """Cached summary of `spec`. The label names the instance and schedule;
    the digest covers every setting, so a change of tol or max_iters misses
    the cache."""
    settings = json.dumps(spec.to_dict(), sort_keys=True)
    digest = hashlib.sha1(settings.encode('utf-8')).hexdigest()[:12]
    return Path(cache_dir)/f'{spec.label}-{digest}.summary.json'

def _cached_or_run(spec, cache_dir):
    if cache_dir is not None:
        cached = cache_path(spec, cache_dir)
        if cached.exists():
            logger.info('Using cached summary %s', cached)
            return read_summary_json(cached)
    summary = execute(spec).summary
    if cache_dir is not None:
        Path(cache_dir).mkdir(parents=True, exist_ok=True)
        write_summary_json(summary, cache_path(spec, cache_dir))
    return summary

def _cell(summaries):
    if any(s['status'] != 'converged' for s in summaries):
        return FAIL
    median = float(np.median([s['iterations'] for s in summaries]))
    return int(median) if median.is_integer() else median

def table(specs, seeds=1, cache_dir=None, threads=None):
    """Iteration counts of PC, Spice with rho = 1 and Spice with e^{beta t}
    for every spec, one row per spec.

    Parameters
    ----------
    specs : list of RunSpec
        One spec per row; its mode and rho are overridden per column.
    seeds : int, default 1
        Seeds spec.seed .. spec.seed+seeds-1 are run and the median count is
        reported.
    cache_dir : str or Path, optional
        Summaries found here are reused instead of re-running.
    threads : int, optional
        Worker count; defaults to thread_cap().

    Returns
    -------
    (pandas.DataFrame, int)
        The table and the exit code (1 if any cell failed).
    """
    specs = list(specs)
    if not specs:
        raise ValueError('table needs at least one spec')
    if seeds < 1:
        raise ValueError(f'seeds must be >= 1, got {seeds}')
    jobs = []
    for row, spec in enumerate(specs):
        for column, variant in table_variants(spec).items():
            for offset in range(seeds):
                jobs.append(
                    (row, column, variant.replace(seed=spec.seed+offset))
                )
    workers = threads or thread_cap()
    logger.info('Running %d table jobs on %d threads', len(jobs), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        summaries = list(pool.map(
            lambda job: _cached_or_run(job[2], cache_dir), jobs
        ))
    cells = {}
    for (row, column, _), summary in zip(jobs, summaries):
        cells.setdefault((row, column), []).append(summary)
    rows = []
    for row, spec in enumerate(specs):
        entry = {'problem': spec.problem, 'n': spec.n, 'm': spec.m, 'p': spec.p}
        for column in TABLE_COLUMNS:
            entry[column] = _cell(cells[(row, column)])
        rows.append(entry)
    df = pd.DataFrame(rows, columns=['problem', 'n', 'm', 'p', *TABLE_COLUMNS])
    failed = (df[list(TABLE_COLUMNS)] == FAIL).any().any()
    return df, EXIT_SOLVER_FAILURE if failed else EXIT_CONVERGED

def format_table(df):
    """Aligned plain-text rendering of a table DataFrame."""
    return df.to_string(index=False, na_rep='-')

def write_table(df, out_dir, stem='table'):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    df.to_csv(out_dir/f'{stem}.csv', index=False, lineterminator='\n')
    (out_dir/f'{stem}.txt').write_text(format_table(df) + '\n', encoding='utf-8')

def figure(spec):
    """Run the four schedules on the instance of `spec` and collect their
    histories. With spec.out set, one history CSV per schedule and a combined
    long-format CSV are written.

    Returns
    -------
    (dict of str to pandas.DataFrame, int)
        Histories keyed by schedule label and the exit code.
    """
    data = generate_data(spec.qcqp_config())
    frames = {}
    exit_code = EXIT_CONVERGED
    for rho in FIGURE_SCHEDULES:
        variant = spec.replace(mode='spice', rho=rho)
        result = execute(variant, data=data)
        frames[variant.schedule().label] = result.history.to_dataframe()
        if result.exit_code != EXIT_CONVERGED:
            exit_code = result.exit_code
    if spec.out is not None:
        stem = spec.replace(rho='const', mode='spice').label.rsplit('-spice', 1)[0]
        write_long_csv(frames, Path(spec.out)/f'{stem}.figure.csv')
    return frames, exit_code
