"""
Batch runs: many scenarios through run_game/classify_mode on a process pool.

Each task is a plain scenario dict, so workers share nothing; results come
back in submission order (``Pool.imap``) and are aggregated with pandas.
"""
import csv
import logging
import multiprocessing
from pathlib import Path

import pandas as pd

from config import CONFIG_DEFAULTS
from errors import ObsGameError
from game import classify_mode, run_game
from ratmat import Matrix
from sampling import make_rng, random_rational_spectrum_system
from scenario import (Scenario, game_config, load_scenario, scenario_from_dict,
                      scenario_to_dict)

logger = logging.getLogger('sweep')

TRACE_HEADER = ['epoch', 'actor', 'phi', 'dim_vstar', 'max_geo_mult']
SUMMARY_COLUMNS = ['name', 'depth', 'horizon', 'mode', 'onset_epoch', 'loop_period',
                   'mean_phi', 'final_phi', 'theorem1_holds', 'error']


def write_trace_csv(trace, handle):
    writer = csv.writer(handle, dialect='excel', lineterminator='\n')
    writer.writerow(TRACE_HEADER)
    for record in trace.records:
        writer.writerow(record.csv_row())


def random_scenarios(count, seed=None):
    """Generated systems with rational spectra: n in 3..5, k in 1..2, m in 1..2."""
    rng = make_rng(seed)
    out = []
    for i in range(count):
        n = int(rng.integers(3, 6))
        k = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        A, B = random_rational_spectrum_system(rng, n, k)
        out.append(Scenario(name=f"random_{i:03d}", A=A, B=B, m=m, F0=Matrix.zeros(k, n)))
    return out


def _run_one(task):
    data, options, out_dir = task
    scenario = scenario_from_dict(data)
    row = dict.fromkeys(SUMMARY_COLUMNS)
    row.update(name=scenario.name, error='')
    try:
        cfg = game_config(scenario, **options)
        row.update(depth=cfg.depth, horizon=cfg.horizon)
        trace = run_game(cfg)
        report = classify_mode(trace)
    except ObsGameError as e:
        logger.warning("Scenario %s failed: %s", scenario.name, e)
        row.update(mode='error', error=str(e))
        return row
    phis = trace.phis
    row.update(mode=report.mode, onset_epoch=report.onset_epoch, loop_period=report.loop_period,
               mean_phi=sum(phis) / len(phis), final_phi=phis[-1],
               theorem1_holds=report.theorem1_holds)
    if out_dir:
        with open(Path(out_dir) / f"{scenario.name}.csv", 'w', newline='') as handle:
            write_trace_csv(trace, handle)
    return row


def collect_scenarios(directory=None, random_count=0, seed=None):
    scenarios = []
    if directory:
        scenarios += [load_scenario(p) for p in sorted(Path(directory).glob('*.json'))]
    if random_count:
        scenarios += random_scenarios(random_count, seed)
    return scenarios


def run_sweep(scenarios, options=None, out_dir=None, workers=None):
    """One summary row per scenario, in input order, as a DataFrame."""
    workers = workers or CONFIG_DEFAULTS['sweep_workers']
    if out_dir:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    tasks = [(scenario_to_dict(s), dict(options or {}), str(out_dir) if out_dir else None)
             for s in scenarios]
    logger.info("Sweep of %d scenarios on %d worker(s)", len(tasks), workers)
    if workers > 1 and len(tasks) > 1:
        with multiprocessing.Pool(min(workers, len(tasks))) as pool:
            rows = list(pool.imap(_run_one, tasks))
    else:
        rows = [_run_one(t) for t in tasks]
    summary = pd.DataFrame(rows, columns=SUMMARY_COLUMNS)
    if out_dir:
        summary.to_csv(Path(out_dir) / 'sweep_summary.csv', index=False)
    return summary


def aggregate(summary):
    """(mode counts per depth, mean Phi per depth)."""
    counts = summary.groupby(['depth', 'mode'], dropna=False).size().rename('count').reset_index()
    ok = summary[summary['mode'] != 'error']
    mean_phi = ok.groupby('depth')['mean_phi'].mean().rename('mean_phi').reset_index()
    return counts, mean_phi
