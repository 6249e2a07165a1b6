"""
summarize_traces.py
===================

Offline summary of game traces written by ``cli.py game --out`` or by a sweep
(one CSV per scenario, header ``epoch,actor,phi,dim_vstar,max_geo_mult``).

For every file it prints the Phi range, how often Phi changed, the last
attacker/defender values and the shape of the last few values. The shape is
a heuristic over a fixed window only; the classified mode (periodic tail,
onset, loop period) comes from ``sweep_summary.csv`` and is joined in when
that file sits next to the traces.

Run:   python scripts/summarize_traces.py results/
"""
import sys
from pathlib import Path

import pandas as pd

# =========================
# USER CONFIGURATION
# =========================

trace_folder = r"./results"

phi_column = 'phi'
actor_column = 'actor'

# Epochs at the end of a trace used for the tail pattern
tail_epochs = 6

summary_name = 'sweep_summary.csv'


def _tail_pattern(phis, tail):
    """Heuristic shape of the last values: 'constant', 'changing', 'mixed' or 'short'."""
    values = list(phis)[-tail:]
    if len(values) < 2:
        return 'short'
    steps = [b - a for a, b in zip(values, values[1:])]
    if not any(steps):
        return 'constant'
    if all(steps):
        return 'changing'
    return 'mixed'


def summarize(paths, tail=tail_epochs, sweep_summary=None):
    """One row per trace file, with the classified mode when a sweep summary is given."""
    rows = []
    for path in paths:
        df = pd.read_csv(path)
        phis = df[phi_column]
        last = df.groupby(actor_column)[phi_column].last()
        rows.append({
            'trace': Path(path).stem,
            'epochs': len(df),
            'phi_min': int(phis.min()),
            'phi_max': int(phis.max()),
            'phi_changes': int((phis.diff().fillna(0) != 0).sum()),
            'last_attacker_phi': last.get('attacker'),
            'last_defender_phi': last.get('defender'),
            'tail_pattern': _tail_pattern(phis, tail),
        })
    table = pd.DataFrame(rows)
    if sweep_summary is not None:
        modes = sweep_summary.set_index('name')['mode']
        table['mode'] = table['trace'].map(modes)
    return table


if __name__ == '__main__':
    folder = Path(sys.argv[1] if len(sys.argv) > 1 else trace_folder)
    files = sorted(p for p in folder.glob('*.csv') if p.name != summary_name)
    if not files:
        print(f"No trace CSVs in {folder}")
        sys.exit(1)
    summary_path = folder / summary_name
    sweep_summary = pd.read_csv(summary_path) if summary_path.exists() else None
    print(summarize(files, sweep_summary=sweep_summary).to_string(index=False))
    print(f"Traces summarized: {len(files)}")
