"""
Command-line front end.

    python cli.py vstar fixtures/example2_case1.json
    python cli.py game fixtures/example2_case1.json --out trace.csv
    python cli.py sweep fixtures/ --out results/

Exit codes: 0 success, 2 unreadable or malformed input, 3 domain error
(irrational spectrum, missing relative degree, shape mismatch).
Reports go to stdout; logging goes to data/logs/obsgame.log and, from
WARNING up, to stderr.
"""
import argparse
import json
import logging
import sys
from pathlib import Path

from app_logging import setup_logging
from attack import min_unobservable_dim
from config import CONFIG_DEFAULTS, load_env_overrides
from errors import ObsGameError, ScenarioError
from game import (StrategyOverride, br1_attacker, classify_mode, run_game,
                  stackelberg_compare)
from game_types import DEPTH_ORDER, DEPTHS, mode_label
from normalform import to_normal_form
from ratmat import Matrix, format_rational
from scenario import game_config, game_system, load_scenario
from subspace import closed_loop, friend, is_friend, unobservable_dim, vstar
from sweep import aggregate, collect_scenarios, run_sweep, write_trace_csv

logger = logging.getLogger('cli')


def _fmt(matrix):
    if matrix.nrows == 0 or matrix.ncols == 0:
        return [f"  ({matrix.nrows}x{matrix.ncols})"]
    cells = [[format_rational(e) for e in row] for row in matrix.rows()]
    width = max(len(c) for row in cells for c in row)
    return ["  [" + " ".join(c.rjust(width) for c in row) + "]" for row in cells]


def _emit(out, *lines):
    for line in lines:
        out.write(f"{line}\n")


def _bool(value):
    return 'true' if value else 'false'


def parse_override_flag(text):
    """'<epoch>=<file>': the file holds a matrix literal or {"matrix": ..., "every": n}."""
    epoch_text, sep, path = text.partition('=')
    if not sep or not epoch_text.strip().isdigit():
        raise ScenarioError(f"--override expects <epoch>=<file>, got {text!r}")
    try:
        data = json.loads(Path(path).read_text(encoding='utf-8'))
    except OSError as e:
        raise ScenarioError(f"cannot read override: {e.strerror}", source=path) from None
    except json.JSONDecodeError as e:
        raise ScenarioError(e.msg, line=e.lineno, column=e.colno, source=path) from None
    every = 0
    if isinstance(data, dict):
        every = data.get('every', 0)
        data = data.get('matrix')
    return StrategyOverride(int(epoch_text), Matrix.from_literal(data), every)


# ---------------------------------------------------------------- commands
def cmd_vstar(args, out):
    scenario = load_scenario(args.scenario)
    scenario.require('A', 'B', 'C')
    result = vstar(scenario.A, scenario.B, scenario.C)
    _emit(out, f"scenario: {scenario.name}",
          f"dim V* = {result.vstar.dim}",
          "iterate dims: " + " ".join(str(d) for d in result.iterate_dims),
          "basis:", *_fmt(result.vstar.basis))
    return 0


def cmd_attack(args, out):
    scenario = load_scenario(args.scenario)
    A, B, m = game_system(scenario)
    F = scenario.F0 if scenario.F0 is not None else Matrix.zeros(B.ncols, A.nrows)
    C, candidates = br1_attacker(A, B, F, m)
    M = closed_loop(A, B, F)
    _emit(out, f"scenario: {scenario.name}", "C =", *_fmt(C),
          f"phi = {unobservable_dim(C, M)}",
          f"min unobservable dim = {min_unobservable_dim(M, m)}",
          f"candidates = {len(candidates)}")
    return 0


def cmd_defend(args, out):
    scenario = load_scenario(args.scenario)
    scenario.require('A', 'B', 'C')
    A, B, C = scenario.A, scenario.B, scenario.C
    V = vstar(A, B, C).vstar
    F = friend(A, B, V)
    _emit(out, f"scenario: {scenario.name}", "F =", *_fmt(F),
          f"is_friend = {_bool(is_friend(A, B, F, V))}",
          f"phi = {unobservable_dim(C, closed_loop(A, B, F))}",
          f"dim V* = {V.dim}")
    return 0


def cmd_game(args, out):
    scenario = load_scenario(args.scenario)
    overrides = [parse_override_flag(o) for o in args.override or ()]
    cfg = game_config(scenario, horizon=args.horizon, depth=args.depth, seed=args.seed,
                      budget=args.budget, extra_overrides=overrides)
    trace = run_game(cfg)
    report = classify_mode(trace)
    if args.out:
        with open(args.out, 'w', newline='') as handle:
            write_trace_csv(trace, handle)
        logger.info("Trace written to %s", args.out)
    else:
        write_trace_csv(trace, out)
    _emit(out, f"# mode = {mode_label(report.mode)}",
          f"# onset_epoch = {report.onset_epoch if report.onset_epoch else ''}",
          f"# amplitude = {report.amplitude}",
          f"# loop_period = {report.loop_period if report.loop_period else ''}",
          f"# theorem1_holds = {_bool(report.theorem1_holds)}",
          f"# theorem2_holds = {_bool(report.theorem2_holds)}",
          f"# lemma5_holds = {_bool(report.lemma5_holds)}",
          f"# amplitude_formula_holds = {_bool(report.amplitude_formula_holds)}")
    return 0


def cmd_reduce(args, out):
    scenario = load_scenario(args.scenario)
    scenario.require('A0', 'B1', 'B2', 'C0')
    model = to_normal_form(scenario.A0, scenario.B1, scenario.B2, scenario.C0)
    shapes = {name: getattr(model, name).shape for name in ('N', 'E', 'R', 'S', 'L', 'B2prime')}
    _emit(out, f"scenario: {scenario.name}",
          "r = " + " ".join(str(ri) for ri in model.r),
          f"s = {model.s}",
          *(f"{name}: {rows}x{cols}" for name, (rows, cols) in shapes.items()),
          f"hypothesis Im B2 in V*: {'holds' if model.hypothesis_holds else 'violated'}",
          "N =", *_fmt(model.N), "B2' =", *_fmt(model.B2prime))
    return 0


def cmd_stackelberg(args, out):
    scenario = load_scenario(args.scenario)
    A, B, m = game_system(scenario)
    report = stackelberg_compare(A, B, m, budget=args.budget if args.budget is not None
                                 else scenario.budget, F0=scenario.F0,
                                 seed=args.seed if args.seed is not None else scenario.seed)
    _emit(out, f"scenario: {scenario.name}",
          f"BR2X_a value = {report.br2x_value}",
          f"BR2_a value = {report.br2_value}",
          f"max dim V* over BR1_a family = {report.family_vstar_max}",
          f"min unobservable dim = {report.min_unobs}",
          f"follower defender = BR1_d: {_bool(report.follower_defender_agrees)}",
          f"follower attacker = BR1_a: {_bool(report.follower_attacker_agrees)}",
          f"vstar_bound_holds = {_bool(report.vstar_bound_holds)}",
          f"defender-as-leader value = {report.leader_defender_value}")
    return 0


def cmd_sweep(args, out):
    if not args.directory and not args.random:
        raise ScenarioError("sweep needs a scenario directory or --random N")
    scenarios = collect_scenarios(args.directory, args.random or 0, args.seed)
    options = {'horizon': args.horizon, 'depth': args.depth, 'seed': args.seed,
               'budget': args.budget}
    summary = run_sweep(scenarios, options, out_dir=args.out, workers=args.workers)
    counts, mean_phi = aggregate(summary)
    _emit(out, f"scenarios: {len(summary)}", "mode counts:",
          counts.to_string(index=False), "mean phi by depth:", mean_phi.to_string(index=False))
    return 0


COMMANDS = {
    'reduce': (cmd_reduce, 'normal form of the plant A0, B1, B2, C0'),
    'vstar': (cmd_vstar, 'maximal (A,B)-invariant subspace inside Ker C'),
    'attack': (cmd_attack, "attacker's optimal sensor matrix against F0"),
    'defend': (cmd_defend, "defender's friend of V*(C)"),
    'game': (cmd_game, 'play the alternating game and classify its mode'),
    'stackelberg': (cmd_stackelberg, 'compare two-step responses with leader/follower play'),
    'sweep': (cmd_sweep, 'run a directory of scenarios (or random systems) in parallel'),
}


def build_parser():
    parser = argparse.ArgumentParser(prog='obsgame', description=__doc__.strip().splitlines()[0])
    parser.add_argument('-v', '--verbose', action='store_true', help='log at DEBUG level')
    parser.add_argument('--log-file', help='log file (default data/logs/obsgame.log)')

    game_opts = argparse.ArgumentParser(add_help=False)
    game_opts.add_argument('--horizon', type=int, help=f"epochs (default {CONFIG_DEFAULTS['horizon']})")
    game_opts.add_argument('--depth', choices=DEPTH_ORDER,
                           help='; '.join(f"{d}: {DEPTHS[d]['tooltip']}" for d in DEPTH_ORDER))
    game_opts.add_argument('--seed', type=int, help='seed for random candidates')
    game_opts.add_argument('--budget', type=int, help='random candidates per search')
    game_opts.add_argument('--out', help='output CSV (game) or folder (sweep)')
    game_opts.add_argument('--override', action='append', metavar='EPOCH=FILE',
                           help='force the strategy in FILE at EPOCH (repeatable)')

    sub = parser.add_subparsers(dest='command', required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[game_opts], help=help_text)
        if name == 'sweep':
            p.add_argument('directory', nargs='?', help='folder of scenario JSON files')
            p.add_argument('--random', type=int, metavar='N', help='also run N generated systems')
            p.add_argument('--workers', type=int, help='worker processes')
        else:
            p.add_argument('scenario', help='scenario JSON file')
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    env = load_env_overrides()
    level = 'DEBUG' if args.verbose else env.get('log_level', CONFIG_DEFAULTS['log_level'])
    log_file = args.log_file or (Path(env['log_dir']) / 'obsgame.log' if env.get('log_dir') else None)
    if args.command == 'sweep' and args.workers is None:
        args.workers = env.get('sweep_workers')
    setup_logging(level, log_file)
    handler = COMMANDS[args.command][0]
    try:
        return handler(args, out)
    except ScenarioError as e:
        logger.error("%s: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ObsGameError as e:
        logger.error("%s: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == '__main__':
    sys.exit(main())
