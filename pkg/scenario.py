"""
Scenario files: one JSON object per game setup.

    {
      "name": "example2_case1",
      "A": [["3/10", 0, 0], ...], "B": [[0], [1], ...],
      "C": [[1, 0, 0], ...],                 # vstar / defend / lock and dim V* = 0 checks
      "F0": [[0, 0, 0]],                     # defaults to zero
      "m": 2, "depth": "one-step", "horizon": 20, "seed": 0, "budget": 16,
      "overrides": [{"epoch": 3, "every": 4, "matrix": [[...]]}],
      "A0": ..., "B1": ..., "B2": ..., "C0": ...   # plant for the normal-form path
    }

Entries are integers, "p/q" strings or decimals (read exactly). A scenario
with A0/B1/B2/C0 but no A/B is reduced to its z-dynamics before playing.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from config import CONFIG_DEFAULTS
from errors import ScenarioError
from game import GameConfig, StrategyOverride
from game_types import DEPTHS
from normalform import reduced_game_system, to_normal_form
from ratmat import Matrix

logger = logging.getLogger('scenario')

MATRIX_KEYS = ('A', 'B', 'C', 'F0', 'A0', 'B1', 'B2', 'C0')
KNOWN_KEYS = set(MATRIX_KEYS) | {'name', 'description', 'm', 'depth', 'horizon', 'seed',
                                 'budget', 'overrides'}


@dataclass
class Scenario:
    name: str
    A: Matrix = None
    B: Matrix = None
    C: Matrix = None
    F0: Matrix = None
    A0: Matrix = None
    B1: Matrix = None
    B2: Matrix = None
    C0: Matrix = None
    m: int = None
    depth: str = None
    horizon: int = None
    seed: int = None
    budget: int = None
    overrides: list = field(default_factory=list)
    description: str = ''
    source: str = None

    @property
    def has_plant(self):
        return all(getattr(self, key) is not None for key in ('A0', 'B1', 'B2', 'C0'))

    def require(self, *keys):
        missing = [key for key in keys if getattr(self, key) is None]
        if missing:
            raise ScenarioError(f"scenario {self.name!r} needs {', '.join(missing)}",
                                source=self.source)


def _int_field(data, key, source, minimum=None):
    value = data.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{key} must be an integer, got {value!r}", source=source)
    if minimum is not None and value < minimum:
        raise ScenarioError(f"{key} must be >= {minimum}, got {value}", source=source)
    return value


def parse_override(entry, source=None):
    if not isinstance(entry, dict) or 'epoch' not in entry or 'matrix' not in entry:
        raise ScenarioError("override must be an object with 'epoch' and 'matrix'", source=source)
    epoch = _int_field(entry, 'epoch', source, minimum=1)
    every = _int_field(entry, 'every', source, minimum=0) or 0
    return StrategyOverride(epoch, Matrix.from_literal(entry['matrix']), every)


def scenario_from_dict(data, name=None, source=None):
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object", source=source)
    unknown = sorted(set(data) - KNOWN_KEYS)
    if unknown:
        raise ScenarioError(f"unknown scenario keys: {', '.join(unknown)}", source=source)
    matrices = {}
    for key in MATRIX_KEYS:
        if data.get(key) is not None:
            try:
                matrices[key] = Matrix.from_literal(data[key])
            except ScenarioError as e:
                raise ScenarioError(f"{key}: {e}", source=source) from None
    depth = data.get('depth')
    if depth is not None and depth not in DEPTHS:
        raise ScenarioError(f"unknown depth {depth!r}", source=source)
    overrides = data.get('overrides') or []
    if not isinstance(overrides, list):
        raise ScenarioError("overrides must be a list", source=source)
    return Scenario(
        name=data.get('name') or name or 'scenario',
        m=_int_field(data, 'm', source, minimum=1),
        depth=depth,
        horizon=_int_field(data, 'horizon', source, minimum=1),
        seed=_int_field(data, 'seed', source),
        budget=_int_field(data, 'budget', source, minimum=0),
        overrides=[parse_override(o, source) for o in overrides],
        description=data.get('description', ''),
        source=source,
        **matrices,
    )


def load_scenario(path):
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}", source=str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioError(e.msg, line=e.lineno, column=e.colno, source=str(path)) from None
    scenario = scenario_from_dict(data, name=path.stem, source=str(path))
    logger.info("Loaded scenario %r from %s", scenario.name, path)
    return scenario


def scenario_to_dict(scenario):
    data = {'name': scenario.name}
    if scenario.description:
        data['description'] = scenario.description
    for key in MATRIX_KEYS:
        value = getattr(scenario, key)
        if value is not None:
            data[key] = value.to_literal()
    for key in ('m', 'depth', 'horizon', 'seed', 'budget'):
        value = getattr(scenario, key)
        if value is not None:
            data[key] = value
    if scenario.overrides:
        data['overrides'] = [
            {'epoch': o.epoch, **({'every': o.every} if o.every else {}),
             'matrix': o.matrix.to_literal()}
            for o in scenario.overrides]
    return data


def dump_scenario(scenario, path):
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + '\n', encoding='utf-8')


def game_system(scenario):
    """(A, B, m) to play on: the scenario's own pair, or the reduced z-dynamics of its plant."""
    if scenario.A is not None and scenario.B is not None:
        m = scenario.m if scenario.m is not None else (scenario.C.nrows if scenario.C is not None else None)
        if m is None:
            raise ScenarioError(f"scenario {scenario.name!r} needs m or C", source=scenario.source)
        return scenario.A, scenario.B, m
    if scenario.has_plant:
        model = to_normal_form(scenario.A0, scenario.B1, scenario.B2, scenario.C0)
        N, B2prime = reduced_game_system(model)
        return N, B2prime, scenario.m or scenario.C0.nrows
    raise ScenarioError(f"scenario {scenario.name!r} needs A and B (or A0, B1, B2, C0)",
                        source=scenario.source)


def game_config(scenario, horizon=None, depth=None, seed=None, budget=None, extra_overrides=()):
    """GameConfig with precedence: explicit arguments, then the scenario, then CONFIG_DEFAULTS."""
    A, B, m = game_system(scenario)

    def pick(flag, own, key):
        if flag is not None:
            return flag
        return own if own is not None else CONFIG_DEFAULTS[key]

    overrides = list(extra_overrides) + list(scenario.overrides)
    return GameConfig(
        A=A, B=B, m=m,
        F0=scenario.F0 if scenario.A is not None else None,
        horizon=pick(horizon, scenario.horizon, 'horizon'),
        depth=pick(depth, scenario.depth, 'depth'),
        overrides=tuple(overrides),
        search_budget=pick(budget, scenario.budget, 'budget'),
        seed=pick(seed, scenario.seed, 'seed'),
    )
