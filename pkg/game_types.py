"""
Game registry - the single source of truth for how actors, look-ahead depths
and game modes are labelled and described.

Pure data + pure helper functions: no matrices, no side effects. Imported by
game.py (operator dispatch, epoch parity) and cli.py (help text, reports).

depth -> which best-response pair drives the epochs:
  'one-step' -> attacker BR1 (plainest optimal sensor matrix), defender BR1 (pseudoinverse friend)
  'two-step' -> attacker BR2 (min dim V* over BR1), defender BR2 (scored friends)
"""

ACTORS = {
    'attacker': {'label': 'attacker', 'objective': 'min',
                 'tooltip': 'Chooses the sensor matrix C on odd epochs to minimise the unobservable dimension.'},
    'defender': {'label': 'defender', 'objective': 'max',
                 'tooltip': 'Chooses the feedback F on even epochs to maximise the unobservable dimension.'},
}

DEPTHS = {
    'one-step': {'label': 'one-step', 'operators': ('br1_attacker', 'br1_defender'),
                 'tooltip': 'Each player optimises the value of its own epoch only.'},
    'two-step': {'label': 'two-step', 'operators': ('br2_attacker', 'br2_defender'),
                 'tooltip': "Each player also accounts for the opponent's optimal reply."},
}

MODES = {
    'lock':         {'label': 'lock',
                     'tooltip': 'The value is constant over the tail of the trace.'},
    'oscillation':  {'label': 'oscillation',
                     'tooltip': 'The value changes at every transition of the tail.'},
    'inconclusive': {'label': 'inconclusive',
                     'tooltip': 'The horizon ends before a constant or periodic tail is established.'},
}

# Order used by CLI choices and help text.
DEPTH_ORDER = ['one-step', 'two-step']

# Where a recorded strategy came from.
SOURCES = ('best-response', 'sticky', 'override')


def depth_operators(depth):
    """(attacker operator name, defender operator name) for a depth."""
    if depth not in DEPTHS:
        raise KeyError(f"unknown depth {depth!r}; expected one of {DEPTH_ORDER}")
    return DEPTHS[depth]['operators']


def mode_label(mode):
    return MODES.get(mode, {}).get('label', mode)


def actor_for_epoch(epoch):
    return 'attacker' if epoch % 2 == 1 else 'defender'
