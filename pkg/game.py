"""
The attack/defense game on the unobservable subspace.

Epoch i plays out as follows (F0 is configuration):
  odd i  -> attacker picks C against the F in force, value min over C
  even i -> defender picks F against the C in force, value max over F
and the recorded value is Phi_i = dim Ker Omega(C, A + B F) for the pair in
force after the move.

One-step responses: the attacker plays a member of the finite
optimal B-hat family (attack.candidate_bhats); the defender plays a friend of
V*(C). Two-step responses refine those sets: the attacker minimises dim V*(C)
over its family, the defender scores friends by the maximum geometric
multiplicity of A + B F, ties broken by the attacker's optimal value against
them. The attacker's family is ordered plainest sensor first
(attack.sensor_key). Both players keep their incumbent strategy when it is
still a best response.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache

from attack import min_unobservable_dim, ordered_sensors
from config import CONFIG_DEFAULTS
from errors import NonRationalSpectrum, ScenarioError, ShapeMismatch
from game_types import ACTORS, DEPTHS, SOURCES, actor_for_epoch, depth_operators
from jordan import jordan_decompose, max_geometric_multiplicity
from ratmat import Matrix, Subspace, kernel_basis, left_annihilator
from sampling import make_rng, random_friend, random_rational_matrix
from subspace import (closed_loop, friend, friend_family_basis, is_friend,
                      unobservable_dim, vstar)

logger = logging.getLogger('game')


# ------------------------------------------------------------------ caches
# Every cached function is pure in exact rational matrices.
@lru_cache(maxsize=1024)
def _vstar_space(A, B, C):
    return vstar(A, B, C).vstar


@lru_cache(maxsize=1024)
def _min_unobs(M, m):
    return min_unobservable_dim(M, m)


@lru_cache(maxsize=256)
def _dual_jordan(M):
    return jordan_decompose(M.T)


@lru_cache(maxsize=1024)
def _max_geo(M):
    return max_geometric_multiplicity(M)


def _max_geo_or_none(M):
    try:
        return _max_geo(M)
    except NonRationalSpectrum:
        return None


# ------------------------------------------------------------------- types
@dataclass(frozen=True)
class StrategyOverride:
    """Force ``matrix`` at ``epoch`` and, if ``every`` > 0, at every ``every`` epochs after."""
    epoch: int
    matrix: Matrix
    every: int = 0

    def applies(self, epoch):
        if epoch < self.epoch:
            return False
        if self.every:
            return (epoch - self.epoch) % self.every == 0
        return epoch == self.epoch


@dataclass
class GameConfig:
    A: Matrix
    B: Matrix
    m: int
    F0: Matrix = None
    horizon: int = field(default_factory=lambda: CONFIG_DEFAULTS['horizon'])
    depth: str = field(default_factory=lambda: CONFIG_DEFAULTS['depth'])
    overrides: tuple = ()
    search_budget: int = field(default_factory=lambda: CONFIG_DEFAULTS['budget'])
    seed: int = field(default_factory=lambda: CONFIG_DEFAULTS['seed'])
    candidate_cap: int = field(default_factory=lambda: CONFIG_DEFAULTS['candidate_cap'])

    def __post_init__(self):
        n, k = self.A.nrows, self.B.ncols
        if not self.A.is_square():
            raise ShapeMismatch(f"A must be square, got {self.A.shape}")
        if self.B.nrows != n:
            raise ShapeMismatch(f"B has {self.B.nrows} rows, A is {n}x{n}")
        if self.F0 is None:
            self.F0 = Matrix.zeros(k, n)
        elif self.F0.shape != (k, n):
            raise ShapeMismatch(f"F0 must be {k}x{n}, got {self.F0.shape}")
        if self.m < 1:
            raise ShapeMismatch(f"attacker needs m >= 1 outputs, got {self.m}")
        if self.horizon < 1:
            raise ScenarioError(f"horizon must be at least 1, got {self.horizon}")
        if self.depth not in DEPTHS:
            raise ScenarioError(f"unknown depth {self.depth!r}")
        self.overrides = tuple(self.overrides)
        for o in self.overrides:
            if o.epoch < 1:
                raise ScenarioError(f"override epoch must be >= 1, got {o.epoch}")
            if o.every % 2:
                raise ScenarioError(f"override period must be even to keep its actor, got {o.every}")
            expected = (self.m, n) if actor_for_epoch(o.epoch) == 'attacker' else (k, n)
            if o.matrix.shape != expected:
                raise ScenarioError(
                    f"override at epoch {o.epoch} ({actor_for_epoch(o.epoch)}) must be "
                    f"{expected[0]}x{expected[1]}, got {o.matrix.shape[0]}x{o.matrix.shape[1]}")

    @property
    def n(self):
        return self.A.nrows

    @property
    def k(self):
        return self.B.ncols

    def override_at(self, epoch):
        for o in self.overrides:
            if o.applies(epoch):
                return o.matrix
        return None


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    actor: str
    strategy: Matrix
    phi: int
    dim_vstar: int
    min_unobs: int = None
    max_geo_mult: int = None
    source: str = 'best-response'

    def __post_init__(self):
        if self.actor not in ACTORS:
            raise ValueError(f"unknown actor {self.actor!r}")
        if self.source not in SOURCES:
            raise ValueError(f"unknown strategy source {self.source!r}")

    def csv_row(self):
        return [self.epoch, self.actor, self.phi, self.dim_vstar,
                '' if self.max_geo_mult is None else self.max_geo_mult]


@dataclass
class GameTrace:
    config: GameConfig
    records: list = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    @property
    def phis(self):
        return [r.phi for r in self.records]

    def record(self, epoch):
        return self.records[epoch - 1]

    def strategy_pairs(self):
        """(C, F) in force after each epoch."""
        pairs, C, F = [], None, self.config.F0
        for r in self.records:
            if r.actor == 'attacker':
                C = r.strategy
            else:
                F = r.strategy
            pairs.append((C, F))
        return pairs


@dataclass(frozen=True)
class ModeReport:
    mode: str
    onset_epoch: int = None
    amplitude: int = 0
    loop_period: int = None
    theorem1_holds: bool = False
    theorem2_holds: bool = False
    lemma5_holds: bool = False
    phi_period: int = None
    amplitude_formula_holds: bool = False
    zero_friend_epochs: tuple = ()


@dataclass(frozen=True)
class StackelbergReport:
    br2x_value: int
    br2_value: int
    family_vstar_max: int
    min_unobs: int
    follower_defender_agrees: bool
    follower_attacker_agrees: bool
    vstar_bound_holds: bool
    leader_defender_value: int
    sampled_sensors: int
    sampled_feedbacks: int


# ---------------------------------------------------------- best responses
def _is_br1_attacker_member(C, M, m):
    if C is None or C.shape != (m, M.nrows):
        return False
    return unobservable_dim(C, M) == _min_unobs(M, m)


def br1_attacker(A, B, F, m, current_C=None, cap=None):
    """(C, candidate family): the plainest optimal sensor matrix, or the incumbent if still optimal."""
    M = closed_loop(A, B, F)
    jd = _dual_jordan(M)
    candidates = ordered_sensors(jd, m, cap)
    logger.debug("BR1_a family: %d candidates", len(candidates))
    if _is_br1_attacker_member(current_C, M, m):
        return current_C, candidates
    return candidates[0], candidates


def br1_defender(A, B, C, current_F=None):
    V = _vstar_space(A, B, C)
    if current_F is not None and unobservable_dim(C, closed_loop(A, B, current_F)) == V.dim:
        return current_F
    return friend(A, B, V)


def br2_attacker(A, B, F, m, current_C=None, cap=None):
    _, candidates = br1_attacker(A, B, F, m, None, cap)
    dims = [_vstar_space(A, B, C).dim for C in candidates]
    best = min(dims)
    if _is_br1_attacker_member(current_C, closed_loop(A, B, F), m) \
            and _vstar_space(A, B, current_C).dim <= best:
        return current_C
    logger.debug("BR2_a: dim V* over family ranges %d..%d", best, max(dims))
    return candidates[dims.index(best)]


def _defender_score(A, B, F, m):
    """(max geometric multiplicity, attacker's optimal value against F), None if irrational."""
    M = closed_loop(A, B, F)
    try:
        return _max_geo(M), _min_unobs(M, m)
    except NonRationalSpectrum:
        return None


def br2_defender(A, B, C, current_F=None, budget=None, rng=None):
    budget = CONFIG_DEFAULTS['budget'] if budget is None else budget
    if budget <= 0:
        return br1_defender(A, B, C, current_F)
    m, n, k = C.nrows, A.nrows, B.ncols
    V = _vstar_space(A, B, C)
    base, P = friend_family_basis(A, B, V)
    candidates = [base]
    zero = Matrix.zeros(k, n)
    if zero != base and is_friend(A, B, zero, V):
        candidates.append(zero)
    if V.dim > 0 and P.nrows:
        rng = make_rng() if rng is None else rng
        for _ in range(budget):
            candidates.append(base + random_rational_matrix(rng, k, P.nrows) @ P)

    scored = []
    for F in candidates:
        score = _defender_score(A, B, F, m)
        if score is None:
            logger.debug("BR2_d: skipping friend %s (irrational closed-loop spectrum)", F)
            continue
        scored.append((score, F))
    logger.debug("BR2_d: %d of %d friends scored", len(scored), len(candidates))

    incumbent = None
    if current_F is not None and is_friend(A, B, current_F, V):
        incumbent = _defender_score(A, B, current_F, m)
    if not scored:
        if incumbent is not None:
            return current_F
        logger.warning("BR2_d: no friend has a rational closed-loop spectrum, "
                       "falling back to the pseudoinverse friend")
        return base
    best = max(score for score, _ in scored)
    if incumbent is not None and incumbent >= best:
        return current_F
    return next(F for score, F in scored if score == best)


_ATTACKER_MOVES = {
    'br1_attacker': lambda A, B, F, m, C, cap: br1_attacker(A, B, F, m, C, cap)[0],
    'br2_attacker': br2_attacker,
}
_DEFENDER_MOVES = {
    'br1_defender': lambda A, B, C, F, budget, rng: br1_defender(A, B, C, F),
    'br2_defender': br2_defender,
}


# --------------------------------------------------------------- the game
def run_game(cfg):
    A, B, m = cfg.A, cfg.B, cfg.m
    attacker_name, defender_name = depth_operators(cfg.depth)
    attack_move, defend_move = _ATTACKER_MOVES[attacker_name], _DEFENDER_MOVES[defender_name]
    rng = make_rng(cfg.seed)
    C, F = None, cfg.F0
    trace = GameTrace(cfg)
    logger.info("Game start: n=%d k=%d m=%d depth=%s horizon=%d",
                cfg.n, cfg.k, m, cfg.depth, cfg.horizon)

    for epoch in range(1, cfg.horizon + 1):
        actor = actor_for_epoch(epoch)
        forced = cfg.override_at(epoch)
        try:
            if actor == 'attacker':
                M = closed_loop(A, B, F)
                min_unobs = _min_unobs(M, m)
                new = forced if forced is not None else attack_move(A, B, F, m, C, cfg.candidate_cap)
                incumbent = C
                C = new
            else:
                new = forced if forced is not None else defend_move(A, B, C, F, cfg.search_budget, rng)
                incumbent = F
                F = new
                M = closed_loop(A, B, F)
                min_unobs = None
            phi = unobservable_dim(C, M)
            dim_vs = _vstar_space(A, B, C).dim
        except NonRationalSpectrum as exc:
            exc.epoch = epoch
            raise
        if forced is not None:
            source = 'override'
        elif incumbent is not None and new == incumbent:
            source = 'sticky'
        else:
            source = 'best-response'
        geo = _max_geo_or_none(M)
        if geo is None:
            logger.warning("Epoch %d: A + B F has an irrational spectrum, max_geo_mult left empty", epoch)
        trace.records.append(EpochRecord(epoch, actor, new, phi, dim_vs, min_unobs, geo, source))
        logger.info("Epoch %d %s (%s): phi=%d dim V*=%d", epoch, actor, source, phi, dim_vs)
    return trace


# ---------------------------------------------------------------- analysis
def lock_condition(trace, epoch=1):
    """At an attacker epoch: the attacker's optimal value equals dim V* of its choice."""
    record = trace.record(epoch)
    if record.actor != 'attacker':
        raise ValueError(f"epoch {epoch} is a defender epoch")
    return record.min_unobs == record.dim_vstar


def amplitude_checks(trace, start_epoch=1):
    """(epoch i, observed |Phi_(i+1) - Phi_i|, dim V*_even - min Phi_odd) per step from start_epoch."""
    out = []
    for i in range(start_epoch, len(trace)):
        first, second = trace.record(i), trace.record(i + 1)
        odd, even = (first, second) if first.actor == 'attacker' else (second, first)
        out.append((i, abs(second.phi - first.phi), even.dim_vstar - odd.min_unobs))
    return out


def theorem2_check(A, B, C):
    """Sufficient condition for dim V* = 0, split on n - m against k."""
    n, k, m = A.nrows, B.ncols, C.nrows
    ker_c = kernel_basis(C)
    if n - m >= k:
        if not ker_c.contains_all(B):
            return False
        return kernel_basis(Matrix.vstack(C, C @ A)).dim == 0
    if not Subspace.span(B).contains_all(ker_c.basis):
        return False
    Z = left_annihilator(B)
    return kernel_basis(Matrix.vstack(C, Z @ A)).dim == 0


def _periodic_from(values, p):
    """First index from which values[i] == values[i + p] to the end."""
    i = len(values) - p - 1
    while i >= 0 and values[i] == values[i + p]:
        i -= 1
    return i + 1


def classify_mode(trace, A=None, B=None, m=None):
    A = trace.config.A if A is None else A
    B = trace.config.B if B is None else B
    phis = trace.phis
    horizon = len(phis)
    tail_min = CONFIG_DEFAULTS['tail_min']

    period = onset = None
    for p in range(1, horizon // 2 + 1):
        start = _periodic_from(phis, p)
        if horizon - start >= max(tail_min, 2 * p):
            period, onset = p, start + 1
            break

    tail = phis[onset - 1:] if onset else phis
    steps = [abs(b - a) for a, b in zip(tail, tail[1:])]
    if period == 1:
        mode = 'lock'
    elif period and all(steps):
        mode = 'oscillation'
    else:
        mode = 'inconclusive'

    pairs = trace.strategy_pairs()
    loop_period = None
    if mode == 'oscillation':
        for q in range(1, (horizon - onset + 1) // 2 + 1):
            if all(pairs[i] == pairs[i + q] for i in range(onset - 1, horizon - q)):
                loop_period = q
                break

    zero = Matrix.zeros(B.ncols, A.nrows)
    zero_friend_epochs = tuple(
        r.epoch for r in trace.records[(onset or 1) - 1:]
        if r.actor == 'defender' and is_friend(A, B, zero, _vstar_space(A, B, pairs[r.epoch - 1][0])))

    amplitudes = amplitude_checks(trace, onset or 1)
    theorem1 = lock_condition(trace, 1)
    report = ModeReport(
        mode=mode,
        onset_epoch=onset,
        amplitude=max(steps) if steps and mode != 'lock' else 0,
        loop_period=loop_period,
        theorem1_holds=theorem1,
        theorem2_holds=theorem2_check(A, B, trace.record(1).strategy),
        lemma5_holds=theorem1,
        phi_period=period,
        amplitude_formula_holds=all(observed == predicted for _, observed, predicted in amplitudes),
        zero_friend_epochs=zero_friend_epochs,
    )
    logger.info("Mode %s from epoch %s (phi period %s, loop period %s)",
                mode, onset, period, loop_period)
    return report


# ------------------------------------------------------------- Stackelberg
def stackelberg_compare(A, B, m, budget=None, F0=None, seed=None, cap=None):
    """Two-step responses against the leader/follower view of the same game."""
    budget = CONFIG_DEFAULTS['budget'] if budget is None else budget
    n, k = A.nrows, B.ncols
    F0 = Matrix.zeros(k, n) if F0 is None else F0
    rng = make_rng(seed)
    M0 = closed_loop(A, B, F0)
    min_unobs = _min_unobs(M0, m)

    _, family = br1_attacker(A, B, F0, m, None, cap)
    family_dims = [_vstar_space(A, B, C).dim for C in family]
    sensors = family + [random_rational_matrix(rng, m, n) for _ in range(budget)]
    sensor_dims = family_dims + [_vstar_space(A, B, C).dim for C in sensors[len(family):]]
    bound = all(d >= unobservable_dim(C, M0) >= min_unobs for C, d in zip(sensors, sensor_dims))

    # Follower defender: maximising Phi against C is exactly being a friend of V*(C).
    feedbacks, defender_agrees = [F0], True
    for C in sensors[:max(1, budget)]:
        V = _vstar_space(A, B, C)
        trial = [friend(A, B, V), random_friend(rng, A, B, V),
                 random_rational_matrix(rng, k, n), Matrix.zeros(k, n)]
        for F in trial:
            maximal = unobservable_dim(C, closed_loop(A, B, F)) == V.dim
            defender_agrees &= maximal == is_friend(A, B, F, V)
        feedbacks.extend(trial)

    # Follower attacker: the closed form matches the best sampled sensor.
    attacker_agrees, leader_value, scored = True, None, 0
    for F in feedbacks:
        M = closed_loop(A, B, F)
        try:
            closed_form = _min_unobs(M, m)
            canonical, _ = br1_attacker(A, B, F, m, None, cap)
        except NonRationalSpectrum:
            continue
        scored += 1
        sampled = [canonical] + [random_rational_matrix(rng, m, n) for _ in range(max(1, budget // 4))]
        attacker_agrees &= closed_form == min(unobservable_dim(C, M) for C in sampled)
        leader_value = closed_form if leader_value is None else max(leader_value, closed_form)

    report = StackelbergReport(
        br2x_value=min(sensor_dims),
        br2_value=min(family_dims),
        family_vstar_max=max(family_dims),
        min_unobs=min_unobs,
        follower_defender_agrees=defender_agrees,
        follower_attacker_agrees=attacker_agrees,
        vstar_bound_holds=bound,
        leader_defender_value=leader_value if leader_value is not None else min_unobs,
        sampled_sensors=len(sensors),
        sampled_feedbacks=scored,
    )
    logger.info("Stackelberg: BR2X=%d BR2=%d min Phi=%d", report.br2x_value,
                report.br2_value, min_unobs)
    return report
