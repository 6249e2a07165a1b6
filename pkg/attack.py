"""
Attacker-side synthesis on the dual system ((A+BF)^T, C^T).

For a B-hat laid out along a Jordan decomposition, the controllable dimension
is read off the last rows of the blocks: per eigenvalue, take the linearly
independent selection of last rows with the largest total block size. The
optimal B-hat places unit vectors in the last rows of the largest blocks, and
the sensor matrix is C = B-hat^T T^T.

``candidate_bhats`` enumerates the finite family of optimal constructions (one
sign per column) used by the best-response searches, and ``ordered_sensors``
sorts their sensor matrices plainest first. ``minimize_unobservable`` always
returns the first (canonical) member.
"""
import itertools
import logging
from dataclasses import dataclass

from config import CONFIG_DEFAULTS
from errors import ShapeMismatch
from jordan import block_structure, jordan_decompose
from ratmat import Matrix, controllability_matrix, rank
from subspace import closed_loop

logger = logging.getLogger('attack')


@dataclass(frozen=True)
class BlockSelection:
    eigen_index: int
    chosen: tuple               # layout positions of the selected blocks
    last_row_weight: int        # total size of the selected blocks
    dimension: int              # controllable dimension of this eigenvalue


def _check_bhat(jd, bhat, m=None):
    if bhat.nrows != jd.n:
        raise ShapeMismatch(f"B-hat has {bhat.nrows} rows, J is {jd.n}x{jd.n}")
    if m is not None and bhat.ncols != m:
        raise ShapeMismatch(f"B-hat has {bhat.ncols} columns, expected m = {m}")


def _independent(rows):
    return not rows or rank(Matrix(rows)) == len(rows)


def _select_blocks(blocks, rows, subset_cap):
    """Independent selection of last rows maximising total block size, lexicographic on ties."""
    target = rank(Matrix(rows)) if rows else 0
    if target == 0:
        return (), 0
    if len(blocks) > subset_cap:
        # Linear matroid: greedy by size is optimal in weight.
        chosen = []
        for k in sorted(range(len(blocks)), key=lambda k: -blocks[k].size):
            if _independent([rows[c] for c in chosen] + [rows[k]]):
                chosen.append(k)
        chosen.sort()
        return tuple(chosen), sum(blocks[k].size for k in chosen)
    best, best_weight = (), -1
    for combo in itertools.combinations(range(len(blocks)), target):
        weight = sum(blocks[k].size for k in combo)
        if weight > best_weight and _independent([rows[k] for k in combo]):
            best, best_weight = combo, weight
    return best, best_weight


def _eigen_rank(jd, bhat, blocks):
    """Rank of the controllability matrix restricted to one eigenvalue's blocks."""
    rows = [r for b in blocks for r in range(b.start, b.start + b.size)]
    return rank(controllability_matrix(jd.J.select(rows=rows, cols=rows), bhat.select(rows=rows)))


def best_selection(jd, bhat, subset_cap=None):
    """Per eigenvalue: the last-row selection, completed by the rows above the last ones.

    The selected blocks are fully controllable. When the last rows fall short of
    the eigenvalue's multiplicity, partial chains driven by the other rows are
    counted through the eigenvalue's own controllability rank.
    """
    _check_bhat(jd, bhat)
    cap = subset_cap or CONFIG_DEFAULTS['subset_cap']
    selections = []
    for idx, eig in enumerate(jd.spectrum):
        blocks = jd.blocks_of(idx)
        chosen, weight = _select_blocks(blocks, jd.last_rows(bhat, idx), cap)
        dimension = weight
        if weight < eig.algebraic_mult:
            dimension = _eigen_rank(jd, bhat, blocks)
            if dimension != weight:
                logger.debug("eigenvalue %d: last rows give %d, rows above add %d",
                             idx, weight, dimension - weight)
        selections.append(BlockSelection(idx, tuple(blocks[k].position for k in chosen),
                                         weight, dimension))
    return selections


def controllable_dim(jd, bhat):
    """dim Im Gamma(J, B-hat): the block-size formula, completed per eigenvalue."""
    return sum(s.dimension for s in best_selection(jd, bhat))


def controllability_rank(jd, bhat):
    """Direct rank of [B-hat, J B-hat, ..., J^(n-1) B-hat]."""
    _check_bhat(jd, bhat)
    return rank(controllability_matrix(jd.J, bhat))


def is_max_controllable(jd, bhat, m):
    """True iff every eigenvalue reaches its largest possible controllable contribution."""
    _check_bhat(jd, bhat, m)
    for idx, eig in enumerate(jd.spectrum):
        rows = jd.last_rows(bhat, idx)
        alpha = eig.geometric_mult
        if m >= alpha:
            if rank(Matrix(rows)) != alpha:
                return False
            continue
        # The m largest blocks, any tie-equivalent choice.
        sizes = [b.size for b in jd.blocks_of(idx)]
        threshold = sorted(sizes, reverse=True)[m - 1]
        must = [k for k, s in enumerate(sizes) if s > threshold]
        pool = [k for k, s in enumerate(sizes) if s == threshold]
        if not any(_independent([rows[k] for k in must + list(extra)])
                   for extra in itertools.combinations(pool, m - len(must))):
            return False
    return True


# ------------------------------------------------------------- construction
def _canonical_placement(eig, m):
    """Per eigenvalue: tuple of (layout position, column) for the canonical optimal B-hat."""
    if eig.geometric_mult >= m:
        return tuple((eig.descending_order[j], j) for j in range(m))
    return tuple((k, k) for k in range(eig.geometric_mult))


def _placements(eig, m):
    """All tie-equivalent placements, canonical first, the rest lexicographic."""
    alpha = eig.geometric_mult
    sizes_by_pos = [0] * alpha
    for rank_j, pos in enumerate(eig.descending_order):
        sizes_by_pos[pos] = eig.block_sizes[rank_j]
    canonical = _canonical_placement(eig, m)
    out = [canonical]
    if alpha >= m:
        top = sorted(eig.block_sizes[:m])
        for perm in itertools.permutations(range(alpha), m):
            if sorted(sizes_by_pos[k] for k in perm) != top:
                continue
            placement = tuple((k, j) for j, k in enumerate(perm))
            if placement != canonical:
                out.append(placement)
    else:
        for cols in itertools.permutations(range(m), alpha):
            placement = tuple((k, c) for k, c in enumerate(cols))
            if placement != canonical:
                out.append(placement)
    return out


def _bhat_from(jd, m, placements, signs):
    rows = [[0] * m for _ in range(jd.n)]
    for idx, placement in enumerate(placements):
        blocks = jd.blocks_of(idx)
        for (pos, col), sign in zip(placement, signs[idx]):
            rows[blocks[pos].last_row][col] = sign
    return Matrix(rows, m)


def build_optimal_bhat(jd, m):
    if m < 1:
        raise ShapeMismatch(f"attacker needs m >= 1 outputs, got {m}")
    placements = [_canonical_placement(eig, m) for eig in jd.spectrum]
    return _bhat_from(jd, m, placements, [(1,) * len(p) for p in placements])


def _leading_positive(bhat):
    """Each nonzero column of B-hat has first nonzero entry (by row) equal to +1."""
    for col in bhat.columns():
        lead = next((x for x in col if x != 0), None)
        if lead is not None and lead < 0:
            return False
    return True


def candidate_bhats(jd, m, cap=None):
    """(descriptor, B-hat) pairs of the optimal family, canonical construction first.

    Column sign flips of B-hat only flip the corresponding sensor row, so members
    whose column has a leading -1 are skipped.
    """
    cap = cap or CONFIG_DEFAULTS['candidate_cap']
    per_eig = [_placements(eig, m) for eig in jd.spectrum]
    sign_sets = [list(itertools.product((1, -1), repeat=min(m, eig.geometric_mult)))
                 for eig in jd.spectrum]
    produced = 0
    for placements in itertools.product(*per_eig):
        for signs in itertools.product(*sign_sets):
            bhat = _bhat_from(jd, m, placements, signs)
            if not _leading_positive(bhat):
                continue
            if produced >= cap:
                logger.debug("candidate family truncated at %d", cap)
                return
            produced += 1
            yield (placements, signs), bhat


def sensor_matrix(jd, bhat):
    """C = B-hat^T T^T."""
    return bhat.T @ jd.T.T


def sensor_key(c):
    """(entry height, nonzero count); smaller is a sparser, plainer sensor."""
    nonzero = [x for row in c.rows() for x in row if x != 0]
    height = max((max(abs(x.numerator), x.denominator) for x in nonzero), default=0)
    return height, len(nonzero)


def ordered_sensors(jd, m, cap=None):
    """Sensor matrices of the candidate family, stably sorted by ``sensor_key``."""
    return sorted((sensor_matrix(jd, bhat) for _, bhat in candidate_bhats(jd, m, cap)),
                  key=sensor_key)


def minimize_unobservable(A, B, F, m):
    """The canonical C minimising the unobservable subspace of (C, A + B F)."""
    M = closed_loop(A, B, F)
    jd = jordan_decompose(M.T)
    return sensor_matrix(jd, build_optimal_bhat(jd, m))


def min_unobservable_dim(M, m):
    """n minus, per eigenvalue, the sum of the min(m, alpha) largest block sizes."""
    reached = sum(sum(eig.block_sizes[:min(m, eig.geometric_mult)])
                  for eig in block_structure(M))
    return M.nrows - reached
