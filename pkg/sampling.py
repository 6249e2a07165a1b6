"""
Seeded random systems for searches, sweeps and property tests.

Every draw goes through a ``numpy.random.Generator`` (``numpy.random.default_rng``)
and comes back as exact Fractions: numerators are small integers in
[-entry_range, entry_range], denominators come from a short list. Systems with
a rational spectrum are built as A = S J S^-1 with S unimodular, so A has
integer entries whenever J does.
"""
import itertools
import logging
from fractions import Fraction

import numpy as np

from config import CONFIG_DEFAULTS
from ratmat import Matrix, direct_sum, rank
from subspace import friend_family_basis

logger = logging.getLogger('sampling')


def make_rng(seed=None):
    return np.random.default_rng(CONFIG_DEFAULTS['seed'] if seed is None else seed)


def random_rational_matrix(rng, nrows, ncols, entry_range=None, denominators=(1,)):
    bound = entry_range or CONFIG_DEFAULTS['random_entry_range']
    nums = rng.integers(-bound, bound + 1, size=(nrows, ncols))
    dens = rng.choice(np.asarray(denominators), size=(nrows, ncols))
    return Matrix([[Fraction(int(nums[i, j]), int(dens[i, j])) for j in range(ncols)]
                   for i in range(nrows)], ncols)


def random_unimodular(rng, n, entry_range=1):
    """Integer matrix with determinant 1: unit lower times unit upper triangular."""
    lower = rng.integers(-entry_range, entry_range + 1, size=(n, n))
    upper = rng.integers(-entry_range, entry_range + 1, size=(n, n))
    L = Matrix([[1 if i == j else (int(lower[i, j]) if j < i else 0) for j in range(n)]
                for i in range(n)], n)
    U = Matrix([[1 if i == j else (int(upper[i, j]) if j > i else 0) for j in range(n)]
                for i in range(n)], n)
    return L @ U


def random_block_sizes(rng, n, max_block=3):
    sizes, left = [], n
    while left:
        size = int(rng.integers(1, min(left, max_block) + 1))
        sizes.append(size)
        left -= size
    return sizes


def random_jordan_matrix(rng, n, eigen_values=(-1, 0, 1, 2), max_block=3):
    """Block-diagonal Jordan matrix with random block sizes and integer eigenvalues."""
    blocks = []
    for size in random_block_sizes(rng, n, max_block):
        lam = int(rng.choice(np.asarray(eigen_values)))
        blocks.append(Matrix([[lam if i == j else (1 if j == i + 1 else 0) for j in range(size)]
                              for i in range(size)], size))
    return direct_sum(*blocks)


def random_rational_spectrum_system(rng, n, k, eigen_values=(-1, 0, 1, 2), max_block=3):
    """(A, B) with A = S J S^-1 similar to a random Jordan matrix and B an integer n x k draw."""
    J = random_jordan_matrix(rng, n, eigen_values, max_block)
    S = random_unimodular(rng, n)
    A = S @ J @ S.inverse()
    B = random_rational_matrix(rng, n, k, entry_range=1)
    return A, B


def _general_position(jd, bhat, m):
    for idx, eig in enumerate(jd.spectrum):
        rows = jd.last_rows(bhat, idx)
        size = min(m, eig.geometric_mult)
        for combo in itertools.combinations(rows, size):
            if rank(Matrix(list(combo), m)) != size:
                return False
    return True


def random_general_position_bhat(rng, jd, m, entry_range=None, max_tries=200):
    """B-hat whose last block rows are in general position for every eigenvalue."""
    for attempt in range(1, max_tries + 1):
        bhat = random_rational_matrix(rng, jd.n, m, entry_range)
        if _general_position(jd, bhat, m):
            if attempt > 1:
                logger.debug("general-position B-hat after %d draws", attempt)
            return bhat
    raise RuntimeError(f"no general-position B-hat in {max_tries} draws (n = {jd.n}, m = {m})")


def random_friend(rng, A, B, V, entry_range=None):
    """F0 + G P for a random integer G: a random member of the friend family of V."""
    F0, P = friend_family_basis(A, B, V)
    if P.nrows == 0:
        return F0
    return F0 + random_rational_matrix(rng, B.ncols, P.nrows, entry_range) @ P
