import pytest

from attack import (best_selection, build_optimal_bhat, candidate_bhats, controllability_rank,
                    controllable_dim, is_max_controllable, min_unobservable_dim,
                    minimize_unobservable, ordered_sensors, sensor_key, sensor_matrix)
from conftest import diag
from errors import NonRationalSpectrum, ShapeMismatch
from jordan import JordanDecomposition, jordan_decompose, max_geometric_multiplicity
from ratmat import Matrix
from sampling import (random_general_position_bhat, random_jordan_matrix,
                      random_rational_matrix, random_rational_spectrum_system)
from subspace import closed_loop, unobservable_dim

B1 = Matrix([[1], [0], [0], [1]])
B2 = Matrix([[0], [0], [1], [1]])
B3 = Matrix([[1], [0], [1], [1]])


@pytest.mark.parametrize('bhat, dim, maximal', [(B1, 2, False), (B2, 3, True), (B3, 3, True)])
def test_worked_jordan_example(example1_jordan, bhat, dim, maximal):
    assert controllable_dim(example1_jordan, bhat) == dim
    assert controllability_rank(example1_jordan, bhat) == dim
    assert is_max_controllable(example1_jordan, bhat, 1) is maximal


def test_zero_bhat_controls_nothing(example1_jordan):
    assert controllable_dim(example1_jordan, Matrix.zeros(4, 1)) == 0


def test_selection_picks_the_larger_block(example1_jordan):
    selections = best_selection(example1_jordan, B3)
    assert [(s.chosen, s.dimension) for s in selections] == [((1,), 2), ((0,), 1)]


def test_bhat_shape_is_checked(example1_jordan):
    with pytest.raises(ShapeMismatch):
        controllable_dim(example1_jordan, Matrix.zeros(3, 1))
    with pytest.raises(ShapeMismatch):
        is_max_controllable(example1_jordan, B1, 2)


def test_canonical_bhat(example1_jordan):
    bhat = build_optimal_bhat(example1_jordan, 1)
    assert bhat == B2
    assert controllable_dim(example1_jordan, bhat) == 3
    assert min_unobservable_dim(example1_jordan.J, 1) == 1


def test_canonical_bhat_single_eigenvalue_full_outputs():
    jd = JordanDecomposition.from_jordan_matrix(diag(4, 4, 4))
    assert build_optimal_bhat(jd, 3) == Matrix.identity(3)


def test_canonical_bhat_single_block():
    J = Matrix([[1, 1, 0], [0, 1, 1], [0, 0, 1]])
    jd = JordanDecomposition.from_jordan_matrix(J)
    bhat = build_optimal_bhat(jd, 2)
    assert bhat.row(2) == (1, 0)
    assert controllable_dim(jd, bhat) == 3


def test_build_rejects_no_outputs(example1_jordan):
    with pytest.raises(ShapeMismatch):
        build_optimal_bhat(example1_jordan, 0)


def test_block_formula_matches_direct_rank(rng):
    for _ in range(100):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 4))
        jd = JordanDecomposition.from_jordan_matrix(random_jordan_matrix(rng, n))
        bhat = random_rational_matrix(rng, n, m, entry_range=1)
        assert controllable_dim(jd, bhat) == controllability_rank(jd, bhat)


def test_last_rows_alone_decide_in_general_position(rng):
    for _ in range(50):
        n = int(rng.integers(1, 9))
        m = int(rng.integers(1, 4))
        jd = JordanDecomposition.from_jordan_matrix(random_jordan_matrix(rng, n))
        bhat = random_general_position_bhat(rng, jd, m, entry_range=5)
        selections = best_selection(jd, bhat)
        assert sum(s.last_row_weight for s in selections) == controllability_rank(jd, bhat)
        assert all(s.dimension == s.last_row_weight for s in selections)


def test_rows_above_the_last_still_count():
    jd = JordanDecomposition.from_jordan_matrix(Matrix([[2, 1, 0], [0, 2, 0], [0, 0, 2]]))
    bhat = Matrix([[1], [0], [0]])
    (selection,) = best_selection(jd, bhat)
    assert selection.chosen == ()
    assert selection.last_row_weight == 0
    assert selection.dimension == 1
    assert controllable_dim(jd, bhat) == controllability_rank(jd, bhat) == 1


def test_canonical_bhat_is_always_maximal(rng):
    for _ in range(50):
        n = int(rng.integers(1, 8))
        m = int(rng.integers(1, 4))
        jd = JordanDecomposition.from_jordan_matrix(random_jordan_matrix(rng, n))
        bhat = build_optimal_bhat(jd, m)
        assert is_max_controllable(jd, bhat, m)
        assert controllability_rank(jd, bhat) == n - min_unobservable_dim(jd.J, m)


def test_random_bhat_below_maximum_is_not_maximal(rng):
    jd = JordanDecomposition.from_jordan_matrix(Matrix([[2, 0, 0, 0],
                                                        [0, 2, 1, 0],
                                                        [0, 0, 2, 0],
                                                        [0, 0, 0, 3]]))
    best = 4 - min_unobservable_dim(jd.J, 1)
    for _ in range(50):
        bhat = random_rational_matrix(rng, 4, 1, entry_range=1)
        if not is_max_controllable(jd, bhat, 1):
            assert controllability_rank(jd, bhat) < best


def test_diagonal_plant_attack(diagonal_plant):
    A, B = diagonal_plant
    F = Matrix.zeros(1, 5)
    assert min_unobservable_dim(A, 2) == 1
    C = minimize_unobservable(A, B, F, 2)
    assert C == Matrix([[1, 0, 0, 1, 1], [0, 1, 0, 0, 0]])
    assert unobservable_dim(C, A) == 1


def test_enough_outputs_make_everything_observable(rng):
    for _ in range(10):
        n = int(rng.integers(2, 6))
        A, B = random_rational_spectrum_system(rng, n, 1)
        F = random_rational_matrix(rng, 1, n, entry_range=1)
        M = closed_loop(A, B, F)
        try:
            m = max_geometric_multiplicity(M)
        except NonRationalSpectrum:
            continue
        assert min_unobservable_dim(M, m) == 0
        assert unobservable_dim(minimize_unobservable(A, B, F, m), M) == 0


def test_random_sensors_never_beat_the_canonical_one(rng):
    for _ in range(50):
        n = int(rng.integers(2, 6))
        k = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        A, B = random_rational_spectrum_system(rng, n, k)
        F = Matrix.zeros(k, n)
        best = min_unobservable_dim(A, m)
        assert unobservable_dim(minimize_unobservable(A, B, F, m), A) == best
        for _ in range(200):
            C = random_rational_matrix(rng, m, n)
            assert unobservable_dim(C, A) >= best


def test_duality_with_the_dual_controllable_dim(rng):
    for _ in range(100):
        n = int(rng.integers(2, 6))
        m = int(rng.integers(1, 3))
        A, _ = random_rational_spectrum_system(rng, n, 1)
        jd = jordan_decompose(A.T)
        bhat = random_rational_matrix(rng, n, m, entry_range=2)
        C = sensor_matrix(jd, bhat)
        assert unobservable_dim(C, A) == n - controllability_rank(jd, bhat)


def test_candidate_family(diagonal_plant):
    A, _ = diagonal_plant
    jd = jordan_decompose(A.T)
    family = list(candidate_bhats(jd, 2))
    assert family[0][1] == build_optimal_bhat(jd, 2)
    assert len(family) == 96
    assert len(list(candidate_bhats(jd, 2, cap=10))) == 10
    for _, bhat in family:
        assert unobservable_dim(sensor_matrix(jd, bhat), A) == 1
        for column in bhat.columns():
            assert next(x for x in column if x != 0) == 1


def test_plainest_sensor_against_the_first_friend(diagonal_plant):
    A, B = diagonal_plant
    M = closed_loop(A, B, Matrix([['-1/10', 0, 0, '1/10', 0]]))
    jd = jordan_decompose(M.T)
    sensors = ordered_sensors(jd, 2)
    assert sensors[0] == Matrix([[-1, 0, 1, 0, -1], [0, 1, 0, 0, 0]])
    assert sensor_key(sensors[0]) == (1, 4)
    canonical = sensor_matrix(jd, build_optimal_bhat(jd, 2))
    assert canonical == Matrix([[1, 0, 1, 1, 1], [0, 1, 0, 0, 0]])
    assert sensor_key(canonical) == (1, 5)
    assert [sensor_key(C) for C in sensors] == sorted(sensor_key(C) for C in sensors)
    assert all(unobservable_dim(C, M) == 0 for C in sensors)
