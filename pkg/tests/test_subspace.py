import pytest

from errors import NotInvariant, ShapeMismatch
from ratmat import Matrix, Subspace
from sampling import random_friend, random_rational_matrix, random_rational_spectrum_system
from subspace import (closed_loop, friend, friend_family_basis, is_friend, is_invariant_pair,
                      unobservable_dim, unobservable_subspace, vstar)

C1 = Matrix([[1, 0, 0, 1, 1], [0, 1, 0, 0, 0]])
C2 = Matrix([[1, 0, 0, 1, 1], [0, 0, 1, 0, 0]])
F1 = Matrix([['-1/10', 0, 0, '1/10', 0]])


def test_vstar_of_diagonal_plant(diagonal_plant):
    A, B = diagonal_plant
    assert vstar(A, B, C1).vstar.dim == 3
    result = vstar(A, B, C2)
    assert result.vstar.dim == 1
    assert result.vstar.contains([0, 1, 0, 0, 0])


def test_friend_of_diagonal_plant(diagonal_plant):
    A, B = diagonal_plant
    V = vstar(A, B, C1).vstar
    F = friend(A, B, V)
    assert F == F1
    assert is_friend(A, B, F, V)
    assert unobservable_dim(C1, closed_loop(A, B, F)) == 3
    assert unobservable_dim(C1, A) == 1


def test_iterates_shrink_until_stable(diagonal_plant):
    A, B = diagonal_plant
    result = vstar(A, B, C2)
    dims = result.iterate_dims
    assert list(dims) == sorted(dims, reverse=True)
    assert dims[-1] == dims[-2] == result.vstar.dim
    assert result.iterations == len(dims) - 1


def test_zero_sensor_leaves_everything_unobservable():
    A = Matrix([[1, 0, 0], [0, 2, 0], [0, 0, 2]])
    B = Matrix([[1], [0], [0]])
    assert vstar(A, B, Matrix.zeros(1, 3)).vstar.dim == 3


def test_vstar_shape_check(diagonal_plant):
    A, B = diagonal_plant
    with pytest.raises(ShapeMismatch):
        vstar(A, B, Matrix.zeros(1, 4))


def test_closed_loop_shape_check(diagonal_plant):
    A, B = diagonal_plant
    with pytest.raises(ShapeMismatch):
        closed_loop(A, B, Matrix.zeros(2, 5))


def test_friend_of_zero_subspace_is_zero(diagonal_plant):
    A, B = diagonal_plant
    assert friend(A, B, Subspace.zero(5)) == Matrix.zeros(1, 5)


def test_friend_of_non_invariant_subspace_raises():
    A = Matrix([[0, 0], [1, 0]])
    B = Matrix([[1], [0]])
    V = Subspace.span(Matrix([[1], [0]]))
    assert not is_invariant_pair(A, B, V)
    with pytest.raises(NotInvariant):
        friend(A, B, V)


def test_friend_family(diagonal_plant, rng):
    A, B = diagonal_plant
    V = vstar(A, B, C1).vstar
    base, P = friend_family_basis(A, B, V)
    assert base == F1
    assert (P @ V.basis).is_zero()
    for _ in range(10):
        assert is_friend(A, B, random_friend(rng, A, B, V), V)


def test_unobservable_subspace_matches_dim(diagonal_plant):
    A, _ = diagonal_plant
    assert unobservable_subspace(C1, A).dim == unobservable_dim(C1, A) == 1


def test_vstar_bounds_every_feedback(rng):
    for _ in range(50):
        n = int(rng.integers(2, 6))
        k = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        A, B = random_rational_spectrum_system(rng, n, k)
        C = random_rational_matrix(rng, m, n, entry_range=1)
        V = vstar(A, B, C).vstar
        F = friend(A, B, V)
        assert unobservable_dim(C, closed_loop(A, B, F)) == V.dim
        for _ in range(200):
            G = random_rational_matrix(rng, k, n)
            assert unobservable_dim(C, closed_loop(A, B, G)) <= V.dim


def test_vstar_is_invariant_and_inside_kernel(rng):
    for _ in range(100):
        n = int(rng.integers(2, 7))
        k = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3))
        A, B = random_rational_spectrum_system(rng, n, k)
        C = random_rational_matrix(rng, m, n, entry_range=1)
        V = vstar(A, B, C).vstar
        assert (C @ V.basis).is_zero() if V.dim else True
        assert is_invariant_pair(A, B, V)
