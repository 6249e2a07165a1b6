import warnings

import pytest

from errors import HypothesisViolated, NoRelativeDegree, ShapeMismatch
from normalform import reduced_game_system, relative_degree, to_normal_form, u1_from_chat
from ratmat import Matrix
from sampling import random_rational_matrix, random_unimodular
from subspace import vstar

CHAIN_A0 = Matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
CHAIN_B1 = Matrix([[0], [1], [0]])
CHAIN_C0 = Matrix([[1, 0, 0]])


def test_double_integrator():
    A0 = Matrix([[0, 1], [0, 0]])
    B1 = Matrix([[0], [1]])
    C0 = Matrix([[1, 0]])
    assert relative_degree(A0, B1, C0) == [2]


def test_direct_feedthrough_gives_degree_one(rng):
    A0 = random_rational_matrix(rng, 3, 3)
    assert relative_degree(A0, Matrix.identity(3), Matrix.identity(3)) == [1, 1, 1]


def test_chain_blocks():
    model = to_normal_form(CHAIN_A0, CHAIN_B1, Matrix([[0], [0], [1]]), CHAIN_C0)
    assert model.r == (2,)
    assert model.s == 2
    assert model.T_nf == Matrix.identity(3)
    assert model.N == Matrix([[0]])
    assert model.E == Matrix([[0, 0]])
    assert model.R == Matrix([[1]])
    assert model.S == Matrix([[0, 0]])
    assert model.L == Matrix([[1]])
    assert model.B2prime == Matrix([[1]])
    assert model.hypothesis_holds
    assert reduced_game_system(model) == (model.N, model.B2prime)


def _embedded_chains(rng):
    """Chains of length 2 and 3 plus two internal states, hidden behind a unimodular change."""
    A = [[0] * 7 for _ in range(7)]
    A[0][1] = A[2][3] = A[3][4] = 1
    for row in (1, 4, 5, 6):
        A[row] = [int(v) for v in rng.integers(-2, 3, size=7)]
    Ab = Matrix(A)
    Bb = Matrix([[0, 0], [1, 0], [0, 0], [0, 0], [0, 1], [0, 0], [0, 0]])
    Cb = Matrix([[1, 0, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0, 0]])
    Q = random_unimodular(rng, 7)
    Qi = Q.inverse()
    return Qi @ Ab @ Q, Qi @ Bb, Cb @ Q


def test_embedded_chains(rng):
    for _ in range(5):
        A0, B1, C0 = _embedded_chains(rng)
        assert relative_degree(A0, B1, C0) == [2, 3]
        model = to_normal_form(A0, B1, Matrix.zeros(7, 1), C0)
        assert model.s == 5
        assert model.N.shape == (2, 2)
        assert model.E.shape == (2, 5)
        assert model.R.shape == (2, 2)
        assert model.S.shape == (2, 5)
        assert model.L == Matrix.identity(2)
        assert model.B2prime.is_zero()
        assert model.hypothesis_holds
        # Inside a chain each coordinate integrates the next one.
        for row, nxt in ((0, 1), (2, 3), (3, 4)):
            assert model.A_hat.row(row) == tuple(1 if j == nxt else 0 for j in range(7))
        assert model.last_xi_rows == [1, 4]


def test_disturbance_inside_vstar_misses_the_chains(rng):
    A0, B1, C0 = _embedded_chains(rng)
    V = vstar(A0, B1, C0).vstar
    B2 = V.basis.select(cols=[0])
    model = to_normal_form(A0, B1, B2, C0)
    assert model.hypothesis_holds
    assert model.B2_hat.select(rows=range(model.s)).is_zero()


def test_violated_hypothesis_warns_and_still_reduces():
    with pytest.warns(HypothesisViolated):
        model = to_normal_form(CHAIN_A0, CHAIN_B1, Matrix([[1], [0], [0]]), CHAIN_C0)
    assert not model.hypothesis_holds
    assert model.N == Matrix([[0]])


def test_no_warning_when_hypothesis_holds():
    with warnings.catch_warnings():
        warnings.simplefilter('error', HypothesisViolated)
        to_normal_form(CHAIN_A0, CHAIN_B1, Matrix([[0], [0], [1]]), CHAIN_C0)


def test_output_count_must_match_inputs():
    with pytest.raises(NoRelativeDegree):
        relative_degree(CHAIN_A0, Matrix([[0, 0], [1, 0], [0, 1]]), CHAIN_C0)


def test_output_that_never_sees_the_input():
    A0 = Matrix([[1, 0], [0, 1]])
    with pytest.raises(NoRelativeDegree):
        relative_degree(A0, Matrix([[0], [1]]), Matrix([[1, 0]]))


def test_singular_decoupling_matrix():
    B1 = Matrix([[1, 1], [1, 1], [0, 0]])
    C0 = Matrix([[1, 0, 0], [0, 1, 0]])
    with pytest.raises(NoRelativeDegree):
        relative_degree(Matrix.zeros(3, 3), B1, C0)


def test_u1_from_chat():
    model = to_normal_form(CHAIN_A0, CHAIN_B1, Matrix([[0], [0], [1]]), CHAIN_C0)
    assert u1_from_chat(model, model.R).is_zero()
    assert u1_from_chat(model, model.R + model.L) == Matrix.identity(1)
    Chat = Matrix([['5/3']])
    U1 = u1_from_chat(model, Chat)
    assert model.R + model.L @ U1 == Chat
    with pytest.raises(ShapeMismatch):
        u1_from_chat(model, Matrix([[1, 2]]))


def test_plant_shapes_are_checked():
    with pytest.raises(ShapeMismatch):
        to_normal_form(CHAIN_A0, CHAIN_B1, Matrix([[0], [1]]), CHAIN_C0)
