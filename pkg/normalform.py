"""
Normal-form reduction of a two-input plant.

The plant x' = A0 x + B1 u1 + B2 u2, y = C0 x has the attacker on u1 and the
defender on u2. When (A0, B1, C0) has a vector relative degree (r_1..r_m) with
nonsingular decoupling matrix L, the rows c_i A0^(j-1) (j <= r_i) together
with n0 - s rows p_i of the left annihilator of B1 form a coordinate change
T_nf. In the new coordinates (xi, z):

    xi_(i,j)'  = xi_(i,j+1)                         j < r_i
    xi_(i,r_i)' = R z + S xi + L u1
    z'          = N z + E xi + B2' u2

When Im B2 lies in V*(A0, B1, C0) the defender only reaches the z-dynamics,
and with u1 = U1 z the attacker sets the output map of z to any C-hat through
U1 = L^-1 (C-hat - R). The game is then played on (N, B2').
"""
import logging
import warnings
from dataclasses import dataclass

from errors import HypothesisViolated, NoRelativeDegree, ShapeMismatch
from ratmat import Matrix, left_annihilator, rank
from subspace import vstar

logger = logging.getLogger('normalform')


@dataclass(frozen=True)
class NormalFormModel:
    r: tuple
    s: int
    T_nf: Matrix
    N: Matrix
    E: Matrix
    R: Matrix
    S: Matrix
    L: Matrix
    B2prime: Matrix
    A_hat: Matrix
    B2_hat: Matrix
    hypothesis_holds: bool

    @property
    def n(self):
        return self.T_nf.nrows

    @property
    def last_xi_rows(self):
        return _chain_ends(self.r)


def _chain_ends(r):
    """Row index of xi_(i, r_i) for every output, in T_nf order."""
    out, offset = [], 0
    for ri in r:
        offset += ri
        out.append(offset - 1)
    return out


def _check_plant(A0, B1, C0):
    n = A0.nrows
    if not A0.is_square():
        raise ShapeMismatch(f"A0 must be square, got {A0.shape}")
    if B1.nrows != n or C0.ncols != n:
        raise ShapeMismatch(f"A0 {A0.shape}, B1 {B1.shape}, C0 {C0.shape} are incompatible")
    if C0.nrows != B1.ncols:
        raise NoRelativeDegree(
            f"relative degree needs as many outputs as attacker inputs (m = {C0.nrows}, k = {B1.ncols})")


def _decoupling(A0, B1, C0, r):
    return Matrix([(C0.select(rows=[i]) @ A0.power(ri - 1) @ B1).row(0)
                   for i, ri in enumerate(r)], B1.ncols)


def relative_degree(A0, B1, C0):
    _check_plant(A0, B1, C0)
    n = A0.nrows
    r = []
    for i in range(C0.nrows):
        row = C0.select(rows=[i])
        for j in range(1, n + 1):
            if not (row @ B1).is_zero():
                r.append(j)
                break
            row = row @ A0
        else:
            raise NoRelativeDegree(f"output {i + 1} never reaches the input within {n} steps")
    L = _decoupling(A0, B1, C0, r)
    if rank(L) != L.nrows:
        raise NoRelativeDegree(f"decoupling matrix is singular for r = {tuple(r)}")
    return r


def _coordinate_rows(A0, B1, C0, r):
    xi = []
    for i, ri in enumerate(r):
        row = C0.select(rows=[i])
        for _ in range(ri):
            xi.append(row.row(0))
            row = row @ A0
    n = A0.nrows
    chosen = list(xi)
    for p in left_annihilator(B1).rows():
        if len(chosen) == n:
            break
        if rank(Matrix(chosen + [p], n)) == len(chosen) + 1:
            chosen.append(p)
    if len(chosen) != n:
        raise NoRelativeDegree(f"coordinate change has rank {len(chosen)} < {n}")
    return Matrix(chosen, n)


def to_normal_form(A0, B1, B2, C0):
    r = relative_degree(A0, B1, C0)
    n, s = A0.nrows, sum(r)
    if B2.nrows != n:
        raise ShapeMismatch(f"B2 has {B2.nrows} rows, A0 is {A0.shape}")
    T_nf = _coordinate_rows(A0, B1, C0, r)
    T_inv = T_nf.inverse()
    A_hat = T_nf @ A0 @ T_inv
    B1_hat = T_nf @ B1
    B2_hat = T_nf @ B2

    xi_idx, z_idx = list(range(s)), list(range(s, n))
    last = _chain_ends(r)

    vs = vstar(A0, B1, C0).vstar
    holds = vs.contains_all(B2)
    if not holds:
        message = f"Im B2 is not contained in V* (dim V* = {vs.dim}); B2 reaches the xi-dynamics"
        logger.warning(message)
        warnings.warn(HypothesisViolated(message), stacklevel=2)

    model = NormalFormModel(
        r=tuple(r), s=s, T_nf=T_nf,
        N=A_hat.select(rows=z_idx, cols=z_idx),
        E=A_hat.select(rows=z_idx, cols=xi_idx),
        R=A_hat.select(rows=last, cols=z_idx),
        S=A_hat.select(rows=last, cols=xi_idx),
        L=B1_hat.select(rows=last),
        B2prime=B2_hat.select(rows=z_idx),
        A_hat=A_hat, B2_hat=B2_hat,
        hypothesis_holds=holds,
    )
    logger.info("Normal form: r=%s, s=%d, z-dimension %d, hypothesis %s",
                model.r, s, n - s, 'holds' if holds else 'violated')
    return model


def u1_from_chat(model, Chat):
    """U1 = L^-1 (C-hat - R), so that R + L U1 = C-hat."""
    expected = (len(model.r), model.n - model.s)
    if Chat.shape != expected:
        raise ShapeMismatch(f"C-hat must be {expected[0]}x{expected[1]}, got {Chat.shape}")
    return model.L.inverse() @ (Chat - model.R)


def reduced_game_system(model):
    return model.N, model.B2prime
