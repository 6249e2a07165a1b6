"""
Defender-side geometry: the maximal (A,B)-invariant subspace inside Ker C,
friend feedbacks that make a subspace invariant, and the unobservable
dimension that serves as the game's value.

V* comes from the matrix form of the invariant subspace algorithm:
V_0 = Ker C and V_{i+1} = Ker C ∩ Ker(Z_i A), where the rows of Z_i span the
left annihilator of [V_i B]. Each iterate is a kernel basis, so it is already
in echelon form.
"""
import logging
from dataclasses import dataclass

from errors import NotInvariant, ShapeMismatch
from ratmat import (Matrix, Subspace, kernel_basis, left_annihilator,
                    observability_matrix, pinv, rank)

logger = logging.getLogger('subspace')


def closed_loop(A, B, F):
    """A + B F with shape checks (A n x n, B n x k, F k x n)."""
    n = A.nrows
    if not A.is_square():
        raise ShapeMismatch(f"A must be square, got {A.shape}")
    if B.nrows != n or F.shape != (B.ncols, n):
        raise ShapeMismatch(f"A {A.shape}, B {B.shape}, F {F.shape} do not fit A + B F")
    if B.ncols == 0:
        return A
    return A + B @ F


def unobservable_dim(C, M):
    """dim Ker [C; C M; ...; C M^(n-1)]."""
    return M.nrows - rank(observability_matrix(C, M))


def unobservable_subspace(C, M):
    return kernel_basis(observability_matrix(C, M))


@dataclass(frozen=True)
class VStarResult:
    vstar: Subspace
    iterations: int
    iterate_dims: tuple


def vstar(A, B, C):
    n = A.nrows
    if not A.is_square() or B.nrows != n or C.ncols != n:
        raise ShapeMismatch(f"A {A.shape}, B {B.shape}, C {C.shape} are incompatible")
    current = kernel_basis(C)
    dims = [current.dim]
    iterations = 0
    while True:
        iterations += 1
        z = left_annihilator(Matrix.hstack(current.basis, B))
        following = kernel_basis(Matrix.vstack(C, z @ A))
        dims.append(following.dim)
        if following.dim == current.dim:
            break
        current = following
    logger.debug("V* iterate dims %s after %d iterations", dims, iterations)
    return VStarResult(following, iterations, tuple(dims))


def is_invariant_pair(A, B, V):
    """A V within V + Im B."""
    if V.dim == 0:
        return True
    return Subspace.span(Matrix.hstack(V.basis, B)).contains_all(A @ V.basis)


def friend(A, B, V):
    """F with (A + B F) V within V, from [X; U] = pinv([V B]) A V and F = -U pinv(V)."""
    n, k = A.nrows, B.ncols
    if V.dim == 0:
        return Matrix.zeros(k, n)
    if not is_invariant_pair(A, B, V):
        raise NotInvariant(f"A V is not contained in V + Im B (dim V = {V.dim})")
    r = V.dim
    solution = pinv(Matrix.hstack(V.basis, B)) @ (A @ V.basis)
    u = solution.select(rows=range(r, r + k))
    return -(u @ pinv(V.basis))


def is_friend(A, B, F, V):
    if V.dim == 0:
        return True
    return V.contains_all(closed_loop(A, B, F) @ V.basis)


def friend_family_basis(A, B, V):
    """(F0, P): every F0 + G P is a friend of V, P spanning the annihilator of V."""
    return friend(A, B, V), V.annihilator()
