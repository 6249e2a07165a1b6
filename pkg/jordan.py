"""
Exact Jordan decomposition for matrices whose spectrum is rational.

Eigenvalues come from factoring the characteristic polynomial over Q with
sympy; an irreducible factor of degree two or more means the matrix is outside
the supported class and ``NonRationalSpectrum`` is raised.

Layout of J: eigenvalues by descending algebraic multiplicity, ties by
ascending value; blocks of one eigenvalue by descending size. T's columns run
bottom-to-top along each chain so that T J = M T with ones on the
superdiagonal. Each chain is scaled so that the row of T^-1 at its last
position (a left eigenvector of M) has leading entry 1.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

import sympy

from errors import NonRationalSpectrum, ShapeMismatch
from ratmat import Matrix, Subspace, direct_sum, char_poly, kernel_basis, rank

logger = logging.getLogger('jordan')

_X = sympy.Symbol('x')


@dataclass(frozen=True)
class EigenStructure:
    eigenvalue: Fraction
    algebraic_mult: int
    geometric_mult: int
    block_sizes: tuple          # descending
    descending_order: tuple     # j-th largest block -> layout index within the eigenvalue


@dataclass(frozen=True)
class JordanBlock:
    eigen_index: int
    position: int               # layout index among this eigenvalue's blocks
    size: int
    start: int                  # first row/column in J

    @property
    def last_row(self):
        return self.start + self.size - 1


@dataclass(frozen=True)
class JordanDecomposition:
    J: Matrix
    T: Matrix
    spectrum: tuple
    blocks: tuple

    @property
    def n(self):
        return self.J.nrows

    def blocks_of(self, eigen_index):
        return [b for b in self.blocks if b.eigen_index == eigen_index]

    def last_rows(self, bhat, eigen_index):
        """Last row of every B-hat block belonging to one eigenvalue, in layout order."""
        if bhat.nrows != self.n:
            raise ShapeMismatch(f"B-hat has {bhat.nrows} rows, J is {self.n}x{self.n}")
        return [bhat.row(b.last_row) for b in self.blocks_of(eigen_index)]

    @classmethod
    def from_jordan_matrix(cls, J):
        """Read blocks straight off a matrix already in Jordan form (T = I)."""
        n = J.nrows
        if not J.is_square():
            raise ShapeMismatch(f"Jordan matrix must be square, got {J.shape}")
        for i in range(n):
            for j in range(n):
                if j not in (i, i + 1) and J[i, j] != 0:
                    raise ShapeMismatch(f"entry ({i},{j}) breaks Jordan form")
        runs, start = [], 0
        for i in range(n):
            ends = (i == n - 1 or J[i, i + 1] == 0)
            if not ends and (J[i, i + 1] != 1 or J[i + 1, i + 1] != J[i, i]):
                raise ShapeMismatch(f"superdiagonal at row {i} breaks Jordan form")
            if ends:
                runs.append((J[start, start], start, i - start + 1))
                start = i + 1
        values = []
        for lam, _, _ in runs:
            if lam not in values:
                values.append(lam)
        blocks, spectrum = [], []
        for idx, lam in enumerate(values):
            own = [(s, sz) for v, s, sz in runs if v == lam]
            order = tuple(sorted(range(len(own)), key=lambda k: -own[k][1]))
            spectrum.append(EigenStructure(lam, sum(sz for _, sz in own), len(own),
                                           tuple(own[k][1] for k in order), order))
            for pos, (s, sz) in enumerate(own):
                blocks.append(JordanBlock(idx, pos, sz, s))
        blocks.sort(key=lambda b: b.start)
        return cls(J, Matrix.identity(n), tuple(spectrum), tuple(blocks))


def _to_fraction(r):
    r = sympy.Rational(r)
    return Fraction(int(r.p), int(r.q))


def eigenvalues(m):
    """(eigenvalue, algebraic multiplicity) pairs in J's layout order."""
    if not m.is_square():
        raise ShapeMismatch(f"eigenvalues of non-square {m.shape}")
    coeffs = [sympy.Rational(c.numerator, c.denominator) for c in char_poly(m)]
    poly = sympy.Poly(coeffs, _X, domain='QQ')
    _, factors = poly.factor_list()
    roots = {}
    for factor, mult in factors:
        if factor.degree() != 1:
            raise NonRationalSpectrum(
                f"characteristic polynomial has irreducible factor {factor.as_expr()}",
                factor=str(factor.as_expr()))
        a, b = factor.all_coeffs()
        root = _to_fraction(-b / a)
        roots[root] = roots.get(root, 0) + mult
    return sorted(roots.items(), key=lambda item: (-item[1], item[0]))


def _kernel_chain(m, lam, sigma):
    """Kernels of (M - lam I)^j for j = 0..p, stopping once the dimension hits sigma."""
    n = m.nrows
    nil = m - Matrix.identity(n) * lam
    kernels = [Subspace.zero(n)]
    power = Matrix.identity(n)
    while kernels[-1].dim < sigma:
        power = power @ nil
        kernels.append(kernel_basis(power))
        if len(kernels) > n + 1:
            raise ArithmeticError(f"kernel chain for eigenvalue {lam} does not stabilise")
    return nil, kernels


def _sizes_from_dims(dims):
    # at_least[j] = #blocks of size >= j+1 = dim K_{j+1} - dim K_j
    at_least = [dims[j + 1] - dims[j] for j in range(len(dims) - 1)] + [0]
    sizes = []
    for j in range(len(at_least) - 1, 0, -1):
        sizes += [j] * (at_least[j - 1] - at_least[j])
    return sizes


def block_structure(m):
    """Spectrum with multiplicities and block sizes from rank sequences alone (no T)."""
    spectrum = []
    for lam, sigma in eigenvalues(m):
        _, kernels = _kernel_chain(m, lam, sigma)
        sizes = _sizes_from_dims([k.dim for k in kernels])
        spectrum.append(EigenStructure(lam, sigma, kernels[1].dim if len(kernels) > 1 else 0,
                                       tuple(sizes), tuple(range(len(sizes)))))
    return tuple(spectrum)


def _apply(mat, vec, times=1):
    v = Matrix.column_vector(vec)
    for _ in range(times):
        v = mat @ v
    return v.column(0)


def jordan_decompose(m):
    """J, T and spectrum with T^-1 M T = J; chain tops by echelon completion of the kernels."""
    n = m.nrows
    if not m.is_square():
        raise ShapeMismatch(f"jordan_decompose of non-square {m.shape}")
    columns, blocks, jordan_blocks, spectrum = [], [], [], []
    for idx, (lam, sigma) in enumerate(eigenvalues(m)):
        nil, kernels = _kernel_chain(m, lam, sigma)
        dims = [k.dim for k in kernels]
        sizes = _sizes_from_dims(dims)
        chains = []                     # (size, top) with larger chains first
        for j in range(len(kernels) - 1, 0, -1):
            need = sizes.count(j)
            if not need:
                continue
            spanning = list(kernels[j - 1].basis.columns())
            spanning += [_apply(nil, top, s - j) for s, top in chains]
            chosen = []
            for cand in kernels[j].basis.columns():
                if len(chosen) == need:
                    break
                trial = spanning + chosen + [cand]
                if rank(Matrix.from_columns(trial, n)) == len(trial):
                    chosen.append(cand)
            if len(chosen) != need:
                raise ArithmeticError(f"chain completion failed for eigenvalue {lam} at level {j}")
            chains += [(j, top) for top in chosen]
        for pos, (size, top) in enumerate(chains):
            blocks.append(JordanBlock(idx, pos, size, len(columns)))
            columns += [_apply(nil, top, size - 1 - k) for k in range(size)]
            jordan_blocks.append(_jordan_block(lam, size))
        spectrum.append(EigenStructure(lam, sigma, dims[1], tuple(s for s, _ in chains),
                                       tuple(range(len(chains)))))
    T = _normalize_chains(Matrix.from_columns(columns, n), blocks)
    J = direct_sum(*jordan_blocks) if jordan_blocks else Matrix.zeros(0, 0)
    if m @ T != T @ J:
        raise ArithmeticError("Jordan chains do not satisfy M T = T J")
    if logger.isEnabledFor(logging.DEBUG):
        logger.debug("Jordan layout: block sizes %s", [s.block_sizes for s in spectrum])
    return JordanDecomposition(J, T, tuple(spectrum), tuple(blocks))


def _normalize_chains(T, blocks):
    """Scale every chain so the row of T^-1 at its last position has leading entry 1."""
    if not blocks:
        return T
    dual = T.inverse()
    columns = T.columns()
    for b in blocks:
        lead = next(x for x in dual.row(b.last_row) if x != 0)
        for j in range(b.start, b.start + b.size):
            columns[j] = tuple(x * lead for x in columns[j])
    return Matrix.from_columns(columns, T.nrows)


def _jordan_block(lam, size):
    return Matrix([[lam if i == j else (1 if j == i + 1 else 0) for j in range(size)]
                   for i in range(size)], size)


def max_geometric_multiplicity(m):
    """alpha* = max over eigenvalues of dim Ker(M - lam I)."""
    n = m.nrows
    best = 0
    for lam, _ in eigenvalues(m):
        best = max(best, n - rank(m - Matrix.identity(n) * lam))
    return best


def block_layout(jd):
    """(eigen index, block position, start row, size) for every block, in J's order."""
    return [(b.eigen_index, b.position, b.start, b.size) for b in jd.blocks]


def last_rows(jd, bhat, eigen_index):
    return jd.last_rows(bhat, eigen_index)
