"""
Exact rational matrices and subspaces.

Every entry is a ``fractions.Fraction``; nothing in the package ever touches a
float after parsing. Elimination (rank, reduced echelon form, inverse,
characteristic polynomial) is delegated to sympy's ``DomainMatrix`` over
ZZ/QQ, which works fraction-free on the integer side.

Matrices are immutable: every operation returns a new ``Matrix``. A
``Subspace`` stores a full-column-rank basis kept in reduced echelon form so
that the same subspace always has the same basis bytes.

Literal text format (fixtures, CLI): a list of rows, each entry an integer,
a ``"p/q"`` string or a decimal (``"0.3"`` is exactly 3/10), e.g.
``[["3/10", "0"], ["0", "1/10"]]``.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from numbers import Integral

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from errors import ScenarioError, ShapeMismatch

ZERO = Fraction(0)
ONE = Fraction(1)


def parse_rational(value):
    """Exact Fraction from an int, a Fraction, a "p/q" or decimal string, or a JSON number."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ScenarioError(f"boolean is not a matrix entry: {value!r}")
    if isinstance(value, Integral):
        return Fraction(int(value))
    if isinstance(value, float):
        # JSON numbers: the shortest repr is the decimal the user wrote.
        value = repr(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ScenarioError(f"not a rational literal: {value!r}") from None
    raise ScenarioError(f"unsupported entry type {type(value).__name__}: {value!r}")


def format_rational(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _from_qq(element):
    return Fraction(int(QQ.numer(element)), int(QQ.denom(element)))


class Matrix:
    """Dense immutable matrix of Fractions."""

    __slots__ = ('_rows', '_shape')

    def __init__(self, rows, cols=None):
        data = tuple(tuple(e if type(e) is Fraction else parse_rational(e) for e in row)
                     for row in rows)
        if data:
            width = len(data[0])
            if any(len(r) != width for r in data):
                raise ShapeMismatch("ragged rows in matrix literal")
            if cols is not None and cols != width:
                raise ShapeMismatch(f"declared {cols} columns, rows have {width}")
        else:
            width = cols or 0
        self._rows = data
        self._shape = (len(data), width)

    # ------------------------------------------------------------ builders
    @classmethod
    def zeros(cls, nrows, ncols):
        return cls([[ZERO] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n):
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, columns, nrows):
        columns = [tuple(c) for c in columns]
        if any(len(c) != nrows for c in columns):
            raise ShapeMismatch(f"column length differs from {nrows}")
        return cls([[c[i] for c in columns] for i in range(nrows)], len(columns))

    @classmethod
    def column_vector(cls, entries):
        return cls([[e] for e in entries], 1)

    @classmethod
    def from_literal(cls, literal, nrows=None, ncols=None):
        """Parse the list-of-rows literal; nrows/ncols pin shapes of empty matrices."""
        if not isinstance(literal, (list, tuple)):
            raise ScenarioError("matrix literal must be a list of rows")
        rows = []
        for row in literal:
            if not isinstance(row, (list, tuple)):
                raise ScenarioError("matrix row must be a list of entries")
            rows.append([parse_rational(e) for e in row])
        try:
            if not rows and nrows:
                return cls([[] for _ in range(nrows)], 0)
            m = cls(rows, ncols)
        except ShapeMismatch as e:
            raise ScenarioError(str(e)) from None
        if nrows is not None and m.nrows != nrows:
            raise ScenarioError(f"expected {nrows} rows, got {m.nrows}")
        return m

    def to_literal(self):
        return [[format_rational(e) for e in row] for row in self._rows]

    # ---------------------------------------------------------- accessors
    @property
    def shape(self):
        return self._shape

    @property
    def nrows(self):
        return self._shape[0]

    @property
    def ncols(self):
        return self._shape[1]

    def __getitem__(self, index):
        i, j = index
        return self._rows[i][j]

    def row(self, i):
        return self._rows[i]

    def column(self, j):
        return tuple(r[j] for r in self._rows)

    def rows(self):
        return self._rows

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def select(self, rows=None, cols=None):
        rows = range(self.nrows) if rows is None else list(rows)
        cols = range(self.ncols) if cols is None else list(cols)
        return Matrix([[self._rows[i][j] for j in cols] for i in rows], len(cols))

    def is_square(self):
        return self.nrows == self.ncols

    def is_zero(self):
        return all(e == 0 for row in self._rows for e in row)

    # --------------------------------------------------------- arithmetic
    def _check_same(self, other, op):
        if self.shape != other.shape:
            raise ShapeMismatch(f"{op}: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_same(other, '+')
        return Matrix([[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
                      self.ncols)

    def __sub__(self, other):
        self._check_same(other, '-')
        return Matrix([[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
                      self.ncols)

    def __neg__(self):
        return Matrix([[-a for a in r] for r in self._rows], self.ncols)

    def __mul__(self, scalar):
        s = parse_rational(scalar)
        return Matrix([[a * s for a in r] for r in self._rows], self.ncols)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ShapeMismatch(f"@: {self.shape} vs {other.shape}")
        cols = other.columns()
        return Matrix([[sum((a * b for a, b in zip(r, c) if a and b), ZERO) for c in cols]
                       for r in self._rows], other.ncols)

    @property
    def T(self):
        return Matrix([list(c) for c in self.columns()], self.nrows)

    def power(self, k):
        if not self.is_square():
            raise ShapeMismatch(f"power of non-square {self.shape}")
        result = Matrix.identity(self.nrows)
        for _ in range(k):
            result = result @ self
        return result

    def inverse(self):
        if not self.is_square():
            raise ShapeMismatch(f"inverse of non-square {self.shape}")
        if self.nrows == 0:
            return self
        if rank(self) != self.nrows:
            raise ShapeMismatch("matrix is singular")
        return _from_domain(_to_domain(self).inv(), self.nrows, self.ncols)

    @staticmethod
    def hstack(*mats):
        if not mats:
            raise ShapeMismatch("hstack of nothing")
        n = mats[0].nrows
        if any(m.nrows != n for m in mats):
            raise ShapeMismatch("hstack: row counts differ")
        return Matrix([sum((list(m.row(i)) for m in mats), []) for i in range(n)],
                      sum(m.ncols for m in mats))

    @staticmethod
    def vstack(*mats):
        if not mats:
            raise ShapeMismatch("vstack of nothing")
        c = mats[0].ncols
        if any(m.ncols != c for m in mats):
            raise ShapeMismatch("vstack: column counts differ")
        return Matrix([r for m in mats for r in m.rows()], c)

    # ------------------------------------------------------------ dunders
    def __eq__(self, other):
        return isinstance(other, Matrix) and self._shape == other._shape and self._rows == other._rows

    def __hash__(self):
        return hash((self._shape, self._rows))

    def __repr__(self):
        return f"Matrix({self.to_literal()})"


def _to_domain(m, domain=QQ):
    if domain is ZZ:
        rows = []
        for r in m.rows():
            scale = 1
            for e in r:
                scale = lcm(scale, e.denominator)
            rows.append([ZZ(int(e * scale)) for e in r])
        return DomainMatrix(rows, m.shape, ZZ)
    return DomainMatrix([[QQ(e.numerator, e.denominator) for e in r] for r in m.rows()],
                        m.shape, QQ)


def _from_domain(dm, nrows, ncols):
    return Matrix([[_from_qq(e) for e in r] for r in dm.to_list()], ncols) if nrows else Matrix.zeros(0, ncols)


# ------------------------------------------------------------------ rank & co
def rank(m):
    """Row-space dimension; fraction-free elimination on the row-scaled integer matrix."""
    if m.nrows == 0 or m.ncols == 0:
        return 0
    return int(_to_domain(m, ZZ).rank())


def rref(m):
    """Reduced row echelon form and pivot columns (leftmost column, topmost row)."""
    if m.nrows == 0 or m.ncols == 0:
        return m, ()
    reduced, pivots = _to_domain(m).rref()
    return _from_domain(reduced, m.nrows, m.ncols), tuple(int(p) for p in pivots)


def kernel_basis(m):
    """Right kernel of m as a Subspace, one basis vector per free column in order."""
    n = m.ncols
    reduced, pivots = rref(m)
    free = [j for j in range(n) if j not in pivots]
    vectors = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for r, p in enumerate(pivots):
            v[p] = -reduced[r, f]
        vectors.append(v)
    return Subspace(n, Matrix.from_columns(vectors, n))


def left_annihilator(m):
    """Rows spanning {z : z m = 0}."""
    ker = kernel_basis(m.T)
    return ker.basis.T if ker.dim else Matrix.zeros(0, m.nrows)


def pinv(m):
    """Moore-Penrose pseudoinverse via the rank factorization m = C R."""
    reduced, pivots = rref(m)
    r = len(pivots)
    if r == 0:
        return Matrix.zeros(m.ncols, m.nrows)
    c_factor = m.select(cols=pivots)
    r_factor = reduced.select(rows=range(r))
    return (r_factor.T @ (r_factor @ r_factor.T).inverse()
            @ (c_factor.T @ c_factor).inverse() @ c_factor.T)


def char_poly(m):
    """Monic characteristic polynomial coefficients, highest degree first."""
    if not m.is_square():
        raise ShapeMismatch(f"char_poly of non-square {m.shape}")
    if m.nrows == 0:
        return [ONE]
    return [_from_qq(c) for c in _to_domain(m).charpoly()]


def poly_eval_matrix(coeffs, m):
    """Horner evaluation of a coefficient list (highest first) at a square matrix."""
    n = m.nrows
    eye = Matrix.identity(n)
    acc = Matrix.zeros(n, n)
    for c in coeffs:
        acc = acc @ m + eye * c
    return acc


def direct_sum(*mats):
    """Block-diagonal stacking: first matrix top-left, the next below-right of it."""
    nrows = sum(m.nrows for m in mats)
    ncols = sum(m.ncols for m in mats)
    out = [[ZERO] * ncols for _ in range(nrows)]
    r0 = c0 = 0
    for m in mats:
        for i, row in enumerate(m.rows()):
            out[r0 + i][c0:c0 + m.ncols] = row
        r0 += m.nrows
        c0 += m.ncols
    return Matrix(out, ncols)


def controllability_matrix(a, b):
    """[B, AB, ..., A^(n-1) B]."""
    n = a.nrows
    if b.nrows != n:
        raise ShapeMismatch(f"A is {a.shape} but B is {b.shape}")
    blocks, current = [], b
    for _ in range(n):
        blocks.append(current)
        current = a @ current
    return Matrix.hstack(*blocks) if b.ncols else Matrix.zeros(n, 0)


def observability_matrix(c, a):
    """[C; CA; ...; C A^(n-1)]."""
    n = a.nrows
    if c.ncols != n:
        raise ShapeMismatch(f"C is {c.shape} but A is {a.shape}")
    blocks, current = [], c
    for _ in range(n):
        blocks.append(current)
        current = current @ a
    return Matrix.vstack(*blocks) if c.nrows else Matrix.zeros(0, n)


# ------------------------------------------------------------------ subspaces
@dataclass(frozen=True)
class Subspace:
    """Column span of ``basis`` inside Q^ambient_dim; zero columns = zero subspace."""

    ambient_dim: int
    basis: Matrix

    def __post_init__(self):
        if self.basis.nrows != self.ambient_dim:
            raise ShapeMismatch(f"basis has {self.basis.nrows} rows, ambient dim {self.ambient_dim}")
        if rank(self.basis) != self.basis.ncols:
            raise ShapeMismatch("subspace basis is not full column rank")

    @classmethod
    def span(cls, m):
        """Echelon basis of the column space of m."""
        reduced, pivots = rref(m.T)
        basis = reduced.select(rows=range(len(pivots))).T if pivots else Matrix.zeros(m.nrows, 0)
        return cls(m.nrows, basis)

    @classmethod
    def zero(cls, n):
        return cls(n, Matrix.zeros(n, 0))

    @classmethod
    def full(cls, n):
        return cls(n, Matrix.identity(n))

    @property
    def dim(self):
        return self.basis.ncols

    def annihilator(self):
        """Rows Z with Z v = 0 exactly for v in this subspace."""
        if self.dim == 0:
            return Matrix.identity(self.ambient_dim)
        return left_annihilator(self.basis)

    def contains(self, vector):
        v = vector if isinstance(vector, Matrix) else Matrix.column_vector(vector)
        return self.contains_all(v)

    def contains_all(self, m):
        if m.ncols == 0:
            return True
        if self.dim == 0:
            return m.is_zero()
        return rank(Matrix.hstack(self.basis, m)) == self.dim

    def sum(self, other):
        return Subspace.span(Matrix.hstack(self.basis, other.basis))

    def intersect(self, other):
        return kernel_basis(Matrix.vstack(self.annihilator(), other.annihilator()))

    def equals(self, other):
        return self.dim == other.dim and self.contains_all(other.basis)

    def echelon(self):
        return Subspace.span(self.basis)
