"""
Exact Linear Algebra - Derived Chronicles

This module provides dense exact linear algebra over the rationals and prime
fields. Field arithmetic comes from sympy's polynomial domains (QQ and GF(p))
and Gauss-Jordan elimination from DomainMatrix; reduced echelon forms are
unique, so every basis the library reports is deterministic. SpanTracker
keeps its own sparse incremental elimination for spans built one vector at
a time.

Conventions: vectors are rows, matrices act on the right (v -> v @ M), and
kernels are left kernels.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from utils.errors import DimensionMismatch, FieldMismatch, SingularMatrix, SubspaceError

logger = logging.getLogger(__name__)

RATIONALS = "Q"
PRIME_FIELD = "Fp"


@lru_cache(maxsize=None)
def _prime_domain(p):
    return GF(p)


@dataclass(frozen=True)
class FieldSpec:
    """The exact ground field: the rationals or a prime field"""

    kind: str = RATIONALS
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind == RATIONALS:
            if self.p is not None:
                raise ValueError("the rational field takes no modulus")
        elif self.kind == PRIME_FIELD:
            if self.p is None or not isprime(self.p):
                raise ValueError(f"Fp requires a prime modulus, got {self.p}")
        else:
            raise ValueError(f"unknown field kind {self.kind!r}")

    @classmethod
    def parse(cls, text):
        """
        Parse a field name

        Args:
            text (str): "Q" or "Fp:<p>" (also accepts "QQ" and "GF(p)")

        Returns:
            FieldSpec: the named field
        """
        name = text.strip()
        if name in ("Q", "QQ"):
            return cls()
        if name.startswith("Fp:"):
            modulus = name[3:]
        elif name.startswith("GF(") and name.endswith(")"):
            modulus = name[3:-1]
        else:
            raise ValueError(f"unknown field {text!r}; expected Q or Fp:<p>")
        try:
            return cls(PRIME_FIELD, int(modulus))
        except ValueError as e:
            raise ValueError(f"bad field {text!r}: {str(e)}")

    @property
    def domain(self):
        return QQ if self.kind == RATIONALS else _prime_domain(self.p)

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def element(self, value):
        """Convert an int, a "p/q" string or a domain element into a field element"""
        K = self.domain
        if isinstance(value, bool):
            raise TypeError("booleans are not field elements")
        if isinstance(value, int):
            return K(value)
        if isinstance(value, str):
            text = value.strip()
            if "/" in text:
                num, den = text.split("/", 1)
                den_value = K(int(den))
                if not den_value:
                    raise ZeroDivisionError(f"{text} has a zero denominator in {self}")
                return K(int(num)) / den_value
            return K(int(text))
        return K.convert(value)

    def format(self, a):
        if self.kind == RATIONALS:
            if a.denominator == 1:
                return str(a.numerator)
            return f"{a.numerator}/{a.denominator}"
        return str(int(self.domain.to_int(a)) % self.p)

    def sign(self, exponent):
        """(-1)**exponent as a field element"""
        return self.one if exponent % 2 == 0 else -self.one

    def __str__(self):
        return RATIONALS if self.kind == RATIONALS else f"Fp:{self.p}"


RATIONAL_FIELD = FieldSpec()


# Vector helpers; vectors are tuples of field elements

def zero_vector(n, field):
    return (field.zero,) * n


def unit_vector(n, i, field):
    v = [field.zero] * n
    v[i] = field.one
    return tuple(v)


def vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v):
    return tuple(c * a for a in v)


def is_zero_vector(v):
    return not any(v)


def lincomb(coeffs, vectors, n, field):
    """Sum of coeffs[k] * vectors[k], all of length n"""
    acc = [field.zero] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for j, a in enumerate(v):
                if a:
                    acc[j] += c * a
    return tuple(acc)


@dataclass(frozen=True)
class Mat:
    """A dense matrix with entries stored row-major"""

    rows: int
    cols: int
    entries: tuple
    field: FieldSpec

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    @classmethod
    def zeros(cls, rows, cols, field):
        return cls(rows, cols, (field.zero,) * (rows * cols), field)

    @classmethod
    def identity(cls, n, field):
        entries = [field.zero] * (n * n)
        for i in range(n):
            entries[i * n + i] = field.one
        return cls(n, n, tuple(entries), field)

    @classmethod
    def from_rows(cls, rows, field, cols=None):
        """Build a matrix from nested sequences of ints, strings or field elements"""
        rows = [list(r) for r in rows]
        if cols is None:
            if not rows:
                raise DimensionMismatch("cannot infer the column count of an empty matrix")
            cols = len(rows[0])
        entries = []
        for r in rows:
            if len(r) != cols:
                raise DimensionMismatch(f"ragged matrix row of length {len(r)}, expected {cols}")
            entries.extend(field.element(x) for x in r)
        return cls(len(rows), cols, tuple(entries), field)

    @classmethod
    def from_vectors(cls, vectors, cols, field):
        entries = []
        for v in vectors:
            if len(v) != cols:
                raise DimensionMismatch(f"vector of length {len(v)} in a matrix with {cols} columns")
            entries.extend(v)
        return cls(len(entries) // cols if cols else len(vectors), cols, tuple(entries), field)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def row(self, i):
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def row_list(self):
        return [self.row(i) for i in range(self.rows)]

    def column(self, j):
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def __getitem__(self, index):
        i, j = index
        return self.entries[i * self.cols + j]

    def transpose(self):
        return Mat(self.cols, self.rows, tuple(self.entries[i * self.cols + j]
                                               for j in range(self.cols)
                                               for i in range(self.rows)), self.field)

    def _check_field(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"cannot combine matrices over {self.field} and {other.field}")

    def __matmul__(self, other):
        self._check_field(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        zero = self.field.zero
        n = other.cols
        other_rows = other.row_list()
        out = []
        for i in range(self.rows):
            acc = [zero] * n
            for k, a in enumerate(self.row(i)):
                if a:
                    rk = other_rows[k]
                    for j in range(n):
                        b = rk[j]
                        if b:
                            acc[j] += a * b
            out.extend(acc)
        return Mat(self.rows, n, tuple(out), self.field)

    def __add__(self, other):
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return Mat(self.rows, self.cols, vec_add(self.entries, other.entries), self.field)

    def __sub__(self, other):
        self._check_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot subtract {other.shape} from {self.shape}")
        return Mat(self.rows, self.cols, vec_sub(self.entries, other.entries), self.field)

    def __neg__(self):
        return Mat(self.rows, self.cols, tuple(-a for a in self.entries), self.field)

    def scale(self, c):
        return Mat(self.rows, self.cols, vec_scale(c, self.entries), self.field)

    def is_zero(self):
        return not any(self.entries)

    def apply(self, v):
        """The row vector v @ self"""
        if len(v) != self.rows:
            raise DimensionMismatch(f"vector of length {len(v)} against {self.shape} matrix")
        acc = [self.field.zero] * self.cols
        for k, a in enumerate(v):
            if a:
                base = k * self.cols
                for j in range(self.cols):
                    b = self.entries[base + j]
                    if b:
                        acc[j] += a * b
        return tuple(acc)

    def rank(self):
        return rank_kernel(self)[0]

    def to_domain_matrix(self):
        return DomainMatrix([list(r) for r in self.row_list()], self.shape, self.field.domain)

    def format_rows(self):
        return [" ".join(self.field.format(a) for a in r) for r in self.row_list()]


def hstack(mats, rows, field):
    """Place matrices side by side; rows is needed when mats is empty"""
    cols = sum(m.cols for m in mats)
    entries = []
    for i in range(rows):
        for m in mats:
            entries.extend(m.row(i))
    return Mat(rows, cols, tuple(entries), field)


def vstack(mats, cols, field):
    entries = []
    for m in mats:
        if m.cols != cols:
            raise DimensionMismatch(f"cannot stack a {m.shape} block into {cols} columns")
        entries.extend(m.entries)
    return Mat(sum(m.rows for m in mats), cols, tuple(entries), field)


def block_matrix(blocks, row_dims, col_dims, field):
    """
    Assemble a matrix from a sparse dict of blocks

    Args:
        blocks (dict): (block_row, block_col) -> Mat; missing blocks are zero
        row_dims (list): row count of each block row
        col_dims (list): column count of each block column
        field (FieldSpec): the ground field

    Returns:
        Mat: the assembled matrix
    """
    rows, cols = sum(row_dims), sum(col_dims)
    entries = [field.zero] * (rows * cols)
    row_offsets = _offsets(row_dims)
    col_offsets = _offsets(col_dims)
    for (bi, bj), m in blocks.items():
        if m.shape != (row_dims[bi], col_dims[bj]):
            raise DimensionMismatch(f"block {(bi, bj)} has shape {m.shape}, expected {(row_dims[bi], col_dims[bj])}")
        r0, c0 = row_offsets[bi], col_offsets[bj]
        for i in range(m.rows):
            base = (r0 + i) * cols + c0
            entries[base:base + m.cols] = m.row(i)
    return Mat(rows, cols, tuple(entries), field)


def block_diagonal(mats, field):
    return block_matrix({(k, k): m for k, m in enumerate(mats)},
                        [m.rows for m in mats], [m.cols for m in mats], field)


def _offsets(dims):
    out, acc = [], 0
    for d in dims:
        out.append(acc)
        acc += d
    return out


def kron(a, b):
    """Kronecker product; basis vector e_i (x) f_k sits at index i * dim + k"""
    a._check_field(b)
    rows, cols = a.rows * b.rows, a.cols * b.cols
    entries = [a.field.zero] * (rows * cols)
    for i in range(a.rows):
        for j in range(a.cols):
            x = a[i, j]
            if not x:
                continue
            for k in range(b.rows):
                base = (i * b.rows + k) * cols + j * b.cols
                for l in range(b.cols):
                    y = b[k, l]
                    if y:
                        entries[base + l] = x * y
    return Mat(rows, cols, tuple(entries), a.field)


# Elimination

def _rref(rows, ncols, field):
    """Reduced row echelon form by DomainMatrix.rref; returns (nonzero reduced rows, pivot columns)"""
    rows = [list(r) for r in rows]
    if not rows or not ncols:
        return [], []
    domain = field.domain
    dm = DomainMatrix([[domain.convert(a) for a in r] for r in rows], (len(rows), ncols), domain)
    reduced, pivots = dm.rref()
    return reduced.to_list()[:len(pivots)], list(pivots)


def _nullspace_from_rref(reduced, pivots, n, field, reverse=False):
    """Basis of {x : row . x = 0 for every reduced row}, one vector per free column"""
    zero, one = field.zero, field.one
    pivot_set = set(pivots)
    basis = []
    for f in range(n):
        if f in pivot_set:
            continue
        v = [zero] * n
        v[f] = one
        for row, pc in zip(reduced, pivots):
            if row[f]:
                v[pc] = -row[f]
        basis.append(v)
    if reverse:
        basis = [tuple(v[::-1]) for v in basis]
        columns = [n - 1 - f for f in range(n) if f not in pivot_set]
        order = sorted(range(len(basis)), key=lambda k: columns[k])
        return [basis[k] for k in order], [columns[k] for k in order]
    return [tuple(v) for v in basis], [f for f in range(n) if f not in pivot_set]


def rank_kernel(m, field=None):
    """
    Rank and left kernel of a matrix

    Args:
        m (Mat): the matrix
        field (FieldSpec): optional expected field

    Returns:
        tuple: (rank, kernel basis) where every kernel vector v has v @ m = 0
    """
    if field is not None and field != m.field:
        raise FieldMismatch(f"expected a matrix over {field}, got {m.field}")
    reduced, pivots = _rref([m.column(j) for j in range(m.cols)], m.rows, m.field)
    basis, _ = _nullspace_from_rref(reduced, pivots, m.rows, m.field)
    return len(pivots), basis


@dataclass(frozen=True)
class Subspace:
    """
    A subspace of field^ambient with a basis in reduced form

    coordinate_columns[i] is a column where basis[i] has a 1 and every other
    basis vector has a 0, so coordinates are read off directly.
    """

    field: FieldSpec
    ambient: int
    basis: tuple
    coordinate_columns: tuple

    @property
    def dim(self):
        return len(self.basis)

    @classmethod
    def span(cls, vectors, ambient, field):
        reduced, pivots = _rref(vectors, ambient, field)
        return cls(field, ambient, tuple(tuple(r) for r in reduced), tuple(pivots))

    @classmethod
    def whole(cls, ambient, field):
        return cls(field, ambient, tuple(unit_vector(ambient, i, field) for i in range(ambient)),
                   tuple(range(ambient)))

    @classmethod
    def annihilator(cls, equations, ambient, field, prefer_low=False):
        """
        The solutions x of row . x = 0 for every equation row

        With prefer_low the free variables are chosen among the lowest indices,
        so that solutions with a nonzero first coordinate come first.
        """
        tracker = SpanTracker(ambient, field)
        for eq in equations:
            if prefer_low:
                eq = tuple(eq)[::-1]
            tracker.add(eq)
        reduced, pivots = _rref(tracker.dense_rows(), ambient, field)
        basis, columns = _nullspace_from_rref(reduced, pivots, ambient, field, reverse=prefer_low)
        return cls(field, ambient, tuple(basis), tuple(columns))

    def coordinates(self, v):
        return tuple(v[c] for c in self.coordinate_columns)

    def combine(self, coords):
        return lincomb(coords, self.basis, self.ambient, self.field)

    def contains(self, v):
        return vec_sub(tuple(v), self.combine(self.coordinates(v))) == zero_vector(self.ambient, self.field)

    def as_mat(self):
        return Mat.from_vectors(self.basis, self.ambient, self.field) if self.basis else Mat.zeros(0, self.ambient, self.field)


class SpanTracker:
    """
    Incremental echelon form over sparse rows

    When track is given, every stored row remembers its expression in terms of
    the vectors passed to add(); solve() then returns coefficients of those.
    """

    def __init__(self, ambient, field, track=None):
        self.ambient = ambient
        self.field = field
        self.track = track
        self.rows = []      # dict column -> value, pivot entry 1
        self.pivots = []
        self.combos = []    # dict original index -> coefficient
        self._added = 0

    @property
    def dim(self):
        return len(self.rows)

    def _reduce(self, v, combo=None):
        w = {j: a for j, a in enumerate(v) if a}
        for row, pc, rc in zip(self.rows, self.pivots, self.combos):
            c = w.get(pc)
            if not c:
                continue
            for j, b in row.items():
                x = w.get(j)
                x = -c * b if x is None else x - c * b
                if x:
                    w[j] = x
                else:
                    w.pop(j, None)
            if combo is not None:
                for j, b in rc.items():
                    x = combo.get(j)
                    x = -c * b if x is None else x - c * b
                    if x:
                        combo[j] = x
                    else:
                        combo.pop(j, None)
        return w

    def add(self, v):
        """Insert v; returns True when it enlarged the span"""
        index = self._added
        self._added += 1
        combo = {index: self.field.one} if self.track is not None else None
        w = self._reduce(v, combo)
        if not w:
            return False
        pc = min(w)
        inv = self.field.one / w[pc]
        self.rows.append({j: a * inv for j, a in w.items()})
        self.pivots.append(pc)
        self.combos.append({j: a * inv for j, a in combo.items()} if combo is not None else None)
        return True

    def contains(self, v):
        return not self._reduce(v)

    def solve(self, v):
        """Coefficients c with sum c_k * added_k = v, or None when v is outside the span"""
        if self.track is None:
            raise ValueError("solve() needs a tracker built with track=<count>")
        w = {j: a for j, a in enumerate(v) if a}
        coeffs = {}
        for row, pc, rc in zip(self.rows, self.pivots, self.combos):
            c = w.get(pc)
            if not c:
                continue
            for j, b in row.items():
                x = w.get(j)
                x = -c * b if x is None else x - c * b
                if x:
                    w[j] = x
                else:
                    w.pop(j, None)
            for j, b in rc.items():
                coeffs[j] = coeffs.get(j, self.field.zero) + c * b
        if w:
            return None
        out = [self.field.zero] * self.track
        for j, c in coeffs.items():
            out[j] = c
        return tuple(out)

    def dense_rows(self):
        zero = self.field.zero
        out = []
        for row in self.rows:
            r = [zero] * self.ambient
            for j, a in row.items():
                r[j] = a
            out.append(r)
        return out


class LinearSolver:
    """Solves x @ m = b for x, reusing one elimination of the rows of m"""

    def __init__(self, m):
        self.matrix = m
        self.tracker = SpanTracker(m.cols, m.field, track=m.rows)
        for i in range(m.rows):
            self.tracker.add(m.row(i))

    def solve(self, b):
        if len(b) != self.matrix.cols:
            raise DimensionMismatch(f"right-hand side of length {len(b)} for {self.matrix.shape} system")
        if self.matrix.rows == 0:
            return () if is_zero_vector(b) else None
        return self.tracker.solve(b)


def inverse(m):
    if m.rows != m.cols:
        raise DimensionMismatch(f"cannot invert a {m.shape} matrix")
    n = m.rows
    if n == 0:
        return m
    try:
        inv = m.to_domain_matrix().inv()
    except DMNonInvertibleMatrixError:
        raise SingularMatrix(f"{n}x{n} matrix is singular")
    return Mat(n, n, tuple(a for r in inv.to_list() for a in r), m.field)


def solution_space(constraints, shape, field):
    """
    Solutions X of the stacked system X @ A_i = B_i @ X as a Subspace

    X is flattened row-major. Free variables are taken at the lowest indices,
    so basis vectors are ordered by their first free entry.
    """
    r, c = shape
    n = r * c
    zero = field.zero
    equations = []
    for A, B in constraints:
        if A.shape != (c, c) or B.shape != (r, r):
            raise DimensionMismatch(
                f"constraint ({A.shape}, {B.shape}) does not fit an unknown of shape {shape}"
            )
        if A.field != field or B.field != field:
            raise FieldMismatch(f"constraint over {A.field}/{B.field}, expected {field}")
        for i in range(r):
            for j in range(c):
                eq = [zero] * n
                for k in range(c):
                    a = A[k, j]
                    if a:
                        eq[i * c + k] += a
                for k in range(r):
                    b = B[i, k]
                    if b:
                        eq[k * c + j] -= b
                if any(eq):
                    equations.append(eq)
    return Subspace.annihilator(equations, n, field, prefer_low=True)


def solve_linear(constraints, shape, field):
    """
    Basis of the solution space of X @ A_i = B_i @ X

    Args:
        constraints (list): pairs (A_i, B_i) of square matrices
        shape (tuple): (rows, cols) of the unknown X
        field (FieldSpec): the ground field

    Returns:
        list: basis matrices of the solution space
    """
    r, c = shape
    space = solution_space(constraints, shape, field)
    return [Mat(r, c, v, field) for v in space.basis]


def quotient_basis(space_basis, subspace_basis, field, ambient=None):
    """
    Complement and quotient projection for subspace inside space

    Args:
        space_basis (list): vectors spanning the space
        subspace_basis (list): vectors spanning the subspace
        field (FieldSpec): the ground field
        ambient (int): vector length; needed when both lists are empty

    Returns:
        tuple: (complement vectors chosen from space_basis in order,
                projection Mat ambient x dim(complement)); the projection sends
                any vector of the space to its quotient coordinates and
                vanishes exactly on the subspace
    """
    if ambient is None:
        vectors = list(space_basis) or list(subspace_basis)
        if not vectors:
            raise DimensionMismatch("ambient dimension needed for empty bases")
        ambient = len(vectors[0])
    space_tracker = SpanTracker(ambient, field)
    for v in space_basis:
        space_tracker.add(v)
    sub_tracker = SpanTracker(ambient, field)
    independent = []
    for v in subspace_basis:
        if not space_tracker.contains(v):
            raise SubspaceError("subspace is not contained in the space")
        if sub_tracker.add(v):
            independent.append(tuple(v))
    complement = [tuple(v) for v in space_basis if sub_tracker.add(v)]
    if not complement:
        return [], Mat.zeros(ambient, 0, field)
    combined = independent + complement
    _, pivots = _rref(combined, ambient, field)
    square = Mat.from_vectors([[row[p] for p in pivots] for row in combined], len(pivots), field)
    inv = inverse(square)
    s, c = len(independent), len(complement)
    entries = [field.zero] * (ambient * c)
    for k, p in enumerate(pivots):
        for j in range(c):
            entries[p * c + j] = inv[k, s + j]
    return complement, Mat(ambient, c, tuple(entries), field)
