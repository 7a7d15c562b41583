"""
Complexes - Derived Chronicles

This module handles bounded complexes of modules and everything built from
them: graded maps, homotopies, shifts, direct sums, mapping cones, Hom
complexes, homology of complexes of vector spaces, the contractible hull
X (+) X<1>, and tensor products with bimodule complexes.

Signs: X[n]^i = X^(n+i) with differential (-1)^n d_X; the Hom complex
differential is d(f) = d_Y f + (-1)^(|f|+1) f d_X; the cone of f: X -> Y has
C^n = X^(n+1) (+) Y^n with d(x, y) = (-d_X x, f(x) + d_Y y).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional

from models.algebra import (
    FDBimodule,
    FDModule,
    HomSpace,
    direct_sum_modules,
    hom_basis,
    same_algebra,
    zero_module,
)
from utils.errors import AlgebraMismatch, DimensionMismatch, InvariantError, NotChainMap
from utils.linalg import (
    LinearSolver,
    Mat,
    Subspace,
    block_diagonal,
    block_matrix,
    kron,
    quotient_basis,
    rank_kernel,
    unit_vector,
    zero_vector,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundedComplex:
    """
    A bounded complex of right modules on the window [lo, hi]

    differentials[k] is d^(lo+k): X^(lo+k) -> X^(lo+k+1). truncation records
    the resolution length when the complex is a truncated resolution.
    """

    algebra: object
    lo: int
    hi: int
    modules: tuple
    differentials: tuple
    truncation: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        if self.hi < self.lo:
            raise DimensionMismatch(f"empty window [{self.lo}, {self.hi}]")
        if len(self.modules) != self.hi - self.lo + 1:
            raise DimensionMismatch(f"window [{self.lo}, {self.hi}] needs {self.hi - self.lo + 1} terms")
        if len(self.differentials) != self.hi - self.lo:
            raise DimensionMismatch(f"window [{self.lo}, {self.hi}] needs {self.hi - self.lo} differentials")

    @property
    def field(self):
        return self.algebra.field

    @property
    def degrees(self):
        return range(self.lo, self.hi + 1)

    def module(self, i):
        if self.lo <= i <= self.hi:
            return self.modules[i - self.lo]
        return zero_module(self.algebra)

    def dim(self, i):
        return self.module(i).dim

    def diff(self, i):
        if self.lo <= i < self.hi:
            return self.differentials[i - self.lo]
        return Mat.zeros(self.dim(i), self.dim(i + 1), self.field)

    def dims(self):
        return {i: self.dim(i) for i in self.degrees}

    def is_zero(self):
        return all(m.dim == 0 for m in self.modules)

    def validate(self, name="complex"):
        for i in self.degrees:
            m = self.module(i)
            if not same_algebra(m.algebra, self.algebra):
                raise InvariantError(name, f"term in degree {i} lives over another algebra")
        for i in range(self.lo, self.hi):
            d = self.diff(i)
            if d.shape != (self.dim(i), self.dim(i + 1)):
                raise InvariantError(name, f"differential in degree {i} has shape {d.shape}")
            for k, (a, b) in enumerate(zip(self.module(i).action, self.module(i + 1).action)):
                if a @ d != d @ b:
                    raise InvariantError(name, f"differential in degree {i} is not linear for "
                                               f"{self.algebra.labels[k]}")
        for i in range(self.lo, self.hi - 1):
            if not (self.diff(i) @ self.diff(i + 1)).is_zero():
                raise InvariantError(name, f"d^{i + 1} d^{i} != 0 in degree {i}")
        return self

    def underlying_space(self):
        return SpaceComplex(self.field, self.lo, self.hi, self.dims(),
                            {i: self.diff(i) for i in range(self.lo, self.hi)})


def complex_from_terms(A, terms, diffs=None, truncation=None):
    """
    Build a complex from sparse data

    Args:
        A (FDAlgebra): the algebra
        terms (dict): degree -> FDModule
        diffs (dict): degree i -> Mat of d^i; missing differentials are zero

    Returns:
        BoundedComplex: on the smallest window holding every term
    """
    diffs = diffs or {}
    if not terms:
        return BoundedComplex(A, 0, 0, (zero_module(A),), ())
    lo, hi = min(terms), max(terms)
    modules = tuple(terms.get(i, zero_module(A)) for i in range(lo, hi + 1))
    differentials = []
    for i in range(lo, hi):
        d = diffs.get(i)
        if d is None:
            d = Mat.zeros(modules[i - lo].dim, modules[i + 1 - lo].dim, A.field)
        differentials.append(d)
    return BoundedComplex(A, lo, hi, modules, tuple(differentials), truncation)


def stalk(M, degree=0):
    return BoundedComplex(M.algebra, degree, degree, (M,), ())


def zero_complex(A):
    return stalk(zero_module(A))


def shift(X, n):
    """X[n]: X[n]^i = X^(n+i), differential (-1)^n d_X"""
    sign = X.field.sign(n)
    diffs = X.differentials if n % 2 == 0 else tuple(d.scale(sign) for d in X.differentials)
    return BoundedComplex(X.algebra, X.lo - n, X.hi - n, X.modules, diffs, X.truncation)


@dataclass(frozen=True)
class GradedMap:
    """
    A homogeneous map of degree n: components X^i -> Y^(i+n)

    Components are stored sparsely; zero components are dropped so that
    equality is equality of maps.
    """

    source: BoundedComplex
    target: BoundedComplex
    degree: int
    components: tuple

    @classmethod
    def build(cls, source, target, degree, comps):
        kept = []
        for i in sorted(comps):
            m = comps[i]
            shape = (source.dim(i), target.dim(i + degree))
            if m.shape != shape:
                raise DimensionMismatch(f"component at degree {i} has shape {m.shape}, expected {shape}")
            if not m.is_zero():
                kept.append((i, m))
        return cls(source, target, degree, tuple(kept))

    def as_dict(self):
        return dict(self.components)

    def component(self, i):
        for j, m in self.components:
            if j == i:
                return m
        return Mat.zeros(self.source.dim(i), self.target.dim(i + self.degree), self.source.field)

    def compose(self, inner):
        """self after inner"""
        comps = {}
        for i, V in inner.components:
            U = self.as_dict().get(i + inner.degree)
            if U is not None:
                comps[i] = V @ U
        return GradedMap.build(inner.source, self.target, self.degree + inner.degree, comps)

    def _combine(self, other, op):
        if self.degree != other.degree:
            raise DimensionMismatch(f"cannot combine maps of degrees {self.degree} and {other.degree}")
        mine, theirs = self.as_dict(), other.as_dict()
        comps = {}
        for i in set(mine) | set(theirs):
            comps[i] = op(self.component(i), other.component(i))
        return GradedMap.build(self.source, self.target, self.degree, comps)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self):
        return GradedMap(self.source, self.target, self.degree, tuple((i, -m) for i, m in self.components))

    def scale(self, c):
        return GradedMap.build(self.source, self.target, self.degree, {i: m.scale(c) for i, m in self.components})

    def is_zero(self):
        return not self.components

    def differential(self):
        """d(f) = d_Y f + (-1)^(n+1) f d_X"""
        X, Y, n = self.source, self.target, self.degree
        sign = X.field.sign(n + 1)
        comps = {}
        for i, F in self.components:
            comps[i] = comps.get(i, Mat.zeros(X.dim(i), Y.dim(i + n + 1), X.field)) + F @ Y.diff(i + n)
            j = i - 1
            term = (X.diff(j) @ F).scale(sign)
            comps[j] = comps.get(j, Mat.zeros(X.dim(j), Y.dim(j + n + 1), X.field)) + term
        return GradedMap.build(X, Y, n + 1, comps)

    def is_closed(self):
        return self.differential().is_zero()

    def is_chain_map(self):
        return self.degree == 0 and self.is_closed()

    def validate(self, name="map"):
        for i, F in self.components:
            for k, (a, b) in enumerate(zip(self.source.module(i).action,
                                           self.target.module(i + self.degree).action)):
                if a @ F != F @ b:
                    raise InvariantError(name, f"component at degree {i} is not linear for "
                                               f"{self.source.algebra.labels[k]}")
        return self


def identity_map(X):
    return GradedMap.build(X, X, 0, {i: Mat.identity(X.dim(i), X.field) for i in X.degrees})


def zero_map(X, Y, n=0):
    return GradedMap(X, Y, n, ())


@dataclass(frozen=True)
class Homotopy:
    """A witness r with f = d r + r d, i.e. f = d_Hom(r)"""

    map: GradedMap
    witness: GradedMap

    def verify(self):
        return self.witness.differential() == self.map


@dataclass(frozen=True)
class NotNullHomotopic:
    """Certificate that a closed map is not null-homotopic: its nonzero homology class"""

    map: GradedMap
    residual_class: tuple


@dataclass(frozen=True)
class DirectSum:
    complex: BoundedComplex
    injections: tuple
    projections: tuple


def direct_sum(Xs):
    """
    Degreewise direct sum with its biproduct maps

    Returns:
        DirectSum: the sum and, for each summand, injection and projection
    """
    if not Xs:
        raise DimensionMismatch("direct sum of no complexes")
    A = Xs[0].algebra
    for X in Xs:
        if not same_algebra(X.algebra, A):
            raise AlgebraMismatch("direct sum of complexes over different algebras")
    if len(Xs) == 1:
        X = Xs[0]
        return DirectSum(X, (identity_map(X),), (identity_map(X),))
    lo, hi = min(X.lo for X in Xs), max(X.hi for X in Xs)
    modules = tuple(direct_sum_modules([X.module(i) for X in Xs], A)[0] for i in range(lo, hi + 1))
    diffs = tuple(block_diagonal([X.diff(i) for X in Xs], A.field) for i in range(lo, hi))
    S = BoundedComplex(A, lo, hi, modules, diffs)
    injections, projections = [], []
    for k, X in enumerate(Xs):
        inj, proj = {}, {}
        for i in X.degrees:
            dims = [Z.dim(i) for Z in Xs]
            eye = Mat.identity(X.dim(i), A.field)
            inj[i] = block_matrix({(0, k): eye}, [X.dim(i)], dims, A.field)
            proj[i] = block_matrix({(k, 0): eye}, dims, [X.dim(i)], A.field)
        injections.append(GradedMap.build(X, S, 0, inj))
        projections.append(GradedMap.build(S, X, 0, proj))
    return DirectSum(S, tuple(injections), tuple(projections))


@dataclass(frozen=True)
class ConeTriangle:
    """X -f-> Y -g-> C -h-> X[1] together with the witness for g f ~ 0"""

    map: GradedMap
    cone: BoundedComplex
    inclusion: GradedMap
    projection: GradedMap
    witness: Homotopy

    def verify(self):
        return (self.witness.verify()
                and self.projection.compose(self.inclusion).is_zero()
                and self.inclusion.is_chain_map()
                and self.projection.is_chain_map())


def cone(f):
    """
    Mapping cone of a chain map f: X -> Y

    Returns:
        ConeTriangle: the cone, inclusion g: Y -> C, projection h: C -> X[1]
        and the homotopy r(x) = (x, 0) with g f = d r + r d
    """
    if not f.is_chain_map():
        raise NotChainMap("cone needs a closed map of degree 0")
    X, Y = f.source, f.target
    A = X.algebra
    K = X.field
    lo, hi = min(X.lo - 1, Y.lo), max(X.hi - 1, Y.hi)
    modules, diffs = [], []
    for n in range(lo, hi + 1):
        modules.append(direct_sum_modules([X.module(n + 1), Y.module(n)], A)[0])
    for n in range(lo, hi):
        rows = [X.dim(n + 1), Y.dim(n)]
        cols = [X.dim(n + 2), Y.dim(n + 1)]
        blocks = {(0, 0): -X.diff(n + 1), (0, 1): f.component(n + 1), (1, 1): Y.diff(n)}
        diffs.append(block_matrix(blocks, rows, cols, K))
    C = BoundedComplex(A, lo, hi, tuple(modules), tuple(diffs))
    X1 = shift(X, 1)
    g, h, r = {}, {}, {}
    for n in range(lo, hi + 1):
        dims = [X.dim(n + 1), Y.dim(n)]
        g[n] = block_matrix({(0, 1): Mat.identity(Y.dim(n), K)}, [Y.dim(n)], dims, K)
        h[n] = block_matrix({(0, 0): Mat.identity(X.dim(n + 1), K)}, dims, [X.dim(n + 1)], K)
    for i in X.degrees:
        dims = [X.dim(i), Y.dim(i - 1)]
        r[i] = block_matrix({(0, 0): Mat.identity(X.dim(i), K)}, [X.dim(i)], dims, K)
    inclusion = GradedMap.build(Y, C, 0, {n: m for n, m in g.items() if Y.lo <= n <= Y.hi})
    projection = GradedMap.build(C, X1, 0, {n: m for n, m in h.items() if X1.lo <= n <= X1.hi})
    witness = GradedMap.build(X, C, -1, r)
    return ConeTriangle(f, C, inclusion, projection, Homotopy(inclusion.compose(f), witness))


@dataclass(frozen=True)
class Homology:
    degree: int
    dim: int
    representatives: tuple
    projection: Mat      # ambient x dim; valid on cycles
    cycles: Subspace


class SpaceComplex:
    """A bounded complex of finite-dimensional vector spaces"""

    def __init__(self, field, lo, hi, dims, differentials=None, labels=None):
        self.field = field
        self.lo = lo
        self.hi = hi
        self.dims = {n: dims.get(n, 0) for n in range(lo, hi + 1)}
        self._diffs = dict(differentials or {})
        self.labels = labels or {}
        self._homology = {}

    @property
    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, n):
        return self.dims.get(n, 0)

    def diff(self, n):
        d = self._diffs.get(n)
        if d is None:
            d = Mat.zeros(self.dim(n), self.dim(n + 1), self.field)
        return d

    def validate(self, name="complex"):
        for n in range(self.lo, self.hi):
            if self.diff(n).shape != (self.dim(n), self.dim(n + 1)):
                raise InvariantError(name, f"differential in degree {n} has shape {self.diff(n).shape}")
            if n + 1 < self.hi and not (self.diff(n) @ self.diff(n + 1)).is_zero():
                raise InvariantError(name, f"d^{n + 1} d^{n} != 0 in degree {n}")
        return self

    def homology(self, n):
        if n not in self._homology:
            self._homology[n] = _compute_homology(self, n)
        return self._homology[n]

    def cohomology_dims(self, window=None):
        lo, hi = window if window is not None else (self.lo, self.hi)
        return {n: self.homology(n).dim for n in range(lo, hi + 1)}


def _compute_homology(S, n):
    d = S.dim(n)
    K = S.field
    if d == 0:
        return Homology(n, 0, (), Mat.zeros(0, 0, K), Subspace(K, 0, (), ()))
    _, kernel = rank_kernel(S.diff(n))
    cycles = Subspace.span(kernel, d, K)
    boundaries = S.diff(n - 1).row_list()
    reps, projection = quotient_basis(list(cycles.basis), boundaries, K, ambient=d)
    return Homology(n, len(reps), tuple(reps), projection, cycles)


def homology(S, n):
    """
    H^n = ker d^n / im d^(n-1)

    Returns:
        Homology: dimension, cycle representatives and the projection from
        cycles to homology coordinates
    """
    if isinstance(S, BoundedComplex):
        S = S.underlying_space()
    return S.homology(n)


@dataclass(frozen=True)
class HomBlock:
    source_degree: int
    space: HomSpace
    offset: int


class HomComplex(SpaceComplex):
    """
    Hom_A(X, Y): degree n is the sum over i of Hom_A(X^i, Y^(i+n))

    Basis vectors are ordered by source degree, then by Hom-space basis order.
    """

    def __init__(self, X, Y):
        if not same_algebra(X.algebra, Y.algebra):
            raise AlgebraMismatch("Hom complex between complexes over different algebras")
        self.source = X
        self.target = Y
        lo, hi = Y.lo - X.hi, Y.hi - X.lo
        self.blocks = {}
        dims, labels = {}, {}
        for n in range(lo, hi + 1):
            by_source, offset = {}, 0
            for i in X.degrees:
                if Y.lo <= i + n <= Y.hi:
                    space = hom_basis(X.module(i), Y.module(i + n))
                    if space.dim:
                        by_source[i] = HomBlock(i, space, offset)
                        offset += space.dim
            self.blocks[n] = by_source
            dims[n] = offset
            labels[n] = [f"{b.source_degree}>{b.source_degree + n}#{k}"
                         for b in by_source.values() for k in range(b.space.dim)]
        super().__init__(X.field, lo, hi, dims, labels=labels)
        self._solvers = {}
        self._basis_cache = {}

    def diff(self, n):
        if n not in self._diffs:
            self._diffs[n] = self._build_differential(n)
        return self._diffs[n]

    def _build_differential(self, n):
        K = self.field
        rows, cols = self.dim(n), self.dim(n + 1)
        if rows == 0 or cols == 0:
            return Mat.zeros(rows, cols, K)
        X, Y = self.source, self.target
        sign = K.sign(n + 1)
        targets = self.blocks.get(n + 1, {})
        entries = []
        for i, block in self.blocks[n].items():
            for F in block.space.matrices:
                row = [K.zero] * cols
                tgt = targets.get(i)
                if tgt is not None:
                    for k, c in enumerate(tgt.space.coordinates(F @ Y.diff(i + n))):
                        row[tgt.offset + k] += c
                tgt = targets.get(i - 1)
                if tgt is not None:
                    for k, c in enumerate(tgt.space.coordinates(X.diff(i - 1) @ F)):
                        if c:
                            row[tgt.offset + k] += sign * c
                entries.extend(row)
        return Mat(rows, cols, tuple(entries), K)

    def basis_element(self, n, index):
        """(source degree, matrix) of the index-th basis vector in degree n"""
        key = (n, index)
        if key not in self._basis_cache:
            for block in self.blocks[n].values():
                if block.offset <= index < block.offset + block.space.dim:
                    self._basis_cache[key] = (block.source_degree, block.space.matrices[index - block.offset])
                    break
        return self._basis_cache[key]

    def components(self, n, vec):
        """dict source degree -> Mat for a coordinate vector in degree n"""
        comps = {}
        for i, block in self.blocks.get(n, {}).items():
            coeffs = vec[block.offset:block.offset + block.space.dim]
            if any(coeffs):
                comps[i] = block.space.combine(coeffs)
        return comps

    def vector_from_components(self, n, comps):
        v = [self.field.zero] * self.dim(n)
        for i, m in comps.items():
            block = self.blocks.get(n, {}).get(i)
            if block is None:
                if not m.is_zero():
                    raise InvariantError("hom complex", f"component at degree {i} outside Hom^{n}")
                continue
            for k, c in enumerate(block.space.coordinates(m)):
                v[block.offset + k] = c
        return tuple(v)

    def to_map(self, n, vec):
        return GradedMap.build(self.source, self.target, n, self.components(n, vec))

    def coordinates(self, f):
        if f.degree not in self.blocks:
            return ()
        return self.vector_from_components(f.degree, f.as_dict())

    def boundary_solver(self, n):
        if n not in self._solvers:
            self._solvers[n] = LinearSolver(self.diff(n - 1))
        return self._solvers[n]


@lru_cache(maxsize=256)
def hom_complex(X, Y):
    return HomComplex(X, Y)


def compose_vectors(outer, p, u, inner, q, v, result):
    """
    Coordinates of u after v

    u is a degree-p vector of outer = Hom(Y, Z), v a degree-q vector of
    inner = Hom(X, Y); the result is a degree p+q vector of result = Hom(X, Z).
    """
    n = p + q
    if result.dim(n) == 0:
        return zero_vector(result.dim(n), result.field)
    u_comps = outer.components(p, u)
    comps = {}
    for i, V in inner.components(q, v).items():
        U = u_comps.get(i + q)
        if U is not None:
            prod = V @ U
            comps[i] = comps[i] + prod if i in comps else prod
    return result.vector_from_components(n, comps)


@dataclass(frozen=True)
class HomotopyHom:
    dim: int
    representatives: tuple


def homotopy_hom(X, Y, n):
    """
    Hom_K(X, Y[n]) as H^n of the Hom complex

    Returns:
        HomotopyHom: dimension and closed degree-n representatives
    """
    H = hom_complex(X, Y)
    h = H.homology(n)
    return HomotopyHom(h.dim, tuple(H.to_map(n, rep) for rep in h.representatives))


def null_homotopy_witness(f):
    """
    Solve f = d r + r d

    Returns:
        Homotopy or NotNullHomotopic
    """
    if not f.is_closed():
        raise NotChainMap(f"map of degree {f.degree} is not closed")
    H = hom_complex(f.source, f.target)
    n = f.degree
    v = H.coordinates(f)
    if not any(v):
        return Homotopy(f, zero_map(f.source, f.target, n - 1))
    solution = H.boundary_solver(n).solve(v)
    if solution is None:
        return NotNullHomotopic(f, H.homology(n).projection.apply(v))
    return Homotopy(f, H.to_map(n - 1, solution))


@dataclass(frozen=True)
class HomotopyEquivalence:
    passed: bool
    source_witness: Optional[Homotopy]
    target_witness: Optional[Homotopy]


def homotopy_equivalence(f, g):
    """Witnesses for id - g f ~ 0 and id - f g ~ 0, for chain maps f: X -> Y and g: Y -> X"""
    left = null_homotopy_witness(identity_map(f.source) - g.compose(f))
    right = null_homotopy_witness(identity_map(f.target) - f.compose(g))
    passed = isinstance(left, Homotopy) and isinstance(right, Homotopy)
    return HomotopyEquivalence(passed,
                               left if isinstance(left, Homotopy) else None,
                               right if isinstance(right, Homotopy) else None)


@dataclass(frozen=True)
class ContractibleHull:
    """The hull H = X (+) X<1> with 0 -> X -> H -> X[1] -> 0 and its graded splittings"""

    source: BoundedComplex
    hull: BoundedComplex
    inclusion: GradedMap
    projection: GradedMap
    retraction: GradedMap
    section: GradedMap


def contractible_hull(X):
    """
    H^n = X^n (+) X^(n+1) with d(x, y) = (y, 0)

    The unit x -> (x, d x) and the projection (x, y) -> y - d x are chain
    maps; the retraction (x, y) -> x and section z -> (0, z) split the
    sequence as graded modules only.
    """
    A, K = X.algebra, X.field
    lo, hi = X.lo - 1, X.hi
    modules = tuple(direct_sum_modules([X.module(n), X.module(n + 1)], A)[0] for n in range(lo, hi + 1))
    diffs = []
    for n in range(lo, hi):
        rows = [X.dim(n), X.dim(n + 1)]
        cols = [X.dim(n + 1), X.dim(n + 2)]
        diffs.append(block_matrix({(1, 0): Mat.identity(X.dim(n + 1), K)}, rows, cols, K))
    H = BoundedComplex(A, lo, hi, modules, tuple(diffs))
    X1 = shift(X, 1)
    inc, proj, ret, sec = {}, {}, {}, {}
    for n in X.degrees:
        dims = [X.dim(n), X.dim(n + 1)]
        inc[n] = block_matrix({(0, 0): Mat.identity(X.dim(n), K), (0, 1): X.diff(n)}, [X.dim(n)], dims, K)
        ret[n] = block_matrix({(0, 0): Mat.identity(X.dim(n), K)}, dims, [X.dim(n)], K)
    for n in range(lo, hi + 1):
        if X1.lo <= n <= X1.hi:
            dims = [X.dim(n), X.dim(n + 1)]
            proj[n] = block_matrix({(0, 0): -X.diff(n), (1, 0): Mat.identity(X.dim(n + 1), K)},
                                   dims, [X.dim(n + 1)], K)
            sec[n] = block_matrix({(0, 1): Mat.identity(X.dim(n + 1), K)}, [X.dim(n + 1)], dims, K)
    return ContractibleHull(
        source=X,
        hull=H,
        inclusion=GradedMap.build(X, H, 0, inc),
        projection=GradedMap.build(H, X1, 0, proj),
        retraction=GradedMap.build(H, X, 0, ret),
        section=GradedMap.build(X1, H, 0, sec),
    )


# Bimodule complexes and tensor products

def zero_bimodule(left, right):
    return FDBimodule(left, right, 0,
                      tuple(Mat.zeros(0, 0, right.field) for _ in range(left.dim)),
                      tuple(Mat.zeros(0, 0, right.field) for _ in range(right.dim)))


@dataclass(frozen=True)
class BimoduleComplex:
    """A bounded complex of (left, right)-bimodules with bilinear differentials"""

    left: object
    right: object
    lo: int
    hi: int
    modules: tuple
    differentials: tuple

    @property
    def field(self):
        return self.right.field

    @property
    def degrees(self):
        return range(self.lo, self.hi + 1)

    def module(self, i):
        if self.lo <= i <= self.hi:
            return self.modules[i - self.lo]
        return zero_bimodule(self.left, self.right)

    def dim(self, i):
        return self.module(i).dim

    def diff(self, i):
        if self.lo <= i < self.hi:
            return self.differentials[i - self.lo]
        return Mat.zeros(self.dim(i), self.dim(i + 1), self.field)

    def right_complex(self):
        return BoundedComplex(self.right, self.lo, self.hi,
                              tuple(m.right_module() for m in self.modules), self.differentials)

    def left_complex(self):
        """The left action read as a complex of right modules over the opposite algebra"""
        return BoundedComplex(self.left.opposite, self.lo, self.hi,
                              tuple(m.left_module() for m in self.modules), self.differentials)

    def validate(self, name="bimodule complex"):
        for i in self.degrees:
            self.module(i).validate(f"{name} (degree {i})")
        self.right_complex().validate(name)
        self.left_complex().validate(name)
        return self


def bimodule_stalk(B, degree=0):
    return BimoduleComplex(B.left, B.right, degree, degree, (B,), ())


@dataclass(frozen=True)
class TensorTerm:
    p_degree: int
    y_degree: int
    complement: Mat     # chosen k-tensor basis vectors of the quotient, as rows
    projection: Mat     # k-tensors -> quotient coordinates
    offset: int


@dataclass
class TensorProduct:
    """P (x)_A Y for a right A-complex P and an (A, B)-bimodule complex Y"""

    left: BoundedComplex
    right: BimoduleComplex
    complex: BoundedComplex
    terms: dict

    def term(self, i, j):
        for t in self.terms.get(i + j, []):
            if t.p_degree == i:
                return t
        return None


def _tensor_term(P_mod, Y_mod, A, B):
    """Quotient of P (x)_k Y by (p a) (x) y - p (x) (a y); returns (complement, projection, module)"""
    K = A.field
    a, b = P_mod.dim, Y_mod.dim
    n = a * b
    relations = []
    eye_a, eye_b = Mat.identity(a, K), Mat.identity(b, K)
    for t in range(A.dim):
        rel = kron(P_mod.action[t], eye_b) - kron(eye_a, Y_mod.left_action[t])
        relations.extend(r for r in rel.row_list() if any(r))
    whole = [unit_vector(n, k, K) for k in range(n)]
    complement, projection = quotient_basis(whole, relations, K, ambient=n)
    C = Mat.from_vectors(complement, n, K) if complement else Mat.zeros(0, n, K)
    actions = tuple(C @ kron(eye_a, Y_mod.right_action[s]) @ projection for s in range(B.dim))
    return C, projection, FDModule(B, len(complement), actions)


def tensor_complex(P, Y):
    """
    Total complex of P (x)_A Y

    (P (x) Y)^p is the sum over i of P^i (x)_A Y^(p-i), each term the quotient
    of the k-tensor product by (p a) (x) y - p (x) (a y); the differential is
    d(p (x) y) = dp (x) y + (-1)^|p| p (x) dy.

    Returns:
        TensorProduct: the complex over B and the per-term quotient data
    """
    if not same_algebra(P.algebra, Y.left):
        raise AlgebraMismatch("tensor product needs P over the left algebra of Y")
    A, B, K = Y.left, Y.right, Y.field
    data = {}
    for i in P.degrees:
        for j in Y.degrees:
            if P.dim(i) and Y.dim(j):
                data[(i, j)] = _tensor_term(P.module(i), Y.module(j), A, B)
    lo, hi = P.lo + Y.lo, P.hi + Y.hi
    terms, modules = {}, []
    for p in range(lo, hi + 1):
        entries, offset, mods = [], 0, []
        for i in P.degrees:
            key = (i, p - i)
            if key in data and data[key][2].dim:
                C, proj, mod = data[key]
                entries.append(TensorTerm(i, p - i, C, proj, offset))
                offset += mod.dim
                mods.append(mod)
        terms[p] = entries
        modules.append(direct_sum_modules(mods, B)[0])
    diffs = []
    for p in range(lo, hi):
        src, tgt = terms[p], terms[p + 1]
        tgt_index = {(t.p_degree, t.y_degree): k for k, t in enumerate(tgt)}
        blocks = {}
        for r, t in enumerate(src):
            i, j = t.p_degree, t.y_degree
            a, b = P.dim(i), Y.dim(j)
            k = tgt_index.get((i + 1, j))
            if k is not None:
                blocks[(r, k)] = t.complement @ kron(P.diff(i), Mat.identity(b, K)) @ tgt[k].projection
            k = tgt_index.get((i, j + 1))
            if k is not None:
                m = t.complement @ kron(Mat.identity(a, K), Y.diff(j)) @ tgt[k].projection
                blocks[(r, k)] = blocks[(r, k)] + m.scale(K.sign(i)) if (r, k) in blocks else m.scale(K.sign(i))
        diffs.append(block_matrix(blocks, [t.complement.rows for t in src],
                                  [t.complement.rows for t in tgt], K))
    T = BoundedComplex(B, lo, hi, tuple(modules), tuple(diffs))
    logger.info(f"Tensor complex built with dims {T.dims()}")
    return TensorProduct(P, Y, T, terms)


def tensor_map(source, target, f):
    """f (x) 1 between tensor products built from the same bimodule complex"""
    K = f.source.field
    n = f.degree
    comps = {}
    for p, src_terms in source.terms.items():
        tgt_terms = target.terms.get(p + n, [])
        tgt_index = {(t.p_degree, t.y_degree): k for k, t in enumerate(tgt_terms)}
        blocks = {}
        for r, t in enumerate(src_terms):
            k = tgt_index.get((t.p_degree + n, t.y_degree))
            F = f.as_dict().get(t.p_degree)
            if k is None or F is None:
                continue
            b = source.right.dim(t.y_degree)
            blocks[(r, k)] = t.complement @ kron(F, Mat.identity(b, K)) @ tgt_terms[k].projection
        if blocks:
            comps[p] = block_matrix(blocks, [t.complement.rows for t in src_terms],
                                    [t.complement.rows for t in tgt_terms], K)
    return GradedMap.build(source.complex, target.complex, n, comps)
