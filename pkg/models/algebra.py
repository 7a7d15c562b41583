"""
Algebras and Modules - Derived Chronicles

This module handles finite-dimensional algebras (from structure constants or
from a quiver with relations), their right modules and bimodules given by
action matrices, Hom spaces, radicals and projective covers.

Row convention: a module element is a row vector v and the action of an
algebra element a is the matrix product v @ rho(a).
"""

import logging
import random
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional

from utils.errors import (
    AlgebraMismatch,
    AssociativityViolation,
    DimensionMismatch,
    InvariantError,
    ModuleLawViolation,
    NonNilpotent,
    UnitViolation,
    UnsupportedRadical,
)
from utils.linalg import (
    RATIONALS,
    FieldSpec,
    Mat,
    SpanTracker,
    Subspace,
    _rref,
    block_diagonal,
    inverse,
    lincomb,
    quotient_basis,
    rank_kernel,
    solution_space,
    unit_vector,
    zero_vector,
)

logger = logging.getLogger(__name__)

ISOMORPHISM_ATTEMPTS = 24


@dataclass(frozen=True)
class QuiverMeta:
    """Path data of a quiver-presented algebra, indexed by basis position"""

    vertices: tuple   # basis index of each vertex idempotent
    arrows: tuple     # basis index of each arrow
    lengths: tuple    # path length of each basis element
    sources: tuple    # source vertex of each basis element
    targets: tuple

    def opposite(self):
        return QuiverMeta(self.vertices, self.arrows, self.lengths, self.targets, self.sources)


@dataclass(frozen=True)
class FDAlgebra:
    """
    A finite-dimensional unital associative algebra

    mult[i][j] is the coordinate vector of b_i * b_j.
    """

    field: FieldSpec
    labels: tuple
    mult: tuple
    unit: tuple
    quiver_meta: Optional[QuiverMeta] = None

    @property
    def dim(self):
        return len(self.labels)

    def basis_vector(self, i):
        return unit_vector(self.dim, i, self.field)

    def index(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no basis element labelled {label!r}")

    def multiply(self, u, v):
        zero = self.field.zero
        acc = [zero] * self.dim
        for i, a in enumerate(u):
            if not a:
                continue
            row = self.mult[i]
            for j, b in enumerate(v):
                if not b:
                    continue
                ab = a * b
                for k, c in enumerate(row[j]):
                    if c:
                        acc[k] += ab * c
        return tuple(acc)

    @cached_property
    def right_basis_matrices(self):
        d = self.dim
        return tuple(Mat(d, d, tuple(c for j in range(d) for c in self.mult[j][i]), self.field)
                     for i in range(d))

    @cached_property
    def left_basis_matrices(self):
        d = self.dim
        return tuple(Mat(d, d, tuple(c for j in range(d) for c in self.mult[i][j]), self.field)
                     for i in range(d))

    def right_mult_matrix(self, u):
        """Matrix of x -> x * u"""
        return _combine_matrices(u, self.right_basis_matrices, self.dim, self.field)

    def left_mult_matrix(self, u):
        """Matrix of x -> u * x"""
        return _combine_matrices(u, self.left_basis_matrices, self.dim, self.field)

    def check_axioms(self):
        d = self.dim
        for i in range(d):
            for j in range(d):
                if len(self.mult[i][j]) != d:
                    raise DimensionMismatch(f"product b{i}*b{j} has {len(self.mult[i][j])} coordinates, expected {d}")
        for i in range(d):
            bi = self.basis_vector(i)
            if self.multiply(self.unit, bi) != bi or self.multiply(bi, self.unit) != bi:
                raise UnitViolation(f"unit does not fix basis element {self.labels[i]}")
        for i in range(d):
            for j in range(d):
                ij = self.mult[i][j]
                for k in range(d):
                    lhs = self.multiply(ij, self.basis_vector(k))
                    rhs = self.multiply(self.basis_vector(i), self.mult[j][k])
                    if lhs != rhs:
                        raise AssociativityViolation(i, j, k, (self.format_element(lhs), self.format_element(rhs)))

    @cached_property
    def opposite(self):
        d = self.dim
        mult = tuple(tuple(self.mult[j][i] for j in range(d)) for i in range(d))
        meta = self.quiver_meta.opposite() if self.quiver_meta else None
        return FDAlgebra(self.field, self.labels, mult, self.unit, meta)

    def element(self, coeffs):
        """Element from a dict label -> coefficient"""
        v = list(zero_vector(self.dim, self.field))
        for label, c in coeffs.items():
            v[self.index(label)] += self.field.element(c)
        return tuple(v)

    def format_element(self, v):
        terms = []
        for label, c in zip(self.labels, v):
            if c:
                coeff = self.field.format(c)
                terms.append(label if coeff == "1" else f"{coeff}*{label}")
        return " + ".join(terms) if terms else "0"


def _combine_matrices(coeffs, mats, n, field):
    entries = lincomb(coeffs, [m.entries for m in mats], n * n, field)
    return Mat(n, n, entries, field)


def same_algebra(a, b):
    return a is b or a == b


def build_algebra_from_structure_constants(field, labels, mult, unit):
    """
    Build an algebra from a multiplication table

    Args:
        field (FieldSpec): the ground field
        labels (list): basis labels b_0..b_{d-1}
        mult: d x d x d nested sequence, mult[i][j][k] the coefficient of b_k in b_i*b_j
        unit: coordinates of the identity

    Returns:
        FDAlgebra: the algebra, after associativity and unit checks
    """
    d = len(labels)
    if len(mult) != d or any(len(row) != d for row in mult):
        raise DimensionMismatch(f"multiplication table must be {d}x{d}")
    table = tuple(tuple(tuple(field.element(c) for c in mult[i][j]) for j in range(d)) for i in range(d))
    if len(unit) != d:
        raise DimensionMismatch(f"unit has {len(unit)} coordinates, expected {d}")
    algebra = FDAlgebra(field, tuple(labels), table, tuple(field.element(c) for c in unit))
    algebra.check_axioms()
    logger.info(f"Built structure-constant algebra of dimension {d} over {field}")
    return algebra


@dataclass(frozen=True)
class QuiverPresentation:
    """
    A quiver with relations

    Vertices are numbered from 0. A path is a tuple of arrow indices read
    left to right; each relation is a tuple of (path, coefficient) terms.
    """

    field: FieldSpec
    vertex_count: int
    arrows: tuple           # (label, source, target)
    relations: tuple
    nilpotency_cap: int
    vertex_labels: tuple = ()

    def vertex_label(self, v):
        if self.vertex_labels:
            return self.vertex_labels[v]
        return "e" if self.vertex_count == 1 else f"e{v + 1}"

    def path_label(self, path):
        parts = []
        k = 0
        while k < len(path):
            run = 1
            while k + run < len(path) and path[k + run] == path[k]:
                run += 1
            label = self.arrows[path[k]][0]
            parts.append(label if run == 1 else f"{label}^{run}")
            k += run
        return "*".join(parts)

    def source(self, path):
        return self.arrows[path[0]][1]

    def target(self, path):
        return self.arrows[path[-1]][2]

    def validate(self):
        if self.vertex_count < 1:
            raise InvariantError("quiver", "needs at least one vertex")
        for label, s, t in self.arrows:
            if not (0 <= s < self.vertex_count and 0 <= t < self.vertex_count):
                raise InvariantError("quiver", f"arrow {label} joins missing vertices")
        for rel in self.relations:
            if not rel:
                raise InvariantError("quiver", "empty relation")
            for path, _ in rel:
                if len(path) < 2:
                    raise InvariantError("quiver", "relations must be admissible (paths of length >= 2)")
                for a, b in zip(path, path[1:]):
                    if self.arrows[a][2] != self.arrows[b][1]:
                        raise InvariantError("quiver", f"relation path {self.path_label(path)} is not composable")
                if len(path) > self.nilpotency_cap:
                    raise InvariantError("quiver", f"relation path longer than the nilpotency cap {self.nilpotency_cap}")


def _concat(q, p1, p2, cap):
    """Concatenate paths given as (source vertex, arrows); None when zero or too long"""
    s1, a1 = p1
    s2, a2 = p2
    end = s1 if not a1 else q.arrows[a1[-1]][2]
    if end != s2 or len(a1) + len(a2) > cap:
        return None
    return (s1, a1 + a2)


def build_algebra_from_quiver(q):
    """
    Build kQ/I from a quiver presentation

    Paths up to the nilpotency cap are enumerated and the ideal generated by
    the relations is reduced modulo paths longer than the cap. The leading
    monomials (longest, then lexicographically largest) are eliminated; the
    remaining paths form the basis.
    """
    q.validate()
    field = q.field
    cap = q.nilpotency_cap
    paths = [(v, ()) for v in range(q.vertex_count)]
    frontier = list(paths)
    for _ in range(cap):
        grown = []
        for s, arrows in frontier:
            end = s if not arrows else q.arrows[arrows[-1]][2]
            for a, (_, src, _) in enumerate(q.arrows):
                if src == end:
                    grown.append((s, arrows + (a,)))
        paths.extend(grown)
        frontier = grown
    order = sorted(paths, key=lambda p: (len(p[1]), p[1], p[0]), reverse=True)
    column = {p: c for c, p in enumerate(order)}
    n = len(order)

    generators = []
    for rel in q.relations:
        shortest = min(len(t) for t, _ in rel)
        for u in paths:
            if len(u[1]) + shortest > cap:
                continue
            for w in paths:
                if len(u[1]) + len(w[1]) + shortest > cap:
                    continue
                vec = {}
                for t, coeff in rel:
                    left = _concat(q, u, (q.source(t), t), cap)
                    full = _concat(q, left, w, cap) if left is not None else None
                    if full is not None:
                        c = column[full]
                        vec[c] = vec.get(c, field.zero) + coeff
                row = [field.zero] * n
                for c, a in vec.items():
                    row[c] = a
                if any(row):
                    generators.append(row)
    reduced, pivots = _rref(generators, n, field)
    pivot_row = dict(zip(pivots, reduced))

    for p in paths:
        if len(p[1]) == cap:
            row = pivot_row.get(column[p])
            if row is None or sum(1 for a in row if a) != 1:
                raise NonNilpotent(
                    f"path {q.path_label(p[1])} of length {cap} survives the relations; raise the nilpotency cap"
                )

    standard = sorted((p for p in paths if column[p] not in pivot_row), key=lambda p: (len(p[1]), p[1], p[0]))
    index = {p: k for k, p in enumerate(standard)}
    d = len(standard)

    def normal_form(p):
        if p is None:
            return zero_vector(d, field)
        c = column[p]
        if c not in pivot_row:
            return unit_vector(d, index[p], field)
        v = [field.zero] * d
        row = pivot_row[c]
        for col, a in enumerate(row):
            if a and col != c:
                v[index[order[col]]] -= a
        return tuple(v)

    mult = tuple(tuple(normal_form(_concat(q, p1, p2, cap)) for p2 in standard) for p1 in standard)
    unit = lincomb([field.one] * q.vertex_count,
                   [unit_vector(d, index[(v, ())], field) for v in range(q.vertex_count)], d, field)
    labels = tuple(q.vertex_label(p[0]) if not p[1] else q.path_label(p[1]) for p in standard)

    def endpoint(p):
        return p[0] if not p[1] else q.arrows[p[1][-1]][2]

    meta = QuiverMeta(
        vertices=tuple(index[(v, ())] for v in range(q.vertex_count)),
        arrows=tuple(index[(src, (a,))] for a, (_, src, _) in enumerate(q.arrows)),
        lengths=tuple(len(p[1]) for p in standard),
        sources=tuple(p[0] for p in standard),
        targets=tuple(endpoint(p) for p in standard),
    )
    algebra = FDAlgebra(field, labels, mult, unit, meta)
    algebra.check_axioms()
    logger.info(f"Built quiver algebra of dimension {d} with basis {', '.join(labels)}")
    return algebra


def radical(A):
    """
    Basis of the Jacobson radical

    Quiver-presented algebras: the span of all paths of positive length.
    Structure constants over Q: the kernel of the trace form trace(L_{xy}).
    """
    field = A.field
    if A.quiver_meta is not None:
        vectors = [A.basis_vector(i) for i, l in enumerate(A.quiver_meta.lengths) if l >= 1]
        return Subspace.span(vectors, A.dim, field)
    if field.kind != RATIONALS:
        raise UnsupportedRadical("the radical of a structure-constant algebra is only computed over Q")
    traces = [sum((A.mult[l][k][k] for k in range(A.dim)), field.zero) for l in range(A.dim)]
    gram = Mat(A.dim, A.dim, tuple(sum((c * t for c, t in zip(A.mult[i][j], traces)), field.zero)
                                   for i in range(A.dim) for j in range(A.dim)), field)
    _, kernel = rank_kernel(gram)
    return Subspace.span(kernel, A.dim, field)


@dataclass(frozen=True)
class FDModule:
    """A finite-dimensional right module: one action matrix per algebra basis element"""

    algebra: FDAlgebra
    dim: int
    action: tuple

    @property
    def field(self):
        return self.algebra.field

    def action_of(self, a):
        return _combine_matrices(a, self.action, self.dim, self.field)

    def act(self, v, a):
        """v * a for a module vector v and algebra coordinates a"""
        acc = zero_vector(self.dim, self.field)
        out = list(acc)
        for i, c in enumerate(a):
            if c:
                w = self.action[i].apply(v)
                for j, x in enumerate(w):
                    if x:
                        out[j] += c * x
        return tuple(out)

    def validate(self, name="module"):
        A = self.algebra
        if len(self.action) != A.dim:
            raise InvariantError(name, f"needs {A.dim} action matrices, got {len(self.action)}")
        for i, m in enumerate(self.action):
            if m.shape != (self.dim, self.dim):
                raise InvariantError(name, f"action of {A.labels[i]} has shape {m.shape}")
        if self.action_of(A.unit) != Mat.identity(self.dim, self.field):
            raise ModuleLawViolation(f"{name}: the unit does not act as the identity")
        for i in range(A.dim):
            for j in range(A.dim):
                if self.action[i] @ self.action[j] != self.action_of(A.mult[i][j]):
                    raise ModuleLawViolation(
                        f"{name}: rho({A.labels[i]}) rho({A.labels[j]}) != rho({A.labels[i]}*{A.labels[j]})"
                    )
        return self


@lru_cache(maxsize=None)
def zero_module(A):
    return FDModule(A, 0, tuple(Mat.zeros(0, 0, A.field) for _ in range(A.dim)))


def regular_module(A):
    return FDModule(A, A.dim, A.right_basis_matrices)


@dataclass(frozen=True)
class ModuleHom:
    source: FDModule
    target: FDModule
    matrix: Mat

    def validate(self):
        if self.matrix.shape != (self.source.dim, self.target.dim):
            raise DimensionMismatch(f"hom matrix {self.matrix.shape} between modules of dims "
                                    f"{self.source.dim} and {self.target.dim}")
        for i, (a, b) in enumerate(zip(self.source.action, self.target.action)):
            if a @ self.matrix != self.matrix @ b:
                raise InvariantError("module map", f"not linear for basis element {self.source.algebra.labels[i]}")
        return self

    def compose(self, inner):
        """self after inner"""
        return ModuleHom(inner.source, self.target, inner.matrix @ self.matrix)


@dataclass(frozen=True)
class HomSpace:
    """Hom_A(source, target) as a subspace of flattened source.dim x target.dim matrices"""

    source: FDModule
    target: FDModule
    space: Subspace

    @property
    def dim(self):
        return self.space.dim

    @cached_property
    def matrices(self):
        return tuple(Mat(self.source.dim, self.target.dim, v, self.source.field) for v in self.space.basis)

    def coordinates(self, m):
        return self.space.coordinates(m.entries)

    def combine(self, coeffs):
        return Mat(self.source.dim, self.target.dim, self.space.combine(coeffs), self.source.field)


@lru_cache(maxsize=8192)
def hom_basis(M, N):
    if not same_algebra(M.algebra, N.algebra):
        raise AlgebraMismatch("Hom between modules over different algebras")
    field = M.field
    if M.dim == 0 or N.dim == 0:
        return HomSpace(M, N, Subspace(field, M.dim * N.dim, (), ()))
    constraints = [(N.action[i], M.action[i]) for i in range(M.algebra.dim)]
    return HomSpace(M, N, solution_space(constraints, (M.dim, N.dim), field))


def hom_space(M, N):
    """
    Basis of Hom_A(M, N)

    Returns:
        list: ModuleHom basis, solving rho_M(b) F = F rho_N(b)
    """
    return [ModuleHom(M, N, F) for F in hom_basis(M, N).matrices]


def direct_sum_modules(modules, algebra):
    """Degreewise block-diagonal sum; returns (module, offsets)"""
    if not modules:
        return zero_module(algebra), []
    for m in modules:
        if not same_algebra(m.algebra, algebra):
            raise AlgebraMismatch("direct sum of modules over different algebras")
    if len(modules) == 1:
        return modules[0], [0]
    offsets, acc = [], 0
    for m in modules:
        offsets.append(acc)
        acc += m.dim
    actions = tuple(block_diagonal([m.action[i] for m in modules], algebra.field) for i in range(algebra.dim))
    return FDModule(algebra, acc, actions), offsets


def generated_submodule(M, vectors):
    """Subspace of M spanned by the submodule generated by vectors"""
    tracker = SpanTracker(M.dim, M.field)
    queue = [tuple(v) for v in vectors if tracker.add(v)]
    while queue:
        v = queue.pop()
        for rho in M.action:
            w = rho.apply(v)
            if tracker.add(w):
                queue.append(w)
    return Subspace.span(tracker.dense_rows(), M.dim, M.field)


def submodule(M, sub):
    """The module structure on an invariant Subspace of M"""
    actions = []
    for rho in M.action:
        rows = []
        for s in sub.basis:
            image = rho.apply(s)
            coords = sub.coordinates(image)
            if sub.combine(coords) != image:
                raise InvariantError("submodule", "subspace is not closed under the action")
            rows.append(coords)
        actions.append(Mat.from_vectors(rows, sub.dim, M.field) if rows else Mat.zeros(0, 0, M.field))
    return FDModule(M.algebra, sub.dim, tuple(actions))


def quotient_module(M, vectors):
    """
    M / (submodule generated by vectors)

    Returns:
        tuple: (quotient module, projection ModuleHom M -> quotient)
    """
    sub = generated_submodule(M, vectors)
    whole = [unit_vector(M.dim, i, M.field) for i in range(M.dim)]
    complement, projection = quotient_basis(whole, list(sub.basis), M.field, ambient=M.dim)
    c = len(complement)
    C = Mat.from_vectors(complement, M.dim, M.field) if complement else Mat.zeros(0, M.dim, M.field)
    actions = tuple(C @ rho @ projection for rho in M.action)
    Q = FDModule(M.algebra, c, actions)
    return Q, ModuleHom(M, Q, projection)


def cyclic_quotient(A, generators):
    """The right module A / (g_1 A + ... + g_k A)"""
    Q, _ = quotient_module(regular_module(A), generators)
    return Q


def kernel_module(f):
    """
    Kernel of a module map

    Returns:
        tuple: (kernel module, inclusion Mat kernel -> source)
    """
    _, basis = rank_kernel(f.matrix)
    sub = Subspace.span(basis, f.source.dim, f.source.field)
    K = submodule(f.source, sub)
    return K, sub.as_mat()


def radical_submodule(M):
    """The subspace M * rad(A)"""
    rad = radical(M.algebra)
    vectors = []
    for r in rad.basis:
        rho = M.action_of(r)
        vectors.extend(rho.row_list())
    return Subspace.span(vectors, M.dim, M.field)


@lru_cache(maxsize=None)
def vertex_projective(A, v):
    """
    The indecomposable projective e_v A

    Returns:
        tuple: (module, basis vectors of e_v A inside A)
    """
    e = A.basis_vector(A.quiver_meta.vertices[v])
    rows = [A.multiply(e, A.basis_vector(j)) for j in range(A.dim)]
    sub = Subspace.span(rows, A.dim, A.field)
    return submodule(regular_module(A), sub), sub.basis


def projective_cover(M, minimal=True, redundant=0):
    """
    A projective module P with a surjection onto M

    Quiver-presented algebras get the minimal cover, a sum of e_v A with one
    summand per top basis vector at vertex v. Otherwise P = A^t with t the
    dimension of the top (over Q), or t = dim M when no radical is available.
    With minimal=False the cover is free and redundant extra copies of the
    first generator are added.

    Returns:
        tuple: (P, surjection ModuleHom P -> M)
    """
    A = M.algebra
    if M.dim == 0:
        raise InvariantError("projective cover", "module is zero")
    try:
        top_tracker = SpanTracker(M.dim, M.field)
        for r in radical_submodule(M).basis:
            top_tracker.add(r)
    except UnsupportedRadical:
        logger.warning("No radical available; covering by a free module on a basis")
        top_tracker = SpanTracker(M.dim, M.field)

    summands = []   # (module, basis of summand inside A, generator vector in M)
    if A.quiver_meta is not None and minimal:
        for v, idx in enumerate(A.quiver_meta.vertices):
            for row in M.action[idx].row_list():
                if top_tracker.add(row):
                    P_v, embedding = vertex_projective(A, v)
                    summands.append((P_v, embedding, row))
    else:
        R = regular_module(A)
        free_basis = tuple(A.basis_vector(j) for j in range(A.dim))
        for i in range(M.dim):
            row = unit_vector(M.dim, i, M.field)
            if top_tracker.add(row):
                summands.append((R, free_basis, row))
        if not minimal:
            summands.extend([summands[0]] * redundant)

    P, _ = direct_sum_modules([s[0] for s in summands], A)
    rows = []
    for _, embedding, generator in summands:
        for w in embedding:
            rows.append(M.act(generator, w))
    surjection = ModuleHom(P, M, Mat.from_vectors(rows, M.dim, M.field))
    if surjection.matrix.rank() != M.dim:
        raise InvariantError("projective cover", "constructed map is not surjective")
    return P, surjection


def syzygy(M, minimal=True):
    """Kernel of the projective cover of M, with the induced action"""
    _, cover = projective_cover(M, minimal=minimal)
    K, _ = kernel_module(cover)
    return K


def is_projective(M):
    """True/False for quiver-presented algebras, None when it cannot be decided"""
    if M.dim == 0:
        return True
    if M.algebra.quiver_meta is None:
        return None
    P, _ = projective_cover(M)
    return P.dim == M.dim


def is_isomorphic(M, N):
    """
    Exhibit an isomorphism M -> N

    Returns:
        tuple or None: (f, g) mutually inverse ModuleHoms, or None when no
        invertible map was found in Hom(M, N)
    """
    if M.dim != N.dim:
        return None
    if M.dim == 0:
        f = ModuleHom(M, N, Mat.zeros(0, 0, M.field))
        return f, ModuleHom(N, M, Mat.zeros(0, 0, M.field))
    space = hom_basis(M, N)
    if space.dim == 0:
        return None
    rng = random.Random(0)
    candidates = list(space.matrices)
    candidates.append(space.combine([M.field.one] * space.dim))
    for _ in range(ISOMORPHISM_ATTEMPTS):
        candidates.append(space.combine([M.field.element(rng.randint(-5, 5)) for _ in range(space.dim)]))
    for F in candidates:
        if F.rank() == M.dim:
            G = inverse(F)
            return ModuleHom(M, N, F), ModuleHom(N, M, G)
    return None


@dataclass(frozen=True)
class FDBimodule:
    """
    A module with a left action of one algebra and a right action of another

    Left action: b . v = v @ left_action[b]; right action: v . a = v @ right_action[a].
    """

    left: FDAlgebra
    right: FDAlgebra
    dim: int
    left_action: tuple
    right_action: tuple

    @property
    def field(self):
        return self.right.field

    def right_module(self):
        return FDModule(self.right, self.dim, self.right_action)

    def left_module(self):
        """The left action as a right module over the opposite algebra"""
        return FDModule(self.left.opposite, self.dim, self.left_action)

    def left_action_of(self, b):
        return _combine_matrices(b, self.left_action, self.dim, self.field)

    def validate(self, name="bimodule"):
        self.right_module().validate(name)
        self.left_module().validate(name)
        for i, lam in enumerate(self.left_action):
            for j, rho in enumerate(self.right_action):
                if lam @ rho != rho @ lam:
                    raise ModuleLawViolation(
                        f"{name}: left {self.left.labels[i]} and right {self.right.labels[j]} actions do not commute"
                    )
        return self


def regular_bimodule(A):
    return FDBimodule(A, A, A.dim, A.left_basis_matrices, A.right_basis_matrices)
