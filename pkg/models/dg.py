"""
Differential Graded Algebras - Derived Chronicles

This module handles dg algebras and dg modules on a degree window:
endomorphism dg algebras of complexes, opposite algebras, axiom checks,
cohomology rings with the induced product, maps of dg algebras with
quasi-isomorphism verdicts, the canonical maps of a bimodule complex, and
Hom complexes over a dg algebra.

Products are computed on basis pairs and cached as sparse dicts.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

from models.complexes import (
    SpaceComplex,
    TensorProduct,
    compose_vectors,
    hom_complex,
    identity_map,
    tensor_complex,
    tensor_map,
)
from utils.errors import AlgebraMismatch, InvariantError, WindowTooSmall
from utils.linalg import (
    LinearSolver,
    Mat,
    SpanTracker,
    Subspace,
    rank_kernel,
    unit_vector,
    zero_vector,
)

logger = logging.getLogger(__name__)


def intersect_windows(*windows):
    """Intersection of (lo, hi) windows; None entries are ignored"""
    lo, hi = None, None
    for w in windows:
        if w is None:
            continue
        lo = w[0] if lo is None else max(lo, w[0])
        hi = w[1] if hi is None else min(hi, w[1])
    return (lo, hi)


def certified_window(*algebras, window=None):
    """
    Degrees where every algebra is certified

    Truncated algebras contribute their validity window; when none is
    truncated the window spans all their degrees.
    """
    bounded = [L.validity for L in algebras if L.validity is not None]
    if bounded:
        base = intersect_windows(*bounded)
    else:
        base = (min(L.lo for L in algebras), max(L.hi for L in algebras))
    return intersect_windows(base, window)


def _accumulate(acc, coeff, sparse):
    for k, c in sparse.items():
        acc[k] += coeff * c


def _sparse(vec):
    return {k: c for k, c in enumerate(vec) if c}


def _compose_basis(outer, p, i, inner, q, j, result):
    """Sparse coordinates of basis (p, i) of outer after basis (q, j) of inner"""
    sa, U = outer.basis_element(p, i)
    sb, V = inner.basis_element(q, j)
    if sa != sb + q:
        return {}
    block = result.blocks.get(p + q, {}).get(sb)
    if block is None:
        return {}
    coords = block.space.coordinates(V @ U)
    return {block.offset + k: c for k, c in enumerate(coords) if c}


class DGAlgebra:
    """
    A dg algebra on a degree window

    Subclasses provide basis_product(p, i, q, j) as a sparse dict; the
    validity window marks the degrees where truncated inputs are certified;
    None means every degree is exact.
    """

    def __init__(self, space, unit, validity=None, name=""):
        self.space = space
        self.field = space.field
        self.lo = space.lo
        self.hi = space.hi
        self.unit = tuple(unit)
        self.validity = tuple(validity) if validity is not None else None
        self.name = name
        self._products = {}

    @property
    def window(self):
        return self.validity if self.validity is not None else (self.lo, self.hi)

    @property
    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, n):
        return self.space.dim(n)

    def diff(self, n):
        return self.space.diff(n)

    def basis_vector(self, n, k):
        return unit_vector(self.dim(n), k, self.field)

    def basis_product(self, p, i, q, j):
        key = (p, i, q, j)
        if key not in self._products:
            self._products[key] = self._basis_product(p, i, q, j) if self.dim(p + q) else {}
        return self._products[key]

    def _basis_product(self, p, i, q, j):
        raise NotImplementedError

    def multiply(self, p, u, q, v):
        n = p + q
        acc = [self.field.zero] * self.dim(n)
        if not acc:
            return ()
        for i, a in enumerate(u):
            if not a:
                continue
            for j, b in enumerate(v):
                if b:
                    prod = self.basis_product(p, i, q, j)
                    if prod:
                        _accumulate(acc, a * b, prod)
        return tuple(acc)

    def product_table(self):
        """All nonzero basis products: (p, i, q, j) -> coordinate tuple"""
        table = {}
        for p in self.degrees:
            for q in self.degrees:
                if not self.dim(p + q):
                    continue
                for i in range(self.dim(p)):
                    for j in range(self.dim(q)):
                        prod = self.basis_product(p, i, q, j)
                        if prod:
                            vec = [self.field.zero] * self.dim(p + q)
                            _accumulate(vec, self.field.one, prod)
                            table[(p, i, q, j)] = tuple(vec)
        return table

    def total_dim(self):
        return sum(self.dim(n) for n in self.degrees)


class TableDGAlgebra(DGAlgebra):
    """A dg algebra given by an explicit product table"""

    def __init__(self, space, unit, products, validity=None, name=""):
        super().__init__(space, unit, validity, name)
        self.table = {key: tuple(vec) for key, vec in products.items() if any(vec)}

    def _basis_product(self, p, i, q, j):
        vec = self.table.get((p, i, q, j))
        return _sparse(vec) if vec else {}

    def __eq__(self, other):
        if not isinstance(other, DGAlgebra):
            return NotImplemented
        return (self.field == other.field and (self.lo, self.hi) == (other.lo, other.hi)
                and all(self.dim(n) == other.dim(n) for n in self.degrees)
                and all(self.diff(n) == other.diff(n) for n in range(self.lo, self.hi))
                and self.unit == other.unit and self.validity == other.validity
                and self.product_table() == other.product_table())

    __hash__ = None


def dump_dg_algebra(L, name=""):
    """Freeze any dg algebra into a TableDGAlgebra (the workspace dump form)"""
    space = SpaceComplex(L.field, L.lo, L.hi, {n: L.dim(n) for n in L.degrees},
                         {n: L.diff(n) for n in range(L.lo, L.hi)})
    return TableDGAlgebra(space, L.unit, L.product_table(), L.validity, name or L.name)


class EndDGAlgebra(DGAlgebra):
    """
    End(X) = Hom_A(X, X) with composition a b = a after b and unit id_X

    Truncated resolutions (X.truncation = L) are certified on [1, L - 1].
    """

    def __init__(self, X, validity=None, name=""):
        self.complex = X
        self.hom = hom_complex(X, X)
        if validity is None and X.truncation is not None:
            validity = (1, X.truncation - 1)
        super().__init__(self.hom, self.hom.coordinates(identity_map(X)), validity, name)

    def _basis_product(self, p, i, q, j):
        return _compose_basis(self.hom, p, i, self.hom, q, j, self.hom)


def end_dg_algebra(X, validity=None):
    """The endomorphism dg algebra of a bounded complex"""
    L = EndDGAlgebra(X, validity)
    logger.info(f"End dg algebra on [{L.lo}, {L.hi}] with total dimension {L.total_dim()}")
    return L


class OppositeDGAlgebra(DGAlgebra):
    """a *op b = (-1)^(|a||b|) b a"""

    def __init__(self, base):
        self.base = base
        super().__init__(base.space, base.unit, base.validity, f"{base.name}^op" if base.name else "")

    def _basis_product(self, p, i, q, j):
        prod = self.base.basis_product(q, j, p, i)
        if (p * q) % 2 == 0:
            return prod
        return {k: -c for k, c in prod.items()}


class AlgebraAsDG(DGAlgebra):
    """An ordinary algebra as a dg algebra concentrated in degree 0"""

    def __init__(self, A, name=""):
        self.algebra = A
        space = SpaceComplex(A.field, 0, 0, {0: A.dim})
        super().__init__(space, A.unit, None, name)

    def _basis_product(self, p, i, q, j):
        return _sparse(self.algebra.mult[i][j])


@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    failure: str = ""
    witness: tuple = ()


def check_leibniz(L):
    """
    d(ab) = d(a) b + (-1)^p a d(b) on every basis pair whose product lies in the window

    Returns:
        AxiomReport: pass, or the first violating pair with its residual
    """
    K = L.field
    for p in L.degrees:
        for q in L.degrees:
            n = p + q
            if n < L.lo or n > L.hi:
                continue
            for i in range(L.dim(p)):
                a = L.basis_vector(p, i)
                da = L.diff(p).apply(a)
                for j in range(L.dim(q)):
                    b = L.basis_vector(q, j)
                    ab = L.multiply(p, a, q, b)
                    lhs = L.diff(n).apply(ab) if ab else zero_vector(L.dim(n + 1), K)
                    rhs = list(L.multiply(p + 1, da, q, b)) if L.dim(p + 1) else [K.zero] * L.dim(n + 1)
                    if L.dim(q + 1):
                        adb = L.multiply(p, a, q + 1, L.diff(q).apply(b))
                        sign = K.sign(p)
                        rhs = [x + sign * y for x, y in zip(rhs, adb)] if adb else rhs
                    if not rhs:
                        rhs = [K.zero] * L.dim(n + 1)
                    if tuple(lhs) != tuple(rhs):
                        residual = tuple(x - y for x, y in zip(lhs, rhs))
                        return AxiomReport(False, "leibniz", ((p, i), (q, j), residual))
    return AxiomReport(True)


def check_dg_axioms(L, associativity=True):
    """d^2 = 0, unit laws, associativity and Leibniz on basis tuples"""
    K = L.field
    for n in range(L.lo, L.hi - 1):
        if not (L.diff(n) @ L.diff(n + 1)).is_zero():
            return AxiomReport(False, "d^2", (n,))
    if L.dim(0):
        for n in L.degrees:
            for i in range(L.dim(n)):
                e = L.basis_vector(n, i)
                if L.multiply(0, L.unit, n, e) != e or L.multiply(n, e, 0, L.unit) != e:
                    return AxiomReport(False, "unit", ((n, i),))
        if L.dim(1) and any(L.diff(0).apply(L.unit)):
            return AxiomReport(False, "unit", ("d(1) != 0",))
    if associativity:
        for p in L.degrees:
            for q in L.degrees:
                for r in L.degrees:
                    n = p + q + r
                    if not L.dim(n) or not (L.lo <= p + q <= L.hi) or not (L.lo <= q + r <= L.hi):
                        continue
                    for i in range(L.dim(p)):
                        for j in range(L.dim(q)):
                            ab = L.basis_product(p, i, q, j)
                            for k in range(L.dim(r)):
                                bc = L.basis_product(q, j, r, k)
                                lhs = [K.zero] * L.dim(n)
                                rhs = [K.zero] * L.dim(n)
                                for m, c in ab.items():
                                    _accumulate(lhs, c, L.basis_product(p + q, m, r, k))
                                for m, c in bc.items():
                                    _accumulate(rhs, c, L.basis_product(p, i, q + r, m))
                                if lhs != rhs:
                                    return AxiomReport(False, "associativity", ((p, i), (q, j), (r, k)))
    return check_leibniz(L)


@dataclass
class GradedAlgebra:
    """
    A graded algebra on a window: dims, sparse product table, optional unit

    products maps (p, i, q, j) to the coordinates of the product in degree p+q.
    """

    field: object
    dims: dict
    products: dict
    unit: Optional[tuple]
    validity: tuple
    provenance: dict = field(default_factory=dict)

    def dim(self, n):
        return self.dims.get(n, 0)

    def multiply(self, p, u, q, v):
        n = p + q
        acc = [self.field.zero] * self.dim(n)
        for i, a in enumerate(u):
            for j, b in enumerate(v):
                if a and b:
                    prod = self.products.get((p, i, q, j))
                    if prod:
                        for k, c in enumerate(prod):
                            if c:
                                acc[k] += a * b * c
        return tuple(acc)

    def dims_tuple(self, window=None):
        lo, hi = window or self.validity
        return tuple(self.dim(n) for n in range(lo, hi + 1))

    def check_associativity(self):
        degrees = sorted(self.dims)
        for p in degrees:
            for q in degrees:
                for r in degrees:
                    if p + q + r not in self.dims or p + q not in self.dims or q + r not in self.dims:
                        continue
                    for i in range(self.dim(p)):
                        a = unit_vector(self.dim(p), i, self.field)
                        for j in range(self.dim(q)):
                            b = unit_vector(self.dim(q), j, self.field)
                            ab = self.multiply(p, a, q, b)
                            for k in range(self.dim(r)):
                                c = unit_vector(self.dim(r), k, self.field)
                                if self.multiply(p + q, ab, r, c) != self.multiply(p, a, q + r, self.multiply(q, b, r, c)):
                                    return False
        return True

    def check_unit(self):
        if self.unit is None:
            return True
        for n in self.dims:
            for i in range(self.dim(n)):
                e = unit_vector(self.dim(n), i, self.field)
                if self.multiply(0, self.unit, n, e) != e or self.multiply(n, e, 0, self.unit) != e:
                    return False
        return True


def cohomology_ring(L, window=None):
    """
    H^* of a dg algebra with the product induced on cocycle representatives

    Args:
        L (DGAlgebra): the dg algebra
        window (tuple): optional (lo, hi), intersected with the validity window

    Returns:
        GradedAlgebra: dims, products and unit (when degree 0 is in the window)
    """
    lo, hi = intersect_windows(L.window, window)
    if lo > hi:
        raise WindowTooSmall(f"no degrees left in the validity window {L.window} and {window}")
    H = {n: L.space.homology(n) for n in range(lo, hi + 1)}
    products = {}
    for p in range(lo, hi + 1):
        for q in range(lo, hi + 1):
            n = p + q
            if n < lo or n > hi or not H[n].dim:
                continue
            for i, a in enumerate(H[p].representatives):
                for j, b in enumerate(H[q].representatives):
                    prod = L.multiply(p, a, q, b)
                    coords = H[n].projection.apply(prod)
                    if any(coords):
                        products[(p, i, q, j)] = coords
    unit = None
    if lo <= 0 <= hi and H[0].dim:
        unit = H[0].projection.apply(L.unit)
    dims = {n: H[n].dim for n in H}
    logger.info(f"Cohomology ring dims on [{lo}, {hi}]: {[dims[n] for n in range(lo, hi + 1)]}")
    return GradedAlgebra(L.field, dims, products, unit, (lo, hi))


@dataclass(frozen=True)
class DegreeRank:
    degree: int
    source_dim: int
    target_dim: int
    rank: int

    @property
    def bijective(self):
        return self.source_dim == self.target_dim == self.rank


@dataclass(frozen=True)
class QuasiIsoVerdict:
    passed: bool
    window: tuple
    rows: tuple

    def failing_degrees(self):
        return [r.degree for r in self.rows if not r.bijective]

    def to_dict(self):
        return {
            "passed": self.passed,
            "window": list(self.window),
            "ranks": [{"degree": r.degree, "source_dim": r.source_dim, "target_dim": r.target_dim,
                       "rank": r.rank, "bijective": r.bijective} for r in self.rows],
        }


def induced_ranks(source, target, maps, window):
    """Ranks of the maps induced on H^n by degreewise matrices source^n -> target^n"""
    rows = []
    K = source.field
    for n in range(window[0], window[1] + 1):
        hs, ht = source.homology(n), target.homology(n)
        if hs.dim and ht.dim:
            M = maps.get(n)
            images = [ht.projection.apply(M.apply(rep)) for rep in hs.representatives]
            rank = rank_kernel(Mat.from_vectors(images, ht.dim, K))[0]
        else:
            rank = 0
        rows.append(DegreeRank(n, hs.dim, ht.dim, rank))
        logger.debug(f"degree {n}: H dims {hs.dim} -> {ht.dim}, rank {rank}")
    return tuple(rows)


def quasi_iso_verdict(source, target, maps, window):
    rows = induced_ranks(source, target, maps, window)
    return QuasiIsoVerdict(all(r.bijective for r in rows), tuple(window), rows)


@dataclass(frozen=True)
class MapCheck:
    passed: bool
    failure: str = ""
    witness: tuple = ()


class DGAlgebraMap:
    """Degreewise linear maps phi^n: source^n -> target^n"""

    def __init__(self, source, target, maps):
        self.source = source
        self.target = target
        self.maps = dict(maps)

    def map(self, n):
        m = self.maps.get(n)
        if m is None:
            m = Mat.zeros(self.source.dim(n), self.target.dim(n), self.source.field)
        return m

    def apply(self, n, v):
        if not self.target.dim(n):
            return ()
        return self.map(n).apply(v)

    def check(self):
        """Chain map, unit and multiplicativity on all basis pairs"""
        S, T = self.source, self.target
        for n in S.degrees:
            if S.diff(n) @ self.map(n + 1) != self.map(n) @ T.diff(n):
                return MapCheck(False, "differential", (n,))
        if S.dim(0) and self.apply(0, S.unit) != T.unit:
            return MapCheck(False, "unit", ())
        for p in S.degrees:
            for q in S.degrees:
                n = p + q
                if not (S.lo <= n <= S.hi) and not T.dim(n):
                    continue
                for i in range(S.dim(p)):
                    fa = self.map(p).row(i)
                    for j in range(S.dim(q)):
                        prod = S.basis_product(p, i, q, j)
                        lhs = [T.field.zero] * T.dim(n)
                        if prod and lhs:
                            image = self.map(n)
                            for k, c in prod.items():
                                for t, x in enumerate(image.row(k)):
                                    if x:
                                        lhs[t] += c * x
                        rhs = T.multiply(p, fa, q, self.map(q).row(j)) if lhs else ()
                        if tuple(lhs) != tuple(rhs):
                            return MapCheck(False, "multiplicative", ((p, i), (q, j)))
        return MapCheck(True)

    def validate(self, name="dg algebra map"):
        report = self.check()
        if not report.passed:
            raise InvariantError(name, f"{report.failure} fails at {report.witness}")
        return self

    def is_isomorphism(self):
        degrees = set(self.source.degrees) | set(self.target.degrees)
        for n in degrees:
            if self.source.dim(n) != self.target.dim(n):
                return False
            if self.source.dim(n) and self.map(n).rank() != self.source.dim(n):
                return False
        return True


def is_quasi_isomorphism(phi, window=None):
    """
    Per-degree bijectivity of H^n(phi) on the common validity window

    Raises:
        WindowTooSmall: when the windows do not overlap
    """
    lo, hi = certified_window(phi.source, phi.target, window=window)
    if lo > hi:
        raise WindowTooSmall(f"validity windows {phi.source.validity} and {phi.target.validity} do not overlap")
    return quasi_iso_verdict(phi.source.space, phi.target.space,
                             {n: phi.map(n) for n in range(lo, hi + 1)}, (lo, hi))


@dataclass
class CanonicalMaps:
    left_map: DGAlgebraMap
    right_map: DGAlgebraMap
    left_check: MapCheck
    right_check: MapCheck
    left_verdict: QuasiIsoVerdict
    right_verdict: QuasiIsoVerdict


def _action_map(source_algebra, end_algebra, actions_per_basis):
    """Degree-0 map sending basis element b to the endomorphism with the given components"""
    hom = end_algebra.hom
    rows = []
    for components in actions_per_basis:
        f = hom.vector_from_components(0, components)
        rows.append(f)
    m = Mat.from_vectors(rows, hom.dim(0), source_algebra.field) if rows else Mat.zeros(0, hom.dim(0), source_algebra.field)
    return {0: m}


def canonical_bimodule_maps(X, right_sign=1):
    """
    The canonical maps of a bimodule complex X over (A, B)

    lambda: A -> End_B(X), a -> (x -> a x);
    rho: B -> End_{A^op}(X)^op, b -> (x -> (-1)^(|b||x|) x b), where b has degree 0.
    right_sign = -1 builds the map with the sign flipped, which fails to be
    multiplicative.

    Returns:
        CanonicalMaps: both maps, their dg-map checks and quasi-iso verdicts
    """
    A, B = X.left, X.right
    left_end = EndDGAlgebra(X.right_complex())
    right_end = OppositeDGAlgebra(EndDGAlgebra(X.left_complex()))
    sign = X.field.element(right_sign)
    lam = [{i: X.module(i).left_action[t] for i in X.degrees if X.dim(i)} for t in range(A.dim)]
    rho = [{i: X.module(i).right_action[t].scale(sign) for i in X.degrees if X.dim(i)} for t in range(B.dim)]
    left_map = DGAlgebraMap(AlgebraAsDG(A), left_end, _action_map(A, left_end, lam))
    right_map = DGAlgebraMap(AlgebraAsDG(B), right_end, _action_map(B, right_end.base, rho))
    left_check, right_check = left_map.check(), right_map.check()
    result = CanonicalMaps(left_map, right_map, left_check, right_check,
                           is_quasi_isomorphism(left_map), is_quasi_isomorphism(right_map))
    logger.info(f"Canonical maps: left quasi-iso {result.left_verdict.passed}, right quasi-iso {result.right_verdict.passed}")
    return result


# dg modules

class DGModule:
    """A right dg module: subclasses provide basis_act(n, i, p, j) = m_(n,i) . a_(p,j)"""

    def __init__(self, algebra, space):
        self.algebra = algebra
        self.space = space
        self.field = space.field
        self.lo = space.lo
        self.hi = space.hi
        self._acts = {}

    @property
    def degrees(self):
        return range(self.lo, self.hi + 1)

    def dim(self, n):
        return self.space.dim(n)

    def diff(self, n):
        return self.space.diff(n)

    def basis_act(self, n, i, p, j):
        key = (n, i, p, j)
        if key not in self._acts:
            self._acts[key] = self._basis_act(n, i, p, j) if self.dim(n + p) else {}
        return self._acts[key]

    def _basis_act(self, n, i, p, j):
        raise NotImplementedError

    def act(self, n, m, p, a):
        acc = [self.field.zero] * self.dim(n + p)
        if not acc:
            return ()
        for i, x in enumerate(m):
            if not x:
                continue
            for j, y in enumerate(a):
                if y:
                    prod = self.basis_act(n, i, p, j)
                    if prod:
                        _accumulate(acc, x * y, prod)
        return tuple(acc)


class RegularDGModule(DGModule):
    def __init__(self, algebra):
        super().__init__(algebra, algebra.space)

    def _basis_act(self, n, i, p, j):
        return self.algebra.basis_product(n, i, p, j)


class HomDGModule(DGModule):
    """Hom_A(X, Y) as a right End(X)-module by precomposition"""

    def __init__(self, hom, end):
        super().__init__(end, hom)
        self.hom = hom

    def _basis_act(self, n, i, p, j):
        return _compose_basis(self.hom, n, i, self.algebra.hom, p, j, self.hom)


class LeftHomDGModule(DGModule):
    """Hom_A(X, Y) as a right End(Y)^op-module: m . g = (-1)^(|m||g|) g m"""

    def __init__(self, hom, opposite_end):
        super().__init__(opposite_end, hom)
        self.hom = hom

    def _basis_act(self, n, i, p, j):
        prod = _compose_basis(self.algebra.base.hom, p, j, self.hom, n, i, self.hom)
        if (n * p) % 2 == 0:
            return prod
        return {k: -c for k, c in prod.items()}


def check_module_leibniz(P):
    """d(m a) = d(m) a + (-1)^n m d(a) on basis pairs"""
    L, K = P.algebra, P.field
    for n in P.degrees:
        for p in L.degrees:
            t = n + p
            if not P.dim(t) or not P.dim(t + 1):
                continue
            for i in range(P.dim(n)):
                m = unit_vector(P.dim(n), i, K)
                dm = P.diff(n).apply(m) if P.dim(n + 1) else ()
                for j in range(L.dim(p)):
                    a = L.basis_vector(p, j)
                    lhs = P.diff(t).apply(P.act(n, m, p, a))
                    rhs = [K.zero] * P.dim(t + 1)
                    if dm:
                        for k, c in enumerate(P.act(n + 1, dm, p, a)):
                            rhs[k] += c
                    if L.dim(p + 1):
                        da = L.diff(p).apply(a)
                        sign = K.sign(n)
                        for k, c in enumerate(P.act(n, m, p + 1, da)):
                            rhs[k] += sign * c
                    if tuple(lhs) != tuple(rhs):
                        return AxiomReport(False, "module leibniz", ((n, i), (p, j)))
    return AxiomReport(True)


class HomOverDG(SpaceComplex):
    """
    Hom_L(P, Q) for right dg modules P, Q over the same dg algebra L

    A degree-h map is stored by its values on a generating set g_j of P; the
    values y_j in Q^(|g_j|+h) must satisfy sum_j y_j r_j = 0 for every
    relation r among the generators. The differential is
    d(g) = d_Q g + (-1)^(h+1) g d_P.
    """

    def __init__(self, P, Q):
        if P.algebra is not Q.algebra:
            raise AlgebraMismatch("Hom over a dg algebra needs both modules over the same algebra object")
        self.P, self.Q, self.algebra = P, Q, P.algebra
        self.field = P.field
        self._find_generators()
        self._find_relations()
        lo, hi = Q.lo - P.hi, Q.hi - P.lo
        self.layouts, self.spaces = {}, {}
        dims = {}
        for h in range(lo, hi + 1):
            layout, size = [], 0
            for deg, _ in self.generators:
                layout.append((size, Q.dim(deg + h)))
                size += Q.dim(deg + h)
            self.layouts[h] = (layout, size)
            self.spaces[h] = self._solution_space(h)
            dims[h] = self.spaces[h].dim
        super().__init__(P.field, lo, hi, dims)
        for h in range(lo, hi):
            self._diffs[h] = self._differential(h)
        logger.info(f"Hom over dg algebra: {len(self.generators)} generators, "
                    f"{len(self.relations)} relation generators, dims {[dims[h] for h in range(lo, hi + 1)]}")

    def _free_degree(self, m):
        """Blocks (generator j, algebra degree, offset) of the free module in degree m"""
        blocks, offset = [], 0
        for j, (deg, _) in enumerate(self.generators):
            p = m - deg
            size = self.algebra.dim(p)
            if size:
                blocks.append((j, p, offset, size))
                offset += size
        return blocks, offset

    def _find_generators(self):
        P, L, K = self.P, self.algebra, self.field
        spans = {n: SpanTracker(P.dim(n), K) for n in P.degrees}
        self.generators = []
        for n in P.degrees:
            for k in range(P.dim(n)):
                e = unit_vector(P.dim(n), k, K)
                if spans[n].contains(e):
                    continue
                self.generators.append((n, e))
                for p in L.degrees:
                    t = n + p
                    if not P.dim(t):
                        continue
                    for l in range(L.dim(p)):
                        img = [K.zero] * P.dim(t)
                        _accumulate(img, K.one, P.basis_act(n, k, p, l))
                        spans[t].add(img)
        lo, hi = P.lo, P.hi
        if self.generators:
            lo = min(lo, min(deg for deg, _ in self.generators) + L.lo)
            hi = max(hi, max(deg for deg, _ in self.generators) + L.hi)
        # the free module reaches degrees where P vanishes; relations live there too
        self.free = {m: self._free_degree(m) for m in range(lo, hi + 1)}
        self.pi = {}
        self.solvers = {}
        for m in self.free:
            blocks, size = self.free[m]
            rows = []
            for j, p, _, dim_p in blocks:
                deg, g = self.generators[j]
                for l in range(dim_p):
                    rows.append(P.act(deg, g, p, L.basis_vector(p, l)))
            self.pi[m] = Mat.from_vectors(rows, P.dim(m), K) if rows else Mat.zeros(0, P.dim(m), K)

    def _solver(self, m):
        if m not in self.solvers:
            self.solvers[m] = LinearSolver(self.pi[m])
        return self.solvers[m]

    def _right_multiply(self, m, vec, p, lam):
        """(sum_j g_j c_j) . lam as a vector of the free module in degree m + p"""
        L, K = self.algebra, self.field
        blocks, size = self.free.get(m + p, ([], 0))
        out = [K.zero] * size
        target = {j: (offset, dim_p) for j, _, offset, dim_p in blocks}
        for j, q, offset, dim_q in self.free[m][0]:
            c = vec[offset:offset + dim_q]
            if not any(c) or j not in target:
                continue
            prod = L.multiply(q, c, p, lam)
            t_offset, _ = target[j]
            for k, x in enumerate(prod):
                if x:
                    out[t_offset + k] += x
        return tuple(out)

    def _find_relations(self):
        L, K = self.algebra, self.field
        kernels = {}
        for m in self.free:
            if self.free[m][1]:
                kernels[m] = rank_kernel(self.pi[m])[1]
        spans = {m: SpanTracker(self.free[m][1], K) for m in kernels}
        self.relations = []
        for m in sorted(kernels):
            for r in kernels[m]:
                if spans[m].contains(r):
                    continue
                self.relations.append((m, r))
                for p in L.degrees:
                    t = m + p
                    if t not in spans:
                        continue
                    for l in range(L.dim(p)):
                        spans[t].add(self._right_multiply(m, r, p, L.basis_vector(p, l)))

    def _solution_space(self, h):
        Q, K = self.Q, self.field
        layout, size = self.layouts[h]
        equations = []
        for m, r in self.relations:
            out_dim = Q.dim(m + h)
            if not out_dim:
                continue
            rows = {}
            for j, p, offset, dim_p in self.free[m][0]:
                c = r[offset:offset + dim_p]
                if not any(c):
                    continue
                deg = self.generators[j][0]
                u_offset, u_size = layout[j]
                for k in range(u_size):
                    w = Q.act(deg + h, unit_vector(u_size, k, K), p, c)
                    for t, x in enumerate(w):
                        if x:
                            row = rows.setdefault(t, {})
                            row[u_offset + k] = row.get(u_offset + k, K.zero) + x
            for row in rows.values():
                eq = [K.zero] * size
                for col, x in row.items():
                    eq[col] = x
                equations.append(eq)
        return Subspace.annihilator(equations, size, K)

    def values(self, h, coords):
        """Split a degree-h element into its values y_j on the generators"""
        layout, _ = self.layouts[h]
        flat = self.spaces[h].combine(coords)
        return [flat[o:o + s] for o, s in layout]

    def coordinates(self, h, values):
        """Coordinates of the map with the given generator values; checks Λ-linearity"""
        flat = tuple(x for v in values for x in v)
        space = self.spaces[h]
        coords = space.coordinates(flat)
        if space.combine(coords) != flat:
            raise InvariantError("hom over dg algebra", f"values do not define a linear map in degree {h}")
        return coords

    def evaluate(self, h, ys, t, vec):
        """g(p) for p in P^t, with g given by its generator values ys"""
        Q, K = self.Q, self.field
        out = [K.zero] * Q.dim(t + h)
        if not out:
            return ()
        c = self._solver(t).solve(vec)
        if c is None:
            raise InvariantError("hom over dg algebra", f"vector of P^{t} is not in the span of the generators")
        for j, p, offset, dim_p in self.free[t][0]:
            cj = c[offset:offset + dim_p]
            if any(cj) and len(ys[j]):
                for k, x in enumerate(Q.act(self.generators[j][0] + h, ys[j], p, cj)):
                    if x:
                        out[k] += x
        return tuple(out)

    def _differential(self, h):
        K, P, Q = self.field, self.P, self.Q
        rows_dim, cols_dim = self.dim(h), self.dim(h + 1)
        if not rows_dim or not cols_dim:
            return Mat.zeros(rows_dim, cols_dim, K)
        sign = K.sign(h + 1)
        rows = []
        for s in range(rows_dim):
            ys = self.values(h, unit_vector(rows_dim, s, K))
            zs = []
            for j, (deg, g) in enumerate(self.generators):
                size = Q.dim(deg + h + 1)
                z = [K.zero] * size
                if size:
                    if len(ys[j]) and Q.dim(deg + h + 1):
                        for k, x in enumerate(Q.diff(deg + h).apply(ys[j])):
                            z[k] += x
                    if P.dim(deg + 1):
                        dg_ = P.diff(deg).apply(g)
                        if any(dg_):
                            for k, x in enumerate(self.evaluate(h, ys, deg + 1, dg_)):
                                z[k] += sign * x
                zs.append(tuple(z))
            rows.append(self.coordinates(h + 1, zs))
        return Mat.from_vectors(rows, cols_dim, K)


def hom_over_dg(L, P, Q):
    """The Hom complex Hom_L(P, Q) of right dg modules"""
    if P.algebra is not L or Q.algebra is not L:
        raise AlgebraMismatch("modules are not over the given dg algebra")
    return HomOverDG(P, Q)


@dataclass
class ActionMap:
    """A degreewise linear chain map into a Hom over a dg algebra, with its verdict"""

    source: SpaceComplex
    target: HomOverDG
    maps: dict
    verdict: QuasiIsoVerdict

    def is_chain_map(self):
        for n in range(self.source.lo, self.source.hi + 1):
            left = self.source.diff(n) @ self._map(n + 1)
            right = self._map(n) @ self.target.diff(n)
            if left != right:
                return False
        return True

    def _map(self, n):
        m = self.maps.get(n)
        if m is None:
            m = Mat.zeros(self.source.dim(n), self.target.dim(n), self.source.field)
        return m


def _action_chain_map(source, target, value_of, window):
    K = source.field
    maps = {}
    for h in range(source.lo, source.hi + 1):
        rows = []
        for k in range(source.dim(h)):
            f = unit_vector(source.dim(h), k, K)
            values = [value_of(h, f, deg, g) for deg, g in target.generators]
            rows.append(target.coordinates(h, values))
        if rows:
            maps[h] = Mat.from_vectors(rows, target.dim(h), K)
    lo, hi = intersect_windows((min(source.lo, target.lo), max(source.hi, target.hi)), window)
    if lo > hi:
        raise WindowTooSmall(f"empty window {window}")
    full = {n: maps.get(n, Mat.zeros(source.dim(n), target.dim(n), K)) for n in range(lo, hi + 1)}
    return ActionMap(source, target, maps, quasi_iso_verdict(source, target, full, (lo, hi)))


def composition_action_map(X, Y, Z, window=None):
    """
    Hom_A(Y, Z) -> Hom_End(X)(Hom_A(X, Y), Hom_A(X, Z)), f -> (g -> f g)

    Returns:
        ActionMap: the chain map and its per-degree quasi-iso verdict
    """
    L = end_dg_algebra(X)
    HXY, HXZ, HYZ = hom_complex(X, Y), hom_complex(X, Z), hom_complex(Y, Z)
    target = HomOverDG(HomDGModule(HXY, L), HomDGModule(HXZ, L))

    def value_of(h, f, deg, g):
        return compose_vectors(HYZ, h, f, HXY, deg, g, HXZ)

    result = _action_chain_map(HYZ, target, value_of, window)
    logger.info(f"Composition action map verdict: {result.verdict.passed}")
    return result


def opposite_action_map(X, Y, Z, window=None):
    """
    Hom_A(Z, X) -> Hom_End(Y)^op(Hom_A(X, Y), Hom_A(Z, Y)), f -> (g -> (-1)^(|f||g|) g f)

    Returns:
        ActionMap: the chain map and its per-degree quasi-iso verdict
    """
    G = OppositeDGAlgebra(end_dg_algebra(Y))
    HXY, HZY, HZX = hom_complex(X, Y), hom_complex(Z, Y), hom_complex(Z, X)
    target = HomOverDG(LeftHomDGModule(HXY, G), LeftHomDGModule(HZY, G))

    def value_of(h, f, deg, g):
        v = compose_vectors(HXY, deg, g, HZX, h, f, HZY)
        if (h * deg) % 2:
            v = tuple(-x for x in v)
        return v

    result = _action_chain_map(HZX, target, value_of, window)
    logger.info(f"Opposite action map verdict: {result.verdict.passed}")
    return result


@dataclass
class TensorInduction:
    """f -> f (x) 1 from End_A(P) to End_B(P (x)_A Y)"""

    tensor: TensorProduct
    map: DGAlgebraMap
    check: MapCheck
    verdict: QuasiIsoVerdict


def tensor_induction_map(Y, P, window=None):
    """
    The map End_A(P) -> End_B(P (x)_A Y) induced by tensoring with Y

    Args:
        Y (BimoduleComplex): an (A, B)-bimodule complex
        P (BoundedComplex): a complex of right A-modules
        window (tuple): optional degree window for the verdict

    Returns:
        TensorInduction: the tensor product, the map, its dg-map check and verdict
    """
    L = end_dg_algebra(P)
    T = tensor_complex(P, Y)
    G = end_dg_algebra(T.complex)
    K = L.field
    maps = {}
    for n in L.degrees:
        if not L.dim(n) or not G.dim(n):
            continue
        rows = [G.hom.coordinates(tensor_map(T, T, L.hom.to_map(n, L.basis_vector(n, k))))
                for k in range(L.dim(n))]
        maps[n] = Mat.from_vectors(rows, G.dim(n), K)
    phi = DGAlgebraMap(L, G, maps)
    result = TensorInduction(T, phi, phi.check(), is_quasi_isomorphism(phi, window))
    logger.info(f"Tensor induction: dg map {result.check.passed}, quasi-iso {result.verdict.passed} "
                f"on {result.verdict.window}")
    return result
