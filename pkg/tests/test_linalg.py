import random

import pytest
from sympy.polys.matrices import DomainMatrix

from utils.errors import DimensionMismatch, FieldMismatch, SingularMatrix, SubspaceError
from utils.linalg import (
    RATIONAL_FIELD,
    FieldSpec,
    LinearSolver,
    Mat,
    SpanTracker,
    Subspace,
    block_matrix,
    hstack,
    inverse,
    kron,
    quotient_basis,
    rank_kernel,
    solve_linear,
    vstack,
)

F7 = FieldSpec.parse("Fp:7")


def random_matrix(rng, rows, cols, field, density=0.5):
    return Mat.from_rows([[rng.randint(-3, 3) if rng.random() < density else 0 for _ in range(cols)]
                          for _ in range(rows)], field, cols)


def oracle_rank(m):
    """Rank from sympy's own elimination"""
    if not m.rows or not m.cols:
        return 0
    return DomainMatrix([list(r) for r in m.row_list()], m.shape, m.field.domain).rank()


class TestFieldSpec:
    def test_parse_names(self):
        assert FieldSpec.parse("Q") == RATIONAL_FIELD
        assert FieldSpec.parse("QQ") == RATIONAL_FIELD
        assert FieldSpec.parse("GF(7)") == F7
        assert str(F7) == "Fp:7"
        assert str(RATIONAL_FIELD) == "Q"

    @pytest.mark.parametrize("text", ["Fp:4", "Fp:x", "R", "GF(1)"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            FieldSpec.parse(text)

    def test_elements_and_format(self):
        K = RATIONAL_FIELD
        assert K.format(K.element("3/6")) == "1/2"
        assert K.format(K.element(-4)) == "-4"
        assert F7.format(F7.element(-1)) == "6"
        assert F7.format(F7.element("1/2")) == "4"
        with pytest.raises(ZeroDivisionError):
            F7.element("1/7")

    def test_sign(self):
        assert RATIONAL_FIELD.sign(4) == RATIONAL_FIELD.one
        assert RATIONAL_FIELD.sign(-3) == -RATIONAL_FIELD.one


class TestMat:
    def test_products_follow_row_convention(self):
        K = RATIONAL_FIELD
        m = Mat.from_rows([[1, 2], [0, 1]], K)
        v = (K.one, K.one)
        assert m.apply(v) == (K.one, K.element(3))
        assert (m @ m) == Mat.from_rows([[1, 4], [0, 1]], K)

    def test_shape_errors(self):
        K = RATIONAL_FIELD
        with pytest.raises(DimensionMismatch):
            Mat.from_rows([[1, 2], [3]], K)
        with pytest.raises(DimensionMismatch):
            Mat.identity(2, K) @ Mat.identity(3, K)
        with pytest.raises(FieldMismatch):
            Mat.identity(2, K) + Mat.identity(2, F7)

    def test_stacking(self):
        K = RATIONAL_FIELD
        a = Mat.from_rows([[1, 2]], K)
        b = Mat.from_rows([[3]], K)
        assert hstack([a, b], 1, K) == Mat.from_rows([[1, 2, 3]], K)
        assert vstack([a, a], 2, K).shape == (2, 2)
        blocks = block_matrix({(1, 1): b}, [1, 1], [2, 1], K)
        assert blocks == Mat.from_rows([[0, 0, 0], [0, 0, 3]], K)

    def test_kron_shape_and_entries(self):
        K = RATIONAL_FIELD
        a = Mat.from_rows([[1, 2], [0, 1]], K)
        eye = Mat.identity(2, K)
        k = kron(a, eye)
        assert k.shape == (4, 4)
        assert k[0, 2] == K.element(2) and k[1, 3] == K.element(2) and k[0, 3] == K.zero


@pytest.mark.parametrize("field", [RATIONAL_FIELD, F7], ids=str)
def test_rank_matches_sympy(field):
    rng = random.Random(11)
    for _ in range(40):
        m = random_matrix(rng, rng.randint(1, 7), rng.randint(1, 7), field)
        assert m.rank() == oracle_rank(m)


@pytest.mark.parametrize("field", [RATIONAL_FIELD, F7], ids=str)
def test_left_kernel(field):
    rng = random.Random(12)
    for _ in range(30):
        m = random_matrix(rng, rng.randint(1, 6), rng.randint(1, 6), field)
        rank, kernel = rank_kernel(m)
        assert len(kernel) == m.rows - rank
        for v in kernel:
            assert not any(m.apply(v))
        if kernel:
            assert Mat.from_vectors(kernel, m.rows, field).rank() == len(kernel)


def test_inverse_and_singular():
    K = RATIONAL_FIELD
    m = Mat.from_rows([[2, 1], [1, 1]], K)
    assert m @ inverse(m) == Mat.identity(2, K)
    with pytest.raises(SingularMatrix):
        inverse(Mat.from_rows([[1, 2], [2, 4]], K))


def test_inverse_over_a_prime_field():
    m = Mat.from_rows([[1, 2], [3, 4]], F7)
    assert m @ inverse(m) == Mat.identity(2, F7)
    assert inverse(Mat.zeros(0, 0, F7)).shape == (0, 0)
    with pytest.raises(SingularMatrix):
        inverse(Mat.from_rows([[1, 2], [4, 1]], F7))


@pytest.mark.parametrize("field", [RATIONAL_FIELD, F7], ids=str)
def test_span_is_the_reduced_echelon_form(field):
    rows = [[field.element(a) for a in r] for r in [[2, 4, 6], [1, 3, 5], [3, 7, 11]]]
    sub = Subspace.span(rows, 3, field)
    assert sub.basis == ((field.one, field.zero, field.element(-1)), (field.zero, field.one, field.element(2)))
    assert sub.coordinate_columns == (0, 1)
    assert Subspace.span([], 3, field).dim == 0


def test_linear_solver():
    K = RATIONAL_FIELD
    m = Mat.from_rows([[1, 0, 1], [0, 1, 1]], K)
    x = LinearSolver(m).solve(m.apply((K.element(2), K.element(-1))))
    assert x == (K.element(2), K.element(-1))
    assert LinearSolver(m).solve((K.one, K.zero, K.zero)) is None


def test_span_tracker_and_subspace():
    K = RATIONAL_FIELD
    tracker = SpanTracker(3, K)
    assert tracker.add((K.one, K.one, K.zero))
    assert not tracker.add((K.element(2), K.element(2), K.zero))
    assert tracker.contains((K.element(-1), K.element(-1), K.zero))
    sub = Subspace.span([(K.one, K.one, K.zero), (K.zero, K.one, K.one)], 3, K)
    v = (K.one, K.element(3), K.element(2))
    assert sub.contains(v)
    assert sub.combine(sub.coordinates(v)) == v
    assert not sub.contains((K.one, K.zero, K.zero))


def test_quotient_projection_vanishes_on_subspace():
    K = RATIONAL_FIELD
    whole = [tuple(K.one if i == j else K.zero for j in range(3)) for i in range(3)]
    sub = [(K.one, K.one, K.zero)]
    complement, projection = quotient_basis(whole, sub, K, ambient=3)
    assert len(complement) == 2
    assert not any(projection.apply(sub[0]))
    assert Mat.from_vectors(complement, 3, K) @ projection == Mat.identity(2, K)
    with pytest.raises(SubspaceError):
        quotient_basis(whole[:1], [whole[2]], K, ambient=3)


def test_solve_linear_commutant():
    K = RATIONAL_FIELD
    nilpotent = Mat.from_rows([[0, 1], [0, 0]], K)
    basis = solve_linear([(nilpotent, nilpotent)], (2, 2), K)
    assert len(basis) == 2
    for X in basis:
        assert X @ nilpotent == nilpotent @ X
