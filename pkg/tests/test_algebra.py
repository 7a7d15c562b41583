import pytest

from models.algebra import (
    FDModule,
    ModuleHom,
    QuiverPresentation,
    build_algebra_from_quiver,
    build_algebra_from_structure_constants,
    cyclic_quotient,
    direct_sum_modules,
    hom_basis,
    hom_space,
    is_isomorphic,
    is_projective,
    projective_cover,
    radical,
    regular_bimodule,
    regular_module,
    syzygy,
    vertex_projective,
)
from models.equivalence import a2_presentation, truncated_polynomial_presentation, two_loop_presentation
from utils.errors import (
    AssociativityViolation,
    InvariantError,
    ModuleLawViolation,
    NonNilpotent,
    UnitViolation,
)
from utils.linalg import RATIONAL_FIELD, FieldSpec, Mat


def quotient(A, power):
    return cyclic_quotient(A, [A.basis_vector(A.index("x" if power == 1 else f"x^{power}"))])


class TestQuiverAlgebras:
    def test_two_loop_basis(self, two_loop):
        assert two_loop.dim == 4
        assert two_loop.labels == ("e", "x", "y", "x^2")
        y = two_loop.basis_vector(two_loop.index("y"))
        assert two_loop.multiply(y, y) == two_loop.basis_vector(two_loop.index("x^2"))

    def test_two_loop_unequal_exponents(self):
        A = build_algebra_from_quiver(two_loop_presentation(2, 3))
        assert A.dim == 5

    def test_truncated_polynomial_indices_are_exponents(self, truncated3):
        assert truncated3.labels == ("e", "x", "x^2")
        x = truncated3.basis_vector(1)
        assert truncated3.multiply(x, truncated3.multiply(x, x)) == (truncated3.field.zero,) * 3

    def test_missing_relation_is_not_nilpotent(self):
        q = QuiverPresentation(RATIONAL_FIELD, 1, (("x", 0, 0),), (), 3)
        with pytest.raises(NonNilpotent):
            build_algebra_from_quiver(q)

    def test_relation_must_be_admissible(self):
        q = QuiverPresentation(RATIONAL_FIELD, 1, (("x", 0, 0),), ((((0,), RATIONAL_FIELD.one),),), 3)
        with pytest.raises(InvariantError):
            build_algebra_from_quiver(q)

    def test_path_algebra_of_a2(self):
        A = build_algebra_from_quiver(a2_presentation())
        assert A.dim == 3
        assert radical(A).dim == 1
        assert A.opposite.mult != A.mult

    def test_prime_field(self):
        A = build_algebra_from_quiver(truncated_polynomial_presentation(3, FieldSpec.parse("Fp:5")))
        assert A.dim == 3
        assert str(A.field) == "Fp:5"


class TestStructureConstants:
    def test_non_associative_table(self):
        K = RATIONAL_FIELD
        z, e, a, b = (0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)
        mult = [[e, a, b], [a, b, a], [b, z, z]]
        with pytest.raises(AssociativityViolation):
            build_algebra_from_structure_constants(K, ["e", "a", "b"], mult, e)

    def test_wrong_unit(self):
        K = RATIONAL_FIELD
        mult = [[(1, 0), (0, 1)], [(0, 1), (0, 0)]]
        with pytest.raises(UnitViolation):
            build_algebra_from_structure_constants(K, ["e", "a"], mult, (0, 1))

    def test_dual_numbers_and_radical(self):
        K = RATIONAL_FIELD
        mult = [[(1, 0), (0, 1)], [(0, 1), (0, 0)]]
        A = build_algebra_from_structure_constants(K, ["e", "a"], mult, (1, 0))
        assert radical(A).basis == ((K.zero, K.one),)


class TestModules:
    def test_regular_module_and_bimodule(self, two_loop):
        regular_module(two_loop).validate()
        regular_bimodule(two_loop).validate()

    def test_bad_action_is_rejected(self, truncated3):
        K = truncated3.field
        swap = Mat.from_rows([[0, 1], [1, 0]], K)
        M = FDModule(truncated3, 2, (Mat.identity(2, K), swap, swap))
        with pytest.raises(ModuleLawViolation):
            M.validate("M")

    def test_cyclic_quotients(self, truncated3):
        assert quotient(truncated3, 1).dim == 1
        assert quotient(truncated3, 2).dim == 2

    def test_hom_dimensions(self, truncated3):
        R, X1 = regular_module(truncated3), quotient(truncated3, 1)
        assert hom_basis(R, R).dim == 3
        assert hom_basis(X1, R).dim == 1
        assert hom_basis(R, X1).dim == 1
        for F in hom_basis(X1, R).matrices:
            ModuleHom(X1, R, F).validate()

    def test_projectivity(self, truncated3):
        assert is_projective(regular_module(truncated3)) is True
        assert is_projective(quotient(truncated3, 1)) is False

    def test_projective_cover_is_minimal(self, truncated3):
        P, cover = projective_cover(quotient(truncated3, 2))
        assert P.dim == 3
        assert cover.matrix.rank() == 2

    def test_syzygy_of_truncated_quotient(self, truncated3):
        omega = syzygy(quotient(truncated3, 1))
        iso = is_isomorphic(omega, quotient(truncated3, 2))
        assert iso is not None
        f, g = iso
        assert f.matrix @ g.matrix == Mat.identity(2, truncated3.field)
        f.validate()

    def test_syzygy_of_middle_quotient_is_itself(self):
        A = build_algebra_from_quiver(truncated_polynomial_presentation(4))
        X2 = quotient(A, 2)
        assert is_isomorphic(syzygy(X2), X2) is not None

    @pytest.mark.parametrize("n,r", [(3, 1), (3, 2), (4, 1), (4, 2), (4, 3), (5, 2)])
    def test_second_syzygy_returns_the_quotient(self, n, r):
        A = build_algebra_from_quiver(truncated_polynomial_presentation(n))
        X = quotient(A, r)
        assert is_isomorphic(syzygy(syzygy(X)), X) is not None

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_syzygy_of_the_regular_module_is_zero(self, n):
        A = build_algebra_from_quiver(truncated_polynomial_presentation(n))
        assert syzygy(regular_module(A)).dim == 0

    def test_non_isomorphic_modules(self, truncated3):
        X1, X2 = quotient(truncated3, 1), quotient(truncated3, 2)
        semisimple, _ = direct_sum_modules([X1, X1], truncated3)
        assert is_isomorphic(X1, X2) is None
        assert is_isomorphic(semisimple, X2) is None

    def test_vertex_projectives_of_a2(self):
        A = build_algebra_from_quiver(a2_presentation())
        P1, _ = vertex_projective(A, 0)
        P2, _ = vertex_projective(A, 1)
        assert (P1.dim, P2.dim) == (2, 1)
        assert hom_basis(P2, P1).dim == 1
        assert hom_basis(P1, P2).dim == 0

    @pytest.mark.parametrize("power", [1, 2])
    def test_homs_out_of_the_regular_module(self, truncated3, power):
        M = quotient(truncated3, power)
        homs = hom_space(regular_module(truncated3), M)
        assert len(homs) == M.dim
        for f in homs:
            f.validate()
