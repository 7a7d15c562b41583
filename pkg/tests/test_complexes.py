import random

import pytest
from sympy.polys.matrices import DomainMatrix

from models.algebra import regular_bimodule, regular_module
from models.complexes import (
    GradedMap,
    Homotopy,
    NotNullHomotopic,
    bimodule_stalk,
    complex_from_terms,
    cone,
    contractible_hull,
    direct_sum,
    homology,
    homotopy_equivalence,
    homotopy_hom,
    identity_map,
    null_homotopy_witness,
    shift,
    stalk,
    tensor_complex,
)
from models.dg import induced_ranks
from utils.errors import InvariantError, NotChainMap
from utils.linalg import Mat


def _rank(rows, width, K):
    if not rows or not width:
        return 0
    return DomainMatrix([list(r) for r in rows], (len(rows), width), K.domain).rank()


def _unknown_images(X, Y, m):
    """
    For every matrix unit E_rc in a block X^i -> Y^(i+m): its coefficients in
    the linearity equations and in the Hom differential, both as sparse dicts
    """
    K = X.field
    A = X.algebra
    sign = K.sign(m + 1)
    images = []
    for i in X.degrees:
        rho_x, rho_y = X.module(i).action, Y.module(i + m).action
        dY, dX = Y.diff(i + m), X.diff(i - 1)
        for r in range(X.dim(i)):
            for c in range(Y.dim(i + m)):
                lin, dif = {}, {}
                for t in range(A.dim):
                    for a in range(X.dim(i)):
                        key = (i, t, a, c)
                        lin[key] = lin.get(key, K.zero) + rho_x[t][a, r]
                    for b in range(Y.dim(i + m)):
                        key = (i, t, r, b)
                        lin[key] = lin.get(key, K.zero) - rho_y[t][c, b]
                for b in range(Y.dim(i + m + 1)):
                    key = (i, r, b)
                    dif[key] = dif.get(key, K.zero) + dY[c, b]
                for a in range(X.dim(i - 1)):
                    key = (i - 1, a, c)
                    dif[key] = dif.get(key, K.zero) + sign * dX[a, r]
                images.append((lin, dif))
    return images


def oracle_hom_cohomology(X, Y, m):
    """H^m of Hom(X, Y) from linear systems on matrix units, independent of the Hom-space bases"""
    K = X.field

    def ranks(degree):
        images = _unknown_images(X, Y, degree)
        lin_keys = sorted({k for lin, _ in images for k in lin})
        dif_keys = sorted({k for _, dif in images for k in dif})
        lin_rows = [[lin.get(k, K.zero) for k in lin_keys] for lin, _ in images]
        full_rows = [row + [dif.get(k, K.zero) for k in dif_keys] for row, (_, dif) in zip(lin_rows, images)]
        return (len(images), _rank(lin_rows, len(lin_keys), K),
                _rank(full_rows, len(lin_keys) + len(dif_keys), K))

    unknowns, _, closed_rank = ranks(m)
    _, lin_below, full_below = ranks(m - 1)
    return (unknowns - closed_rank) - (full_below - lin_below)


@pytest.mark.parametrize("algebra", ["two_loop", "truncated3"])
def test_homotopy_hom_matches_independent_oracle(algebra, request, random_complex):
    A = request.getfixturevalue(algebra)
    rng = random.Random(2024)
    for _ in range(25):
        X, Y = random_complex(A, rng), random_complex(A, rng)
        for n in range(Y.lo - X.hi - 1, Y.hi - X.lo + 2):
            assert homotopy_hom(X, Y, n).dim == oracle_hom_cohomology(X, Y, n), (X.dims(), Y.dims(), n)


class TestComplexValidation:
    def test_square_of_differential_must_vanish(self, truncated3):
        R = regular_module(truncated3)
        Lx = truncated3.left_mult_matrix(truncated3.basis_vector(1))
        X = complex_from_terms(truncated3, {0: R, 1: R, 2: R}, {0: Lx, 1: Lx})
        with pytest.raises(InvariantError, match="degree 0"):
            X.validate()

    def test_differential_must_be_linear(self, truncated3):
        R = regular_module(truncated3)
        d = Mat.from_rows([[0, 0, 0], [1, 0, 0], [0, 0, 0]], truncated3.field)
        with pytest.raises(InvariantError, match="not linear"):
            complex_from_terms(truncated3, {0: R, 1: R}, {0: d}).validate()


def test_shift_moves_homology(two_loop, random_complex):
    rng = random.Random(5)
    for _ in range(10):
        X = random_complex(two_loop, rng)
        X1 = shift(X, 1)
        assert X1.lo == X.lo - 1 and X1.hi == X.hi - 1
        assert shift(X1, -1) == X
        for n in X.degrees:
            assert homology(X1, n - 1).dim == homology(X, n).dim


class TestTwoLoopComplexes:
    def test_homology_of_t2(self, two_loop_workspace):
        T2 = two_loop_workspace.get("T2")
        assert homology(T2, -1).dim == 2
        assert homology(T2, 0).dim == 2

    def test_morphisms_between_t2_and_t1(self, two_loop_workspace):
        T1, T2 = two_loop_workspace.get("T1"), two_loop_workspace.get("T2")
        assert homotopy_hom(T2, T1, 0).dim == 2
        assert homotopy_hom(T2, T1, 1).dim == 2
        for n in (-2, -1, 2):
            assert homotopy_hom(T2, T1, n).dim == 0

    def test_cone_is_homotopy_equivalent_to_z(self, two_loop_workspace):
        phi, psi = two_loop_workspace.get("phi"), two_loop_workspace.get("psi")
        result = homotopy_equivalence(phi, psi)
        assert result.passed
        assert result.source_witness.verify() and result.target_witness.verify()

    def test_sum_has_self_extensions_in_shift_one(self, two_loop_workspace):
        # Hom_K(T2, T1[1]) and Hom_K(T2, T2[1]) are both 2-dimensional
        T = two_loop_workspace.get("T")
        assert homotopy_hom(T, T, 1).dim == 4
        assert 1 in two_loop_workspace.checks["sum_self_extension_shifts"]


class TestCones:
    def test_triangle_verifies(self, two_loop_workspace):
        triangle = cone(two_loop_workspace.get("f"))
        assert triangle.verify()
        assert triangle.cone == two_loop_workspace.get("C")
        triangle.cone.validate("cone")

    def test_cone_of_identity_is_contractible(self, two_loop_workspace):
        T2 = two_loop_workspace.get("T2")
        C = cone(identity_map(T2)).cone
        assert isinstance(null_homotopy_witness(identity_map(C)), Homotopy)

    def test_cone_rejects_non_chain_maps(self, two_loop, two_loop_workspace):
        T2 = two_loop_workspace.get("T2")
        broken = GradedMap.build(T2, T2, 0, {-1: Mat.identity(two_loop.dim, two_loop.field)})
        with pytest.raises(NotChainMap):
            cone(broken)
        with pytest.raises(NotChainMap):
            null_homotopy_witness(broken)

    def test_long_exact_sequence_is_exact_in_the_middle(self, truncated3, random_complex, random_chain_map):
        rng = random.Random(9)
        for _ in range(20):
            X, Y = random_complex(truncated3, rng), random_complex(truncated3, rng)
            f = random_chain_map(X, Y, rng)
            triangle = cone(f)
            window = (Y.lo, Y.hi)
            Xs, Ys, Cs = X.underlying_space(), Y.underlying_space(), triangle.cone.underlying_space()
            forward = induced_ranks(Xs, Ys, {n: f.component(n) for n in Y.degrees}, window)
            onward = induced_ranks(Ys, Cs, {n: triangle.inclusion.component(n) for n in Y.degrees}, window)
            for a, b in zip(forward, onward):
                assert a.rank + b.rank == Ys.homology(a.degree).dim


class TestContractibleHull:
    def test_hull_is_contractible_and_split(self, two_loop, random_complex):
        rng = random.Random(17)
        for _ in range(20):
            X = random_complex(two_loop, rng)
            hull = contractible_hull(X)
            H = hull.hull.validate("hull")
            witness = null_homotopy_witness(identity_map(H))
            assert isinstance(witness, Homotopy) and witness.verify()
            assert hull.inclusion.is_chain_map() and hull.projection.is_chain_map()
            assert hull.retraction.compose(hull.inclusion) == identity_map(X)
            assert hull.projection.compose(hull.inclusion).is_zero()
            if not X.is_zero():
                assert isinstance(null_homotopy_witness(identity_map(X)), NotNullHomotopic)


def test_direct_sum_biproduct(two_loop_workspace):
    T1, T2 = two_loop_workspace.get("T1"), two_loop_workspace.get("T2")
    total = direct_sum([T1, T2])
    assert total.complex == two_loop_workspace.get("T")
    for inj, proj, X in zip(total.injections, total.projections, (T1, T2)):
        assert proj.compose(inj) == identity_map(X)
        assert inj.is_chain_map() and proj.is_chain_map()


def test_tensor_with_regular_bimodule_keeps_dimensions(two_loop, two_loop_workspace):
    T2 = two_loop_workspace.get("T2")
    product = tensor_complex(T2, bimodule_stalk(regular_bimodule(two_loop)))
    assert product.complex.dims() == T2.dims()
    product.complex.validate("tensor")
    assert homology(product.complex, 0).dim == homology(T2, 0).dim


def test_stalk_complex_of_regular_module(truncated3):
    X = stalk(regular_module(truncated3), 2)
    assert X.lo == X.hi == 2
    assert homotopy_hom(X, X, 0).dim == truncated3.dim
