import random

import pytest

from models.algebra import cyclic_quotient, regular_bimodule, regular_module
from models.complexes import bimodule_stalk, hom_complex, homotopy_hom, stalk
from models.dg import (
    AlgebraAsDG,
    HomDGModule,
    OppositeDGAlgebra,
    RegularDGModule,
    canonical_bimodule_maps,
    check_dg_axioms,
    check_leibniz,
    check_module_leibniz,
    cohomology_ring,
    composition_action_map,
    dump_dg_algebra,
    end_dg_algebra,
    hom_over_dg,
    intersect_windows,
    is_quasi_isomorphism,
    opposite_action_map,
    tensor_induction_map,
)
from models.resolutions import projective_resolution
from utils.errors import WindowTooSmall
from utils.linalg import lincomb


@pytest.fixture(scope="module")
def t2_end(two_loop_workspace):
    return end_dg_algebra(two_loop_workspace.get("T2"))


class TestAxioms:
    def test_end_algebra(self, t2_end):
        report = check_dg_axioms(t2_end)
        assert report.passed, report

    def test_opposite_algebra(self, t2_end):
        assert check_dg_axioms(OppositeDGAlgebra(t2_end)).passed

    def test_ordinary_algebra(self, two_loop):
        assert check_dg_axioms(AlgebraAsDG(two_loop)).passed

    def test_random_end_algebras(self, truncated3, random_complex):
        rng = random.Random(3)
        for _ in range(6):
            L = end_dg_algebra(random_complex(truncated3, rng, max_length=3))
            assert check_dg_axioms(L).passed

    def test_hom_module_leibniz(self, two_loop_workspace, t2_end):
        T1, T2 = two_loop_workspace.get("T1"), two_loop_workspace.get("T2")
        assert check_module_leibniz(HomDGModule(hom_complex(T2, T1), t2_end)).passed
        assert check_module_leibniz(RegularDGModule(t2_end)).passed


class TestCohomologyRing:
    def test_dims_match_homotopy_classes(self, two_loop_workspace, t2_end):
        T2 = two_loop_workspace.get("T2")
        ring = cohomology_ring(t2_end)
        for n in range(t2_end.lo, t2_end.hi + 1):
            assert ring.dim(n) == homotopy_hom(T2, T2, n).dim

    def test_associative_and_unital(self, t2_end):
        ring = cohomology_ring(t2_end)
        assert ring.unit is not None
        assert ring.check_associativity()
        assert ring.check_unit()

    @pytest.mark.parametrize("which", ["t2", "resolution"])
    def test_products_ignore_coboundaries(self, two_loop_workspace, truncated3, which):
        if which == "t2":
            L = end_dg_algebra(two_loop_workspace.get("T2"))
        else:
            X1 = cyclic_quotient(truncated3, [truncated3.basis_vector(1)])
            L = end_dg_algebra(projective_resolution(X1, 4))
        ring = cohomology_ring(L)
        rng = random.Random(11)
        checked = 0
        for p in ring.dims:
            for q in ring.dims:
                n = p + q
                if n not in ring.dims or not ring.dim(n):
                    continue
                H = {k: L.space.homology(k) for k in (p, q, n)}
                for i, a in enumerate(H[p].representatives):
                    for j, b in enumerate(H[q].representatives):
                        prod = L.multiply(p, _add_coboundary(L, p, a, rng), q, _add_coboundary(L, q, b, rng))
                        coords = H[n].projection.apply(prod)
                        assert (coords if any(coords) else None) == ring.products.get((p, i, q, j))
                        checked += 1
        assert checked > 0

    def test_window_outside_validity(self, t2_end):
        with pytest.raises(WindowTooSmall):
            cohomology_ring(t2_end, (5, 6))

    def test_intersect_windows_ignores_missing(self):
        assert intersect_windows((-3, 3), None, (1, 8)) == (1, 3)


def test_dump_compares_equal(t2_end):
    table = dump_dg_algebra(t2_end, "L")
    assert table == t2_end
    assert table.name == "L"
    assert check_dg_axioms(table).passed


class TestCanonicalMaps:
    def test_regular_bimodule(self, two_loop):
        maps = canonical_bimodule_maps(bimodule_stalk(regular_bimodule(two_loop)))
        assert maps.left_check.passed and maps.right_check.passed
        assert maps.left_verdict.passed and maps.right_verdict.passed

    def test_flipped_sign_is_not_a_dg_map(self, two_loop):
        maps = canonical_bimodule_maps(bimodule_stalk(regular_bimodule(two_loop)), right_sign=-1)
        assert maps.left_check.passed
        assert not maps.right_check.passed


class TestActionMaps:
    def test_composition_action_on_t2(self, two_loop_workspace):
        T2 = two_loop_workspace.get("T2")
        result = composition_action_map(T2, T2, T2)
        assert result.is_chain_map()
        assert result.verdict.passed

    def test_opposite_action_on_t2(self, two_loop_workspace):
        T2 = two_loop_workspace.get("T2")
        result = opposite_action_map(T2, T2, T2)
        assert result.is_chain_map()
        assert result.verdict.passed

    def test_hom_over_end_recovers_end(self, t2_end):
        R = RegularDGModule(t2_end)
        H = hom_over_dg(t2_end, R, R)
        for n in t2_end.degrees:
            assert H.dim(n) == t2_end.dim(n)


class TestTensorInduction:
    def test_regular_bimodule_gives_isomorphism(self, two_loop, two_loop_workspace):
        result = tensor_induction_map(bimodule_stalk(regular_bimodule(two_loop)), two_loop_workspace.get("T2"))
        assert result.check.passed
        assert result.map.is_isomorphism()
        assert result.verdict.passed

    def test_apr_tilt(self, apr_workspace):
        tilted = apr_workspace.get("B", "algebra")
        assert tilted.dim == 3
        result = tensor_induction_map(apr_workspace.get("Y"), stalk(regular_module(tilted)))
        assert result.check.passed
        assert result.verdict.passed


def test_leibniz_on_end_and_opposite(t2_end):
    assert check_leibniz(t2_end).passed
    assert check_leibniz(OppositeDGAlgebra(t2_end)).passed


def test_canonical_left_map_is_a_quasi_isomorphism(two_loop):
    maps = canonical_bimodule_maps(bimodule_stalk(regular_bimodule(two_loop)))
    verdict = is_quasi_isomorphism(maps.left_map)
    assert verdict.passed
    assert verdict == maps.left_verdict


def _add_coboundary(L, degree, cocycle, rng):
    """cocycle + d(c) for a random cochain c one degree down"""
    below = degree - 1
    if below not in L.degrees or not L.dim(below):
        return cocycle
    K = L.field
    c = tuple(K.element(rng.randint(-3, 3)) for _ in range(L.dim(below)))
    return lincomb([K.one, K.one], [cocycle, L.diff(below).apply(c)], L.dim(degree), K)
