import pytest

from models.algebra import cyclic_quotient, direct_sum_modules, regular_module
from models.complexes import direct_sum, homotopy_hom, shift, stalk
from models.equivalence import (
    RIGHT,
    alternating_exponents,
    auslander_yoneda,
    compare_resolutions,
    example_nakayama,
    example_two_loop,
    factor_through,
    left_approximation,
    mutation_pipeline,
    right_approximation,
    tilting_selforthogonality,
    verify_approximation,
)
from models.resolutions import check_resolution, projective_resolution, resolve
from utils.errors import NotProjectiveTerm, UsageError, WindowTooSmall


@pytest.fixture(scope="module")
def t1_t2(two_loop_workspace):
    return two_loop_workspace.get("T1"), two_loop_workspace.get("T2")


@pytest.fixture(scope="module")
def mutation(t1_t2):
    T1, T2 = t1_t2
    return mutation_pipeline(T2, T1)


class TestApproximations:
    def test_minimal_left_approximation(self, t1_t2):
        T1, T2 = t1_t2
        result = left_approximation(T2, T1)
        assert result.multiplicities == {1: 1, 0: 1}
        assert result.report.passed
        assert result.map.is_chain_map()

    def test_non_minimal_left_approximation(self, t1_t2):
        T1, T2 = t1_t2
        result = left_approximation(T2, T1, minimal=False)
        assert result.multiplicities == {1: 2, 0: 2}
        assert result.report.passed

    def test_displayed_maps_verify(self, two_loop_workspace, t1_t2):
        T1, _ = t1_t2
        assert verify_approximation(two_loop_workspace.get("f"), T1).passed
        assert verify_approximation(two_loop_workspace.get("g"), T1, side=RIGHT).passed

    def test_right_approximation_of_z(self, two_loop_workspace, t1_t2):
        T1, _ = t1_t2
        result = right_approximation(two_loop_workspace.get("Z"), T1)
        assert result.report.passed
        assert result.map.target == two_loop_workspace.get("Z")

    def test_bad_side_and_window(self, two_loop_workspace, t1_t2):
        T1, T2 = t1_t2
        with pytest.raises(UsageError):
            verify_approximation(two_loop_workspace.get("f"), T1, side="up")
        with pytest.raises(WindowTooSmall):
            left_approximation(T2, T1, window=(2, 1))

    @pytest.mark.parametrize("degree", [0, 1])
    def test_maps_factor_through_the_approximation(self, t1_t2, degree):
        T1, T2 = t1_t2
        result = left_approximation(T2, T1)
        for g in homotopy_hom(T2, T1, degree).representatives:
            factorization = factor_through(result, g)
            assert factorization is not None
            assert factorization.homotopy.verify()

    def test_factorization_needs_left_side(self, two_loop_workspace, t1_t2):
        T1, T2 = t1_t2
        result = right_approximation(two_loop_workspace.get("Z"), T1)
        with pytest.raises(UsageError):
            factor_through(result, homotopy_hom(T2, T1, 0).representatives[0])


class TestMutation:
    def test_certificates_pass(self, mutation):
        assert mutation.passed
        assert mutation.conclusion == "derived equivalent (certificate: quasi-balanced bimodule Hom_A(X+M, Y+M))"
        assert mutation.hom_k_consistent
        assert mutation.triangle_verified

    def test_report_layout(self, mutation):
        data = mutation.to_dict()
        assert data["multiplicities"] == {"0": 1, "1": 1}
        assert data["quasi_balanced_left"]["passed"]
        assert data["quasi_balanced_right"]["passed"]
        assert data["hstar_dims_lambda"]


class TestTilting:
    def test_regular_module_is_tilting(self, truncated3):
        assert tilting_selforthogonality(stalk(regular_module(truncated3))).passed

    def test_regular_plus_shift_fails(self, truncated3):
        R = stalk(regular_module(truncated3))
        report = tilting_selforthogonality(direct_sum([R, shift(R, 1)]).complex)
        assert not report.passed
        assert report.failing() == [-1, 1]
        assert report.to_dict()["failing"] == [-1, 1]

    def test_non_projective_term(self, truncated3):
        X1 = cyclic_quotient(truncated3, [truncated3.basis_vector(1)])
        with pytest.raises(NotProjectiveTerm):
            tilting_selforthogonality(stalk(X1))

    def test_apr_complex(self, apr_workspace):
        assert tilting_selforthogonality(apr_workspace.get("T")).passed


class TestYoneda:
    @pytest.mark.parametrize("power,dims", [(1, (6, 1, 1, 1, 1)), (2, (9, 1, 1, 1, 1))])
    def test_dims(self, truncated3, power, dims):
        X = cyclic_quotient(truncated3, [truncated3.basis_vector(power)])
        N, _ = direct_sum_modules([regular_module(truncated3), X], truncated3)
        E = auslander_yoneda(N, (0, 4), 8)
        assert E.dims() == dims
        assert E.degree_zero_matches()
        assert E.algebra.check_associativity()
        assert E.algebra.check_unit()

    def test_window_beyond_resolution(self, nakayama_workspace):
        with pytest.raises(WindowTooSmall):
            auslander_yoneda(nakayama_workspace.get("X1"), (0, 8), 8)


class TestResolutions:
    def test_minimal_and_free_resolutions_are_exact(self, nakayama_workspace):
        X1 = nakayama_workspace.get("X1")
        assert check_resolution(resolve(X1, 8))
        free = resolve(X1, 8, minimal=False)
        assert check_resolution(free)
        assert free.complex.dims() == {0: 6, -8: 6, **{n: 9 for n in range(-7, 0)}}

    def test_alternating_differentials(self, nakayama_workspace):
        assert alternating_exponents(nakayama_workspace.get("P1"), 3) == [1, 2, 1, 2, 1, 2, 1, 2]

    def test_resolution_independence(self, nakayama_workspace):
        result = compare_resolutions(nakayama_workspace.get("X1"), 4)
        assert result.dims_agree
        assert result.passed


class TestExamples:
    def test_two_loop_checks(self, two_loop_workspace):
        checks = two_loop_workspace.checks
        assert checks["algebra_dim"] == 4
        assert checks["approximation_multiplicities"] == {"0": 1, "1": 1}
        assert all(v for v in checks.values() if isinstance(v, bool))

    def test_two_loop_needs_exponents_of_two(self):
        with pytest.raises(UsageError):
            example_two_loop(1, 2)

    def test_nakayama_checks(self, nakayama_workspace):
        checks = nakayama_workspace.checks
        assert checks["algebra_dim"] == 3
        assert checks["syzygy_isomorphic"] and checks["alternating_differentials"]
        assert set(nakayama_workspace.names("module")) == {"R", "X1", "X2", "AplusX1", "AplusX2", "Omega"}

    def test_nakayama_rejects_r_out_of_range(self):
        with pytest.raises(UsageError):
            example_nakayama(3, 0)

    def test_apr_checks(self, apr_workspace):
        assert apr_workspace.checks["tilted_dim"] == 3
        assert all(v for v in apr_workspace.checks.values() if isinstance(v, bool))


def test_projective_resolution_of_a_quotient(nakayama_workspace):
    P = projective_resolution(nakayama_workspace.get("X1"), 6)
    assert P.dims() == {n: 3 for n in range(-6, 1)}
