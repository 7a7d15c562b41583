"""
Shared fixtures: example algebras, seeded random complex generators and
session-scoped runs of the worked examples.
"""

import pytest

from models.algebra import build_algebra_from_quiver, regular_module, zero_module
from models.complexes import complex_from_terms, hom_complex
from models.equivalence import (
    example_apr_tilt,
    example_nakayama,
    example_two_loop,
    truncated_polynomial_presentation,
    two_loop_presentation,
)
from utils.linalg import lincomb, rank_kernel


@pytest.fixture(scope="session")
def two_loop():
    """k[x, y]/(x^2 - y^2, xy, yx)"""
    return build_algebra_from_quiver(two_loop_presentation(2, 2))


@pytest.fixture(scope="session")
def truncated3():
    """k[x]/(x^3)"""
    return build_algebra_from_quiver(truncated_polynomial_presentation(3))


@pytest.fixture(scope="session")
def random_complex():
    """
    Factory for random complexes of free modules with radical differentials

    Terms are A or 0 on a window of at most max_length degrees; each
    differential is a scaled left multiplication by a radical basis element
    chosen so that consecutive differentials compose to zero.
    """

    def build(A, rng, max_length=4):
        lo = rng.randint(-2, 0)
        length = rng.randint(1, max_length)
        R, zero = regular_module(A), zero_module(A)
        terms = {i: R if rng.random() < 0.85 else zero for i in range(lo, lo + length)}
        candidates = [A.basis_vector(i) for i, l in enumerate(A.quiver_meta.lengths) if l >= 1]
        diffs, previous = {}, None
        for i in range(lo, lo + length - 1):
            if not terms[i].dim or not terms[i + 1].dim:
                previous = None
                continue
            allowed = [u for u in candidates if previous is None or not any(A.multiply(u, previous))]
            if not allowed or rng.random() < 0.2:
                previous = None
                continue
            u = rng.choice(allowed)
            c = A.field.element(rng.choice([1, 2, -1]))
            diffs[i] = A.left_mult_matrix(tuple(c * a for a in u))
            previous = u
        return complex_from_terms(A, terms, diffs).validate("random complex")

    return build


@pytest.fixture(scope="session")
def random_chain_map():
    """Factory for a random combination of the degree-0 cycles of Hom(X, Y)"""

    def build(X, Y, rng):
        H = hom_complex(X, Y)
        K = X.field
        _, cycles = rank_kernel(H.diff(0))
        coeffs = [K.element(rng.randint(-2, 2)) for _ in cycles]
        return H.to_map(0, lincomb(coeffs, cycles, H.dim(0), K))

    return build


@pytest.fixture(scope="session")
def two_loop_workspace():
    return example_two_loop(2, 2)


@pytest.fixture(scope="session")
def nakayama_workspace():
    return example_nakayama(3, 1)


@pytest.fixture(scope="session")
def apr_workspace():
    return example_apr_tilt()
