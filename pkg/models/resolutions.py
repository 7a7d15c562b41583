"""
Projective Resolutions - Derived Chronicles

Truncated projective resolutions built by iterated projective covers of
kernels, with their augmentation onto the resolved module.
"""

import logging
from dataclasses import dataclass

from models.algebra import ModuleHom, kernel_module, projective_cover, zero_module
from models.complexes import BoundedComplex, GradedMap, stalk
from utils.errors import InvariantError
from utils.linalg import Mat

logger = logging.getLogger(__name__)

DEFAULT_LENGTH = 8


@dataclass(frozen=True)
class Resolution:
    """P^(-L) -> ... -> P^0 together with the augmentation P^0 -> M"""

    module: object
    complex: BoundedComplex
    augmentation: ModuleHom
    length: int
    minimal: bool

    def augmentation_map(self):
        """The augmentation as a chain map P -> M (M a stalk in degree 0)"""
        return GradedMap.build(self.complex, stalk(self.module), 0, {0: self.augmentation.matrix})


def resolve(M, L=DEFAULT_LENGTH, minimal=True):
    """
    Projective resolution of M truncated at degree -L

    Args:
        M (FDModule): the module, nonzero
        L (int): number of steps
        minimal (bool): minimal covers for quiver algebras; otherwise free covers
            with one redundant generator in every degree except -L

    Returns:
        Resolution: the complex on [-L, 0] and its augmentation
    """
    if L < 0:
        raise ValueError(f"resolution length must be >= 0, got {L}")
    A = M.algebra
    K = M.field
    P0, eps = projective_cover(M, minimal=minimal, redundant=0 if minimal else 1)
    terms = [P0]
    diffs = []
    kernel, inclusion = kernel_module(eps)
    for step in range(1, L + 1):
        if kernel.dim == 0:
            terms.append(zero_module(A))
            diffs.append(Mat.zeros(0, terms[-2].dim, K))
            continue
        padding = 0 if minimal or step == L else 1
        P, cover = projective_cover(kernel, minimal=minimal, redundant=padding)
        d = cover.matrix @ inclusion
        terms.append(P)
        diffs.append(d)
        kernel, inclusion = kernel_module(cover)
    modules = tuple(reversed(terms))
    differentials = tuple(reversed(diffs))
    X = BoundedComplex(A, -L, 0, modules, differentials, truncation=L)
    logger.info(f"Resolved module of dimension {M.dim}: term dims {[m.dim for m in modules]}")
    return Resolution(M, X, eps, L, minimal)


def projective_resolution(M, L=DEFAULT_LENGTH, minimal=True):
    """The complex of resolve(M, L); exact in degrees -L+1..-1 with H^0 = M"""
    return resolve(M, L, minimal).complex


def check_resolution(res):
    """Verify d d = 0, exactness in -L+1..-1 and H^0 = M by ranks"""
    X = res.complex
    X.validate("resolution")
    for i in range(X.lo + 1, 0):
        incoming = X.diff(i - 1).rank()
        outgoing = X.diff(i).rank()
        if incoming + outgoing != X.dim(i):
            raise InvariantError("resolution", f"not exact in degree {i}")
    image = X.diff(-1).rank() if X.lo < 0 else 0
    if X.dim(0) - image != res.module.dim or res.augmentation.matrix.rank() != res.module.dim:
        raise InvariantError("resolution", "H^0 is not the resolved module")
    if not (X.diff(-1) @ res.augmentation.matrix).is_zero():
        raise InvariantError("resolution", "augmentation does not kill the image of d^-1")
    return True
