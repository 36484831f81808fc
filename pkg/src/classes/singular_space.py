"""
Singular space S = intersection of ker[(Re F)(Im F)^j] over j = 0..2n-1, and the index k0
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances
from src.classes.custom_exceptions import SingularSpaceNontrivialError
from src.classes.symplectic_core import HamiltonStructure


@dataclass(frozen=True, eq=False)
class SingularSpaceReport:
    """
    Orthonormal basis of S with the dimensions of the nested kernel chain
    """

    basis: np.ndarray
    partial_dims: list = field(default_factory=list)
    k0: int = None

    @property
    def dim(self) -> int:
        """
        Dimension of S
        """
        return int(self.basis.shape[1])

    @property
    def is_trivial(self) -> bool:
        """
        True when S = {0}
        """
        return self.dim == 0

    def to_dict(self) -> dict:
        """
        JSON form, k0 reads "undefined" when S is nontrivial
        """
        return {
            "dim": self.dim,
            "k0": self.k0 if self.k0 is not None else "undefined",
            "partial_dims": list(self.partial_dims),
            "basis": self.basis.T.tolist(),
        }


def kernel_blocks(F: np.ndarray) -> list:
    """
    Real matrices (Re F)(Im F)^j / |Im F|^j for j = 0..2n-1
    """
    re_part = F.real
    im_part = F.imag
    growth = np.linalg.norm(im_part, 2)
    blocks = []
    power = np.eye(F.shape[0])
    for _ in range(F.shape[0]):
        blocks.append(re_part @ power)
        power = power @ im_part / growth if growth > 0 else np.zeros_like(power)
    return blocks


def null_space(matrix: np.ndarray, rank_tolerance: float) -> np.ndarray:
    """
    Orthonormal basis of the numerical null space, singular values below
    rank_tolerance times the largest one count as zero
    """
    _, singular_values, vh = np.linalg.svd(matrix)
    largest = singular_values[0] if singular_values.size else 0.0
    if largest == 0.0:
        return np.eye(matrix.shape[1])
    rank = int(np.sum(singular_values > rank_tolerance * largest))
    return vh[rank:].conj().T


def singular_space(H: HamiltonStructure, tolerances: Tolerances = DEFAULT_TOLERANCES) -> SingularSpaceReport:
    """
    Computes S over the reals by nested stacking of the kernel blocks
    :param H: Structure with F computed
    :return: Report with basis, partial dimensions and k0
    """
    blocks = kernel_blocks(H.F)
    partial_dims = []
    basis = None
    for j in range(len(blocks)):
        stacked = np.vstack(blocks[: j + 1])
        basis = null_space(stacked, tolerances.rank)
        partial_dims.append(int(basis.shape[1]))
        logging.debug(f"Nested kernel dimension after j={j}: {partial_dims[-1]}")

    k0 = None
    if partial_dims[-1] == 0:
        k0 = partial_dims.index(0)
    logging.info(f"Singular space dimension {partial_dims[-1]}, k0 {k0 if k0 is not None else 'undefined'}")
    return SingularSpaceReport(basis=basis, partial_dims=partial_dims, k0=k0)


def require_trivial(report: SingularSpaceReport) -> None:
    """
    Refuses to continue when S is not {0}
    """
    if not report.is_trivial:
        logging.critical(f"Singular space is nontrivial, dimension {report.dim}")
        raise SingularSpaceNontrivialError(
            f"Singular space is nontrivial, dimension {report.dim}",
            basis=report.basis,
            dim=report.dim,
        )
