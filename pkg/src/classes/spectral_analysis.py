"""
Eigenstructure of the Hamilton matrix, the spectrum lattice of q^w, rho and gamma
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import schur

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances
from src.classes.custom_exceptions import (
    CutoffTooLargeError,
    NonPositiveGammaError,
    RealEigenvalueDetectedError,
)
from src.classes.symplectic_core import EigenCluster, HamiltonStructure, SymplecticStructure


@dataclass(frozen=True, eq=False)
class SpectrumLattice:
    """
    Eigenvalues of q^w up to a real cutoff, merged with multiplicity
    """

    generators: list
    points: np.ndarray
    multiplicities: np.ndarray
    e_max: float
    rho: complex = 0j

    def expanded(self) -> np.ndarray:
        """
        Points repeated by multiplicity, sorted by real part
        """
        return np.repeat(self.points, self.multiplicities)

    def to_rows(self) -> list:
        """
        Rows (re, im, multiplicity) for CSV output
        """
        return [(p.real, p.imag, int(m)) for p, m in zip(self.points, self.multiplicities)]


def cluster_eigenvalues(eigenvalues: np.ndarray, threshold: float) -> list:
    """
    Single linkage grouping: eigenvalues closer than threshold end up in one group
    :return: List of index lists
    """
    remaining = list(range(len(eigenvalues)))
    groups = []
    while remaining:
        group = [remaining.pop(0)]
        grew = True
        while grew:
            grew = False
            for index in list(remaining):
                if min(abs(eigenvalues[index] - eigenvalues[g]) for g in group) <= threshold:
                    group.append(index)
                    remaining.remove(index)
                    grew = True
        groups.append(group)
    return groups


def invariant_subspace(F: np.ndarray, select) -> np.ndarray:
    """
    Orthonormal basis of the invariant subspace for the eigenvalues picked by select,
    from a reordered complex Schur form
    """
    _, Z, sdim = schur(F, output="complex", sort=select)
    return Z[:, :sdim]


def positivity_matrix(structure: SymplecticStructure, basis: np.ndarray) -> np.ndarray:
    """
    Hermitian matrix of (1/i) sigma(Z, conj Z) restricted to span(basis)
    """
    gram = -1j * basis.T @ structure.form_matrix @ basis.conj()
    return (gram + gram.conj().T) / 2


def eigenstructure(H: HamiltonStructure, tolerances: Tolerances = DEFAULT_TOLERANCES) -> HamiltonStructure:
    """
    Clusters the eigenvalues of F, builds per cluster invariant bases and the stable planes
    :return: A filled copy of H
    """
    F = H.F
    scale = max(np.linalg.norm(F, 2), 1e-300)
    threshold = tolerances.cluster * scale
    T, _ = schur(F, output="complex")
    eigenvalues = np.diag(T)

    near_real = eigenvalues[np.abs(eigenvalues.imag) < threshold]
    if near_real.size:
        logging.critical(f"Hamilton matrix has eigenvalues on the real axis: {near_real}")
        raise RealEigenvalueDetectedError(
            f"Hamilton matrix has eigenvalues on the real axis: {near_real}",
            eigenvalues=[[value.real, value.imag] for value in near_real],
        )

    clusters = []
    for group in cluster_eigenvalues(eigenvalues, threshold):
        members = eigenvalues[group]

        def in_cluster(z, members=members):
            return bool(np.min(np.abs(members - z)) <= threshold)

        basis = invariant_subspace(F, in_cluster)
        if basis.shape[1] != len(group):
            logging.warning(f"Cluster at {members.mean():.6g} has {len(group)} members but basis {basis.shape[1]}")
        clusters.append(EigenCluster(value=complex(members.mean()), multiplicity=len(group), basis=basis))
    clusters.sort(key=lambda c: (c.value.imag < 0, c.value.real, c.value.imag))

    lambda_plus = invariant_subspace(F, lambda z: z.imag > 0)
    lambda_minus = invariant_subspace(F, lambda z: z.imag < 0)
    if lambda_plus.shape[1] != H.n or lambda_minus.shape[1] != H.n:
        logging.critical(f"Stable planes have dimensions {lambda_plus.shape[1]}, {lambda_minus.shape[1]}")
        raise RealEigenvalueDetectedError(
            f"Stable planes have dimensions {lambda_plus.shape[1]}, {lambda_minus.shape[1]}"
        )

    structure = SymplecticStructure(H.n)
    diagnostics = {
        "positivity_plus": float(np.linalg.eigvalsh(positivity_matrix(structure, lambda_plus))[0]),
        "positivity_minus": float(np.linalg.eigvalsh(positivity_matrix(structure, lambda_minus))[-1]),
        "lagrangian_residual": float(
            max(
                np.linalg.norm(structure.pairing_matrix(lambda_plus, lambda_plus)),
                np.linalg.norm(structure.pairing_matrix(lambda_minus, lambda_minus)),
            )
        ),
    }
    if diagnostics["positivity_plus"] <= 0 or diagnostics["positivity_minus"] >= 0:
        logging.error(f"Stable planes fail the positivity check: {diagnostics}")
    logging.debug(f"Eigenvalues of F: {eigenvalues}")
    return replace(
        H,
        clusters=tuple(clusters),
        lambda_plus=lambda_plus,
        lambda_minus=lambda_minus,
        diagnostics=diagnostics,
    )


def upper_clusters(H: HamiltonStructure) -> list:
    """
    Clusters with Im > 0
    """
    return [c for c in H.clusters if c.value.imag > 0]


def ground_energy(H: HamiltonStructure) -> tuple:
    """
    :return: (rho, gamma) with rho = sum over Im > 0 of -i r lambda and gamma = Re rho
    """
    rho = complex(sum(-1j * c.multiplicity * c.value for c in upper_clusters(H)))
    gamma = rho.real
    if gamma <= 0:
        logging.critical(f"Ground state energy has non-positive real part: {rho}")
        raise NonPositiveGammaError(f"Ground state energy has non-positive real part: {rho}", rho=[rho.real, rho.imag])
    logging.info(f"Ground state energy rho = {rho:.12g}, gamma = {gamma:.12g}")
    return rho, gamma


def spectral_gap(H: HamiltonStructure) -> float:
    """
    delta = 2 min Im lambda over Im lambda > 0, the decay rate of exp(itM)
    """
    return 2.0 * min(c.value.imag for c in upper_clusters(H))


def spectrum_lattice(H: HamiltonStructure, e_max: float, max_points: int = 20000) -> SpectrumLattice:
    """
    Enumerates sum_j (1 + 2 k_j) mu_j with mu_j = -i lambda_j over eigenvalues
    with Im > 0 counted with multiplicity, keeping points with Re <= e_max
    :param e_max: Real cutoff
    :param max_points: Limit on the number of multi-indices visited
    """
    generators = [(-1j * c.value, c.multiplicity) for c in upper_clusters(H)]
    mu = np.array([m for m, r in generators for _ in range(r)], dtype=complex)
    rho = complex(mu.sum())
    found = []

    def descend(index: int, current: complex) -> None:
        if index == len(mu):
            found.append(current)
            if len(found) > max_points:
                logging.critical(f"Spectrum enumeration exceeds {max_points} points for E_max={e_max}")
                raise CutoffTooLargeError(
                    f"Spectrum enumeration exceeds {max_points} points for E_max={e_max}",
                    e_max=e_max,
                    max_points=max_points,
                )
            return
        value = current
        while value.real <= e_max + 1e-12 * max(abs(e_max), 1.0):
            descend(index + 1, value)
            value += 2 * mu[index]

    if rho.real <= e_max + 1e-12 * max(abs(e_max), 1.0):
        descend(0, rho)

    found.sort(key=lambda z: (z.real, z.imag))
    scale = max(abs(e_max), np.abs(mu).max(initial=1.0), 1.0)
    points = []
    multiplicities = []
    merge_tolerance = 1e-9 * scale
    for value in found:
        match = None
        index = len(points) - 1
        while index >= 0 and points[index].real >= value.real - merge_tolerance:
            if abs(points[index] - value) <= merge_tolerance:
                match = index
                break
            index -= 1
        if match is None:
            points.append(value)
            multiplicities.append(1)
        else:
            multiplicities[match] += 1
    logging.debug(f"Lattice below {e_max}: {len(points)} distinct points, {len(found)} with multiplicity")
    return SpectrumLattice(
        generators=generators,
        points=np.array(points, dtype=complex),
        multiplicities=np.array(multiplicities, dtype=int),
        e_max=float(e_max),
        rho=rho,
    )


def reflection_symmetry_residual(H: HamiltonStructure) -> float:
    """
    Distance between Spec(F) and its image under lambda -> -conj(lambda)
    """
    eigenvalues = H.eigenvalues
    reflected = -eigenvalues.conj()
    return float(max(np.min(np.abs(eigenvalues - value)) for value in reflected))
