"""
Normal form of a symbol with trivial singular space.

A complex symplectic map K sends the stable planes to the coordinate planes,
Lambda+ -> {(z, 0)} and Lambda- -> {(0, zeta)}, so that q(K^{-1}(z, zeta)) = Mz.zeta.
K is generated by a holomorphic quadratic phase
phi(z, y) = 1/2 P_zz z.z + P_zy z.y + 1/2 P_yy y.y,
whose weight Phi0(z) = sup over real y of -Im phi(z, y) is a strictly convex quadratic form.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances
from src.classes.custom_exceptions import (
    ConvexityFailureError,
    DegeneratePairingError,
    FiberTangencyError,
    LeviFailureError,
    NormalFormResidualError,
)
from src.classes.spectral_analysis import upper_clusters
from src.classes.symplectic_core import HamiltonStructure, QuadraticSymbol, SymplecticStructure
from src.helpers.py_functions import complex_matrix_to_lists

FIBER_TANGENCY_ATTEMPTS = 8


@dataclass(frozen=True, eq=False)
class CanonicalMap:
    """
    Complex linear symplectic map (y, eta) -> (z, zeta), z = Ay + B eta, zeta = Cy + D eta
    """

    K: np.ndarray

    @property
    def n(self) -> int:
        """
        Spatial dimension
        """
        return self.K.shape[0] // 2

    @property
    def A(self) -> np.ndarray:
        """
        zy block
        """
        return self.K[: self.n, : self.n]

    @property
    def B(self) -> np.ndarray:
        """
        z eta block
        """
        return self.K[: self.n, self.n :]

    @property
    def C(self) -> np.ndarray:
        """
        zeta y block
        """
        return self.K[self.n :, : self.n]

    @property
    def D(self) -> np.ndarray:
        """
        zeta eta block
        """
        return self.K[self.n :, self.n :]

    @property
    def inverse(self) -> np.ndarray:
        """
        K^{-1}
        """
        return np.linalg.inv(self.K)

    def symplectic_residual(self) -> float:
        """
        |K^T J K - J|
        """
        J = SymplecticStructure(self.n).J
        return float(np.linalg.norm(self.K.T @ J @ self.K - J))


@dataclass(frozen=True, eq=False)
class FbiPhase:
    """
    Blocks of the generating phase and the transform normalization c_phi
    """

    P_zz: np.ndarray
    P_zy: np.ndarray
    P_yy: np.ndarray
    c_phi: float

    @property
    def n(self) -> int:
        """
        Spatial dimension
        """
        return self.P_zz.shape[0]

    def evaluate(self, z: np.ndarray, y: np.ndarray) -> complex:
        """
        :return: phi(z, y)
        """
        z = np.asarray(z, dtype=complex)
        y = np.asarray(y, dtype=complex)
        return complex(0.5 * z @ self.P_zz @ z + z @ self.P_zy @ y + 0.5 * y @ self.P_yy @ y)

    def full_matrix(self) -> np.ndarray:
        """
        Symmetric matrix P of phi = 1/2 (z, y).P(z, y)
        """
        return np.block([[self.P_zz, self.P_zy], [self.P_zy.T, self.P_yy]])

    def induced_map(self) -> np.ndarray:
        """
        Matrix of (y, -phi'_y) -> (z, phi'_z)
        """
        B_inv = -self.P_zy.T
        B = np.linalg.inv(B_inv)
        A = B @ self.P_yy
        D = self.P_zz @ B
        C = self.P_zy + D @ self.P_yy
        return np.block([[A, B], [C, D]])


@dataclass(frozen=True, eq=False)
class WeightPhi0:
    """
    Phi0(z) = conj(z).L z + Re(1/2 W_zz z.z), equivalently s.W_R s with s = (Re z, Im z)
    """

    W_zz: np.ndarray
    W_zbarz: np.ndarray
    W_R: np.ndarray
    r_map: np.ndarray
    C_Phi0: float

    @property
    def n(self) -> int:
        """
        Spatial dimension
        """
        return self.W_zz.shape[0]

    def phi0(self, z: np.ndarray) -> float:
        """
        :return: Phi0(z)
        """
        z = np.asarray(z, dtype=complex)
        return float((z.conj() @ self.W_zbarz @ z).real + (0.5 * z @ self.W_zz @ z).real)

    def psi0(self, z: np.ndarray, theta: np.ndarray) -> complex:
        """
        Holomorphic polarization with psi0(z, conj z) = Phi0(z)
        """
        z = np.asarray(z, dtype=complex)
        theta = np.asarray(theta, dtype=complex)
        return complex(
            0.25 * z @ self.W_zz @ z + theta @ self.W_zbarz @ z + 0.25 * theta @ self.W_zz.conj() @ theta
        )

    def dz_phi0(self, z: np.ndarray) -> np.ndarray:
        """
        Holomorphic gradient of Phi0
        """
        z = np.asarray(z, dtype=complex)
        return 0.5 * self.W_zz @ z + self.W_zbarz.T @ z.conj()

    def fiber(self, z: np.ndarray) -> np.ndarray:
        """
        zeta = (2/i) dPhi0/dz, the fiber of Lambda_Phi0 over z
        """
        return (2 / 1j) * self.dz_phi0(z)

    def maximizer(self, z: np.ndarray) -> np.ndarray:
        """
        The real y realizing the supremum defining Phi0(z)
        """
        z = np.asarray(z, dtype=complex)
        return self.r_map @ np.concatenate([z.real, z.imag])


@dataclass(frozen=True, eq=False)
class NormalForm:
    """
    Canonical map, reduced matrix, generating phase and weight of a symbol
    """

    structure: HamiltonStructure
    canonical_map: CanonicalMap
    M: np.ndarray
    phase: FbiPhase
    weight: WeightPhi0
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        """
        Spatial dimension
        """
        return self.M.shape[0]

    @property
    def symbol(self) -> QuadraticSymbol:
        """
        Symbol the normal form was built from
        """
        return self.structure.symbol

    def reduced_symbol(self, z: np.ndarray, zeta: np.ndarray) -> complex:
        """
        q~(z, zeta) = Mz.zeta
        """
        return complex(np.asarray(zeta, dtype=complex) @ self.M @ np.asarray(z, dtype=complex))

    def to_dict(self) -> dict:
        """
        JSON form for --dump-normal-form
        """
        return {
            "M": complex_matrix_to_lists(self.M),
            "K": complex_matrix_to_lists(self.canonical_map.K),
            "phase": {
                "P_zz": complex_matrix_to_lists(self.phase.P_zz),
                "P_zy": complex_matrix_to_lists(self.phase.P_zy),
                "P_yy": complex_matrix_to_lists(self.phase.P_yy),
                "c_phi": self.phase.c_phi,
            },
            "weight": {
                "W_zz": complex_matrix_to_lists(self.weight.W_zz),
                "W_zbarz": complex_matrix_to_lists(self.weight.W_zbarz),
                "W_R": self.weight.W_R.tolist(),
                "C_Phi0": self.weight.C_Phi0,
            },
            "diagnostics": dict(self.diagnostics),
        }


def random_mixing(n: int, rng: np.random.Generator) -> np.ndarray:
    """
    Random unitary n x n matrix from the QR factorization of a complex Gaussian matrix
    """
    gaussian = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    unitary, triangular = np.linalg.qr(gaussian)
    return unitary * (np.diag(triangular) / np.abs(np.diag(triangular)))


def pairing_bases(
    H: HamiltonStructure, tolerances: Tolerances = DEFAULT_TOLERANCES, rng: np.random.Generator = None
) -> tuple:
    """
    Bases E of Lambda+ and G of Lambda- with sigma(g_j, e_k) = delta_jk, built by
    modified Gram-Schmidt in the symplectic pairing with pivoting
    :param rng: When given, both bases are mixed by random unitaries first
    :return: (E, G)
    """
    structure = SymplecticStructure(H.n)
    E = np.array(H.lambda_plus, dtype=complex)
    G = np.array(H.lambda_minus, dtype=complex)
    if rng is not None:
        E = E @ random_mixing(H.n, rng)
        G = G @ random_mixing(H.n, rng)
    E = E / np.linalg.norm(E, axis=0)
    G = G / np.linalg.norm(G, axis=0)

    for j in range(H.n):
        pairing = structure.pairing_matrix(G[:, j:], E[:, j:])
        g_index, e_index = np.unravel_index(np.argmax(np.abs(pairing)), pairing.shape)
        pivot = pairing[g_index, e_index]
        if abs(pivot) < tolerances.structure:
            logging.critical(f"Symplectic pairing between stable planes is singular, pivot {abs(pivot):.3e}")
            raise DegeneratePairingError(
                f"Symplectic pairing between stable planes is singular, pivot {abs(pivot):.3e}", step=j
            )
        G[:, [j, j + g_index]] = G[:, [j + g_index, j]]
        E[:, [j, j + e_index]] = E[:, [j + e_index, j]]
        G[:, j] /= pivot
        for k in range(j + 1, H.n):
            E[:, k] -= structure.sigma(G[:, j], E[:, k]) * E[:, j]
            G[:, k] -= structure.sigma(G[:, k], E[:, j]) * G[:, j]

    residual = np.linalg.norm(structure.pairing_matrix(G, E) - np.eye(H.n))
    if residual > tolerances.structure * max(1.0, np.linalg.norm(G) * np.linalg.norm(E)):
        logging.critical(f"Dual pairing residual {residual:.3e} exceeds tolerance")
        raise DegeneratePairingError(f"Dual pairing residual {residual:.3e} exceeds tolerance")
    return E, G


def build_canonical_map(E: np.ndarray, G: np.ndarray) -> CanonicalMap:
    """
    K with e_j -> (delta_j, 0) and g_j -> (0, delta_j), i.e. K = [E G]^{-1}
    """
    return CanonicalMap(K=np.linalg.inv(np.hstack([E, G])))


def transformed_symbol_matrix(sym: QuadraticSymbol, cmap: CanonicalMap) -> np.ndarray:
    """
    Q~ = K^{-T} Q K^{-1}, the matrix of q o K^{-1}
    """
    inverse = cmap.inverse
    return inverse.T @ sym.Q @ inverse


def reduced_matrix(sym: QuadraticSymbol, cmap: CanonicalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> tuple:
    """
    Reads M off the mixed block of the transformed symbol
    :return: (M, residual) where residual is the relative size of the zz and zeta-zeta blocks
    """
    n = cmap.n
    transformed = transformed_symbol_matrix(sym, cmap)
    M = 2 * transformed[n:, :n]
    residual = max(np.linalg.norm(transformed[:n, :n]), np.linalg.norm(transformed[n:, n:]))
    residual /= max(np.linalg.norm(transformed), 1e-300)
    if residual > tolerances.structure:
        logging.critical(f"Transformed symbol keeps pure blocks of relative size {residual:.3e}")
        raise NormalFormResidualError(
            f"Transformed symbol keeps pure blocks of relative size {residual:.3e}", residual=residual
        )
    return M, float(residual)


def generating_phase(cmap: CanonicalMap, tolerances: Tolerances = DEFAULT_TOLERANCES) -> FbiPhase:
    """
    P_yy = B^{-1}A, P_zy = -B^{-T}, P_zz = DB^{-1}
    """
    n = cmap.n
    smallest = np.linalg.svd(cmap.B, compute_uv=False)[-1]
    if smallest < tolerances.structure * np.linalg.norm(cmap.K, 2):
        logging.error(f"Fiber block of the canonical map is singular, smallest singular value {smallest:.3e}")
        raise FiberTangencyError(
            f"Fiber block of the canonical map is singular, smallest singular value {smallest:.3e}"
        )
    B_inv = np.linalg.inv(cmap.B)
    P_yy = B_inv @ cmap.A
    P_zy = -B_inv.T
    P_zz = cmap.D @ B_inv

    asymmetry = max(np.linalg.norm(P_yy - P_yy.T), np.linalg.norm(P_zz - P_zz.T))
    logging.debug(f"Generating phase asymmetry {asymmetry:.3e}")
    P_yy = (P_yy + P_yy.T) / 2
    P_zz = (P_zz + P_zz.T) / 2

    im_yy = (P_yy.imag + P_yy.imag.T) / 2
    im_eigenvalues = np.linalg.eigvalsh(im_yy)
    if im_eigenvalues[0] <= 0:
        logging.error(f"Im P_yy is not positive definite, min eigenvalue {im_eigenvalues[0]:.3e}")
        raise FiberTangencyError(f"Im P_yy is not positive definite, min eigenvalue {im_eigenvalues[0]:.3e}")

    c_phi = (
        2 ** (-n / 2)
        * np.pi ** (-3 * n / 4)
        * np.prod(im_eigenvalues) ** (-0.25)
        * abs(np.linalg.det(P_zy))
    )
    return FbiPhase(P_zz=P_zz, P_zy=P_zy, P_yy=P_yy, c_phi=float(c_phi))


def real_embedding(n: int) -> np.ndarray:
    """
    Matrix Pi with (z, y) = Pi (Re z, Im z, y) for real y
    """
    identity = np.eye(n)
    zeros = np.zeros((n, n))
    return np.block([[identity, 1j * identity, zeros], [zeros, zeros, identity]])


def complex_weight_blocks(W_R: np.ndarray) -> tuple:
    """
    Splits the real form s.W_R s, s = (Re z, Im z), into the Levi matrix L and
    the symmetric W_zz with Phi0 = conj(z).Lz + Re(1/2 W_zz z.z)
    """
    n = W_R.shape[0] // 2
    P = W_R[:n, :n]
    R = W_R[:n, n:]
    S = W_R[n:, n:]
    levi = (P + S) / 2 - 0.5j * (R - R.T)
    X = (P - S) / 2 - 0.5j * (R + R.T)
    return 2 * X, levi


def weight_from_phase(
    phase: FbiPhase, cmap: CanonicalMap = None, tolerances: Tolerances = DEFAULT_TOLERANCES, seed: int = 0
) -> WeightPhi0:
    """
    Maximizes the concave quadratic -Im phi(z, .) over real y in closed form
    :param cmap: When given, the graph identity K(R^{2n}) = Lambda_Phi0 is checked
    """
    n = phase.n
    embedding = real_embedding(n)
    H = -(embedding.T @ phase.full_matrix() @ embedding).imag
    H = (H + H.T) / 2
    H_ss = H[: 2 * n, : 2 * n]
    H_sy = H[: 2 * n, 2 * n :]
    H_yy = H[2 * n :, 2 * n :]
    r_map = -np.linalg.solve(H_yy, H_sy.T)
    W_R = 0.5 * (H_ss + H_sy @ r_map)
    W_R = (W_R + W_R.T) / 2

    convexity = np.linalg.eigvalsh(W_R)[0]
    if convexity <= 0:
        logging.critical(f"Weight is not strictly convex, min eigenvalue {convexity:.3e}")
        raise ConvexityFailureError(f"Weight is not strictly convex, min eigenvalue {convexity:.3e}")

    W_zz, levi = complex_weight_blocks(W_R)
    levi_eigenvalues = np.linalg.eigvalsh(levi)
    if levi_eigenvalues[0] <= 0 or np.linalg.norm(levi - levi.conj().T) > tolerances.structure:
        logging.critical(f"Levi matrix is not Hermitian positive definite, eigenvalues {levi_eigenvalues}")
        raise LeviFailureError(f"Levi matrix is not Hermitian positive definite, eigenvalues {levi_eigenvalues}")

    C_Phi0 = float(2**n * np.pi ** (-n) * np.linalg.det(levi).real)
    weight = WeightPhi0(W_zz=W_zz, W_zbarz=levi, W_R=W_R, r_map=r_map, C_Phi0=C_Phi0)

    if cmap is not None:
        residual = graph_residual(weight, cmap, seed=seed)
        if residual > tolerances.structure * 100:
            logging.error(f"Image of real phase space deviates from Lambda_Phi0 by {residual:.3e}")
        else:
            logging.debug(f"Graph identity residual {residual:.3e}")
    return weight


def levi_closed_form(phase: FbiPhase) -> np.ndarray:
    """
    L = 1/4 conj(P_zy) (Im P_yy)^{-1} P_zy^T
    """
    return 0.25 * phase.P_zy.conj() @ np.linalg.solve(phase.P_yy.imag, phase.P_zy.T)


def graph_residual(weight: WeightPhi0, cmap: CanonicalMap, probes: int = 100, seed: int = 0) -> float:
    """
    Relative deviation of the fiber of K(X), X real, from (2/i) dPhi0/dz
    """
    rng = np.random.default_rng(seed)
    n = cmap.n
    worst = 0.0
    for _ in range(probes):
        image = cmap.K @ rng.standard_normal(2 * n)
        z, zeta = image[:n], image[n:]
        worst = max(worst, np.linalg.norm(zeta - weight.fiber(z)) / max(np.linalg.norm(image), 1e-300))
    return float(worst)


def egorov_residual(H: HamiltonStructure, cmap: CanonicalMap, M: np.ndarray) -> float:
    """
    Relative size of K F K^{-1} - 1/2 blockdiag(M, -M^T)
    """
    n = cmap.n
    conjugated = cmap.K @ H.F @ cmap.inverse
    expected = 0.5 * np.block([[M, np.zeros((n, n))], [np.zeros((n, n)), -M.T]])
    return float(np.linalg.norm(conjugated - expected) / max(np.linalg.norm(H.F), 1e-300))


def isospectral_residual(H: HamiltonStructure, M: np.ndarray) -> float:
    """
    Largest distance in the optimal matching of Spec(M) with 2 Spec(F) restricted to Im > 0
    """
    expected = np.array([2 * c.value for c in upper_clusters(H) for _ in range(c.multiplicity)])
    actual = np.linalg.eigvals(M)
    distances = np.abs(actual[:, None] - expected[None, :])
    rows, cols = linear_sum_assignment(distances)
    return float(distances[rows, cols].max())


def build_normal_form(
    H: HamiltonStructure, tolerances: Tolerances = DEFAULT_TOLERANCES, seed: int = 0, randomize: bool = False
) -> NormalForm:
    """
    Runs pairing, canonical map, reduced matrix, generating phase and weight in turn
    :param H: Filled Hamilton structure of a symbol with trivial singular space
    :param seed: Seed for basis mixing and probe points
    :param randomize: Mix the stable plane bases before pairing, the result differs by a gauge
    """
    rng = np.random.default_rng(seed)
    for attempt in range(FIBER_TANGENCY_ATTEMPTS):
        E, G = pairing_bases(H, tolerances, rng=rng if (randomize or attempt > 0) else None)
        cmap = build_canonical_map(E, G)
        try:
            phase = generating_phase(cmap, tolerances)
            break
        except FiberTangencyError:
            logging.warning(f"Generating phase attempt {attempt + 1} failed, mixing bases")
    else:
        logging.critical(f"No generating phase after {FIBER_TANGENCY_ATTEMPTS} attempts")
        raise FiberTangencyError(f"No generating phase after {FIBER_TANGENCY_ATTEMPTS} attempts")

    M, normal_form_residual = reduced_matrix(H.symbol, cmap, tolerances)
    weight = weight_from_phase(phase, cmap, tolerances, seed=seed)
    diagnostics = {
        "normal_form_residual": normal_form_residual,
        "symplectic_residual": cmap.symplectic_residual(),
        "egorov_residual": egorov_residual(H, cmap, M),
        "isospectral_residual": isospectral_residual(H, M),
        "induced_map_residual": float(
            np.linalg.norm(phase.induced_map() - cmap.K) / np.linalg.norm(cmap.K)
        ),
        "graph_residual": graph_residual(weight, cmap, seed=seed),
        "levi_residual": float(np.linalg.norm(levi_closed_form(phase) - weight.W_zbarz)),
    }
    logging.info(f"Built normal form with M eigenvalues {np.linalg.eigvals(M)}")
    logging.debug(f"Normal form diagnostics {diagnostics}")
    return NormalForm(
        structure=H, canonical_map=cmap, M=M, phase=phase, weight=weight, diagnostics=diagnostics
    )
