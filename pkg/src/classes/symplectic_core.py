"""
Phase space conventions, quadratic symbols and the Hamilton matrix.

Coordinates are ordered X = (x_1..x_n, xi_1..xi_n). A symbol is q(X) = X.QX with
Q complex symmetric, the symplectic form is sigma((x, xi), (y, eta)) = xi.y - x.eta
and the Hamilton matrix F = JQ is the unique matrix with q(X, Y) = sigma(X, FY).
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances
from src.classes.custom_exceptions import DimensionMismatchError, ReNotPSDError


@dataclass(frozen=True, eq=False)
class QuadraticSymbol:
    """
    Complex quadratic form on R^{2n} with non-negative real part
    """

    n: int
    Q: np.ndarray
    re_min_eigenvalue: float = 0.0

    @property
    def dim(self) -> int:
        """
        Real dimension of phase space
        """
        return 2 * self.n

    def evaluate(self, X: np.ndarray) -> complex:
        """
        :param X: Phase space point, complex entries allowed
        :return: q(X) = X.QX (bilinear, no conjugation)
        """
        X = np.asarray(X, dtype=complex)
        return complex(X @ self.Q @ X)

    def polarized(self, X: np.ndarray, Y: np.ndarray) -> complex:
        """
        :return: q(X, Y) = X.QY
        """
        return complex(np.asarray(X, dtype=complex) @ self.Q @ np.asarray(Y, dtype=complex))

    def to_dict(self) -> dict:
        """
        JSON form matching the problem file layout
        """
        return {"n": self.n, "Q_re": self.Q.real.tolist(), "Q_im": self.Q.imag.tolist()}


@dataclass(frozen=True)
class SymplecticStructure:
    """
    Standard symplectic structure on R^{2n}
    """

    n: int

    @property
    def J(self) -> np.ndarray:
        """
        J(a, b) = (b, -a)
        """
        identity = np.eye(self.n)
        zeros = np.zeros((self.n, self.n))
        return np.block([[zeros, identity], [-identity, zeros]])

    @property
    def form_matrix(self) -> np.ndarray:
        """
        Matrix S with sigma(X, Y) = X.SY, equal to J^{-1} = -J
        """
        return -self.J

    def sigma(self, X: np.ndarray, Y: np.ndarray) -> complex:
        """
        Bilinear symplectic pairing, complex entries allowed
        """
        return complex(np.asarray(X, dtype=complex) @ self.form_matrix @ np.asarray(Y, dtype=complex))

    def pairing_matrix(self, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        """
        :return: Matrix of sigma(u_j, v_k) over the columns of U and V
        """
        return U.T @ self.form_matrix @ V


@dataclass(frozen=True)
class EigenCluster:
    """
    A group of numerically coincident eigenvalues of F with an invariant subspace basis
    """

    value: complex
    multiplicity: int
    basis: np.ndarray


@dataclass(frozen=True, eq=False)
class HamiltonStructure:
    """
    Hamilton matrix F of a symbol and, once filled by the spectral analysis,
    its clustered eigenvalues and stable planes
    """

    symbol: QuadraticSymbol
    F: np.ndarray
    clusters: tuple = field(default_factory=tuple)
    lambda_plus: np.ndarray = None
    lambda_minus: np.ndarray = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        """
        Spatial dimension
        """
        return self.symbol.n

    @property
    def is_filled(self) -> bool:
        """
        True once the eigenstructure has been computed
        """
        return self.lambda_plus is not None

    @property
    def eigenvalues(self) -> np.ndarray:
        """
        Eigenvalues repeated by algebraic multiplicity
        """
        return np.array([c.value for c in self.clusters for _ in range(c.multiplicity)], dtype=complex)


def make_symbol(n: int, Q_raw, tolerances: Tolerances = DEFAULT_TOLERANCES) -> QuadraticSymbol:
    """
    Validates and symmetrizes a raw coefficient matrix
    :param n: Spatial dimension
    :param Q_raw: Complex 2n x 2n matrix, need not be symmetric
    :param tolerances: psd threshold is relative to the norm of Re Q
    :return: Accepted symbol
    """
    Q_raw = np.asarray(Q_raw, dtype=complex)
    if not isinstance(n, (int, np.integer)) or n < 1 or Q_raw.shape != (2 * n, 2 * n):
        logging.critical(f"Expected a {2 * n}x{2 * n} matrix for n={n}, got shape {Q_raw.shape}")
        raise DimensionMismatchError(
            f"Expected a {2 * n}x{2 * n} matrix for n={n}, got shape {Q_raw.shape}",
            n=n,
            shape=list(Q_raw.shape),
        )

    asymmetry = np.linalg.norm(Q_raw - Q_raw.T)
    if asymmetry > tolerances.structure * max(np.linalg.norm(Q_raw), 1.0):
        logging.warning(f"Coefficient matrix is not symmetric (asymmetry {asymmetry:.3e}), symmetrizing")
    Q = (Q_raw + Q_raw.T) / 2

    re_eigenvalues = np.linalg.eigvalsh(Q.real)
    re_min = float(re_eigenvalues[0])
    threshold = tolerances.psd * np.linalg.norm(Q.real, 2)
    if re_min < -threshold:
        logging.critical(f"Real part of the symbol is not positive semidefinite, min eigenvalue {re_min:.3e}")
        raise ReNotPSDError(
            f"Real part of the symbol is not positive semidefinite, min eigenvalue {re_min:.3e}",
            min_eigenvalue=re_min,
        )
    logging.debug(f"Accepted symbol n={n}, min eigenvalue of Re Q {re_min:.3e}")
    return QuadraticSymbol(n=int(n), Q=Q, re_min_eigenvalue=re_min)


def evaluate(sym: QuadraticSymbol, X) -> complex:
    """
    :return: q(X)
    """
    return sym.evaluate(X)


def polarized(sym: QuadraticSymbol, X, Y) -> complex:
    """
    :return: q(X, Y)
    """
    return sym.polarized(X, Y)


def structure_residual(sym: QuadraticSymbol, F: np.ndarray, probes: int = 100, seed: int = 0) -> float:
    """
    Largest relative deviation of sigma(X, FY) from q(X, Y) over random complex pairs
    """
    rng = np.random.default_rng(seed)
    structure = SymplecticStructure(sym.n)
    scale = max(np.linalg.norm(sym.Q, 2), 1.0)
    worst = 0.0
    for _ in range(probes):
        X = rng.standard_normal(sym.dim) + 1j * rng.standard_normal(sym.dim)
        Y = rng.standard_normal(sym.dim) + 1j * rng.standard_normal(sym.dim)
        deviation = abs(structure.sigma(X, F @ Y) - sym.polarized(X, Y))
        worst = max(worst, deviation / (scale * np.linalg.norm(X) * np.linalg.norm(Y)))
    return worst


def hamilton_matrix(sym: QuadraticSymbol) -> HamiltonStructure:
    """
    :return: Structure holding F = JQ, eigen data left empty
    """
    F = SymplecticStructure(sym.n).J @ sym.Q
    logging.debug(f"Hamilton matrix residual {structure_residual(sym, F):.3e}")
    return HamiltonStructure(symbol=sym, F=F)


def hamilton_vector_field(sym: QuadraticSymbol) -> np.ndarray:
    """
    Matrix of the linear vector field H_q = (dq/dxi, -dq/dx), equal to 2F
    """
    return SymplecticStructure(sym.n).J @ (2 * sym.Q)


def is_elliptic(sym: QuadraticSymbol, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """
    Decides whether q vanishes only at the origin of R^{2n}.
    Re q vanishes exactly on the kernel K of Re Q, so q is elliptic iff
    Im q restricted to K is a definite form.
    """
    scale = max(np.linalg.norm(sym.Q, 2), 1e-300)
    re_eigenvalues, re_vectors = np.linalg.eigh(sym.Q.real)
    kernel = re_vectors[:, re_eigenvalues <= tolerances.ellipticity * scale]
    if kernel.shape[1] == 0:
        return True
    restricted = kernel.T @ sym.Q.imag @ kernel
    im_eigenvalues = np.linalg.eigvalsh((restricted + restricted.T) / 2)
    threshold = tolerances.ellipticity * scale
    return bool(im_eigenvalues[0] > threshold or im_eigenvalues[-1] < -threshold)


def sphere_minimum(sym: QuadraticSymbol, seed: int = 0, starts: int = 32) -> float:
    """
    Minimum of |q(X)| on the real unit sphere by multistart local polish
    :param seed: Seed for the random starting points
    :param starts: Number of starting points, the coordinate axes are always included
    """
    rng = np.random.default_rng(seed)

    def objective(X: np.ndarray) -> float:
        unit = X / np.linalg.norm(X)
        return abs(unit @ sym.Q @ unit) ** 2

    initial_points = list(np.eye(sym.dim)) + list(rng.standard_normal((starts, sym.dim)))
    best = np.inf
    for start in initial_points:
        result = minimize(objective, start, method="BFGS", options={"gtol": 1e-14})
        best = min(best, result.fun, objective(start))
    return float(np.sqrt(best))


# Built-in problem builders


def harmonic_symbol(n: int = 1) -> QuadraticSymbol:
    """
    q = |x|^2 + |xi|^2
    """
    return make_symbol(n, np.eye(2 * n))


def free_schrodinger_symbol() -> QuadraticSymbol:
    """
    q = i xi^2
    """
    return make_symbol(1, np.diag([0, 1j]))


def heat_symbol() -> QuadraticSymbol:
    """
    q = xi^2
    """
    return make_symbol(1, np.diag([0.0, 1.0]))


def davies_symbol() -> QuadraticSymbol:
    """
    q = xi^2 + i x^2
    """
    return make_symbol(1, np.diag([1j, 1.0]))


def kfp_symbol(a: float = 1.0) -> QuadraticSymbol:
    """
    Kramers-Fokker-Planck with quadratic potential, coordinates (x, v, xi, eta):
    q = eta^2 + v^2/4 + i(v xi - a x eta)
    """
    Q = np.zeros((4, 4), dtype=complex)
    Q[1, 1] = 0.25
    Q[3, 3] = 1.0
    Q[1, 2] = Q[2, 1] = 0.5j
    Q[0, 3] = Q[3, 0] = -0.5j * a
    return make_symbol(2, Q)


SYMBOL_BUILDERS = {
    "free_schrodinger": free_schrodinger_symbol,
    "harmonic": harmonic_symbol,
    "heat": heat_symbol,
    "davies": davies_symbol,
    "kfp": kfp_symbol,
}
