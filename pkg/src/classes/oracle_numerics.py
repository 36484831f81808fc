"""
Independent check of the semigroup: q^w(x, D) in a truncated Hermite basis, its matrix
exponential, and operator norms of the resulting kernel at the computable (p, q) corners
"""

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from scipy.linalg import expm
from scipy.special import roots_hermite

from src.classes.custom_exceptions import (
    ExpFailureError,
    InsufficientSamplesError,
    UnsupportedDimensionError,
    UnsupportedPairError,
)
from src.classes.gaussian_integrals import GaussianFunction
from src.classes.symplectic_core import QuadraticSymbol

MAX_ORACLE_DIMENSION = 2
MIN_MODES = 16
MIN_FIT_SAMPLES = 5


def hermite_functions(N: int, x: np.ndarray) -> np.ndarray:
    """
    Normalized Hermite functions h_0..h_{N-1} at the points x, shape (len(x), N)
    """
    x = np.asarray(x, dtype=float)
    values = np.zeros((x.size, N))
    values[:, 0] = np.pi ** (-0.25) * np.exp(-(x**2) / 2)
    if N > 1:
        values[:, 1] = np.sqrt(2.0) * x * values[:, 0]
    for k in range(1, N - 1):
        values[:, k + 1] = np.sqrt(2.0 / (k + 1)) * x * values[:, k] - np.sqrt(k / (k + 1)) * values[:, k - 1]
    return values


def ladder_operators(size: int) -> tuple:
    """
    Position x = (a + a^dag)/sqrt2 and momentum D = -i(a - a^dag)/sqrt2 as sparse matrices
    """
    lowering = sparse.diags(np.sqrt(np.arange(1, size)), offsets=1, format="csr")
    raising = lowering.T.tocsr()
    position = (lowering + raising) / np.sqrt(2)
    momentum = -1j * (lowering - raising) / np.sqrt(2)
    return position, momentum


@dataclass(frozen=True, eq=False)
class HermiteDiscretization:
    """
    Matrix of q^w in the tensor Hermite basis and the collocation transform on Gauss-Hermite nodes
    """

    n: int
    N: int
    A_mat: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    collocation: np.ndarray

    def numerical_range_minimum(self) -> float:
        """
        Smallest eigenvalue of the Hermitian part of A_mat
        """
        hermitian = (self.A_mat + self.A_mat.conj().T) / 2
        return float(np.linalg.eigvalsh(hermitian)[0])

    def project(self, g: GaussianFunction) -> np.ndarray:
        """
        Hermite coefficients of a real side Gaussian from its node values
        """
        values = np.array([g.evaluate(node) for node in self.nodes])
        return self.collocation.T @ (np.sqrt(self.weights) * values)

    def values(self, coefficients: np.ndarray) -> np.ndarray:
        """
        Node values of a Hermite expansion
        """
        return (self.collocation @ coefficients) / np.sqrt(self.weights)

    def discrete_l2(self, values: np.ndarray) -> float:
        """
        Quadrature L^2 norm of node values
        """
        return float(np.sqrt(np.sum(self.weights * np.abs(values) ** 2)))


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """
    Discretized Schwartz kernel of exp(-tA) on the quadrature nodes
    """

    t: float
    propagator: np.ndarray
    folded: np.ndarray
    weights: np.ndarray

    @property
    def raw(self) -> np.ndarray:
        """
        K(x_i, y_j), so that (G f)(x_i) = sum_j K(x_i, y_j) f(y_j) w_j
        """
        root = np.sqrt(self.weights)
        return self.folded / np.outer(root, root)

    def two_norm(self) -> float:
        """
        Largest singular value of the folded kernel
        """
        return float(np.linalg.norm(self.folded, 2))


def discretize(sym: QuadraticSymbol, N: int) -> HermiteDiscretization:
    """
    Builds sum_ab Q_ab X_a X_b with X = (x_1..x_n, D_1..D_n); products are formed in a
    basis padded by one mode per axis so the kept block is exact
    :param N: Modes per axis
    """
    n = sym.n
    if n > MAX_ORACLE_DIMENSION or N < MIN_MODES:
        logging.critical(f"Oracle supports n <= {MAX_ORACLE_DIMENSION} and N >= {MIN_MODES}, got n={n}, N={N}")
        raise UnsupportedDimensionError(
            f"Oracle supports n <= {MAX_ORACLE_DIMENSION} and N >= {MIN_MODES}, got n={n}, N={N}", n=n, N=N
        )
    position, momentum = ladder_operators(N + 1)
    identity = sparse.identity(N + 1, format="csr")
    if n == 1:
        coordinates = [position, momentum]
    else:
        coordinates = [
            sparse.kron(position, identity, format="csr"),
            sparse.kron(identity, position, format="csr"),
            sparse.kron(momentum, identity, format="csr"),
            sparse.kron(identity, momentum, format="csr"),
        ]
    operator = sparse.csr_matrix(coordinates[0].shape, dtype=complex)
    for a in range(2 * n):
        for b in range(2 * n):
            if sym.Q[a, b] != 0:
                operator = operator + sym.Q[a, b] * (coordinates[a] @ coordinates[b])

    kept = np.arange(N)
    if n == 2:
        kept = (kept[:, None] * (N + 1) + kept[None, :]).ravel()
    A_mat = operator.toarray()[np.ix_(kept, kept)]

    roots, _ = roots_hermite(N)
    basis = hermite_functions(N, roots)
    weights_1d = 1.0 / np.sum(basis**2, axis=1)
    collocation_1d = np.sqrt(weights_1d)[:, None] * basis
    if n == 1:
        nodes = roots[:, None]
        weights = weights_1d
        collocation = collocation_1d
    else:
        nodes = np.array([(r1, r2) for r1 in roots for r2 in roots])
        weights = np.kron(weights_1d, weights_1d)
        collocation = np.kron(collocation_1d, collocation_1d)
    logging.debug(f"Discretized symbol with n={n}, N={N}")
    return HermiteDiscretization(
        n=n, N=N, A_mat=A_mat, nodes=nodes, weights=weights, collocation=collocation
    )


def semigroup_matrix(disc: HermiteDiscretization, t: float) -> KernelMatrix:
    """
    exp(-t A_mat) and its kernel on the nodes
    """
    propagator = expm(-t * disc.A_mat)
    if not np.all(np.isfinite(propagator)):
        logging.critical(f"Matrix exponential is not finite at t={t}")
        raise ExpFailureError(f"Matrix exponential is not finite at t={t}", t=float(t))
    folded = disc.collocation @ propagator @ disc.collocation.T
    return KernelMatrix(t=float(t), propagator=propagator, folded=folded, weights=disc.weights)


def dual_exponent(p: float) -> float:
    """
    p' with 1/p + 1/p' = 1
    """
    if p == 1:
        return np.inf
    if np.isinf(p):
        return 1.0
    return p / (p - 1)


def weighted_norms(matrix: np.ndarray, weights: np.ndarray, r: float, axis: int) -> np.ndarray:
    """
    Quadrature L^r norms of the columns (axis 0) or rows (axis 1) of a kernel
    """
    magnitudes = np.abs(matrix)
    if np.isinf(r):
        return magnitudes.max(axis=axis)
    shape = (-1, 1) if axis == 0 else (1, -1)
    return np.sum(weights.reshape(shape) * magnitudes**r, axis=axis) ** (1 / r)


def corner_norm(kernel: KernelMatrix, p: float, q: float) -> float:
    """
    Operator norm L^p -> L^q at p = 1 (largest column norm in L^q), q = inf
    (largest row norm in L^p') or p = q = 2 (largest singular value)
    """
    if p == 2 and q == 2:
        return kernel.two_norm()
    if p == 1:
        return float(weighted_norms(kernel.raw, kernel.weights, q, axis=0).max())
    if np.isinf(q):
        return float(weighted_norms(kernel.raw, kernel.weights, dual_exponent(p), axis=1).max())
    logging.error(f"Operator norm at interior pair ({p}, {q}) is not computable")
    raise UnsupportedPairError(f"Operator norm at interior pair ({p}, {q}) is not computable", p=p, q=q)


def decay_fit(t, values, t_window: tuple) -> float:
    """
    Least squares slope of log(values) against t inside the window
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (t >= t_window[0]) & (t <= t_window[1])
    if np.count_nonzero(mask) < MIN_FIT_SAMPLES:
        logging.error(f"Only {np.count_nonzero(mask)} samples inside {t_window}")
        raise InsufficientSamplesError(
            f"Only {np.count_nonzero(mask)} samples inside {t_window}", samples=int(np.count_nonzero(mask))
        )
    slope, _ = np.polyfit(t[mask], np.log(values[mask]), 1)
    return float(slope)


def propagate_values(disc: HermiteDiscretization, t: float, g: GaussianFunction) -> np.ndarray:
    """
    Node values of exp(-tA) applied to the projection of g
    """
    coefficients = semigroup_matrix(disc, t).propagator @ disc.project(g)
    return disc.values(coefficients)
