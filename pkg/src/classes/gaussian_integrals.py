"""
Gaussian functions and their closed form integrals.

Real side:     g(x) = exp(-1/2 x.Ax + b.x + c),  x in R^n
Bargmann side: g(z) = exp( 1/2 z.Az + b.z + c),  z in C^n, holomorphic

Every integral in the package reduces to
    int_{R^m} exp(-1/2 s.Hs + beta.s) ds = (2 pi)^{m/2} det(H)^{-1/2} exp(1/2 beta.H^{-1} beta)
with Re H positive definite. The branch of det(H)^{-1/2} is tracked along the
homotopy Re H + i s Im H, s in [0, 1].
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances
from src.classes.custom_exceptions import IntegrabilityFailureError

REAL_SIDE = "real"
BARGMANN_SIDE = "bargmann"


def symmetric(matrix: np.ndarray) -> np.ndarray:
    """
    (X + X^T) / 2
    """
    return (matrix + matrix.T) / 2


@dataclass(frozen=True, eq=False)
class GaussianFunction:
    """
    exp of a complex quadratic plus linear form; c = -inf encodes the zero function
    """

    domain: str
    A: np.ndarray
    b: np.ndarray
    c: complex = 0j

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", symmetric(np.atleast_2d(np.asarray(self.A, dtype=complex))))
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=complex)))
        object.__setattr__(self, "c", complex(self.c))

    @property
    def n(self) -> int:
        """
        Number of variables
        """
        return self.A.shape[0]

    @property
    def is_zero(self) -> bool:
        """
        True for the zero function
        """
        return np.isneginf(self.c.real)

    def exponent(self, point: np.ndarray) -> complex:
        """
        Logarithm of the function at a point
        """
        point = np.asarray(point, dtype=complex)
        sign = -1.0 if self.domain == REAL_SIDE else 1.0
        return complex(sign * 0.5 * point @ self.A @ point + self.b @ point + self.c)

    def evaluate(self, point: np.ndarray) -> complex:
        """
        Value of the function at a point
        """
        if self.is_zero:
            return 0j
        return complex(np.exp(self.exponent(point)))

    def scaled(self, factor: complex) -> "GaussianFunction":
        """
        factor * g
        """
        if factor == 0:
            return zero_gaussian(self.domain, self.n)
        return GaussianFunction(self.domain, self.A, self.b, self.c + np.log(complex(factor)))

    def coefficient_distance(self, other: "GaussianFunction") -> float:
        """
        Largest coefficient difference, the constant compared modulo 2 pi i
        """
        if self.is_zero or other.is_zero:
            return 0.0 if self.is_zero and other.is_zero else np.inf
        constant = self.c - other.c
        constant = complex(constant.real, (constant.imag + np.pi) % (2 * np.pi) - np.pi)
        return float(
            max(np.abs(self.A - other.A).max(), np.abs(self.b - other.b).max(initial=0.0), abs(constant))
        )


def zero_gaussian(domain: str, n: int) -> GaussianFunction:
    """
    The zero function in Gaussian form
    """
    return GaussianFunction(domain, np.zeros((n, n)), np.zeros(n), complex(-np.inf, 0.0))


@dataclass(frozen=True, eq=False)
class PolynomialGaussian:
    """
    (x.Pi x + lam.x + kappa) * g for a real side Gaussian g
    """

    quadratic: np.ndarray
    linear: np.ndarray
    constant: complex
    gaussian: GaussianFunction

    def __post_init__(self) -> None:
        object.__setattr__(self, "quadratic", symmetric(np.asarray(self.quadratic, dtype=complex)))

    def polynomial(self, x: np.ndarray) -> complex:
        """
        Value of the polynomial factor
        """
        x = np.asarray(x, dtype=complex)
        return complex(x @ self.quadratic @ x + self.linear @ x + self.constant)

    def evaluate(self, x: np.ndarray) -> complex:
        """
        Value of the product
        """
        return self.polynomial(x) * self.gaussian.evaluate(x)


def check_integrable(H: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    :return: Smallest eigenvalue of the symmetric part of Re H, which must be positive
    """
    re_part = symmetric(H.real)
    smallest = float(np.linalg.eigvalsh(re_part)[0])
    if smallest <= tolerances.gaussian * max(np.linalg.norm(H, 2), 1.0):
        logging.error(f"Gaussian integrand does not decay, min eigenvalue of Re H {smallest:.3e}")
        raise IntegrabilityFailureError(
            f"Gaussian integrand does not decay, min eigenvalue of Re H {smallest:.3e}", min_eigenvalue=smallest
        )
    return smallest


def log_det_tracked(H: np.ndarray, steps: int = 64) -> complex:
    """
    log det H continued from the real positive definite Re H along Re H + i s Im H
    """
    re_part = symmetric(H.real)
    im_part = symmetric(H.imag)
    log_det = complex(2 * np.sum(np.log(np.diag(np.linalg.cholesky(re_part)))))
    previous = re_part.astype(complex)
    for step in range(1, steps + 1):
        current = re_part + 1j * (step / steps) * im_part
        increment = np.linalg.eigvals(np.linalg.solve(previous, current))
        log_det += complex(np.sum(np.log(increment)))
        previous = current
    return log_det


def log_gaussian_integral(
    H: np.ndarray, beta: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> complex:
    """
    :return: log of int_{R^m} exp(-1/2 s.Hs + beta.s) ds
    """
    H = symmetric(np.asarray(H, dtype=complex))
    beta = np.asarray(beta, dtype=complex)
    check_integrable(H, tolerances)
    m = H.shape[0]
    log_det = log_det_tracked(H, tolerances.branch_steps)
    return complex(0.5 * m * np.log(2 * np.pi) - 0.5 * log_det + 0.5 * beta @ np.linalg.solve(H, beta))


def lp_norm(g: GaussianFunction, p: float, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    L^p norm of a real side Gaussian, p in [1, inf]
    """
    if g.is_zero:
        return 0.0
    re_a = symmetric(g.A.real)
    check_integrable(re_a, tolerances)
    re_b = g.b.real
    peak = g.c.real + 0.5 * re_b @ np.linalg.solve(re_a, re_b)
    if np.isinf(p):
        return float(np.exp(peak))
    _, log_det = np.linalg.slogdet(re_a)
    log_norm = peak + (g.n / (2 * p)) * np.log(2 * np.pi / p) - log_det / (2 * p)
    return float(np.exp(log_norm))


def bargmann_embedding(n: int) -> np.ndarray:
    """
    Pi = [I, iI] with z = Pi s for s = (Re z, Im z)
    """
    return np.hstack([np.eye(n), 1j * np.eye(n)])


def weight_real_form(W_zz: np.ndarray, levi: np.ndarray) -> np.ndarray:
    """
    Real 2n x 2n matrix of conj(z).Lz + Re(1/2 W_zz z.z) in s = (Re z, Im z)
    """
    n = levi.shape[0]
    embedding = bargmann_embedding(n)
    form = embedding.conj().T @ levi @ embedding + 0.5 * embedding.T @ W_zz @ embedding
    return symmetric(form.real)


def bargmann_norm(g: GaussianFunction, W_R: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    Norm of a Bargmann side Gaussian in L^2(C^n, exp(-2 Phi) dL) where Phi(z) = s.W_R s
    """
    if g.is_zero:
        return 0.0
    embedding = bargmann_embedding(g.n)
    H = 4 * W_R - 2 * (embedding.T @ g.A @ embedding).real
    beta = 2 * (embedding.T @ g.b).real
    log_square = log_gaussian_integral(H, beta, tolerances) + 2 * g.c.real
    return float(np.exp(0.5 * log_square.real))
