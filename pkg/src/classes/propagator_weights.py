"""
Time dependent weights Phi_t(z) = Phi0(exp(itM) z), the curve alpha(t), the Bergman form
of the propagator on the FBI side and the L^p -> L^q bound envelopes.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances
from src.classes.custom_exceptions import NegativeAlphaError, PQOrderingError
from src.classes.gaussian_integrals import (
    BARGMANN_SIDE,
    GaussianFunction,
    bargmann_embedding,
    bargmann_norm,
    log_gaussian_integral,
    symmetric,
)
from src.classes.normal_form import NormalForm, WeightPhi0
from src.classes.spectral_analysis import spectral_gap

MONOTONICITY_SLACK = 1e-12
MAX_DOUBLINGS = 60


def real_representation(E: np.ndarray) -> np.ndarray:
    """
    Real 2n x 2n matrix of z -> Ez acting on (Re z, Im z)
    """
    return np.block([[E.real, -E.imag], [E.imag, E.real]])


class WeightFamily:
    """
    Class which evaluates Phi_t, Psi_t and the amplitude a(t) of a normal form, caching exp(itM)
    """

    def __init__(self, nf: NormalForm, tolerances: Tolerances = DEFAULT_TOLERANCES) -> None:
        """
        :param nf: Normal form supplying M and Phi0
        :param tolerances: Thresholds for the sign and limit checks
        """
        self._nf = nf
        self._tolerances = tolerances
        self._exponentials = {}
        self.M = nf.M
        self.weight: WeightPhi0 = nf.weight
        self.trace_rate = 0.5j * np.trace(self.M)
        self.delta = spectral_gap(nf.structure)

    @property
    def n(self) -> int:
        """
        Spatial dimension
        """
        return self.M.shape[0]

    @property
    def normal_form(self) -> NormalForm:
        """
        Normal form the family was built from
        """
        return self._nf

    def exponential(self, t: float) -> np.ndarray:
        """
        exp(itM), cached per t
        """
        key = float(t)
        if key not in self._exponentials:
            self._exponentials[key] = expm(1j * key * self.M)
        return self._exponentials[key]

    def weight_matrix(self, t: float) -> np.ndarray:
        """
        Real symmetric matrix of Phi_t on (Re z, Im z)
        """
        representation = real_representation(self.exponential(t))
        matrix = representation.T @ self.weight.W_R @ representation
        return (matrix + matrix.T) / 2

    def phi_t(self, t: float, z: np.ndarray) -> float:
        """
        Phi_t(z) = Phi0(exp(itM) z)
        """
        return self.weight.phi0(self.exponential(t) @ np.asarray(z, dtype=complex))

    def psi_t(self, t: float, z: np.ndarray, theta: np.ndarray) -> complex:
        """
        Psi_t(z, theta) = Psi0(exp(itM) z, theta)
        """
        return self.weight.psi0(self.exponential(t) @ np.asarray(z, dtype=complex), theta)

    def amplitude(self, t: float) -> complex:
        """
        a(t) = C_Phi0 exp((i/2) tr(M) t)
        """
        return complex(self.weight.C_Phi0 * np.exp(self.trace_rate * t))

    def remainder_matrix(self, t: float) -> np.ndarray:
        """
        Real symmetric matrix of R_t = Phi0 - Phi_t
        """
        return self.weight.W_R - self.weight_matrix(t)

    def infinity_time(self) -> float:
        """
        A time after which |Phi_t| is below a tenth of the contraction tolerance
        """
        tolerance = self._tolerances.contraction
        T = np.log(1.0 / tolerance) / (2.0 * self.delta)
        scale = np.linalg.norm(self.weight.W_R, 2)
        for _ in range(MAX_DOUBLINGS):
            if np.linalg.norm(real_representation(self.exponential(T)), 2) ** 2 * scale <= tolerance / 10:
                break
            T *= 2
        return float(T)


@dataclass(frozen=True, eq=False)
class AlphaCurve:
    """
    Samples of alpha(t) = min over |z| = 1 of R_t(z)
    """

    t: np.ndarray
    values: np.ndarray
    alpha_infinity: float
    t_infinity: float

    @property
    def is_monotone(self) -> bool:
        """
        Non-decreasing along the grid up to rounding
        """
        return bool(np.all(np.diff(self.values) >= -MONOTONICITY_SLACK))

    def to_rows(self) -> list:
        """
        Rows (t, alpha) for CSV output
        """
        return list(zip(self.t, self.values))


@dataclass(frozen=True, eq=False)
class BoundCurve:
    """
    Envelope of the L^p -> L^q norm in its three forms
    """

    p: float
    q: float
    young_r: float
    constant: float
    t: np.ndarray
    alpha: np.ndarray
    envelope: np.ndarray
    large_time: np.ndarray
    small_time: np.ndarray
    gamma: float
    details: dict = field(default_factory=dict)

    def to_rows(self, lower: np.ndarray = None) -> list:
        """
        Rows (t, alpha, envelope, exp(-gamma t), lower) for CSV output
        """
        lower = np.full_like(self.t, np.nan) if lower is None else lower
        return [
            (t, a, e, np.exp(-self.gamma * t), low)
            for t, a, e, low in zip(self.t, self.alpha, self.envelope, lower)
        ]


def alpha(tf: WeightFamily, t: float, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    Smallest eigenvalue of R_t, so R_t(z) >= alpha(t)|z|^2
    """
    value = float(np.linalg.eigvalsh(tf.remainder_matrix(t))[0])
    threshold = tolerances.psd * max(np.linalg.norm(tf.weight.W_R, 2), 1.0)
    if value < -threshold:
        logging.critical(f"alpha({t}) = {value:.3e} is negative")
        raise NegativeAlphaError(f"alpha({t}) = {value:.3e} is negative", t=float(t), alpha=value)
    return max(value, 0.0)


def alpha_infinity(tf: WeightFamily) -> float:
    """
    min over |z| = 1 of Phi0(z)
    """
    return float(np.linalg.eigvalsh(tf.weight.W_R)[0])


def alpha_curve(tf: WeightFamily, t_grid, tolerances: Tolerances = DEFAULT_TOLERANCES) -> AlphaCurve:
    """
    alpha sampled on a grid with its limit value
    """
    t_grid = np.asarray(t_grid, dtype=float)
    values = np.array([alpha(tf, t, tolerances) for t in t_grid])
    curve = AlphaCurve(t=t_grid, values=values, alpha_infinity=alpha_infinity(tf), t_infinity=tf.infinity_time())
    if not curve.is_monotone:
        logging.error("alpha is not monotone along the grid")
    return curve


def fundamental_estimate_constants(weight: WeightPhi0) -> tuple:
    """
    :return: (c, C), extreme eigenvalues of the Levi matrix
    """
    eigenvalues = np.linalg.eigvalsh(weight.W_zbarz)
    return float(eigenvalues[0]), float(eigenvalues[-1])


def fundamental_identity_residual(tf: WeightFamily, z: np.ndarray, w: np.ndarray, t: float) -> float:
    """
    |2 Re Psi_t(z, conj w) - Phi_t(z) - Phi0(w) + L(d).conj(d)| with d = w - exp(itM) z
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    left = 2 * tf.psi_t(t, z, w.conj()).real - tf.phi_t(t, z) - tf.weight.phi0(w)
    d = w - tf.exponential(t) @ z
    right = -(d.conj() @ tf.weight.W_zbarz @ d).real
    return float(abs(left - right))


def young_exponent(p: float, q: float) -> float:
    """
    r with 1 + 1/q = 1/p + 1/r
    """
    inverse = 1.0 + 1.0 / q - 1.0 / p
    return np.inf if inverse == 0 else 1.0 / inverse


def upper_constant(nf: NormalForm, p: float, q: float) -> tuple:
    """
    Constant C_pq of the envelope C_pq alpha(t)^{-n} exp(-gamma t).
    The Schwartz kernel is bounded by c_phi^2 C_Phi0 exp(-gamma t) times a Gaussian integral over
    (z, w) whose x or y section has L^r norm N_r, the w integral gives (pi/c)^n and the z integral
    (pi/alpha)^n; Young's inequality then bounds the operator norm.
    :return: (C_pq, details)
    """
    n = nf.n
    r = young_exponent(p, q)
    im_yy = nf.phase.P_yy.imag
    if np.isinf(r):
        section_norm = 1.0
    else:
        section_norm = ((2 * np.pi / r) ** (n / 2) * np.linalg.det((im_yy + im_yy.T) / 2) ** (-0.5)) ** (1 / r)
    c, _ = fundamental_estimate_constants(nf.weight)
    constant = nf.phase.c_phi**2 * nf.weight.C_Phi0 * section_norm * (np.pi / c) ** n * np.pi**n
    details = {"young_r": r, "section_norm": section_norm, "levi_min": c}
    return float(constant), details


def upper_bound_curve(
    tf: WeightFamily,
    gamma: float,
    k0: int,
    p: float,
    q: float,
    t_grid,
    epsilon: float = 0.1,
    short_time_stop: float = 0.1,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> BoundCurve:
    """
    Envelope t -> C_pq alpha(t)^{-n} exp(-gamma t) with its large time form C_pq alpha(eps)^{-n} exp(-gamma t)
    for t >= eps and its small time form C_pq (c_s t^{2k0+1})^{-n}, c_s the smallest ratio
    alpha(t)/t^{2k0+1} over grid points t <= short_time_stop
    :param k0: Index from the singular space report
    """
    if not 1 <= p <= q:
        logging.critical(f"Exponents must satisfy 1 <= p <= q <= inf, got p={p}, q={q}")
        raise PQOrderingError(f"Exponents must satisfy 1 <= p <= q <= inf, got p={p}, q={q}", p=p, q=q)
    n = tf.n
    t_grid = np.asarray(t_grid, dtype=float)
    constant, details = upper_constant(tf.normal_form, p, q)
    alphas = np.array([alpha(tf, t, tolerances) for t in t_grid])
    decay = np.exp(-gamma * t_grid)
    with np.errstate(divide="ignore"):
        envelope = constant * alphas ** (-n) * decay

    large_constant = constant * alpha(tf, epsilon, tolerances) ** (-n)
    large_time = np.where(t_grid >= epsilon, large_constant * decay, np.inf)

    exponent = 2 * k0 + 1
    short_mask = (t_grid > 0) & (t_grid <= short_time_stop)
    small_time = np.full_like(t_grid, np.inf)
    if np.any(short_mask):
        short_ratio = float(np.min(alphas[short_mask] / t_grid[short_mask] ** exponent))
        details["short_time_ratio"] = short_ratio
        small_time[short_mask] = constant * (short_ratio * t_grid[short_mask] ** exponent) ** (-n)
    details["large_time_constant"] = large_constant
    logging.debug(f"Upper bound constant for (p, q) = ({p}, {q}): {constant:.6g}")
    return BoundCurve(
        p=p,
        q=q,
        young_r=details["young_r"],
        constant=constant,
        t=t_grid,
        alpha=alphas,
        envelope=envelope,
        large_time=large_time,
        small_time=small_time,
        gamma=gamma,
        details=details,
    )


def pullback_form(tf: WeightFamily, t: float, u: GaussianFunction) -> GaussianFunction:
    """
    exp((i/2) tr(M) t) u(exp(itM) z)
    """
    if u.is_zero:
        return u
    E = tf.exponential(t)
    return GaussianFunction(BARGMANN_SIDE, E.T @ u.A @ E, E.T @ u.b, u.c + tf.trace_rate * t)


def bergman_form(
    tf: WeightFamily, t: float, u: GaussianFunction, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> GaussianFunction:
    """
    a(t) int exp(2 Psi_t(z, conj w)) u(w) exp(-2 Phi0(w)) dL(w) in closed form
    """
    if u.is_zero:
        return u
    n = tf.n
    weight = tf.weight
    embedding = bargmann_embedding(n)
    H = symmetric(
        4 * weight.W_R - embedding.conj().T @ weight.W_zz.conj() @ embedding.conj() - embedding.T @ u.A @ embedding
    )
    V = 2 * embedding.conj().T @ weight.W_zbarz
    source = embedding.T @ u.b
    H_inv_V = np.linalg.solve(H, V)
    H_inv_source = np.linalg.solve(H, source)

    A_inner = weight.W_zz + V.T @ H_inv_V
    b_inner = V.T @ H_inv_source
    log_integral = log_gaussian_integral(H, source, tolerances)
    c = u.c + np.log(weight.C_Phi0) + tf.trace_rate * t + log_integral

    E = tf.exponential(t)
    return GaussianFunction(BARGMANN_SIDE, E.T @ A_inner @ E, E.T @ b_inner, c)


def bergman_project(
    weight_family: WeightFamily, u: GaussianFunction, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> GaussianFunction:
    """
    Orthogonal projection of L^2(exp(-2 Phi0)) onto H_Phi0 applied to a holomorphic Gaussian
    """
    return bergman_form(weight_family, 0.0, u, tolerances)


def hamilton_flow(tf: WeightFamily, t: float) -> np.ndarray:
    """
    Flow of the reduced symbol on the FBI side, (z, zeta) -> (exp(-itM) z, exp(itM^T) zeta)
    """
    n = tf.n
    zeros = np.zeros((n, n))
    return np.block([[expm(-1j * t * tf.M), zeros], [zeros, tf.exponential(t).T]])


def flow_graph_residual(tf: WeightFamily, t: float, probes: int = 20, seed: int = 0) -> float:
    """
    Deviation of the flow image of Lambda_Phi0 from Lambda_Phi_t = {(z, (2/i) dPhi_t/dz)}
    """
    rng = np.random.default_rng(seed)
    n = tf.n
    flow = hamilton_flow(tf, t)
    E = tf.exponential(t)
    worst = 0.0
    for _ in range(probes):
        z = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        image = flow @ np.concatenate([z, tf.weight.fiber(z)])
        w = image[:n]
        expected = E.T @ tf.weight.fiber(E @ w)
        worst = max(worst, np.linalg.norm(image[n:] - expected) / max(np.linalg.norm(image), 1e-300))
    return float(worst)


def eikonal_residual(
    tf: WeightFamily, z: np.ndarray, theta: np.ndarray, t: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """
    |2 dPsi_t/dt + q~(z, (2/i) dPsi_t/dz)| with a centered difference in t, relative to the terms
    """
    z = np.asarray(z, dtype=complex)
    theta = np.asarray(theta, dtype=complex)
    h = tolerances.finite_difference * max(1.0, abs(t))
    time_derivative = (tf.psi_t(t + h, z, theta) - tf.psi_t(t - h, z, theta)) / (2 * h)
    E = tf.exponential(t)
    a = E @ z
    gradient = E.T @ (0.5 * tf.weight.W_zz @ a + tf.weight.W_zbarz.T @ theta)
    reduced = (2 / 1j) * gradient @ tf.M @ z
    scale = max(abs(2 * time_derivative), abs(reduced), 1.0)
    return float(abs(2 * time_derivative + reduced) / scale)


def transport_residual(tf: WeightFamily, t: float, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    |a'(t) + (1/2i) tr(M) a(t)| with a centered difference, relative to |a(t)|
    """
    h = tolerances.finite_difference * max(1.0, abs(t))
    derivative = (tf.amplitude(t + h) - tf.amplitude(t - h)) / (2 * h)
    value = tf.amplitude(t)
    return float(abs(derivative + np.trace(tf.M) / 2j * value) / max(abs(value), 1e-300))


def weight_eikonal_residual(
    tf: WeightFamily, z: np.ndarray, t: float, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> tuple:
    """
    dPhi_t/dt + Re q~(z, (2/i) dPhi_t/dz) by a centered difference
    :return: (relative residual, dPhi_t/dt)
    """
    z = np.asarray(z, dtype=complex)
    h = tolerances.finite_difference * max(1.0, abs(t))
    time_derivative = (tf.phi_t(t + h, z) - tf.phi_t(t - h, z)) / (2 * h)
    E = tf.exponential(t)
    gradient = E.T @ tf.weight.dz_phi0(E @ z)
    reduced = ((2 / 1j) * gradient @ tf.M @ z).real
    scale = max(abs(time_derivative), abs(reduced), 1.0)
    return float(abs(time_derivative + reduced) / scale), float(time_derivative)


def phase_defect(tf: WeightFamily, x: np.ndarray, y: np.ndarray, z: np.ndarray, w: np.ndarray, t: float) -> dict:
    """
    Splits the real part of the kernel phase
    -Im phi(z, x) - Im phi(w, y) + 2 Re Psi_t(z, conj w) - 2 Phi0(z) - 2 Phi0(w)
    into minus the sum of four non-negative pieces
    """
    phase = tf.normal_form.phase
    weight = tf.weight
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    total = (
        -phase.evaluate(z, x).imag
        - phase.evaluate(w, y).imag
        + 2 * tf.psi_t(t, z, w.conj()).real
        - 2 * weight.phi0(z)
        - 2 * weight.phi0(w)
    )
    d = w - tf.exponential(t) @ z
    s = np.concatenate([z.real, z.imag])
    pieces = {
        "fbi_defect_x": weight.phi0(z) + phase.evaluate(z, x).imag,
        "fbi_defect_y": weight.phi0(w) + phase.evaluate(w, y).imag,
        "fundamental_defect": float((d.conj() @ weight.W_zbarz @ d).real),
        "remainder": float(s @ tf.remainder_matrix(t) @ s),
    }
    pieces["total"] = float(total)
    pieces["residual"] = float(abs(total + sum(value for key, value in pieces.items() if key != "total")))
    return pieces


def weighted_norm_ratio(
    tf: WeightFamily, t: float, u: GaussianFunction, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """
    |G~(t)u| in H_Phi_t divided by |u| in H_Phi0
    """
    propagated = pullback_form(tf, t, u)
    return bargmann_norm(propagated, tf.weight_matrix(t), tolerances) / bargmann_norm(u, tf.weight.W_R, tolerances)
