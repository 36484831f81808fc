"""
Exact Gaussian state calculus: Weyl action, ground state, FBI transform and its adjoint,
full propagation G(t) = T* o G~(t) o T and the ground state lower bound curve
"""

import logging
from dataclasses import dataclass

import numpy as np

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances
from src.classes.custom_exceptions import GraphFailureError, PQOrderingError
from src.classes.gaussian_integrals import (
    BARGMANN_SIDE,
    REAL_SIDE,
    GaussianFunction,
    PolynomialGaussian,
    bargmann_embedding,
    bargmann_norm,
    check_integrable,
    log_det_tracked,
    log_gaussian_integral,
    lp_norm,
    symmetric,
)
from src.classes.normal_form import FbiPhase, NormalForm, WeightPhi0
from src.classes.propagator_weights import WeightFamily, pullback_form
from src.classes.spectral_analysis import ground_energy
from src.classes.symplectic_core import HamiltonStructure, QuadraticSymbol


@dataclass(frozen=True, eq=False)
class GroundState:
    """
    Gaussian spanning the rho eigenspace of q^w
    """

    u0: GaussianFunction
    rho: complex
    T_plus: np.ndarray
    residual: float


@dataclass(frozen=True, eq=False)
class SharpnessCurve:
    """
    t -> |G(t)u0|_q / |u0|_p
    """

    p: float
    q: float
    t: np.ndarray
    values: np.ndarray
    gamma: float

    def normalized(self) -> np.ndarray:
        """
        values * exp(gamma t), constant in t
        """
        return self.values * np.exp(self.gamma * self.t)


def weyl_apply(sym: QuadraticSymbol, g: GaussianFunction) -> PolynomialGaussian:
    """
    q^w(x, D) g for g = exp(-1/2 x.Ax + b.x + c), with x_j xi_k quantized as (x_j D_k + D_k x_j)/2
    """
    n = sym.n
    Q_xx = sym.Q[:n, :n]
    Q_xxi = sym.Q[:n, n:]
    Q_xixi = sym.Q[n:, n:]
    A = g.A
    b = g.b
    quadratic = Q_xx + 2j * Q_xxi @ A - A @ Q_xixi @ A
    linear = 2 * A @ Q_xixi @ b - 2j * Q_xxi @ b
    constant = complex(-1j * np.trace(Q_xxi) + np.trace(Q_xixi @ A) - b @ Q_xixi @ b)
    return PolynomialGaussian(quadratic=quadratic, linear=linear, constant=constant, gaussian=g)


def ground_state(H: HamiltonStructure, tolerances: Tolerances = DEFAULT_TOLERANCES) -> GroundState:
    """
    Writes Lambda+ as a graph {(x, T+ x)} and returns u0 = exp(i T+x.x / 2), L^2 normalized
    """
    n = H.n
    E_x = H.lambda_plus[:n]
    E_xi = H.lambda_plus[n:]
    smallest = np.linalg.svd(E_x, compute_uv=False)[-1]
    if smallest < tolerances.structure:
        logging.critical(f"Stable outgoing plane is not a graph over the base, singular value {smallest:.3e}")
        raise GraphFailureError(f"Stable outgoing plane is not a graph over the base, singular value {smallest:.3e}")
    T_plus = symmetric(np.linalg.solve(E_x.T, E_xi.T).T)
    A = -1j * T_plus
    check_integrable(A, tolerances)

    unnormalized = GaussianFunction(REAL_SIDE, A, np.zeros(n), 0j)
    u0 = unnormalized.scaled(1.0 / lp_norm(unnormalized, 2, tolerances))
    rho, _ = ground_energy(H)
    applied = weyl_apply(H.symbol, u0)
    residual = float(
        np.linalg.norm(applied.quadratic) + np.linalg.norm(applied.linear) + abs(applied.constant - rho)
    )
    if residual > tolerances.structure * max(1.0, np.linalg.norm(H.symbol.Q) * (1 + np.linalg.norm(A)) ** 2):
        logging.error(f"Ground state eigenrelation residual {residual:.3e}")
    logging.debug(f"Ground state T+ = {T_plus}, residual {residual:.3e}")
    return GroundState(u0=u0, rho=rho, T_plus=T_plus, residual=residual)


def fbi_forward(phase: FbiPhase, g: GaussianFunction, tolerances: Tolerances = DEFAULT_TOLERANCES) -> GaussianFunction:
    """
    T g(z) = c_phi int_{R^n} exp(i phi(z, y)) g(y) dy
    """
    if g.is_zero:
        return GaussianFunction(BARGMANN_SIDE, g.A * 0, g.b * 0, g.c)
    S = symmetric(g.A - 1j * phase.P_yy)
    N = phase.P_zy.T
    S_inv_N = np.linalg.solve(S, N)
    S_inv_b = np.linalg.solve(S, g.b)
    A = 1j * phase.P_zz - N.T @ S_inv_N
    b = 1j * N.T @ S_inv_b
    c = g.c + np.log(phase.c_phi) + log_gaussian_integral(S, g.b, tolerances)
    return GaussianFunction(BARGMANN_SIDE, A, b, c)


def fbi_adjoint(
    phase: FbiPhase, weight: WeightPhi0, v: GaussianFunction, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> GaussianFunction:
    """
    T* v(x) = c_phi int_{C^n} exp(-i conj(phi(z, x))) v(z) exp(-2 Phi0(z)) dL(z)
    """
    n = phase.n
    if v.is_zero:
        return GaussianFunction(REAL_SIDE, np.eye(n), np.zeros(n), v.c)
    embedding = bargmann_embedding(n)
    conj_embedding = embedding.conj()
    H = symmetric(
        1j * conj_embedding.T @ phase.P_zz.conj() @ conj_embedding
        - embedding.T @ v.A @ embedding
        + 4 * weight.W_R
    )
    U = -1j * conj_embedding.T @ phase.P_zy.conj()
    source = embedding.T @ v.b
    H_inv_U = np.linalg.solve(H, U)
    H_inv_source = np.linalg.solve(H, source)
    A = 1j * phase.P_yy.conj() - U.T @ H_inv_U
    b = U.T @ H_inv_source
    c = v.c + np.log(phase.c_phi) + log_gaussian_integral(H, source, tolerances)
    return GaussianFunction(REAL_SIDE, A, b, c)


def propagate(
    nf: NormalForm, tf: WeightFamily, t: float, g: GaussianFunction, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> GaussianFunction:
    """
    exp(-t q^w) g computed as T* o G~(t) o T
    """
    transformed = fbi_forward(nf.phase, g, tolerances)
    evolved = pullback_form(tf, t, transformed)
    return fbi_adjoint(nf.phase, nf.weight, evolved, tolerances)


def sharpness_lower_bound(
    nf: NormalForm,
    tf: WeightFamily,
    p: float,
    q: float,
    t_grid,
    state: GroundState = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> SharpnessCurve:
    """
    Lower bound curve |G(t)u0|_q / |u0|_p from the propagated ground state
    """
    if not 1 <= p <= q:
        logging.critical(f"Exponents must satisfy 1 <= p <= q <= inf, got p={p}, q={q}")
        raise PQOrderingError(f"Exponents must satisfy 1 <= p <= q <= inf, got p={p}, q={q}", p=p, q=q)
    state = state or ground_state(nf.structure, tolerances)
    t_grid = np.asarray(t_grid, dtype=float)
    initial_norm = lp_norm(state.u0, p, tolerances)
    values = np.array(
        [lp_norm(propagate(nf, tf, t, state.u0, tolerances), q, tolerances) / initial_norm for t in t_grid]
    )
    return SharpnessCurve(p=p, q=q, t=t_grid, values=values, gamma=state.rho.real)


def unitarity_defect(nf: NormalForm, g: GaussianFunction, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    | |Tg| in H_Phi0 - |g|_2 | relative to |g|_2
    """
    forward_norm = bargmann_norm(fbi_forward(nf.phase, g, tolerances), nf.weight.W_R, tolerances)
    real_norm = lp_norm(g, 2, tolerances)
    return float(abs(forward_norm - real_norm) / real_norm)


def branch_consistency(H: np.ndarray, steps: int = 64) -> float:
    """
    Distance between the tracked log det and the sum of principal logs of the eigenvalues
    """
    tracked = log_det_tracked(symmetric(np.asarray(H, dtype=complex)), steps)
    direct = complex(np.sum(np.log(np.linalg.eigvals(H))))
    return float(abs(tracked - direct))
