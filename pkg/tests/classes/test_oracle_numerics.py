# pylint: disable=missing-function-docstring, missing-module-docstring
import logging

import numpy as np
from pytest import LogCaptureFixture, approx, mark, raises

from src.classes.custom_exceptions import InsufficientSamplesError, UnsupportedDimensionError, UnsupportedPairError
from src.classes.gaussian_calculus import ground_state, propagate
from src.classes.gaussian_integrals import REAL_SIDE, GaussianFunction
from src.classes.normal_form import build_normal_form
from src.classes.oracle_numerics import (
    corner_norm,
    decay_fit,
    discretize,
    dual_exponent,
    hermite_functions,
    propagate_values,
    semigroup_matrix,
)
from src.classes.propagator_weights import WeightFamily, upper_bound_curve
from src.classes.singular_space import singular_space
from src.classes.spectral_analysis import eigenstructure, ground_energy
from src.classes.symplectic_core import davies_symbol, hamilton_matrix, harmonic_symbol, kfp_symbol
from tests.config.consts import DAVIES_GAMMA, SUPPORTED_PQ


def oracle_slope(builder, N: int) -> float:
    disc = discretize(builder(), N)
    t = np.linspace(2.0, 6.0, 9)
    norms = [corner_norm(semigroup_matrix(disc, s), 2.0, 2.0) for s in t]
    return decay_fit(t, norms, (2.0, 6.0))


class TestDiscretization:
    """Test class for the Hermite discretization"""

    def test_passes_harmonic_is_diagonal(self):
        disc = discretize(harmonic_symbol(), 32)

        assert np.allclose(disc.A_mat, np.diag(2 * np.arange(32) + 1.0), atol=1e-12)
        assert disc.numerical_range_minimum() == approx(1.0)

    def test_passes_harmonic_n2_eigenvalues(self):
        disc = discretize(harmonic_symbol(2), 16)
        eigenvalues = np.sort(np.linalg.eigvals(disc.A_mat).real)

        assert np.allclose(eigenvalues[:6], [2, 4, 4, 6, 6, 6], atol=1e-10)

    def test_passes_collocation_is_orthogonal(self):
        disc = discretize(davies_symbol(), 24)

        assert np.allclose(disc.collocation.T @ disc.collocation, np.eye(24), atol=1e-10)

    def test_passes_hermite_ground_function(self):
        x = np.array([0.0, 1.0])

        assert np.allclose(hermite_functions(3, x)[:, 0], np.pi**-0.25 * np.exp(-(x**2) / 2))

    @mark.parametrize("p, expected", [(1.0, np.inf), (2.0, 2.0), (4.0, 4.0 / 3.0), (np.inf, 1.0)])
    def test_passes_dual_exponent(self, p: float, expected: float):
        assert dual_exponent(p) == expected

    def test_fails_three_dimensions(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)

        with raises(UnsupportedDimensionError):
            discretize(harmonic_symbol(3), 32)

        assert "Oracle supports n <= 2" in caplog.text

    def test_fails_too_few_modes(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)

        with raises(UnsupportedDimensionError):
            discretize(harmonic_symbol(), 8)

        assert "N >= 16" in caplog.text


class TestCornerNorms:
    """Test class for operator norms of the discrete kernel"""

    @mark.parametrize("p, q", [(1.0, 1.0), (2.0, 2.0), (np.inf, np.inf)])
    def test_passes_identity_at_time_zero(self, p: float, q: float):
        kernel = semigroup_matrix(discretize(davies_symbol(), 32), 0.0)

        assert corner_norm(kernel, p, q) == approx(1.0, abs=1e-3)

    def test_passes_harmonic_two_norm(self):
        kernel = semigroup_matrix(discretize(harmonic_symbol(), 32), 1.5)

        assert kernel.two_norm() == approx(np.exp(-1.5))

    def test_passes_harmonic_decay_rate(self):
        assert oracle_slope(harmonic_symbol, 128) == approx(-1.0, rel=0.02)

    def test_passes_davies_decay_rate(self):
        assert oracle_slope(davies_symbol, 128) == approx(-DAVIES_GAMMA, rel=0.02)

    def test_passes_kfp_decay_rate(self):
        _, gamma = ground_energy(eigenstructure(hamilton_matrix(kfp_symbol())))

        assert oracle_slope(kfp_symbol, 24) == approx(-gamma, rel=0.02)

    @mark.parametrize("builder, N", [(harmonic_symbol, 32), (davies_symbol, 64), (kfp_symbol, 16)])
    def test_passes_semigroup_is_a_contraction(self, builder, N: int):
        disc = discretize(builder(), N)

        assert disc.numerical_range_minimum() >= -1e-10
        for t in (0.1, 1.0, 3.0):
            assert corner_norm(semigroup_matrix(disc, t), 2.0, 2.0) <= 1 + 1e-6

    @mark.parametrize("builder", [harmonic_symbol, davies_symbol])
    def test_passes_norms_converge_when_modes_double(self, builder):
        coarse = semigroup_matrix(discretize(builder(), 64), 2.0)
        fine = semigroup_matrix(discretize(builder(), 128), 2.0)

        assert corner_norm(coarse, 2.0, 2.0) == approx(corner_norm(fine, 2.0, 2.0), rel=1e-2)

    @mark.parametrize("builder", [harmonic_symbol, davies_symbol])
    @mark.parametrize("p, q", SUPPORTED_PQ)
    def test_passes_envelope_dominates_norms(self, builder, p: float, q: float):
        tf = WeightFamily(build_normal_form(eigenstructure(hamilton_matrix(builder()))))
        _, gamma = ground_energy(tf.normal_form.structure)
        k0 = singular_space(tf.normal_form.structure).k0
        disc = discretize(builder(), 64)
        t = np.array([1.0, 2.0, 4.0])

        envelope = upper_bound_curve(tf, gamma, k0, p, q, t).envelope
        norms = [corner_norm(semigroup_matrix(disc, s), p, q) for s in t]

        assert np.all(norms <= envelope)

    def test_fails_interior_pair(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.ERROR)
        kernel = semigroup_matrix(discretize(harmonic_symbol(), 16), 1.0)

        with raises(UnsupportedPairError):
            corner_norm(kernel, 2.0, 4.0)

        assert "interior pair" in caplog.text

    def test_fails_short_fit_window(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.ERROR)

        with raises(InsufficientSamplesError) as err:
            decay_fit([1.0, 2.0, 3.0], [1.0, 0.5, 0.25], (0.0, 5.0))

        assert err.value.context["samples"] == 3
        assert "Only 3 samples" in caplog.text


class TestOracleAgreement:
    """Test class comparing the oracle with exact Gaussian propagation"""

    @mark.parametrize("t", [0.1, 1.0, 3.0])
    def test_passes_harmonic_ground_state(self, t: float):
        H = eigenstructure(hamilton_matrix(harmonic_symbol()))
        state = ground_state(H)
        disc = discretize(harmonic_symbol(), 64)

        oracle = propagate_values(disc, t, state.u0)
        exact = np.exp(-t) * np.array([state.u0.evaluate(node) for node in disc.nodes])

        assert disc.discrete_l2(oracle - exact) < 1e-4

    @mark.parametrize("t", [0.1, 1.0, 3.0])
    def test_passes_davies_coherent_state(self, t: float):
        nf = build_normal_form(eigenstructure(hamilton_matrix(davies_symbol())))
        tf = WeightFamily(nf)
        disc = discretize(davies_symbol(), 128)
        g = GaussianFunction(REAL_SIDE, [[1.0]], [0.5], 0j)

        oracle = propagate_values(disc, t, g)
        evolved = propagate(nf, tf, t, g)
        exact = np.array([evolved.evaluate(node) for node in disc.nodes])

        assert disc.discrete_l2(oracle - exact) < 1e-4

    def test_passes_ground_energy_is_lowest_mode(self):
        H = eigenstructure(hamilton_matrix(davies_symbol()))
        rho, _ = ground_energy(H)
        eigenvalues = np.linalg.eigvals(discretize(davies_symbol(), 64).A_mat)

        assert np.min(np.abs(eigenvalues - rho)) < 1e-6
