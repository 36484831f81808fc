# pylint: disable=missing-function-docstring, missing-module-docstring
import logging

import numpy as np
from pytest import LogCaptureFixture, approx, mark, raises

from src.classes.custom_exceptions import IntegrabilityFailureError
from src.classes.gaussian_integrals import (
    BARGMANN_SIDE,
    REAL_SIDE,
    GaussianFunction,
    PolynomialGaussian,
    bargmann_norm,
    check_integrable,
    log_det_tracked,
    log_gaussian_integral,
    lp_norm,
    weight_real_form,
    zero_gaussian,
)
from tests.config.consts import FAKE


def standard_gaussian(n: int = 1) -> GaussianFunction:
    return GaussianFunction(REAL_SIDE, np.eye(n), np.zeros(n), 0j)


class TestGaussianFunction:
    """Test class for the Gaussian container"""

    def test_passes_evaluate_real_side(self):
        g = GaussianFunction(REAL_SIDE, [[2.0]], [1.0], 0.5)
        x = FAKE.pyfloat(min_value=-2, max_value=2)

        assert g.evaluate([x]) == approx(np.exp(-(x**2) + x + 0.5))

    def test_passes_evaluate_bargmann_side(self):
        g = GaussianFunction(BARGMANN_SIDE, [[1j]], [0.0], 0j)
        z = 0.4 + 0.2j

        assert g.evaluate([z]) == approx(np.exp(0.5j * z**2))

    def test_passes_zero_function(self):
        g = standard_gaussian().scaled(0)

        assert g.is_zero
        assert g.evaluate([1.0]) == 0j
        assert zero_gaussian(REAL_SIDE, 2).is_zero

    def test_passes_constant_compared_modulo_two_pi_i(self):
        g = standard_gaussian()
        shifted = GaussianFunction(REAL_SIDE, g.A, g.b, 2j * np.pi)

        assert g.coefficient_distance(shifted) == approx(0.0, abs=1e-12)
        assert g.coefficient_distance(zero_gaussian(REAL_SIDE, 1)) == np.inf

    def test_passes_matrix_is_symmetrized(self):
        g = GaussianFunction(REAL_SIDE, [[1.0, 2.0], [0.0, 1.0]], [0.0, 0.0])

        assert np.allclose(g.A, [[1.0, 1.0], [1.0, 1.0]])

    def test_passes_polynomial_factor(self):
        product = PolynomialGaussian(np.array([[-1.0]]), np.array([0.0]), 1.0, standard_gaussian())

        assert product.evaluate([2.0]) == approx(-3.0 * np.exp(-2.0))


class TestGaussianIntegral:
    """Test class for the closed form integrals"""

    def test_passes_standard_normal(self):
        assert log_gaussian_integral(np.eye(1), np.zeros(1)) == approx(0.5 * np.log(2 * np.pi))

    def test_passes_shifted_gaussian(self):
        value = log_gaussian_integral(np.array([[2.0]]), np.array([1.0]))

        assert value == approx(0.5 * np.log(np.pi) + 0.25)

    def test_passes_complex_matrix_uses_principal_branch(self):
        H = np.array([[1.0 + 1.0j]])

        value = log_gaussian_integral(H, np.zeros(1))

        assert value == approx(0.5 * np.log(2 * np.pi) - 0.5 * np.log(1.0 + 1.0j))

    @mark.parametrize("steps", [8, 64])
    def test_passes_tracked_log_det_matches_eigenvalues(self, steps: int):
        rng = np.random.default_rng(FAKE.pyint())
        root = rng.standard_normal((3, 3))
        imaginary = rng.standard_normal((3, 3))
        H = root @ root.T + np.eye(3) + 5j * (imaginary + imaginary.T)

        tracked = log_det_tracked(H, steps)
        direct = np.sum(np.log(np.linalg.eigvals(H)))

        assert tracked == approx(direct, abs=1e-9)

    def test_fails_growing_integrand(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.ERROR)

        with raises(IntegrabilityFailureError):
            check_integrable(np.array([[-1.0]]))

        assert "does not decay" in caplog.text


class TestNorms:
    """Test class for L^p and Bargmann norms"""

    @mark.parametrize(
        "p, expected",
        [(1.0, np.sqrt(2 * np.pi)), (2.0, np.pi**0.25), (np.inf, 1.0)],
    )
    def test_passes_lp_norm_of_standard_gaussian(self, p: float, expected: float):
        assert lp_norm(standard_gaussian(), p) == approx(expected)

    def test_passes_lp_norm_ignores_oscillation(self):
        oscillating = GaussianFunction(REAL_SIDE, [[1.0 + 3.0j]], [2.0j], 0j)

        assert lp_norm(oscillating, 2.0) == approx(np.pi**0.25)

    def test_passes_lp_norm_in_two_dimensions(self):
        assert lp_norm(standard_gaussian(2), 2.0) == approx(np.pi**0.5)

    def test_passes_bargmann_norm_of_constant(self):
        one = GaussianFunction(BARGMANN_SIDE, np.zeros((1, 1)), np.zeros(1), 0j)

        assert bargmann_norm(one, np.eye(2) / 2) == approx(np.sqrt(np.pi))

    def test_passes_weight_real_form(self):
        W_R = weight_real_form(np.zeros((1, 1)), np.array([[0.5]]))

        assert np.allclose(W_R, np.eye(2) / 2)
