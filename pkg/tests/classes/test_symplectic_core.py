# pylint: disable=missing-function-docstring, missing-module-docstring
import logging

import numpy as np
from pytest import LogCaptureFixture, approx, mark, raises

from src.classes.custom_exceptions import DimensionMismatchError, ReNotPSDError
from src.classes.symplectic_core import (
    SYMBOL_BUILDERS,
    SymplecticStructure,
    davies_symbol,
    free_schrodinger_symbol,
    hamilton_matrix,
    hamilton_vector_field,
    harmonic_symbol,
    heat_symbol,
    is_elliptic,
    kfp_symbol,
    make_symbol,
    sphere_minimum,
    structure_residual,
)
from tests.config.consts import FAKE, KFP_Q_IM, KFP_Q_RE


class TestMakeSymbol:
    """Test class for symbol construction"""

    def test_passes_free_schrodinger_is_accepted(self):
        sym = make_symbol(1, np.diag([0, 1j]))

        assert sym.n == 1
        assert sym.dim == 2
        assert sym.re_min_eigenvalue == approx(0.0)

    def test_passes_asymmetric_matrix_is_symmetrized(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.WARNING)
        raw = np.array([[1.0, 2.0], [0.0, 1.0]])

        sym = make_symbol(1, raw)

        assert np.allclose(sym.Q, [[1.0, 1.0], [1.0, 1.0]])
        assert "symmetrizing" in caplog.text

    def test_fails_indefinite_real_part(self, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)

        with raises(ReNotPSDError) as err:
            make_symbol(1, np.diag([1.0, -1.0]))

        assert err.value.code == "ReNotPSD"
        assert "not positive semidefinite" in caplog.text

    @mark.parametrize("n, shape", [(1, (3, 3)), (2, (2, 2)), (2, (4, 3))])
    def test_fails_wrong_shape(self, n: int, shape: tuple):
        with raises(DimensionMismatchError):
            make_symbol(n, np.zeros(shape))

    def test_passes_kfp_coefficients(self):
        sym = kfp_symbol(1.0)

        assert np.allclose(sym.Q.real, KFP_Q_RE)
        assert np.allclose(sym.Q.imag, KFP_Q_IM)
        assert sym.evaluate([0, 1, 0, 0]) == approx(0.25)

    def test_passes_evaluate_is_bilinear(self):
        sym = davies_symbol()
        x, xi = FAKE.pyfloat(min_value=-3, max_value=3), FAKE.pyfloat(min_value=-3, max_value=3)

        assert sym.evaluate([x, xi]) == approx(xi**2 + 1j * x**2)
        assert sym.polarized([x, xi], [x, xi]) == approx(sym.evaluate([x, xi]))

    def test_passes_every_builder_runs(self):
        for name, builder in SYMBOL_BUILDERS.items():
            assert builder().n in (1, 2), name


class TestSymplecticStructure:
    """Test class for the symplectic form"""

    @mark.parametrize("n", [1, 2, 3])
    def test_passes_j_identities(self, n: int):
        J = SymplecticStructure(n).J

        assert np.allclose(J.T, -J)
        assert np.allclose(J @ J, -np.eye(2 * n))

    def test_passes_sigma_convention(self):
        structure = SymplecticStructure(1)

        # sigma((x, xi), (y, eta)) = xi y - x eta
        assert structure.sigma([1.0, 0.0], [0.0, 1.0]) == approx(-1.0)
        assert structure.sigma([0.0, 1.0], [1.0, 0.0]) == approx(1.0)


class TestHamiltonMatrix:
    """Test class for the Hamilton matrix"""

    @mark.parametrize("builder", [harmonic_symbol, davies_symbol, kfp_symbol, heat_symbol])
    def test_passes_polarization_identity(self, builder):
        sym = builder()
        H = hamilton_matrix(sym)

        assert structure_residual(sym, H.F, probes=50, seed=FAKE.pyint()) < 1e-10
        assert not H.is_filled

    def test_passes_harmonic_is_rotation(self):
        H = hamilton_matrix(harmonic_symbol())

        assert np.allclose(H.F, [[0, 1], [-1, 0]])
        assert np.allclose(sorted(np.linalg.eigvals(H.F), key=lambda z: z.imag), [-1j, 1j])

    def test_passes_kfp_real_part_action(self):
        F = hamilton_matrix(kfp_symbol()).F
        x, v, xi, eta = 1.0, 2.0, 3.0, 4.0

        assert np.allclose(F.real @ [x, v, xi, eta], [0, eta, 0, -v / 4])

    def test_passes_vector_field_is_twice_f(self):
        sym = kfp_symbol()

        assert np.allclose(hamilton_vector_field(sym), 2 * hamilton_matrix(sym).F)


class TestEllipticity:
    """Test class for ellipticity and the sphere minimum"""

    @mark.parametrize(
        "builder, expected",
        [
            (harmonic_symbol, True),
            (davies_symbol, True),
            (free_schrodinger_symbol, False),
            (heat_symbol, False),
            (kfp_symbol, False),
        ],
    )
    def test_passes_is_elliptic(self, builder, expected: bool):
        assert is_elliptic(builder()) is expected

    def test_passes_sphere_minimum_values(self):
        assert sphere_minimum(harmonic_symbol()) == approx(1.0, abs=1e-8)
        assert sphere_minimum(davies_symbol()) == approx(2**-0.5, abs=1e-6)
        assert sphere_minimum(heat_symbol()) == approx(0.0, abs=1e-6)
