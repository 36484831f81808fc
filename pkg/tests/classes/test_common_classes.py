# pylint: disable=missing-function-docstring, missing-module-docstring
import logging
import os

from pytest import LogCaptureFixture, approx, raises
from pytest_mock import MockerFixture

from src.classes.common_classes import DEFAULT_TOLERANCES, Tolerances, ToleranceStore
from src.classes.custom_exceptions import MissingConfigurationError
from tests.config.consts import FAKE, TEST_CONFIG


class TestTolerances:
    """Test class for the Tolerances dataclass"""

    def test_passes_scaled_multiplies_floats(self):
        factor = FAKE.pyfloat(min_value=0.1, max_value=100)

        scaled = DEFAULT_TOLERANCES.scaled(factor)

        assert scaled.psd == approx(DEFAULT_TOLERANCES.psd * factor)
        assert scaled.contraction == approx(DEFAULT_TOLERANCES.contraction * factor)
        assert scaled.branch_steps == DEFAULT_TOLERANCES.branch_steps

    def test_passes_scaled_returns_new_instance(self):
        assert DEFAULT_TOLERANCES.scaled(1.0) is not DEFAULT_TOLERANCES


class TestToleranceStore:
    """Test class for the Tolerance Store"""

    def test_passes_store_reads_config(self, mocker: MockerFixture, caplog: LogCaptureFixture):
        caplog.set_level(logging.DEBUG)
        mocker.patch.dict(os.environ, {}, clear=True)

        store = ToleranceStore(TEST_CONFIG)

        assert store.scale == 1.0
        assert store.tolerances == Tolerances()
        assert f"Read tolerances from {TEST_CONFIG}" in caplog.text

    def test_passes_store_applies_env_scale(self, mocker: MockerFixture, caplog: LogCaptureFixture):
        caplog.set_level(logging.INFO)
        mocker.patch.dict(os.environ, {"QUADSEMI_TOL": "10"})

        store = ToleranceStore(TEST_CONFIG)

        assert store.scale == 10.0
        assert store.tolerances.gaussian == approx(1e-7)
        assert "Scaling all tolerances by 10.0" in caplog.text

    def test_passes_store_ignores_env_when_asked(self, mocker: MockerFixture):
        mocker.patch.dict(os.environ, {"QUADSEMI_TOL": "10"})

        assert ToleranceStore(TEST_CONFIG, read_env=False).scale == 1.0

    def test_fails_env_scale_is_not_positive(self, mocker: MockerFixture, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        mocker.patch.dict(os.environ, {"QUADSEMI_TOL": FAKE.random_element(["-1", "0", "tight"])})

        with raises(MissingConfigurationError):
            _ = ToleranceStore(TEST_CONFIG)

        assert "QUADSEMI_TOL must be a positive number" in caplog.text

    def test_fails_config_misses_section(self, mocker: MockerFixture, caplog: LogCaptureFixture):
        caplog.set_level(logging.CRITICAL)
        mocker.patch("src.classes.common_classes.ConfigParser.get", side_effect=KeyError("psd"))

        with raises(MissingConfigurationError):
            _ = ToleranceStore(TEST_CONFIG)

        assert "Failed to read tolerance configs" in caplog.text
