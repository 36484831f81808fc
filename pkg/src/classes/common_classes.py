"""
File which contains classes shared by every numerical module.
Numerical modules only see the Tolerances dataclass, ToleranceStore reads
the configuration and the environment.
"""

import logging
import os
from configparser import ConfigParser
from dataclasses import dataclass, fields, replace

from src.classes.custom_exceptions import MissingConfigurationError
from src.helpers.consts import CONFIG_FILENAME, TOLERANCE_CONFIG_TITLE, TOLERANCE_SCALE_ENV


@dataclass(frozen=True)
class Tolerances:
    """
    Numerical thresholds, defaults mirror src/config/config.ini
    """

    psd: float = 1e-10
    ellipticity: float = 1e-8
    rank: float = 1e-10
    cluster: float = 1e-8
    structure: float = 1e-10
    identity: float = 1e-12
    finite_difference: float = 1e-6
    gaussian: float = 1e-8
    contraction: float = 1e-6
    branch_steps: int = 64

    def scaled(self, factor: float) -> "Tolerances":
        """
        :param factor: Positive multiplier applied to every float threshold
        :return: New Tolerances instance
        """
        scaled_values = {
            field.name: getattr(self, field.name) * factor
            for field in fields(self)
            if field.type in (float, "float")
        }
        return replace(self, **scaled_values)


DEFAULT_TOLERANCES = Tolerances()


class ToleranceStore:
    """
    Class which reads tolerance settings from the config and the environment and stores them
    """

    def __init__(self, config_dir: str = CONFIG_FILENAME, read_env: bool = True) -> None:
        """
        :param config_dir: Path of the INI file holding the [tolerances] section
        :param read_env: When true the QUADSEMI_TOL scale factor is applied
        """
        self._config_dir = config_dir
        self._config_parser = ConfigParser()
        self._scale = 1.0
        self._tolerances = None

        self._read_config()
        if read_env:
            self._read_env_scale()

    @property
    def scale(self) -> float:
        """
        Factor read from QUADSEMI_TOL, 1.0 when unset
        """
        return self._scale

    @property
    def tolerances(self) -> Tolerances:
        """
        Tolerances with the environment scale applied
        """
        assert self._tolerances is not None, "Tolerances missing"
        return self._tolerances.scaled(self._scale)

    def _read_config(self) -> None:
        self._config_parser.read(self._config_dir)
        try:
            values = {}
            for field in fields(Tolerances):
                raw_value = self._config_parser.get(TOLERANCE_CONFIG_TITLE, field.name)
                values[field.name] = int(raw_value) if field.name == "branch_steps" else float(raw_value)
            self._tolerances = Tolerances(**values)
        except Exception as err:
            logging.critical("Failed to read tolerance configs")
            raise MissingConfigurationError("Failed to read tolerance configs") from err
        logging.debug(f"Read tolerances from {self._config_dir}")

    def _read_env_scale(self) -> None:
        raw_scale = os.environ.get(TOLERANCE_SCALE_ENV)
        if raw_scale is None or raw_scale == "":
            return
        try:
            scale = float(raw_scale)
            assert scale > 0
        except (AssertionError, ValueError) as err:
            logging.critical(f"{TOLERANCE_SCALE_ENV} must be a positive number, got {raw_scale!r}")
            raise MissingConfigurationError(
                f"{TOLERANCE_SCALE_ENV} must be a positive number, got {raw_scale!r}"
            ) from err
        logging.info(f"Scaling all tolerances by {scale}")
        self._scale = scale
