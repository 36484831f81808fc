"""
Contains all functions that aren't directly correlated to the numerics or logging
"""

import csv
import json
import logging
import os
from configparser import ConfigParser
from dataclasses import dataclass

import numpy as np

from src.classes.custom_exceptions import IoError, MissingConfigurationError
from src.helpers.consts import (
    CONFIG_FILENAME,
    GRID_CONFIG_TITLE,
    ORACLE_CONFIG_TITLE,
    REPORTING_CONFIG_TITLE,
)


@dataclass(frozen=True)
class GridSettings:
    """
    Time grids and lattice limits read from the [grids] section
    """

    short_time_start: float = 1e-4
    short_time_stop: float = 1e-1
    short_time_points: int = 31
    large_time_start: float = 0.1
    large_time_stop: float = 10.0
    large_time_points: int = 100
    large_time_epsilon: float = 0.1
    e_max_factor: float = 10.0
    max_lattice_points: int = 20000

    def short_time_grid(self) -> np.ndarray:
        """
        Log-spaced grid for the t -> 0+ regime
        """
        return np.geomspace(self.short_time_start, self.short_time_stop, self.short_time_points)

    def large_time_grid(self) -> np.ndarray:
        """
        Linear grid for the exponential decay regime
        """
        return np.linspace(self.large_time_start, self.large_time_stop, self.large_time_points)

    def default_grid(self) -> np.ndarray:
        """
        Union of both regimes, sorted and without duplicates
        """
        return np.unique(np.concatenate([self.short_time_grid(), self.large_time_grid()]))


def read_section(config_name: str, config_dir: str = CONFIG_FILENAME) -> dict:
    """
    :param config_name: Section under the config for the configuration to pull data from
    :param config_dir: Path of the INI file
    :return: Raw string values of the section
    """
    config_parser = ConfigParser()
    config_parser.read(config_dir)
    if not config_parser.has_section(config_name):
        logging.critical(f"Config section {config_name} is missing")
        raise MissingConfigurationError(f"Config section {config_name} is missing")
    return dict(config_parser.items(config_name))


def read_grid_settings(config_dir: str = CONFIG_FILENAME) -> GridSettings:
    """
    :return: Grid settings parsed from the config
    """
    section = read_section(GRID_CONFIG_TITLE, config_dir)
    try:
        return GridSettings(
            short_time_start=float(section["short_time_start"]),
            short_time_stop=float(section["short_time_stop"]),
            short_time_points=int(section["short_time_points"]),
            large_time_start=float(section["large_time_start"]),
            large_time_stop=float(section["large_time_stop"]),
            large_time_points=int(section["large_time_points"]),
            large_time_epsilon=float(section["large_time_epsilon"]),
            e_max_factor=float(section["e_max_factor"]),
            max_lattice_points=int(section["max_lattice_points"]),
        )
    except (KeyError, ValueError) as err:
        logging.critical("Failed to read grid settings")
        raise MissingConfigurationError("Failed to read grid settings") from err


@dataclass(frozen=True)
class OracleSettings:
    """
    Hermite basis sizes and the decay fitting window read from the [oracle] section
    """

    modes_1d: int = 128
    modes_2d: int = 24
    fit_window_start: float = 2.0
    fit_window_stop: float = 6.0

    def modes(self, n: int) -> int:
        """
        Modes per axis for a problem of dimension n
        """
        return self.modes_1d if n == 1 else self.modes_2d

    @property
    def fit_window(self) -> tuple:
        """
        (start, stop) of the decay fit
        """
        return self.fit_window_start, self.fit_window_stop


@dataclass(frozen=True)
class ReportingSettings:
    """
    Output settings read from the [reporting] section
    """

    output_location: str = "output/"
    csv_mode: str = "w"
    seed: int = 0


def read_oracle_settings(config_dir: str = CONFIG_FILENAME) -> OracleSettings:
    """
    :return: Oracle settings parsed from the config
    """
    section = read_section(ORACLE_CONFIG_TITLE, config_dir)
    try:
        return OracleSettings(
            modes_1d=int(section["modes_1d"]),
            modes_2d=int(section["modes_2d"]),
            fit_window_start=float(section["fit_window_start"]),
            fit_window_stop=float(section["fit_window_stop"]),
        )
    except (KeyError, ValueError) as err:
        logging.critical("Failed to read oracle settings")
        raise MissingConfigurationError("Failed to read oracle settings") from err


def read_reporting_settings(config_dir: str = CONFIG_FILENAME) -> ReportingSettings:
    """
    :return: Reporting settings parsed from the config
    """
    section = read_section(REPORTING_CONFIG_TITLE, config_dir)
    try:
        return ReportingSettings(
            output_location=section["output_location"],
            csv_mode=section["csv_mode"],
            seed=int(section["seed"]),
        )
    except (KeyError, ValueError) as err:
        logging.critical("Failed to read reporting settings")
        raise MissingConfigurationError("Failed to read reporting settings") from err


def format_number(value) -> str:
    """
    Deterministic text form of a real number for CSV output
    """
    if isinstance(value, str):
        return value
    value = float(value)
    if np.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def write_results_to_csv(full_path: str, header: tuple, rows: list, filemode: str = "w") -> str:
    """
    Writes a CSV file of curve samples
    :param full_path: Target file, parent directories are created
    :param header: Column names
    :param rows: Iterable of row tuples, numbers are written with repr precision
    :param filemode: File mode passed to open
    :return: The path written
    """
    try:
        file_location = os.path.dirname(full_path)
        if file_location and not os.path.exists(file_location):
            os.makedirs(file_location)
        with open(full_path, filemode, newline="") as file_instance:
            writer = csv.writer(file_instance)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_number(value) for value in row])
        logging.info(f"Wrote rows into CSV file at: {full_path}")
    except OSError as err:
        logging.critical("Failed to write CSV")
        raise IoError(f"Failed to write CSV at {full_path}", reason="WriteFailed") from err
    return full_path


def write_json(full_path: str, payload: dict) -> str:
    """
    Writes a JSON document with sorted keys
    """
    try:
        file_location = os.path.dirname(full_path)
        if file_location and not os.path.exists(file_location):
            os.makedirs(file_location)
        with open(full_path, "w") as file_instance:
            json.dump(payload, file_instance, indent=2, sort_keys=True)
        logging.info(f"Wrote JSON file at: {full_path}")
    except OSError as err:
        logging.critical("Failed to write JSON")
        raise IoError(f"Failed to write JSON at {full_path}", reason="WriteFailed") from err
    return full_path


def complex_matrix_to_lists(matrix: np.ndarray) -> dict:
    """
    Splits a complex array into JSON-friendly real and imaginary nested lists
    """
    matrix = np.asarray(matrix, dtype=complex)
    return {"re": matrix.real.tolist(), "im": matrix.imag.tolist()}
