"""
Contains all functions required to setup logging
"""

import logging
import os
from configparser import ConfigParser
from logging import Logger, StreamHandler
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler

from src.classes.custom_exceptions import MissingConfigurationError
from src.helpers.consts import CONFIG_FILENAME, QUADSEMI_DEBUG_CONFIG_TITLE

LEVELS = {
    "DEBUG": logging.DEBUG,
    "INFO": logging.INFO,
    "WARNING": logging.WARNING,
    "ERROR": logging.ERROR,
    "CRITICAL": logging.CRITICAL,
}


class LoggingTools:
    """
    Class contains all tools required to create loggers for the analysis runs
    """

    def __init__(
        self,
        logger: Logger,
        config_name: str = QUADSEMI_DEBUG_CONFIG_TITLE,
        config_dir: str = CONFIG_FILENAME,
        console_level: str = None,
    ) -> None:
        """
        :param logger: Logger to attach handlers to
        :param config_name: Section under the config for the configuration to pull data from
        :param config_dir: Path of the INI file
        :param console_level: Optional override of the configured level for stdout, e.g. DEBUG from --verbose
        """
        self._logger = logger
        self._config_name = config_name
        self._config_dir = config_dir
        self._console_level = console_level
        self._config_parser = ConfigParser()
        self._debug_level = None
        self._file_format = None
        self._date_format = None
        self._is_file_logging = None
        self._log_rotation = None
        self._file_location = None
        self._file_path = None
        self._max_file_bytes = None
        self._max_file_no = None
        self._mode = None

    def read_configs(self) -> None:
        """
        Reads config file and parses and stores the result
        """
        self._config_parser.read(self._config_dir)
        self._read_basic_config()
        if self._is_file_logging:
            self._read_file_config()

    def create_loggers(self) -> None:
        """
        Creates loggers from the given configs
        """
        self._create_stdout_logger()
        if not self._is_file_logging:
            return
        if not os.path.exists(self._file_location):
            os.makedirs(self._file_location)  # pragma: no cover
        if self._log_rotation == "size_based":
            handler = RotatingFileHandler(
                filename=self._file_path,
                maxBytes=self._max_file_bytes,
                backupCount=self._max_file_no,
                mode=self._mode,
            )
            logging.info(f"Created rotating file log file at {self._file_path}")
        elif self._log_rotation == "time_based":
            handler = TimedRotatingFileHandler(
                filename=self._file_path,
                when="midnight",
                backupCount=self._max_file_no,
            )
            handler.suffix = "%Y-%m-%d"
            logging.info(f"Created time rotating file log file at {self._file_path}")
        else:
            logging.critical(f"Unknown log rotation {self._log_rotation}")
            raise MissingConfigurationError(f"Unknown log rotation {self._log_rotation}")
        self._attach(handler, self._debug_level)

    def _read_basic_config(self) -> None:
        try:
            self._debug_level = LEVELS[self._config_parser.get(self._config_name, "debug_level")]
            self._file_format = self._config_parser.get(self._config_name, "format")
            self._date_format = self._config_parser.get(self._config_name, "dateformat")
            self._is_file_logging = self._config_parser.getboolean(self._config_name, "file_logging")
        except Exception as err:
            logging.critical("Failed to read basic logger configs")
            raise MissingConfigurationError("Failed to read basic logger configs") from err

        if None in [self._debug_level, self._file_format, self._date_format]:
            logging.critical("Failed to read basic logger configs")
            raise MissingConfigurationError("Failed to read basic logger configs")

    def _read_file_config(self) -> None:
        try:
            self._log_rotation = self._config_parser.get(self._config_name, "log_rotation")
            self._file_location = self._config_parser.get(self._config_name, "file_location")
            self._file_path = os.path.join(
                self._file_location, self._config_parser.get(self._config_name, "file_name")
            )
            self._max_file_bytes = int(self._config_parser.get(self._config_name, "max_file_bytes"))
            self._max_file_no = int(self._config_parser.get(self._config_name, "max_file_no"))
            self._mode = self._config_parser.get(self._config_name, "mode")
        except Exception as err:
            logging.critical("Failed to read file logger settings in configs")
            raise MissingConfigurationError("Failed to read file logger settings in configs") from err

        if self._mode in [None, "None", ""] or self._log_rotation not in ("size_based", "time_based"):
            logging.critical("Failed to read file logger settings in configs")
            raise MissingConfigurationError("Failed to read file logger settings in configs")

    def _attach(self, handler: logging.Handler, level: int) -> None:
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter(fmt=self._file_format, datefmt=self._date_format))
        self._logger.addHandler(handler)

    def _create_stdout_logger(self) -> None:
        console_level = LEVELS.get(self._console_level, self._debug_level)
        self._logger.setLevel(min(console_level, self._debug_level))
        self._attach(StreamHandler(), console_level)
        logging.info("Created stdout logger")


def create_logger(
    config_name: str = QUADSEMI_DEBUG_CONFIG_TITLE,
    config_dir: str = CONFIG_FILENAME,
    console_level: str = None,
) -> Logger:  # pragma: no cover
    """
    Creates a logging instance, can be customized through the config.ini
    :param config_name: Section under the config for the configuration to pull data from
    :param console_level: Optional stdout level override
    :return: Logger for logging
    """
    logger = logging.getLogger()
    logging_tools = LoggingTools(
        logger=logger, config_name=config_name, config_dir=config_dir, console_level=console_level
    )
    logging_tools.read_configs()
    logging_tools.create_loggers()
    return logger
