import logging
import os
import time
from io import StringIO

from continuation_framework.config.settings import LOG_CONFIG


class Logger:
    """
    Centralized logging utility for the continuation framework.

    Responsibilities:
    - Creates and configures a single logger instance (`continuation_framework`)
    - Adds up to four handlers:
        1. FileHandler: outputs logs to a timestamped log file (skipped when no log dir)
        2. StreamHandler (StringIO): in-memory stream for Allure report attachment
        3. StreamHandler (StringIO): per-step stream used by `step_with_log`
        4. StreamHandler (stderr): prints logs to the terminal; stdout stays free for reports
    - Provides LoggerAdapter with `context` for per-operation log labeling
    """

    def __init__(self):
        """
        Initialize the logger and configure its handlers (file, streams, terminal).
        """
        self._test_log_stream = StringIO()
        self._step_log_stream = StringIO()
        self._logger = logging.getLogger("continuation_framework")
        self._logger.setLevel(LOG_CONFIG.level)
        self._logger.propagate = False

        if not self._logger.handlers:
            formatter = logging.Formatter(
                fmt="%(asctime)s [%(levelname)s] %(context)s %(message)s",
                datefmt="%Y-%m-%d %H:%M:%S",
            )

            log_handlers = []
            if LOG_CONFIG.log_dir:
                timestamp = time.strftime("%Y%m%d_%H%M%S")
                os.makedirs(LOG_CONFIG.log_dir, exist_ok=True)
                log_file = os.path.join(LOG_CONFIG.log_dir, f"continuation_{timestamp}.log")
                log_handlers.append(logging.FileHandler(log_file, mode="w", encoding="utf-8"))

            log_handlers.append(logging.StreamHandler(self._test_log_stream))
            log_handlers.append(logging.StreamHandler(self._step_log_stream))
            log_handlers.append(logging.StreamHandler())

            for handler in log_handlers:
                handler.setFormatter(formatter)
                self._logger.addHandler(handler)

    @property
    def logger(self) -> logging.Logger:
        """
        Returns:
            logging.Logger: The core logger instance.
        """
        return self._logger

    @property
    def test_log_stream(self) -> StringIO:
        """
        Returns:
            StringIO: The log stream used for the full test log (pytest hook).
        """
        return self._test_log_stream

    @property
    def step_log_stream(self) -> StringIO:
        """
        Returns:
            StringIO: The log stream used for per-step logs (step_with_log).
        """
        return self._step_log_stream

    @staticmethod
    def drain(stream: StringIO) -> str:
        """Return what was written to `stream` and empty it."""
        contents = stream.getvalue()
        stream.truncate(0)
        stream.seek(0)
        return contents

    def get_logger_adapter(self, component: str, operation: str = "") -> logging.LoggerAdapter:
        """
        Returns a LoggerAdapter that injects `component.operation()` into all log records.

        Args:
            component (str): Module or test class name.
            operation (str): Function or test method name; empty for module-level loggers.

        Returns:
            logging.LoggerAdapter: Contextual logger adapter.
        """
        label = f"{component}.{operation}()" if operation else component
        return logging.LoggerAdapter(self._logger, {"context": label})


logger_instance = Logger()
