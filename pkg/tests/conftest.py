import json
import platform
from typing import Any, Generator

import allure
import numpy as np
import pytest
import scipy
from _pytest.main import Session
from _pytest.nodes import Item
from _pytest.runner import CallInfo

from continuation_framework.config.settings import (
    DEFAULT_CONTOUR,
    DEFAULT_QUADRATURE,
    DEFAULT_STEP_POLICY,
)
from continuation_framework.errors import ContinuationFrameworkError
from continuation_framework.reporting.allure_report_helpers import Allure, config_properties
from continuation_framework.reporting.report_writers import to_jsonable
from continuation_framework.utils.logger import logger_instance
from tests.config.settings import META_CONFIG


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_setup(item: Item) -> Generator[Any, None, None]:
    logger_instance.drain(logger_instance.test_log_stream)
    yield


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item: Item, call: CallInfo) -> Generator[Any, None, None]:
    """
    Attach the framework error of a failing call (operation, reason, details) and, once
    teardown is reported, the log captured during the test.
    """
    outcome = yield
    report = outcome.get_result()

    if report.when == "call" and call.excinfo is not None:
        error = call.excinfo.value
        if isinstance(error, ContinuationFrameworkError):
            allure.attach(
                json.dumps(to_jsonable({"type": type(error).__name__, "operation": error.operation,
                                        "reason": error.reason, "details": error.details}),
                           indent=2, default=repr),
                name="Framework Error",
                attachment_type=allure.attachment_type.JSON,
            )

    if report.when == "teardown":
        log_contents = logger_instance.drain(logger_instance.test_log_stream)
        if log_contents:
            allure.attach(
                log_contents,
                name="Test Log",
                attachment_type=allure.attachment_type.TEXT,
            )


def pytest_sessionfinish(session: Session, exitstatus: int) -> None:
    """
    Record who ran the session, the numerical stack and the default config blocks
    in the Allure results.
    """
    environment = {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }
    environment.update(config_properties(DEFAULT_STEP_POLICY, DEFAULT_QUADRATURE, DEFAULT_CONTOUR))
    Allure.write_run_metadata(META_CONFIG.test_executor, META_CONFIG.build_name, environment)
