from abc import ABC, abstractmethod
from functools import cached_property
from types import FunctionType
from typing import Optional

import numpy as np

from continuation_framework.reporting.allure_report_helpers import Allure
from continuation_framework.utils.assertions import Assertion
from continuation_framework.utils.cli_helpers import Cli
from continuation_framework.utils.logger import logger_instance


class AbstractTestBase(ABC):
    """
    Base class for the numerical test suites.

    Child classes declare their cases in `get_test_case_catalog`; each test gets a
    logger named after `Class.method()`, an `rng` seeded from `seed`, and lazily built
    `assertion`, `cli` and `allure` helpers. `setup` / `teardown` run around each test
    unless `@pytest.mark.no_setup` / `@pytest.mark.no_teardown` is present.
    """

    seed: int = 42

    @classmethod
    @abstractmethod
    def get_test_case_catalog(cls) -> dict:
        """
        Map case names to the test function and a one-line description.

        Example:
            @classmethod\n
            def get_test_case_catalog(cls):\n
                return {
                    "recenter_identity": {
                        "test_function_name": cls.test_recenter_identity,
                        "description": "Recentering at the own center copies the coefficients",
                    },
                }
        """

    def setup(self) -> None:
        pass

    def teardown(self) -> None:
        pass

    @classmethod
    def catalog_entry(cls, method_name: str) -> Optional[dict]:
        for name, entry in cls.get_test_case_catalog().items():
            if getattr(entry["test_function_name"], "__name__", None) == method_name:
                return {"case": name, **entry}
        return None

    def setup_method(self, method: FunctionType) -> None:
        self.logger = logger_instance.get_logger_adapter(type(self).__name__, method.__name__)
        self.rng = np.random.default_rng(self.seed)

        entry = self.catalog_entry(method.__name__)
        if entry is None:
            self.logger.warning(f"{method.__name__} is missing from the test case catalog")
        else:
            self.logger.info(f"[{entry['case']}] {entry['description']}")

        if self._has_marker(method, "no_setup"):
            self.logger.info(f"Skipping setup for {method.__name__}")
            return
        self.setup()

    def teardown_method(self, method: FunctionType) -> None:
        if self._has_marker(method, "no_teardown"):
            self.logger.info(f"Skipping teardown for {method.__name__}")
            return
        self.teardown()

    @staticmethod
    def _has_marker(method: FunctionType, name: str) -> bool:
        return any(m.name == name for m in getattr(method, "pytestmark", []))

    @cached_property
    def assertion(self) -> Assertion:
        return Assertion(logger=self.logger)

    @cached_property
    def cli(self) -> Cli:
        return Cli(logger=self.logger)

    @cached_property
    def allure(self) -> Allure:
        return Allure(logger=self.logger)
