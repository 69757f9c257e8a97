import logging
import math
from typing import Any, Callable, Optional, Type, Union

import pytest

from continuation_framework.errors import ContinuationFrameworkError


class Assertion:
    """
    Assertion utility class to encapsulate the checks used by the numerical test suites,
    with integrated logging and pytest failure reporting.

    Numeric comparisons accept real or complex values; distances are complex moduli.
    """

    def __init__(
        self,
        logger: Optional[Union[logging.Logger, logging.LoggerAdapter]] = None,
    ) -> None:
        """
        Initializes the Assertion utility with an optional logger.

        Args:
            logger (Logger | LoggerAdapter | None): Custom logger instance.
        """
        self.logger = logger or logging.getLogger(__name__)

    def _fail(self, error_message: str, detail: str) -> None:
        full_error_message = (f"{error_message}\n" if error_message else "") + detail
        self.logger.error(full_error_message)
        pytest.fail(full_error_message)

    def assert_equal(self, actual_value: Any, expected_value: Any, error_message: str = "") -> None:
        """
        Assert that two values are equal.

        Raises:
            pytest.fail: If values are not equal.
        """
        self.logger.debug(
            f"[assert_equal] Comparing actual={repr(actual_value)} with expected={repr(expected_value)}"
        )
        if actual_value != expected_value:
            self._fail(
                error_message,
                f"Assertion Failed: Values are not equal\n"
                f"Expected: {repr(expected_value)}\n"
                f"Actual  : {repr(actual_value)}",
            )
        self.logger.info("Assertion Passed: Values are equal")

    def assert_close(
        self,
        actual_value: complex,
        expected_value: complex,
        abs_tol: float = 0.0,
        rel_tol: float = 0.0,
        error_message: str = "",
    ) -> None:
        """
        Assert |actual - expected| <= max(abs_tol, rel_tol * |expected|).

        Args:
            actual_value: Computed value (real or complex).
            expected_value: Reference value.
            abs_tol: Absolute tolerance.
            rel_tol: Tolerance relative to |expected_value|.
            error_message (str, optional): Custom message to include on failure.

        Raises:
            pytest.fail: If the distance exceeds the tolerance or is not finite.
        """
        distance = abs(complex(actual_value) - complex(expected_value))
        allowed = max(abs_tol, rel_tol * abs(complex(expected_value)))
        self.logger.debug(
            f"[assert_close] actual={actual_value!r} expected={expected_value!r} "
            f"distance={distance:.3e} allowed={allowed:.3e}"
        )
        if not (math.isfinite(distance) and distance <= allowed):
            self._fail(
                error_message,
                f"Assertion Failed: Values are not close\n"
                f"Expected: {repr(expected_value)}\n"
                f"Actual  : {repr(actual_value)}\n"
                f"Distance: {distance:.6e} > {allowed:.6e}",
            )
        self.logger.info(f"Assertion Passed: Values agree within {allowed:.3e}")

    def assert_less_equal(self, actual_value: float, bound: float, error_message: str = "") -> None:
        """
        Assert actual <= bound.

        Raises:
            pytest.fail: If the bound is exceeded (NaN always fails).
        """
        self.logger.debug(f"[assert_less_equal] Checking {actual_value!r} <= {bound!r}")
        if not actual_value <= bound:
            self._fail(error_message, f"Assertion Failed: {actual_value!r} exceeds {bound!r}")
        self.logger.info(f"Assertion Passed: {actual_value!r} <= {bound!r}")

    def assert_greater(self, actual_value: float, bound: float, error_message: str = "") -> None:
        """
        Assert actual > bound.

        Raises:
            pytest.fail: If actual is not strictly above the bound.
        """
        self.logger.debug(f"[assert_greater] Checking {actual_value!r} > {bound!r}")
        if not actual_value > bound:
            self._fail(error_message, f"Assertion Failed: {actual_value!r} is not above {bound!r}")
        self.logger.info(f"Assertion Passed: {actual_value!r} > {bound!r}")

    def assert_true(self, condition: Any, error_message: str = "") -> None:
        """
        Assert that a condition evaluates to True.

        Raises:
            pytest.fail: If condition is False.
        """
        self.logger.debug(f"[assert_true] Checking condition={repr(condition)}")
        if not condition:
            self._fail(error_message, "Assertion Failed: Condition is not True")
        self.logger.info("Assertion Passed: Condition is True")

    def assert_false(self, condition: Any, error_message: str = "") -> None:
        """
        Assert that a condition evaluates to False.

        Raises:
            pytest.fail: If condition is True.
        """
        self.logger.debug(f"[assert_false] Checking condition={repr(condition)}")
        if condition:
            self._fail(error_message, "Assertion Failed: Condition is not False")
        self.logger.info("Assertion Passed: Condition is False")

    def assert_in(self, member: Any, container: Any, error_message: str = "") -> None:
        """
        Assert that a member exists in a container.

        Raises:
            pytest.fail: If member is not in container.
        """
        self.logger.debug(f"[assert_in] Checking if {repr(member)} in {repr(container)}")
        if member not in container:
            self._fail(
                error_message, f"Assertion Failed: {repr(member)} not found in {repr(container)}"
            )
        self.logger.info(f"Assertion Passed: {repr(member)} is in {repr(container)}")

    def assert_is_none(self, value: Any, error_message: str = "") -> None:
        """
        Assert that a value is None.

        Raises:
            pytest.fail: If value is not None.
        """
        self.logger.debug(f"[assert_is_none] Checking if value is None: {repr(value)}")
        if value is not None:
            self._fail(error_message, f"Assertion Failed: Expected None but got {repr(value)}")
        self.logger.info("Assertion Passed: Value is None")

    def assert_raises(
        self,
        expected_error: Type[ContinuationFrameworkError],
        func: Callable[..., Any],
        *args: Any,
        error_message: str = "",
        **kwargs: Any,
    ) -> ContinuationFrameworkError:
        """
        Assert that calling func(*args, **kwargs) raises `expected_error`.

        Returns:
            The raised exception, for inspection of its details.

        Raises:
            pytest.fail: If nothing or a different framework error is raised.
        """
        self.logger.debug(f"[assert_raises] Expecting {expected_error.__name__} from {func.__name__}")
        try:
            func(*args, **kwargs)
        except expected_error as e:
            self.logger.info(f"Assertion Passed: {expected_error.__name__} raised ({e})")
            return e
        except ContinuationFrameworkError as e:
            self._fail(
                error_message,
                f"Assertion Failed: expected {expected_error.__name__}, got {type(e).__name__}: {e}",
            )
        self._fail(error_message, f"Assertion Failed: {expected_error.__name__} was not raised")
