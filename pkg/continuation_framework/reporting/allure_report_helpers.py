import csv
import dataclasses
import io
import json
import logging
import os
from contextlib import contextmanager
from typing import Any, Dict, Iterable, Optional, Sequence, Union

import allure

from continuation_framework.reporting.report_writers import format_cell, to_jsonable
from continuation_framework.utils.logger import logger_instance


def config_properties(*blocks: Any) -> Dict[str, Any]:
    """
    Flatten frozen config blocks into `Block.field` keys for environment.properties.

    Example:
        config_properties(StepPolicy()) -> {"StepPolicy.step_fraction": 0.5, ...}
    """
    properties = {}
    for block in blocks:
        for field in dataclasses.fields(block):
            properties[f"{type(block).__name__}.{field.name}"] = getattr(block, field.name)
    return properties


class Allure:
    """
    Allure helpers for the numerical suites: run metadata, logged steps and
    attachments of computed reports in the same encoding the CLI emits.
    """

    def __init__(
        self,
        logger: Optional[Union[logging.Logger, logging.LoggerAdapter]] = None,
    ) -> None:
        self.logger = logger or logging.getLogger(__name__)

    @staticmethod
    def write_run_metadata(
        executor: str,
        build_name: str = "",
        environment: Optional[Dict[str, Any]] = None,
        report_dir: str = "reports/allure-results",
    ) -> None:
        """
        Write `executor.json` and, when given, `environment.properties`.

        Args:
            executor: Who ran the session (e.g. "Local Run").
            build_name: Build label shown next to the executor.
            environment: Keys and values for the Environment widget.
            report_dir: Allure results directory.
        """
        os.makedirs(report_dir, exist_ok=True)
        with open(os.path.join(report_dir, "executor.json"), "w") as f:
            json.dump({"name": executor, "type": "pytest", "buildOrder": 1,
                       "buildName": build_name}, f, indent=4)

        if not environment:
            return
        with open(os.path.join(report_dir, "environment.properties"), "w", encoding="utf-8") as f:
            for key, value in environment.items():
                key = key.strip().replace(" ", "_").replace("=", "-")
                value = " ".join(format_cell(value).split()).replace("=", ":")
                f.write(f"{key}={value}\n")

    @contextmanager
    def step_with_log(self, title: str):
        """Allure step that attaches whatever was logged inside the block."""
        logger_instance.drain(logger_instance.step_log_stream)

        with allure.step(title):
            try:
                yield
            finally:
                log_content = logger_instance.drain(logger_instance.step_log_stream)
                if log_content:
                    allure.attach(
                        log_content,
                        name=f"Log of step: {title}",
                        attachment_type=allure.attachment_type.TEXT,
                    )

    def attach_json(self, payload: Any, name: str) -> None:
        """Attach a report (trace, probe table, ...) with complex values as [re, im]."""
        self.logger.debug(f"Attaching JSON report '{name}'")
        allure.attach(
            json.dumps(to_jsonable(payload), indent=2, allow_nan=False),
            name=name,
            attachment_type=allure.attachment_type.JSON,
        )

    def attach_rows(self, header: Sequence[str], rows: Iterable[Sequence[Any]], name: str) -> None:
        """Attach rows as CSV with the %.17g float cells the CLI writes."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([format_cell(cell) for cell in row] for row in rows)
        self.logger.debug(f"Attaching CSV '{name}'")
        allure.attach(buffer.getvalue(), name=name, attachment_type=allure.attachment_type.CSV)
