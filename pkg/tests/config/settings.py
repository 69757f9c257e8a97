import os
from dataclasses import dataclass


@dataclass(frozen=True)
class MetaConfig:
    """
    Immutable metadata for the test run, shown in the Allure executor panel.
    """

    test_executor: str
    build_name: str

    @classmethod
    def load_config(cls) -> "MetaConfig":
        """
        Load test metadata from the environment.

        Returns:
            MetaConfig: Executor name and build label.
        """
        test_executor = os.getenv("TEST_EXECUTOR", "Local Run")
        build_name = os.getenv("TEST_BUILD_NAME", "")
        return cls(test_executor, build_name)


# global singleton
META_CONFIG = MetaConfig.load_config()
