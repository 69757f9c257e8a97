import logging
import shlex
import subprocess
import sys
from typing import List, Optional, Union


class CommandExecutionError(Exception):
    """Raised when a checked command exits with an unexpected status."""

    def __init__(self, command: List[str], returncode: int, stdout: str, stderr: str):
        self.command = command
        self.returncode = returncode
        self.stdout = stdout
        self.stderr = stderr
        message = (
            f"Command '{' '.join(command)}' failed with exit code {returncode}\n"
            f"stdout: {stdout.strip()[:2000]}\n"
            f"stderr: {stderr.strip()[-2000:]}"
        )
        super().__init__(message)


class Cli:
    """
    Runs the `continuation_framework` command-line entry point in a subprocess.

    Used by the test suites to check exit codes, stdout reports and byte-level
    determinism of emitted files.

    Example:
        cli.run_framework(["continue", "--germ", "sqrt_at_one", "--path", "arc:0,0:1:0:3.14"])
    """

    def __init__(
        self,
        logger: Optional[Union[logging.Logger, logging.LoggerAdapter]] = None,
    ) -> None:
        self.logger = logger or logging.getLogger(__name__)

    def run_command(
        self,
        command: Union[str, List[str]],
        timeout: Optional[int] = 300,
        check: bool = True,
        env: Optional[dict] = None,
    ) -> subprocess.CompletedProcess:
        """
        Runs a command with logging and timeout.

        Args:
            command: Command to run, as a string (split with shlex) or an argument list.
            timeout: Max time before killing the process.
            check: If True, raises CommandExecutionError on a non-zero exit code.
            env: Optional environment for the child process.

        Returns:
            CompletedProcess with stdout, stderr, returncode.

        Raises:
            CommandExecutionError: If command fails and check=True.
            RuntimeError: If the command times out.
        """
        if isinstance(command, str):
            command_to_execute = shlex.split(command)
        elif isinstance(command, list):
            command_to_execute = command
        else:
            raise TypeError("Command must be a string or a list of strings.")

        cmd_display = " ".join(command_to_execute)
        self.logger.info(f"Running command: {cmd_display}")

        try:
            result = subprocess.run(
                command_to_execute,
                capture_output=True,
                text=True,
                timeout=timeout,
                check=False,
                env=env,
            )
        except subprocess.TimeoutExpired as e:
            self.logger.error(f"Command timed out after {timeout}s: {cmd_display}")
            raise RuntimeError(f"Command timed out after {timeout}s: {cmd_display}") from e

        if result.returncode == 0:
            self.logger.info(f"Command succeeded: {cmd_display}")
        else:
            self.logger.info(f"Command finished with non-zero exit code: {result.returncode}")
        self.logger.debug(f"[STDOUT]: {result.stdout.strip()[:2000]}")
        self.logger.debug(f"[STDERR]: {result.stderr.strip()[-2000:]}")

        if check and result.returncode != 0:
            raise CommandExecutionError(
                command=command_to_execute,
                returncode=result.returncode,
                stdout=result.stdout,
                stderr=result.stderr,
            )
        return result

    def run_framework(self, arguments: List[str], **kwargs) -> subprocess.CompletedProcess:
        """Runs `python -m continuation_framework <arguments>` with the current interpreter."""
        return self.run_command([sys.executable, "-m", "continuation_framework", *arguments],
                                **kwargs)
