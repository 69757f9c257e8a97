import logging
import os
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, List, Optional

from continuation_framework.errors import ConfigError


def _env_float(name: str, default: float) -> float:
    return float(os.getenv(name, repr(default)))


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, str(default)))


@dataclass(frozen=True)
class LogConfig:
    """
    Immutable logging parameters shared by every module.

    An empty `log_dir` disables the file handler.
    """

    level: int = logging.INFO
    log_dir: str = "logs"

    @classmethod
    def load_config(cls) -> "LogConfig":
        level_name = os.getenv("CONTINUATION_LOG_LEVEL", "INFO").upper()
        level = logging.getLevelName(level_name)
        if not isinstance(level, int):
            raise ConfigError("LogConfig", "unknown log level", {"level": level_name})
        return cls(level=level, log_dir=os.getenv("CONTINUATION_LOG_DIR", "logs"))


@dataclass(frozen=True)
class StepPolicy:
    """
    Stepping rules for continuation along a path.

    Attributes:
        step_fraction: Fraction of the estimated radius covered by one recenter step.
        min_step: Admissible steps below this length stall the continuation.
        order: Truncation order of every germ produced along the path.
        overlap_tol: Agreement tolerance for germs on overlapping disks.
        max_steps: Hard cap on recenter steps per trace.
        arc_increment: Largest angular increment (radians) used to sample arcs.
    """

    step_fraction: float = 0.4
    min_step: float = 1e-6
    order: int = 64
    overlap_tol: float = 1e-8
    max_steps: int = 20000
    arc_increment: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 < self.step_fraction < 1.0:
            raise ConfigError("StepPolicy", "step_fraction must lie in (0, 1)",
                              {"step_fraction": self.step_fraction})
        if not self.min_step > 0.0:
            raise ConfigError("StepPolicy", "min_step must be positive",
                              {"min_step": self.min_step})
        if self.order < 8:
            raise ConfigError("StepPolicy", "order must be at least 8", {"order": self.order})
        if not self.overlap_tol > 0.0:
            raise ConfigError("StepPolicy", "overlap_tol must be positive",
                              {"overlap_tol": self.overlap_tol})
        if self.max_steps < 1 or not 0.0 < self.arc_increment <= 0.5:
            raise ConfigError("StepPolicy", "max_steps or arc_increment out of range",
                              {"max_steps": self.max_steps, "arc_increment": self.arc_increment})

    @property
    def radius_floor(self) -> float:
        """Smallest radius whose next germ still has representable coefficients."""
        return 1e-300 ** (1.0 / (self.order + 1)) / (1.0 - self.step_fraction)

    @classmethod
    def load_config(cls) -> "StepPolicy":
        return cls(
            step_fraction=_env_float("CONTINUATION_STEP_FRACTION", 0.4),
            min_step=_env_float("CONTINUATION_MIN_STEP", 1e-6),
            order=_env_int("CONTINUATION_ORDER", 64),
            overlap_tol=_env_float("CONTINUATION_OVERLAP_TOL", 1e-8),
        )


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Trapezoid discretization of the log-substituted Lewy integrals over s in [s_min, s_max].
    """

    s_min: float = -40.0
    s_max: float = 12.0
    nodes: int = 4096
    refine_tol: float = 1e-10
    max_doublings: int = 6

    def __post_init__(self) -> None:
        if not self.s_min < self.s_max:
            raise ConfigError("QuadratureSpec", "s_min must be below s_max",
                              {"s_min": self.s_min, "s_max": self.s_max})
        if self.nodes < 64:
            raise ConfigError("QuadratureSpec", "at least 64 nodes required", {"nodes": self.nodes})
        if not self.refine_tol > 0.0 or self.max_doublings < 0:
            raise ConfigError("QuadratureSpec", "invalid refinement policy",
                              {"refine_tol": self.refine_tol, "max_doublings": self.max_doublings})

    @classmethod
    def load_config(cls) -> "QuadratureSpec":
        return cls(
            s_min=_env_float("LEWY_S_MIN", -40.0),
            s_max=_env_float("LEWY_S_MAX", 12.0),
            nodes=_env_int("LEWY_NODES", 4096),
            refine_tol=_env_float("LEWY_REFINE_TOL", 1e-10),
            max_doublings=_env_int("LEWY_MAX_DOUBLINGS", 6),
        )


@dataclass(frozen=True)
class ContourSpec:
    """
    The integration line u = base + direction * t, t in [-half_extent, half_extent].

    `direction` is unit-normalized internally; `speed` restores its modulus so that
    the parametrization (and its Jacobian) is exactly base + direction * t.
    """

    base: complex = 1.0 + 0.0j
    direction: complex = 1.0 + 1.0j
    half_extent: float = 6.0
    nodes: int = 2049
    refine_tol: float = 1e-10
    max_doublings: int = 4

    def __post_init__(self) -> None:
        if self.direction == 0:
            raise ConfigError("ContourSpec", "direction must be nonzero")
        if self.nodes < 129 or self.nodes % 2 == 0:
            raise ConfigError("ContourSpec", "nodes must be odd and at least 129",
                              {"nodes": self.nodes})
        if self.half_extent < 0.0:
            raise ConfigError("ContourSpec", "half_extent must be nonnegative",
                              {"half_extent": self.half_extent})

    @property
    def unit_direction(self) -> complex:
        return complex(self.direction) / abs(self.direction)

    @property
    def speed(self) -> float:
        return abs(self.direction)

    def translated(self, shift: complex) -> "ContourSpec":
        return replace(self, base=complex(self.base) + shift)

    @classmethod
    def load_config(cls) -> "ContourSpec":
        return cls(
            half_extent=_env_float("LAPLACE_HALF_EXTENT", 6.0),
            nodes=_env_int("LAPLACE_NODES", 2049),
            refine_tol=_env_float("LAPLACE_REFINE_TOL", 1e-10),
        )


COMMANDS = ("continue", "monodromy", "boundary-probe", "lewy-verify", "laplace-verify",
            "blaschke-demo")


@dataclass(frozen=True)
class RunConfig:
    """
    One CLI invocation: which command, where inputs and outputs live, tolerance overrides
    and the subcommand parameters.
    """

    command: str
    input_paths: List[str] = field(default_factory=list)
    output_path: Optional[str] = None
    csv_path: Optional[str] = None
    tolerance_overrides: Dict[str, float] = field(default_factory=dict)
    seed: int = 42
    parameters: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError("RunConfig", "unrecognized command", {"command": self.command})
        for path in self.input_paths:
            if not os.path.isfile(path):
                raise ConfigError("RunConfig", "input path is not readable", {"path": path})

    def apply_overrides(self, block):
        """
        Return `block` with every override whose name matches one of its fields.

        Args:
            block: A frozen config dataclass instance (StepPolicy, QuadratureSpec, ContourSpec).

        Returns:
            The same type with matching fields replaced.
        """
        names = {f.name for f in fields(block)}
        changes = {}
        for key, value in self.tolerance_overrides.items():
            if key in names:
                current = getattr(block, key)
                changes[key] = type(current)(value) if isinstance(current, int) else value
        return replace(block, **changes) if changes else block

    def unknown_overrides(self, *blocks) -> List[str]:
        known = set()
        for block in blocks:
            known.update(f.name for f in fields(block))
        return sorted(key for key in self.tolerance_overrides if key not in known)


LOG_CONFIG = LogConfig.load_config()

DEFAULT_STEP_POLICY = StepPolicy()
DEFAULT_QUADRATURE = QuadratureSpec()
DEFAULT_CONTOUR = ContourSpec()
