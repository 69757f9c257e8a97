"""
Command-line front door.

Every subcommand writes a JSON report (stdout unless --output) and, with --emit-csv,
a plot-ready CSV whose rows match the report's main array. Exit status is 0 on
success, 1 on invalid input and 2 on numerical failure; a stalled continuation is a
finding and exits 0.
"""
import argparse
import json
import math
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from continuation_framework.analysis import blaschke, continuation, lacunary, laplace_gamma, lewy
from continuation_framework.analysis.series_core import (
    NamedGerm,
    germ_from_json,
    germ_to_json,
    make_named_germ,
)
from continuation_framework.config.settings import (
    ContourSpec,
    QuadratureSpec,
    RunConfig,
    StepPolicy,
)
from continuation_framework.errors import (
    ConfigError,
    NumericalFailure,
    PathError,
    ValidationError,
)
from continuation_framework.reporting.report_writers import write_csv, write_json
from continuation_framework.utils.logger import logger_instance

logger = logger_instance.get_logger_adapter("cli")

Report = Tuple[Dict[str, Any], Sequence[str], List[list]]

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2

LAPLACE_RE = (0.0, 0.25, 0.5, 0.75, 1.0)
LAPLACE_IM = (-0.5, -0.25, 0.0, 0.25, 0.5)


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors surface as ConfigError (exit 1)."""

    def error(self, message: str) -> None:
        raise ConfigError("cli", message)


def parse_complex(text: str) -> complex:
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as e:
        raise ConfigError("cli", f"not a complex number: {text!r}") from e


def parse_override(text: str) -> Tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise ConfigError("cli", "tolerance override must be NAME=VALUE", {"value": text})
    try:
        return name.strip(), float(value)
    except ValueError as e:
        raise ConfigError("cli", "override value is not a number", {"value": text}) from e


def _load_json(path: str) -> Any:
    with open(path, encoding="utf-8") as f:
        try:
            return json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError("cli", f"{path} is not valid JSON: {e}") from e


def _step_policy(config: RunConfig) -> StepPolicy:
    return config.apply_overrides(StepPolicy.load_config())


def _quadrature(config: RunConfig) -> QuadratureSpec:
    return config.apply_overrides(QuadratureSpec.load_config())


def _contour(config: RunConfig) -> ContourSpec:
    return config.apply_overrides(ContourSpec.load_config())


def _start_germ(config: RunConfig, order: int):
    params = config.parameters
    if params.get("germ_file"):
        return germ_from_json(_load_json(params["germ_file"]))
    try:
        name = NamedGerm(params.get("germ") or NamedGerm.RECIP_TWO_MINUS_Z.value)
    except ValueError as e:
        raise ConfigError("cli", "unknown germ name", {"germ": params.get("germ")}) from e
    return make_named_germ(name, order, params.get("center"))


def _explicit_path(config: RunConfig) -> Optional[continuation.PathSpec]:
    params = config.parameters
    if params.get("path_file"):
        return continuation.path_from_json(_load_json(params["path_file"]))
    if params.get("path"):
        return continuation.PathSpec(tuple(continuation.parse_segment(s) for s in params["path"]))
    return None


def _trace_report(trace: continuation.ContinuationTrace) -> Tuple[Sequence[str], List[list]]:
    return ("index", "re", "im", "radius"), continuation.step_points_rows(trace)


def run_continue(config: RunConfig) -> Report:
    policy = _step_policy(config)
    germ = _start_germ(config, policy.order)
    path = _explicit_path(config)
    if path is None:
        raise PathError("continue", "a path is required (--path or --path-file)")
    trace = continuation.continue_along_path(germ, path, policy)
    payload = {"command": "continue", "path": continuation.path_to_json(path),
               **continuation.trace_to_json(trace)}
    return (payload, *_trace_report(trace))


def run_monodromy(config: RunConfig) -> Report:
    policy = _step_policy(config)
    germ = _start_germ(config, policy.order)
    loop = _explicit_path(config)
    if loop is None:
        if config.parameters.get("loop", "unit-circle") != "unit-circle":
            raise ConfigError("monodromy", "unknown loop", {"loop": config.parameters["loop"]})
        start_angle = math.atan2(germ.center.imag, germ.center.real)
        loop = continuation.circle_loop(0j, config.parameters.get("turns", 1.0),
                                        abs(germ.center), start_angle)
    report = continuation.monodromy_loop(germ, loop, policy)
    payload = {
        "command": "monodromy",
        "path": continuation.path_to_json(loop),
        "classification": report.classification.value,
        "distance_to_initial": report.distance_to_initial,
        "distance_to_negated_initial": report.distance_to_negated_initial,
        "initial_germ": germ_to_json(germ),
        **continuation.trace_to_json(report.trace),
    }
    return (payload, *_trace_report(report.trace))


def run_boundary_probe(config: RunConfig) -> Report:
    params = config.parameters
    reports = lacunary.boundary_scan(params.get("m", 3), params.get("m_max", 40))
    residuals = lacunary.functional_equation_residuals(params.get("samples", 200),
                                                       params.get("radius", 0.7), config.seed)
    payload = {
        "command": "boundary-probe",
        "probes": [
            {"k": r.k, "m": r.m, "direction": r.direction, "growth_slope": r.growth_slope,
             "blow_up_detected": r.blow_up_detected, "zero_free": r.zero_free,
             "exponents": list(r.exponents), "radii": list(r.radii),
             "abs_values": [abs(v) for v in r.values]}
            for r in reports
        ],
        "all_blow_up": all(r.blow_up_detected for r in reports),
        "functional_equation": {"count": int(residuals.size), "radius": params.get("radius", 0.7),
                                "seed": config.seed, "max_residual": float(residuals.max())},
    }
    return payload, ("k", "m", "j", "r", "abs_h", "slope", "blow_up"), lacunary.probe_rows(reports)


def run_lewy_verify(config: RunConfig) -> Report:
    steps = config.parameters.get("steps", 8)
    result = lewy.verify_loop_derivative(config.parameters.get("z", 1.0 + 0j), steps,
                                         _quadrature(config))
    payload = {"command": "lewy-verify", "z": result.z, "steps": steps,
               "loop_value": result.loop_value, "derivative_direct": result.derivative_direct,
               "rel_error": result.rel_error, "sectors": lewy.sector_steps_to_json(result.sectors)}
    rows = [[s.theta_from, s.theta_to, s.witness.real, s.witness.imag, s.mismatch]
            for s in result.sectors]
    return payload, ("theta_from", "theta_to", "witness_re", "witness_im", "mismatch"), rows


def run_laplace_verify(config: RunConfig) -> Report:
    c = _contour(config)
    grid = [complex(re, im) for re in config.parameters.get("re_values", LAPLACE_RE)
            for im in config.parameters.get("im_values", LAPLACE_IM)]
    reports = laplace_gamma.verify_functional_equation(grid, c)
    payload = {
        "command": "laplace-verify",
        "max_residual": max(r.rel_residual for r in reports),
        "grid": [{"z": r.z, "lhs": r.lhs, "rhs": r.rhs, "rel_residual": r.rel_residual}
                 for r in reports],
        "contour": {"base": complex(c.base), "direction": complex(c.direction),
                    "half_extent": c.half_extent, "nodes": c.nodes},
        "nontriviality": laplace_gamma.nontriviality_check(0j, 0.25 + 0j, c),
        "contour_translation": laplace_gamma.contour_translation_check(0.3 + 0.1j, c),
    }
    return (payload, ("re_z", "im_z", "rel_residual"),
            laplace_gamma.functional_equation_rows(reports))


def run_blaschke_demo(config: RunConfig) -> Report:
    params = config.parameters
    reports = blaschke.covering_failure_demo(params.get("pairs", 8), params.get("order", 48),
                                             params.get("angle_step", 0.3))
    payload = {
        "command": "blaschke-demo",
        "reports": [
            {"n": r.n, "a_n": r.a_n, "deriv_B": r.deriv_B, "deriv_f": r.deriv_f, "r_n": r.r_n,
             "bound_4_gap": r.bound_4_gap, "bound_shrink": r.bound_shrink,
             "passes_tri2": r.passes_tri2, "passes_quatre2": r.passes_quatre2}
            for r in reports
        ],
        "all_quatre2": all(r.passes_quatre2 for r in reports),
        "all_tri2": all(bool(r.passes_tri2) for r in reports),
    }
    return payload, blaschke.KOEBE_HEADER, blaschke.koebe_rows(reports)


HANDLERS: Dict[str, Callable[[RunConfig], Report]] = {
    "continue": run_continue,
    "monodromy": run_monodromy,
    "boundary-probe": run_boundary_probe,
    "lewy-verify": run_lewy_verify,
    "laplace-verify": run_laplace_verify,
    "blaschke-demo": run_blaschke_demo,
}


def run(config: RunConfig) -> int:
    """
    Dispatch one configured command and emit its reports.

    Returns:
        0 on success, 1 on a validation error, 2 on a numerical failure.
    """
    try:
        unknown = config.unknown_overrides(StepPolicy(), QuadratureSpec(), ContourSpec())
        if unknown:
            raise ConfigError("cli", "unknown tolerance override", {"names": unknown})
        payload, header, rows = HANDLERS[config.command](config)
        write_json(payload, config.output_path)
        if config.csv_path:
            write_csv(header, rows, config.csv_path)
    except ValidationError as e:
        logger.error(f"invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalFailure as e:
        logger.error(f"numerical failure: {e}")
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--output", help="JSON report path (default: stdout)")
    common.add_argument("--emit-csv", dest="emit_csv", help="also write a CSV table here")
    common.add_argument("--seed", type=int, default=42, help="seed for pseudo-random samples")
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                        help="override a policy/quadrature/contour field (repeatable)")
    common.add_argument("--germ-file", dest="germ_file", help="start germ as JSON")
    common.add_argument("--path-file", dest="path_file", help="path as JSON")

    parser = _Parser(prog="continuation_framework",
                     description="Numerical analytic continuation experiments")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    germ_names = [g.value for g in NamedGerm]
    for name in ("continue", "monodromy"):
        sub = commands.add_parser(name, parents=[common])
        sub.add_argument("--germ", choices=germ_names)
        sub.add_argument("--center", type=parse_complex, help="expansion point of the named germ")
        sub.add_argument("--path", action="append", default=[],
                         help="segment line:x0,y0:x1,y1 or arc:cx,cy:r:a0:a1 (repeatable)")
    monodromy = commands.choices["monodromy"]
    monodromy.add_argument("--loop", default="unit-circle", choices=["unit-circle"])
    monodromy.add_argument("--turns", type=float, default=1.0)

    probe = commands.add_parser("boundary-probe", parents=[common])
    probe.add_argument("--m", type=int, default=3)
    probe.add_argument("--m-max", dest="m_max", type=int, default=40)
    probe.add_argument("--samples", type=int, default=200)
    probe.add_argument("--radius", type=float, default=0.7)

    lewy_verify = commands.add_parser("lewy-verify", parents=[common])
    lewy_verify.add_argument("--z", type=parse_complex, default=1.0 + 0j)
    lewy_verify.add_argument("--steps", type=int, default=8)

    laplace = commands.add_parser("laplace-verify", parents=[common])
    laplace.add_argument("--re", dest="re_values", type=float, nargs="+", default=list(LAPLACE_RE))
    laplace.add_argument("--im", dest="im_values", type=float, nargs="+", default=list(LAPLACE_IM))

    demo = commands.add_parser("blaschke-demo", parents=[common])
    demo.add_argument("--pairs", type=int, default=8)
    demo.add_argument("--angle-step", dest="angle_step", type=float, default=0.3)
    demo.add_argument("--order", type=int, default=48)
    return parser


_COMMON_KEYS = ("command", "output", "emit_csv", "seed", "tol")


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    arguments = vars(build_parser().parse_args(argv))
    inputs = [p for p in (arguments.get("germ_file"), arguments.get("path_file")) if p]
    return RunConfig(
        command=arguments["command"],
        input_paths=inputs,
        output_path=arguments["output"],
        csv_path=arguments["emit_csv"],
        tolerance_overrides=dict(parse_override(t) for t in arguments["tol"]),
        seed=arguments["seed"],
        parameters={k: v for k, v in arguments.items() if k not in _COMMON_KEYS},
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        config = config_from_args(argv)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    logger.info(f"running {config.command} (seed {config.seed})")
    return run(config)
