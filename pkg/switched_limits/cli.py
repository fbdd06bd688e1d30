"""
Command line entry point ``switched-limits``.

Commands::

    switched-limits analyze SYSTEM            stability certificates (JSON, or text with --format text)
    switched-limits simulate SYSTEM SIGNAL --x0 1,1,1
                                              trajectory CSV, summary on stderr
    switched-limits estimate-su SYSTEM SIGNAL estimate of S_u (JSON)
    switched-limits check-signal SIGNAL [--system SYSTEM]
                                              signal classification (JSON)
    switched-limits report SYSTEM SIGNAL      analyze and estimate-su combined

Every command accepts ``--tol-rank``, ``--tol-conv``, ``--horizon``, ``--seed``, ``--out`` and
``--log-level``. With ``--out`` the result is written atomically to that path, otherwise to stdout.

Exit codes: 0 success; 1 malformed input (the message names the offending field) or dimension mismatch;
2 the matrices share no common Lyapunov function, or a linear algebra routine failed on them; 3 the S_u estimate did not converge.
"""
import argparse
import io
import logging
import sys
from dataclasses import replace
from typing import List, Optional, TextIO

import numpy as np

from switched_limits.config import RunConfig
from switched_limits.criteria import build_report
from switched_limits.exceptions import (
    BaseError,
    InvalidArgumentError,
    LyapunovConditionError,
)
from switched_limits.schemas import load_run_config, load_signal_file, load_system_file
from switched_limits.signals import SwitchingSignal, classify
from switched_limits.simulator import estimate_su, record_flow
from switched_limits.systems import SwitchedSystem, check_common_lyapunov, normalize_system
from switched_limits.writers import dumps, write_atomic, write_trajectory_csv

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_HYPOTHESES = 2
EXIT_NOT_CONVERGED = 3

#: horizon of check-signal on signals that never end, when --horizon is absent
DEFAULT_CLASSIFY_HORIZON = 100.0


def _emit(text: str, config: RunConfig, stdout: TextIO) -> None:
    if config.out:
        write_atomic(config.out, text)
    else:
        stdout.write(text)


def _normalized(system: SwitchedSystem, config: RunConfig) -> SwitchedSystem:
    verdict = check_common_lyapunov(system, config.tolerances)
    if not verdict.passed:
        raise LyapunovConditionError(verdict.index, verdict.max_eigenvalue)
    return normalize_system(system, config.tolerances)


def _load_signal(path: str, system: SwitchedSystem, config: RunConfig, horizon: float) -> SwitchingSignal:
    signal = load_signal_file(path, p=system.size, seed=config.seed)
    signal.check_alphabet(system.size, min(horizon, signal.end))
    return signal


def parse_vector(text: str) -> np.ndarray:
    try:
        values = [float(item) for item in text.split(",")]
    except ValueError:
        raise InvalidArgumentError(f"x0 must be comma-separated reals, got {text!r}.")
    vector = np.array(values)
    if not np.all(np.isfinite(vector)):
        raise InvalidArgumentError("x0 must be finite.")
    return vector


def cmd_analyze(system_path: str, config: RunConfig, text: bool = False, stdout: TextIO = sys.stdout) -> int:
    system = load_system_file(system_path)
    report = build_report(system, config.tolerances)
    _emit(report.to_text() + "\n" if text else dumps(report), config, stdout)
    return EXIT_OK if report.lyapunov_ok else EXIT_HYPOTHESES


def cmd_simulate(system_path: str, signal_path: str, x0: str, config: RunConfig,
                 stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    system = load_system_file(system_path)
    state = parse_vector(x0)
    if state.shape[0] != system.dim:
        raise InvalidArgumentError(f"x0 has dimension {state.shape[0]}, the system has dimension {system.dim}.")
    normalized = _normalized(system, config)
    if normalized.transform is not None:
        state = normalized.transform @ state
    horizon = config.horizon
    signal = _load_signal(signal_path, system, config, horizon)
    steps = int(round(horizon * config.grid_density))
    times = np.linspace(0.0, horizon, steps + 1)
    record = record_flow(normalized, signal, times, state[None, :], config.tolerances)

    buffer = io.StringIO()
    write_trajectory_csv(buffer, record)
    _emit(buffer.getvalue(), config, stdout)

    eigenvalues = ", ".join(f"{value:.6g}" for value in record.gram_eigenvalues()[-1])
    stderr.write(f"final norm: {record.norms[0, -1]:.17g}\n")
    stderr.write(f"final Gram eigenvalues: {eigenvalues}\n")
    increase = record.norm_increase()
    monotone = increase <= 1e-10 and record.loewner_violation() <= config.tolerances.spectral_margin
    stderr.write(f"monotone: {'yes' if monotone else 'NO'} (largest norm increase {increase:.3g})\n")
    return EXIT_OK


def cmd_estimate_su(system_path: str, signal_path: str, config: RunConfig, stdout: TextIO = sys.stdout) -> int:
    system = load_system_file(system_path)
    normalized = _normalized(system, config)
    horizon = min(config.horizon, config.tolerances.horizon_cap)
    signal = _load_signal(signal_path, system, config, horizon)
    estimate = estimate_su(normalized, signal, horizon=horizon, tolerances=config.tolerances)
    _emit(dumps(estimate), config, stdout)
    return EXIT_OK if estimate.converged else EXIT_NOT_CONVERGED


def cmd_check_signal(signal_path: str, config: RunConfig, system_path: Optional[str] = None,
                     horizon: Optional[float] = None, stdout: TextIO = sys.stdout) -> int:
    p = load_system_file(system_path).size if system_path else None
    signal = load_signal_file(signal_path, p=p, seed=config.seed)
    if horizon is None:
        horizon = DEFAULT_CLASSIFY_HORIZON if signal.is_infinite else signal.end
    classification = classify(signal, horizon, p, config.tolerances)
    _emit(dumps(classification), config, stdout)
    return EXIT_OK


def cmd_report(system_path: str, signal_path: str, config: RunConfig, stdout: TextIO = sys.stdout) -> int:
    system = load_system_file(system_path)
    report = build_report(system, config.tolerances)
    if not report.lyapunov_ok:
        _emit(dumps({"analysis": report, "su_estimate": None}), config, stdout)
        return EXIT_HYPOTHESES
    normalized = normalize_system(system, config.tolerances)
    horizon = min(config.horizon, config.tolerances.horizon_cap)
    signal = _load_signal(signal_path, system, config, horizon)
    estimate = estimate_su(normalized, signal, horizon=horizon, tolerances=config.tolerances)
    _emit(dumps({"analysis": report, "su_estimate": estimate}), config, stdout)
    return EXIT_OK if estimate.converged else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rank", type=float, default=None, help="relative singular-value threshold")
    common.add_argument("--tol-conv", type=float, default=None, help="Gram convergence tolerance")
    common.add_argument("--horizon", type=float, default=None, help="simulation / classification horizon")
    common.add_argument("--seed", type=int, default=None, help="overrides the seed of generated signals")
    common.add_argument("--out", default=None, help="write the result to this path instead of stdout")
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(
        prog="switched-limits",
        description="Limit sets and stability certificates of switched linear systems.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", parents=[common], help="stability certificates of a system")
    analyze.add_argument("system")
    analyze.add_argument("--format", choices=["json", "text"], default="json")

    simulate = commands.add_parser("simulate", parents=[common], help="trajectory CSV of one initial condition")
    simulate.add_argument("system")
    simulate.add_argument("signal")
    simulate.add_argument("--x0", required=True, help="comma-separated initial condition")
    simulate.add_argument("--grid-density", type=float, default=None, help="samples per unit time")

    estimate = commands.add_parser("estimate-su", parents=[common], help="estimate the limit S_u")
    estimate.add_argument("system")
    estimate.add_argument("signal")

    check = commands.add_parser("check-signal", parents=[common], help="classify a switching signal")
    check.add_argument("signal")
    check.add_argument("--system", default=None, help="system file fixing the number of indices")

    report = commands.add_parser("report", parents=[common], help="analyze and estimate-su combined")
    report.add_argument("system")
    report.add_argument("signal")
    return parser


def main(argv: Optional[List[str]] = None, stdout: TextIO = sys.stdout, stderr: TextIO = sys.stderr) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_run_config(
            {
                "tol_rank": args.tol_rank,
                "tol_conv": args.tol_conv,
                "horizon": args.horizon,
                "grid_density": getattr(args, "grid_density", None),
                "seed": args.seed,
                "out": args.out,
            }
        )
        if args.command == "analyze":
            return cmd_analyze(args.system, config, text=args.format == "text", stdout=stdout)
        if args.command == "simulate":
            return cmd_simulate(args.system, args.signal, args.x0, config, stdout=stdout, stderr=stderr)
        if args.command == "estimate-su":
            if args.horizon is None:
                config = replace(config, horizon=config.tolerances.horizon_cap)
            return cmd_estimate_su(args.system, args.signal, config, stdout=stdout)
        if args.command == "check-signal":
            return cmd_check_signal(args.signal, config, args.system, args.horizon, stdout=stdout)
        if args.command == "report":
            if args.horizon is None:
                config = replace(config, horizon=config.tolerances.horizon_cap)
            return cmd_report(args.system, args.signal, config, stdout=stdout)
    except LyapunovConditionError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_HYPOTHESES
    except np.linalg.LinAlgError as exc:
        logger.error("Linear algebra routine failed: %s", exc)
        stderr.write(f"error: linear algebra routine failed: {exc}\n")
        return EXIT_HYPOTHESES
    except BaseError as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
