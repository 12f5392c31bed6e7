"""
Command-line entry point for the spin-direction toolkit.

Usage:
    python cli.py table --n 2..7 --format csv
    python cli.py maf --n 4 --encoding optimal
    python cli.py infogain --n 2..5 --encoding antiparallel
    python cli.py asymptotics --n 100 --order next
    python cli.py povm construct --j 3/2 -o set.csv
    python cli.py povm verify --j 3/2 set.csv
    python cli.py simulate --n 2 --encoding antiparallel --set tetrahedron --trials 100000 --seed 7

Exit codes: 0 success, 1 failed verification or numerical failure, 2 usage error.
"""

import argparse
import io
import json
import logging
import sys
from typing import List, Optional

import pandas as pd

from config import Config
from constants import (
    ASYMPTOTIC_ORDERS,
    ENCODING_KINDS,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    FLOAT_FORMAT,
    OUTPUT_FORMATS,
)
from exceptions import SpinToolkitError
from models import RunConfig
from services.encoding_service import EncodingService
from services.fidelity_service import FidelityService
from services.povm_service import PovmService
from services.simulation_service import SimulationService, fresh_seed
from utils.validation import parse_half_int, parse_spin_range, validate_run_config

logger = logging.getLogger("cli")


class UsageError(Exception):
    """Request rejected before dispatch"""


def setup_logging():
    """Root logger on stderr, plus LOG_FILE when configured"""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if Config.LOG_FILE:
        handlers.append(logging.FileHandler(Config.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, Config.LOG_LEVEL.upper()),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spin-directions",
        description="Encode a direction in N spins and decode it with a finite measurement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p: argparse.ArgumentParser):
        p.add_argument("--format", dest="output_format", choices=OUTPUT_FORMATS, default="text")
        p.add_argument("-o", "--output", help="Write the report to this file instead of stdout")

    def add_encoding(p: argparse.ArgumentParser):
        p.add_argument("--encoding", choices=ENCODING_KINDS, default="antiparallel")
        p.add_argument("--twice-m", dest="twice_m", type=int, help="2m for the product encoding")

    p = sub.add_parser("table", help="Fidelity and information-gain table")
    p.add_argument("--n", dest="n_values", type=parse_spin_range, default=parse_spin_range("2..7"))
    add_output(p)

    p = sub.add_parser("maf", help="Maximal average fidelity of an encoding")
    p.add_argument("--n", dest="n_values", type=parse_spin_range, required=True)
    p.add_argument("--nodes", type=int, help="Also integrate the fidelity with this many nodes")
    add_encoding(p)
    add_output(p)

    p = sub.add_parser("infogain", help="Average information gain of an encoding (bits)")
    p.add_argument("--n", dest="n_values", type=parse_spin_range, required=True)
    p.add_argument("--nodes", type=int, help="Initial Gauss-Legendre node count")
    add_encoding(p)
    add_output(p)

    p = sub.add_parser("asymptotics", help="Large-N fidelity laws for even N")
    p.add_argument("--n", dest="n_values", type=parse_spin_range, required=True)
    p.add_argument("--order", choices=ASYMPTOTIC_ORDERS, default="next")
    add_output(p)

    povm = sub.add_parser("povm", help="Finite isotropic direction sets")
    povm_sub = povm.add_subparsers(dest="action", required=True)

    p = povm_sub.add_parser("construct", help="Build an isotropic set up to spin J")
    p.add_argument("--j", type=parse_half_int, required=True)
    p.add_argument("-o", "--output", help="CSV file for the set (stdout when omitted)")

    p = povm_sub.add_parser("verify", help="Check isotropy and Wigner-D orthogonality")
    p.add_argument("--j", type=parse_half_int, required=True)
    p.add_argument("set_source", help="tetrahedron, octahedron, construct:<J> or a CSV path")
    p.add_argument("--tol", dest="tolerance", type=float)
    add_output(p)

    p = sub.add_parser("simulate", help="Monte-Carlo play of the protocol")
    p.add_argument("--n", dest="n_values", type=parse_spin_range, required=True)
    add_encoding(p)
    p.add_argument("--set", dest="set_source", required=True)
    p.add_argument("--trials", type=int, default=Config.SIM_DEFAULT_TRIALS)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=Config.SIM_WORKERS)
    add_output(p)

    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    data = {
        "command": args.command,
        "action": getattr(args, "action", None),
        "n_values": tuple(getattr(args, "n_values", ()) or ()),
        "encoding": getattr(args, "encoding", None),
        "twice_m": getattr(args, "twice_m", None),
        "set_source": getattr(args, "set_source", None),
        "j": getattr(args, "j", None),
        "tolerance": getattr(args, "tolerance", None),
        "nodes": getattr(args, "nodes", None),
        "trials": getattr(args, "trials", None),
        "seed": getattr(args, "seed", None),
        "order": getattr(args, "order", None),
        "output_format": getattr(args, "output_format", None),
        "output": getattr(args, "output", None),
        "workers": getattr(args, "workers", 1),
    }
    is_valid, message = validate_run_config(data)
    if not is_valid:
        raise UsageError(message)
    if data["j"] is not None and data["j"].twice_value < 1:
        raise UsageError(f"J must be at least 1/2, got {data['j']}")
    if args.command == "simulate" and len(data["n_values"]) != 1:
        raise UsageError("simulate takes a single spin count")
    data["encoding"] = data["encoding"] or "antiparallel"
    data["order"] = data["order"] or "next"
    data["output_format"] = data["output_format"] or "text"
    return RunConfig(**data)


def render(rows: List[dict], output_format: str, text: Optional[str] = None) -> str:
    if output_format == "json":
        payload = rows[0] if len(rows) == 1 else rows
        return json.dumps(payload, indent=2)
    if output_format == "csv":
        buffer = io.StringIO()
        pd.json_normalize(rows).to_csv(buffer, index=False, float_format=FLOAT_FORMAT)
        return buffer.getvalue().rstrip("\n")
    if text is not None:
        return text
    return "\n".join(" ".join(f"{k}={v}" for k, v in row.items()) for row in rows)


def emit(content: str, output: Optional[str]):
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(content + "\n")
        logger.info(f"Wrote {output}")
    else:
        print(content)


def cmd_table(run: RunConfig) -> int:
    fidelity = FidelityService()
    frame = fidelity.table(run.n_values)
    if run.output_format == "text":
        content = frame.to_string(index=False, float_format=lambda v: f"{v:.4f}")
    else:
        content = render(frame.to_dict(orient="records"), run.output_format)
    emit(content, run.output)
    return EXIT_OK


def cmd_maf(run: RunConfig) -> int:
    encoding = EncodingService()
    fidelity = FidelityService(encoding)
    rows = []
    for N in run.n_values:
        state = encoding.state_for(run.encoding, N, run.twice_m)
        row = {"N": N, "encoding": run.encoding, "maf": fidelity.maf_closed_form(state)}
        if run.nodes is not None:
            row["maf_quadrature"] = fidelity.maf_quadrature(state, run.nodes)
        row["state"] = state.to_dict()
        rows.append(row)
    text = "\n".join(f"N={row['N']} {run.encoding}: F = {row['maf']:.10f}" for row in rows)
    emit(render(rows, run.output_format, text), run.output)
    return EXIT_OK


def cmd_infogain(run: RunConfig) -> int:
    encoding = EncodingService()
    fidelity = FidelityService(encoding)
    rows = []
    for N in run.n_values:
        state = encoding.state_for(run.encoding, N, run.twice_m)
        rows.append({"N": N, "encoding": run.encoding, "info_gain": fidelity.info_gain(state, run.nodes)})
    text = "\n".join(f"N={row['N']} {run.encoding}: I = {row['info_gain']:.8f} bits" for row in rows)
    emit(render(rows, run.output_format, text), run.output)
    return EXIT_OK


def cmd_asymptotics(run: RunConfig) -> int:
    fidelity = FidelityService()
    rows = []
    for N in run.n_values:
        approx = fidelity.asymptotic_maf(N, run.order)
        exact = fidelity.antiparallel_even_maf(N // 2)
        rows.append(
            {
                "N": N,
                "order": run.order,
                "approx": approx,
                "exact": exact,
                "scaled_residual": abs(exact - approx) * float(N) ** 3,
            }
        )
    text = "\n".join(
        f"N={row['N']}: approx {row['approx']:.10f}, exact {row['exact']:.10f}" for row in rows
    )
    emit(render(rows, run.output_format, text), run.output)
    return EXIT_OK


def cmd_povm(run: RunConfig) -> int:
    povm = PovmService()
    if run.action == "construct":
        direction_set = povm.construct_isotropic_set(run.j)
        if run.output:
            povm.save_direction_set(direction_set, run.output)
        else:
            print(direction_set.to_frame().to_csv(index=False, float_format=FLOAT_FORMAT).rstrip("\n"))
        return EXIT_OK

    direction_set = povm.resolve_direction_set(run.set_source)
    isotropy = povm.verify_isotropy(direction_set, run.j, run.tolerance)
    orthogonality = povm.verify_wigner_orthogonality(direction_set, run.j, run.tolerance)
    passed = isotropy.passed and orthogonality.passed
    row = {
        "set": direction_set.name,
        "size": direction_set.size,
        **isotropy.to_dict(),
        "pass": passed,
        "orthogonality": orthogonality.to_dict(),
    }
    verdict = "pass" if passed else "fail"
    text = (
        f"{direction_set.name} ({direction_set.size} directions) at J={run.j}: {verdict}; "
        f"max |z| = {isotropy.max_abs:.3e} at (L, M) = {isotropy.worst}, "
        f"orthogonality deviation {orthogonality.max_deviation:.3e}"
    )
    emit(render([row], run.output_format, text), run.output)
    if not passed:
        logger.warning(f"Verification failed for {direction_set.name} at J={run.j}")
    return EXIT_OK if passed else EXIT_FAILURE


def cmd_simulate(run: RunConfig) -> int:
    encoding = EncodingService()
    povm = PovmService()
    simulation = SimulationService(povm, run.workers)

    seed = run.seed
    if seed is None:
        seed = fresh_seed()
        print(f"seed: {seed}", file=sys.stderr)

    state = encoding.state_for(run.encoding, run.n_values[0], run.twice_m)
    direction_set = povm.resolve_direction_set(run.set_source)
    report = simulation.run_protocol(state, direction_set, run.trials, seed, run.workers)
    emit(render([report.to_dict()], run.output_format, report.summary()), run.output)
    return EXIT_OK


COMMANDS = {
    "table": cmd_table,
    "maf": cmd_maf,
    "infogain": cmd_infogain,
    "asymptotics": cmd_asymptotics,
    "povm": cmd_povm,
    "simulate": cmd_simulate,
}


def main(argv: Optional[List[str]] = None) -> int:
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        run = to_run_config(args)
        return COMMANDS[run.command](run)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SpinToolkitError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
