"""
Command line entry point.

Exit codes: 0 success, 1 verification mismatch, 2 parse or usage error,
3 eps underflow.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from gcweyl import __version__, logger
from gcweyl.algebra.errors import (
    ChartMismatch,
    DomainError,
    DomainViolation,
    EpsUnderflow,
    GCWeylError,
    ParseError,
)
from gcweyl.algebra.series import Chart, Truncation
from gcweyl.cli.verify import run_appendix
from gcweyl.guiding_center.hamiltonian import (
    classical_hamiltonian,
    derive_hamiltonian,
    level_coefficients,
    quantized_levels,
)
from gcweyl.io.text import parse, render, to_structured
from gcweyl.oracle.evaluate import ORACLE_TRUNCATION, compare_symbolic_numeric, monomial_pairs
from gcweyl.oracle.models import load_model
from gcweyl.star.product import moyal_bracket, poisson_bracket, star
from gcweyl.utils.constants import (
    DEFAULT_POINTS,
    DEFAULT_SEED,
    ORACLE_MAX_DEGREE,
    ORACLE_TOLERANCE,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_UNDERFLOW = 3

# ParseError covers ChartMixing and NegativePowerError; any other gcweyl error
# raised by a well-formed command is a derivation fault
USAGE_ERRORS = (
    ParseError,
    ChartMismatch,
    DomainError,
    DomainViolation,
    argparse.ArgumentError,
    json.JSONDecodeError,
    OSError,
)


# -----------------------------------------------------------------------------
# Parser
# -----------------------------------------------------------------------------


def _output_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--format", choices=("text", "json"), default="text", help="Output format")
    parent.add_argument(
        "--style",
        choices=("canonical", "efield"),
        default="canonical",
        help="Text style; efield writes -d[x]phi as E_x",
    )
    return parent


def _truncation_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--max-hbar", type=int, help="Highest power of hbar kept (default 2)")
    parent.add_argument("--min-eps", type=int, help="Lowest power of eps allowed (default -2)")
    parent.add_argument("--max-eps", type=int, help="Highest power of eps kept (default 3)")
    parent.add_argument("--max-total", type=int, help="Optional bound on hbar + eps powers")
    parent.add_argument(
        "--config",
        help="JSON file with a truncation window; explicit flags override its values",
    )
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gcweyl",
        description="Gauge-invariant star products and the guiding-center Hamiltonian",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", action="store_true", help="Log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)
    output, window = _output_flags(), _truncation_flags()

    cmd = commands.add_parser("star", parents=[output, window], help="Star product of two symbols")
    cmd.add_argument("a", help="Left factor, particle chart")
    cmd.add_argument("b", help="Right factor, particle chart")

    cmd = commands.add_parser("bracket", parents=[output, window], help="Moyal or Poisson bracket")
    cmd.add_argument("--type", choices=("moyal", "poisson"), default="moyal", dest="kind")
    cmd.add_argument("a")
    cmd.add_argument("b")

    cmd = commands.add_parser("derive", parents=[output], help="Guiding-center derivations")
    cmd.add_argument("target", choices=("hamiltonian", "classical", "levels"))
    cmd.add_argument("--spin", action="store_true", help="Replace phi by -mu_z*B")
    cmd.add_argument("--n", type=int, help="Level index for 'derive levels'")
    cmd.add_argument(
        "--symbolic",
        action="store_true",
        help="Print the levels as a polynomial in nu = n + 1/2",
    )

    cmd = commands.add_parser("verify", help="Run a verification suite")
    cmd.add_argument("suite", choices=("appendix",))

    cmd = commands.add_parser("oracle", parents=[window], help="Compare symbolic and numeric star products")
    cmd.add_argument("--model", required=True, help="Field model file (key = value lines)")
    cmd.add_argument("--points", type=int, default=DEFAULT_POINTS)
    cmd.add_argument("--seed", type=int, default=DEFAULT_SEED)
    cmd.add_argument("--tol", type=float, default=ORACLE_TOLERANCE)
    cmd.add_argument("--max-degree", type=int, default=ORACLE_MAX_DEGREE, help="Largest monomial degree")
    cmd.add_argument("--format", choices=("text", "json"), default="text")
    return parser


def resolve_truncation(args, default: Optional[Truncation] = None) -> Truncation:
    values = (default or Truncation()).to_dict()
    if getattr(args, "config", None):
        values.update(json.loads(Path(args.config).read_text()))
    for name in ("max_hbar", "min_eps", "max_eps", "max_total"):
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return Truncation.from_dict(values)


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------


def _emit_series(series, args, trunc: Optional[Truncation] = None):
    if args.format == "json":
        document = {"terms": to_structured(series)}
        if trunc is not None:
            document["truncation"] = trunc.to_dict()
        print(json.dumps(document, indent=2))
    else:
        print(render(series, args.style))


def cmd_star(args) -> int:
    trunc = resolve_truncation(args)
    a, b = parse(args.a, Chart.PARTICLE, trunc), parse(args.b, Chart.PARTICLE, trunc)
    _emit_series(star(a, b, trunc), args, trunc)
    return EXIT_OK


def cmd_bracket(args) -> int:
    trunc = resolve_truncation(args)
    a, b = parse(args.a, Chart.PARTICLE, trunc), parse(args.b, Chart.PARTICLE, trunc)
    bracket = moyal_bracket if args.kind == "moyal" else poisson_bracket
    _emit_series(bracket(a, b, trunc), args, trunc)
    return EXIT_OK


def _emit_levels(args) -> int:
    if args.symbolic:
        coefficients = level_coefficients()
        if args.format == "json":
            print(json.dumps({f"nu^{k}": to_structured(c) for k, c in coefficients.items()}, indent=2))
        else:
            for k, c in coefficients.items():
                print(f"nu^{k}: {render(c, args.style)}")
        return EXIT_OK
    if args.n is None:
        raise argparse.ArgumentError(None, "derive levels needs --n or --symbolic")
    _emit_series(quantized_levels(args.n), args)
    return EXIT_OK


def cmd_derive(args) -> int:
    if args.target == "levels":
        return _emit_levels(args)
    if args.target == "classical":
        polynomial = classical_hamiltonian()
    else:
        polynomial = derive_hamiltonian(spin=args.spin)
    if args.format == "json":
        print(json.dumps(polynomial.to_structured(), indent=2))
    else:
        print(polynomial.render(args.style))
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_appendix()
    for result in results:
        for line in result.lines():
            print(line)
    return EXIT_OK if all(r.passed for r in results) else EXIT_MISMATCH


def cmd_oracle(args) -> int:
    trunc = resolve_truncation(args, ORACLE_TRUNCATION)
    model = load_model(args.model)
    report = compare_symbolic_numeric(
        monomial_pairs(args.max_degree, trunc),
        model,
        points=args.points,
        tol=args.tol,
        seed=args.seed,
        trunc=trunc,
    )
    summary = {
        "pairs": report.sizes["pair"],
        "points": report.sizes["point"],
        "seed": report.attrs["seed"],
        "tol": report.attrs["tol"],
        "max_relative": report.attrs["max_relative"],
        "passed": report.attrs["passed"],
    }
    if args.format == "json":
        print(json.dumps(summary, indent=2))
    else:
        for name, value in summary.items():
            print(f"{name}: {value}")
        if not report.attrs["passed"]:
            worst = report["relative"].max("point")
            for label in report["pair"].values[worst.values > args.tol]:
                print(f"    {label}: {float(worst.sel(pair=label)):.3g}")
        print("PASS" if report.attrs["passed"] else "FAIL")
    return EXIT_OK if report.attrs["passed"] else EXIT_MISMATCH


COMMANDS = {
    "star": cmd_star,
    "bracket": cmd_bracket,
    "derive": cmd_derive,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


# -----------------------------------------------------------------------------
# Entry points
# -----------------------------------------------------------------------------


def _configure_logging(verbose: bool):
    if not any(getattr(h, "_gcweyl", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._gcweyl = True
        logger.addHandler(handler)
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)


def run(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit code; output goes to stdout."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except EpsUnderflow as e:
        logger.error("%s", e)
        return EXIT_UNDERFLOW
    except USAGE_ERRORS as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except GCWeylError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_MISMATCH


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
