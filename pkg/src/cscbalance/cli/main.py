import argparse
import logging
import sys
from typing import Any, Callable, Dict, Sequence, Tuple, Union
from cscbalance._exceptions import DocumentError, PreconditionError
from cscbalance._version import __version__
from cscbalance.balance.conditions import check_conditions
from cscbalance.balance.solver import SolveStatus, rebalance_orbit, solve_balance
from cscbalance.balance.two_point import bisect_two_points, target_heights
from cscbalance.cli.documents import RunConfigDocument, pair, read_document
from cscbalance.cli.jsonout import dumps
from cscbalance.explorer.classify import classify_lebrun_pair
from cscbalance.explorer.experiments import (
    certify_weight_openness,
    sample_point_density,
    write_trace,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_CONDITION = 2
EXIT_UNSTABLE = 3
EXIT_INCOMPLETE = 4

STATUS_EXIT = {
    SolveStatus.BALANCED: EXIT_OK,
    SolveStatus.DIVERGED_UNSTABLE: EXIT_UNSTABLE,
    SolveStatus.SINGULAR_JACOBIAN: EXIT_INCOMPLETE,
    SolveStatus.MAX_ITER: EXIT_INCOMPLETE,
}

Result = Tuple[int, Dict[str, Any]]


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {
        "tol_res": args.tol_res,
        "tol_pd": args.tol_pd,
        "seed": args.seed,
        "samples": args.samples,
        "radius": args.radius,
        "grid": args.grid,
    }


def _complex_dim(doc: RunConfigDocument) -> int:
    m = doc.m if doc.m is not None else doc.model.complex_dim
    if m is None:
        raise DocumentError("document is missing 'm'", key="m")
    return m


def _one_field_model(doc: RunConfigDocument) -> None:
    if doc.model.point_dim != 1 or doc.model.dim_d != 1:
        raise DocumentError("this command needs a lebrun_profile model", key="model")


def cmd_check(doc: RunConfigDocument, args: argparse.Namespace) -> Result:
    opts = doc.solver_options(_overrides(args))
    report = check_conditions(doc.model, doc.configuration(), opts.tol_res, opts.tol_pd)
    return (EXIT_OK if report.all_hold else EXIT_CONDITION), report.to_dict()


def cmd_solve(doc: RunConfigDocument, args: argparse.Namespace) -> Result:
    opts = doc.solver_options(_overrides(args))
    report = solve_balance(doc.model, doc.configuration(), opts)
    return STATUS_EXIT[report.status], report.to_dict()


def cmd_rebalance(doc: RunConfigDocument, args: argparse.Namespace) -> Result:
    opts = doc.solver_options(_overrides(args))
    config = doc.configuration()
    report = rebalance_orbit(doc.model, config, opts)
    res = report.to_dict()
    res["balanced_configuration"] = (
        report.flowed_configuration(config).to_dict() if report.balanced else None
    )
    return STATUS_EXIT[report.status], res


def cmd_heights(doc: RunConfigDocument, args: argparse.Namespace) -> Result:
    _one_field_model(doc)
    a1, a2 = pair(doc, "weights")
    m = _complex_dim(doc)
    z1, z2 = target_heights(doc.model.a_minus, doc.model.a_plus, a1, a2, m)
    c1, c2 = a1 ** (m - 1), a2 ** (m - 1)
    return EXIT_OK, {
        "a_minus": doc.model.a_minus,
        "a_plus": doc.model.a_plus,
        "weights": [a1, a2],
        "m": m,
        "heights": [z1, z2],
        "residual": c1 * z1 + c2 * z2,
    }


def cmd_bisect(doc: RunConfigDocument, args: argparse.Namespace) -> Result:
    _one_field_model(doc)
    z1, z2 = pair(doc, "points")
    a1, a2 = pair(doc, "weights")
    opts = doc.solver_options(_overrides(args))
    report = bisect_two_points(doc.model, z1, z2, a1, a2, _complex_dim(doc), opts)
    return STATUS_EXIT[report.status], report.to_dict()


def cmd_certify(doc: RunConfigDocument, args: argparse.Namespace) -> Result:
    over = _overrides(args)
    opts = doc.solver_options(over)
    config = doc.configuration()
    try:
        report = certify_weight_openness(
            doc.model, config,
            radius=float(doc.option("radius", over, 0.1)),
            grid=int(doc.option("grid", over, 9)),
            opts=opts,
            workers=int(doc.option("workers", over, 1)),
        )
    except PreconditionError as err:
        base = check_conditions(doc.model, config, opts.tol_res, opts.tol_pd)
        return EXIT_CONDITION, {"precondition": str(err), "conditions": base.to_dict()}
    if args.csv:
        write_trace(report, args.csv)
    return (EXIT_OK if report.all_succeeded else EXIT_UNSTABLE), report.to_dict(args.timing)


def cmd_sample(doc: RunConfigDocument, args: argparse.Namespace) -> Result:
    over = _overrides(args)
    opts = doc.solver_options(over)
    doc.require("weights")
    n = doc.option("n", over, len(doc.weights) if isinstance(doc.weights, list) else None)
    if n is None:
        raise DocumentError("sampling with a scalar weight needs options.n", key="n")
    report = sample_point_density(
        doc.model, doc.weights, int(n),
        samples=int(doc.option("samples", over, 1000)),
        seed=int(doc.option("seed", over, 0)),
        m=_complex_dim(doc),
        opts=opts,
        workers=int(doc.option("workers", over, 1)),
    )
    if args.csv:
        write_trace(report, args.csv)
    return EXIT_OK, report.to_dict(args.timing)


def cmd_classify(doc: RunConfigDocument, args: argparse.Namespace) -> Result:
    _one_field_model(doc)
    z1, z2 = pair(doc, "points")
    verdict = classify_lebrun_pair(doc.model, z1, z2)
    return EXIT_OK, {"heights": [z1, z2], "classification": verdict.value}


COMMANDS: Dict[str, Tuple[Callable[[RunConfigDocument, argparse.Namespace], Result], str]] = {
    "check": (cmd_check, "check genericity, balancing and general position"),
    "solve": (cmd_solve, "solve the balancing equation by damped Newton"),
    "rebalance": (cmd_rebalance, "move a configuration along its orbit to a balanced one"),
    "heights": (cmd_heights, "balanced target heights of a two-point configuration"),
    "bisect": (cmd_bisect, "balance two points by bisection in the flow time"),
    "certify": (cmd_certify, "certify openness in the weights on a grid"),
    "sample": (cmd_sample, "estimate density of balanceable configurations"),
    "classify": (cmd_classify, "classify a pair of heights on a one-field model"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True, help="run document, - for stdin")
    common.add_argument("--output", default="-", help="report path, - for stdout")
    common.add_argument("--tol-res", type=float, default=None)
    common.add_argument("--tol-pd", type=float, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--radius", type=float, default=None)
    common.add_argument("--grid", type=int, default=None)
    common.add_argument("--csv", default=None, help="per-sample trace for certify and sample")
    common.add_argument("--timing", action="store_true", help="include wall-clock time")
    common.add_argument("-v", "--verbose", action="count", default=0)
    parser = argparse.ArgumentParser(prog="cscbalance")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w") as f:
            f.write(text)


def main(argv: Union[Sequence[str], None] = None) -> int:
    args = build_parser().parse_args(list(argv) if argv is not None else None)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    command, _ = COMMANDS[args.command]
    digest = None
    try:
        doc = read_document(args.input)
        digest = doc.sha256
        code, report = command(doc, args)
    except DocumentError as err:
        logger.error("%s", err)
        code = EXIT_INPUT
        report = {"error": str(err), "key": err.key, "line": err.line, "column": err.column}
    except ValueError as err:
        logger.error("%s", err)
        code = EXIT_INPUT
        report = {"error": str(err), "key": None, "line": None, "column": None}
    envelope = {
        "tool": "cscbalance",
        "version": __version__,
        "command": args.command,
        "input_sha256": digest,
        "exit_code": code,
        "report": report,
    }
    _write(dumps(envelope), args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
