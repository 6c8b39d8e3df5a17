#!/usr/bin/env python3
"""
Command-line front end of the Leibniz workbench.

    leibniz-workbench gamma validate|cocycle|factorize|synthesize|order-condition
    leibniz-workbench deriv apply|iterate
    leibniz-workbench system check|defect|corld|solve-next|decompose
    leibniz-workbench indep witness|certificate|density|verdict

Every document argument takes a path, inline JSON or "preset:<name>".
Each run writes one JSON document and exits with 0 (pass / found),
1 (violation or failure certificate) or 2 (usage or input error).
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from config import (
    DEFAULT_CERTIFICATE_BOUND,
    DEFAULT_DEGREE_BOUND,
    DEFAULT_DENSITY_EPS,
    DEFAULT_SEED,
    DEFAULT_WITNESS_BUDGET,
    GATE_SAMPLE_COUNT,
    INITIAL_MAX_DENOMINATOR,
    LOG_FORMAT,
    LOG_LEVEL,
    WORKBENCH_VERSION,
)
from data_store import (
    dump_document,
    load_embedding,
    load_expression,
    load_gamma_vector,
    load_document,
    load_points,
    load_sequence,
    load_spec,
    load_table,
    load_target,
    sequence_document,
    validate_table,
)
from derivations import DerivationSequence, apply, iterate
from errors import (
    CocycleError,
    DensitySearchFailure,
    InconsistencyError,
    InputError,
    PrefixCheckError,
    RetriesExhaustedError,
    SearchExhaustedError,
    WorkbenchError,
)
from gamma import check_cocycle, factorize, order_condition_failures, synthesize
from independence import (
    dependence_certificate,
    dependence_verdict,
    density_search,
    find_witness,
    witness_independence,
)
from leibniz import (
    ExtensionTerm,
    check_defect_conditions,
    check_system,
    decompose_solution,
    leibniz_defect,
    solve_next,
    solve_to_order,
)
from models import GammaTable, RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2

Result = Tuple[int, Dict[str, Any]]


def _status(passed: bool) -> int:
    return EXIT_OK if passed else EXIT_VIOLATION


def _sequence_and_table(config: RunConfig) -> Tuple[DerivationSequence, GammaTable]:
    """The --seq sequence and the --gamma table, falling back to the sequence document's own table."""
    sequence, table = load_sequence(config.inputs["seq"])
    if config.inputs.get("gamma") is not None:
        table = load_table(config.inputs["gamma"])
    if table is None:
        raise InputError("No gamma table: pass --gamma or include 'gamma' in the sequence document")
    return sequence, table


# --- gamma -------------------------------------------------------------------------

def gamma_validate(config: RunConfig) -> Result:
    report = validate_table(config.inputs["table"])
    return _status(report.valid), report.to_dict()


def gamma_cocycle(config: RunConfig) -> Result:
    report = check_cocycle(load_table(config.inputs["table"]))
    return _status(report.passed), report.to_dict()


def gamma_factorize(config: RunConfig) -> Result:
    factorization = factorize(load_table(config.inputs["table"]))
    return _status(factorization.succeeded), factorization.to_dict()


def gamma_synthesize(config: RunConfig) -> Result:
    return EXIT_OK, synthesize(load_gamma_vector(config.inputs["gamma"])).to_dict()


def gamma_order_condition(config: RunConfig) -> Result:
    failures = order_condition_failures(load_table(config.inputs["table"]))
    return _status(not failures), {"holds": not failures, "failing_orders": failures}


# --- deriv -------------------------------------------------------------------------

def deriv_apply(config: RunConfig) -> Result:
    spec = load_spec(config.inputs["spec"])
    x = load_expression(config.inputs["expr"], spec.field)
    return EXIT_OK, {"expr": str(x), "value": str(apply(spec, x))}


def deriv_iterate(config: RunConfig) -> Result:
    spec = load_spec(config.inputs["spec"])
    x = load_expression(config.inputs["expr"], spec.field)
    order = config.inputs["order"]
    return EXIT_OK, {"expr": str(x), "order": order, "value": str(iterate(spec, order, x))}


# --- system ------------------------------------------------------------------------

def system_check(config: RunConfig) -> Result:
    sequence, table = _sequence_and_table(config)
    report = check_system(sequence, table, config.sample_count, config.seed)
    return _status(report.passed), report.to_dict()


def system_defect(config: RunConfig) -> Result:
    sequence, table = _sequence_and_table(config)
    x = load_expression(config.inputs["x"], sequence.field)
    y = load_expression(config.inputs["y"], sequence.field)
    value = leibniz_defect(sequence, table, x, y)
    return EXIT_OK, {"n": sequence.n + 1, "x": str(x), "y": str(y), "defect": str(value)}


def system_corld(config: RunConfig) -> Result:
    sequence, table = _sequence_and_table(config)
    report = check_defect_conditions(sequence, table, config.sample_count, config.seed)
    return _status(report.passed), {"n": sequence.n + 1, **report.to_dict()}


def system_solve_next(config: RunConfig) -> Result:
    sequence, table = _sequence_and_table(config)
    choices = load_document(config.inputs["choices"]) if config.inputs.get("choices") else None
    if choices is not None and not isinstance(choices, dict):
        raise InputError("--choices must be a JSON object mapping generators to expressions")
    target = config.inputs.get("to") or sequence.n + 1
    if target <= sequence.n:
        raise InputError(f"--to {target} does not exceed the sequence order {sequence.n}")
    try:
        if target == sequence.n + 1:
            extended = sequence.extend(solve_next(sequence, table, choices, config.sample_count, config.seed))
        else:
            per_order = [choices] * (target - sequence.n)
            extended = solve_to_order(sequence, table, target, per_order, config.sample_count, config.seed)
    except CocycleError as e:
        return EXIT_VIOLATION, {"error": str(e), "violations": [v.to_dict() for v in e.violations]}
    except PrefixCheckError as e:
        return EXIT_VIOLATION, {"error": str(e), "report": e.report.to_dict()}
    return EXIT_OK, {"sequence": sequence_document(extended, table)}


def system_decompose(config: RunConfig) -> Result:
    sequence, _ = _sequence_and_table(config)
    term = sequence.terms[-1]
    if not isinstance(term, ExtensionTerm):
        raise InputError("The last term of the sequence must be an extension term")
    try:
        decomposition = decompose_solution(term, sample_count=config.sample_count, seed=config.seed)
    except InconsistencyError as e:
        return EXIT_VIOLATION, {"error": str(e)}
    return EXIT_OK, {"n": term.order, **decomposition.to_dict()}


# --- indep -------------------------------------------------------------------------

def indep_witness(config: RunConfig) -> Result:
    sequence, _ = load_sequence(config.inputs["seq"])
    if config.inputs.get("points") is not None:
        points = load_points(config.inputs["points"], sequence.field)
    else:
        try:
            points = find_witness(sequence, config.degree_bound, config.budget, config.seed)
        except SearchExhaustedError as e:
            return EXIT_VIOLATION, {"verdict": "exhausted", "error": str(e)}
    report = witness_independence(sequence, points)
    return _status(report.independent), report.to_dict()


def indep_certificate(config: RunConfig) -> Result:
    sequence, _ = load_sequence(config.inputs["seq"])
    certificate = dependence_certificate(sequence, config.inputs.get("bound") or DEFAULT_CERTIFICATE_BOUND)
    return _status(certificate.found), certificate.to_dict()


def indep_density(config: RunConfig) -> Result:
    sequence, _ = load_sequence(config.inputs["seq"])
    embedding = load_embedding(config.inputs["embed"])
    target = load_target(config.inputs["target"])
    try:
        result = density_search(
            sequence, embedding, target, config.eps, config.degree_bound, config.max_denominator
        )
    except DensitySearchFailure as e:
        failure = {"error": str(e), "failure": type(e).__name__}
        if isinstance(e, RetriesExhaustedError):
            failure["best_error"] = e.best_error
        return EXIT_VIOLATION, failure
    return EXIT_OK, result.to_dict()


def indep_verdict(config: RunConfig) -> Result:
    sequence, table = _sequence_and_table(config)
    try:
        verdict = dependence_verdict(sequence, table, True, config.sample_count, config.seed)
    except (CocycleError, PrefixCheckError) as e:
        return EXIT_VIOLATION, {"error": str(e)}
    return EXIT_OK, verdict.to_dict()


COMMANDS: Dict[Tuple[str, str], Callable[[RunConfig], Result]] = {
    ("gamma", "validate"): gamma_validate,
    ("gamma", "cocycle"): gamma_cocycle,
    ("gamma", "factorize"): gamma_factorize,
    ("gamma", "synthesize"): gamma_synthesize,
    ("gamma", "order-condition"): gamma_order_condition,
    ("deriv", "apply"): deriv_apply,
    ("deriv", "iterate"): deriv_iterate,
    ("system", "check"): system_check,
    ("system", "defect"): system_defect,
    ("system", "corld"): system_corld,
    ("system", "solve-next"): system_solve_next,
    ("system", "decompose"): system_decompose,
    ("indep", "witness"): indep_witness,
    ("indep", "certificate"): indep_certificate,
    ("indep", "density"): indep_density,
    ("indep", "verdict"): indep_verdict,
}


def execute(config: RunConfig) -> Result:
    """
    Run one command and build its JSON document.

    Input problems become exit 2 documents; the report of a failed check
    or search is an exit 1 document.
    """
    handler = COMMANDS.get((config.command, config.action))
    if handler is None:
        return EXIT_USAGE, {"error": f"Unknown command: {config.command} {config.action}"}
    logger.info(f"Running {config.command} {config.action} (seed={config.seed})")
    try:
        status, result = handler(config)
    except WorkbenchError as e:
        logger.warning(f"{config.command} {config.action} rejected input: {e}")
        status, result = EXIT_USAGE, {"error": str(e), "error_type": type(e).__name__}
    return status, {"version": WORKBENCH_VERSION, **config.to_dict(), **result}


# --- Argument parsing --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting so usage errors come out as JSON documents."""

    def error(self, message: str):
        raise InputError(message)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--samples", type=_positive_int, default=GATE_SAMPLE_COUNT, dest="sample_count")
    common.add_argument("--output", help="Write the JSON document here instead of stdout")

    parser = _Parser(prog="leibniz-workbench", description="Exact workbench for higher-order derivations")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gamma = commands.add_parser("gamma", help="Gamma tables").add_subparsers(dest="action", required=True)
    for action in ("validate", "cocycle", "factorize", "order-condition"):
        gamma.add_parser(action, parents=[common]).add_argument("--table", required=True)
    gamma.add_parser("synthesize", parents=[common]).add_argument("--gamma", required=True)

    deriv = commands.add_parser("deriv", help="Derivations").add_subparsers(dest="action", required=True)
    for action in ("apply", "iterate"):
        sub = deriv.add_parser(action, parents=[common])
        sub.add_argument("--spec", required=True)
        sub.add_argument("--expr", required=True)
        if action == "iterate":
            sub.add_argument("--order", type=int, required=True)

    system = commands.add_parser("system", help="Weighted Leibniz systems").add_subparsers(dest="action", required=True)
    for action in ("check", "defect", "corld", "solve-next", "decompose"):
        sub = system.add_parser(action, parents=[common])
        sub.add_argument("--seq", required=True)
        sub.add_argument("--gamma")
        if action == "defect":
            sub.add_argument("--x", required=True)
            sub.add_argument("--y", required=True)
        if action == "solve-next":
            sub.add_argument("--choices")
            sub.add_argument("--to", type=_positive_int, help="Extend repeatedly up to this order")

    indep = commands.add_parser("indep", help="Independence and density").add_subparsers(dest="action", required=True)
    for action in ("witness", "certificate", "density", "verdict"):
        sub = indep.add_parser(action, parents=[common])
        sub.add_argument("--seq", required=True)
        if action == "witness":
            sub.add_argument("--points")
            sub.add_argument("--degree-bound", type=int, default=DEFAULT_DEGREE_BOUND)
            sub.add_argument("--budget", type=_positive_int, default=DEFAULT_WITNESS_BUDGET)
        if action == "certificate":
            sub.add_argument("--bound", type=_positive_int, default=DEFAULT_CERTIFICATE_BOUND)
        if action == "density":
            sub.add_argument("--embed", required=True)
            sub.add_argument("--target", required=True)
            sub.add_argument("--eps", type=float, default=DEFAULT_DENSITY_EPS)
            sub.add_argument("--degree-bound", type=int, default=DEFAULT_DEGREE_BOUND)
            sub.add_argument("--max-denominator", type=_positive_int, default=INITIAL_MAX_DENOMINATOR)
        if action == "verdict":
            sub.add_argument("--gamma")

    return parser


_CONFIG_FIELDS = ("seed", "sample_count", "eps", "degree_bound", "budget", "max_denominator", "output")


def parse_args(argv: Sequence[str]) -> RunConfig:
    namespace = vars(build_parser().parse_args(list(argv)))
    command, action = namespace.pop("command"), namespace.pop("action")
    settings = {key: namespace.pop(key) for key in _CONFIG_FIELDS if key in namespace}
    return RunConfig(command=command, action=action, inputs=namespace, **settings)


def run(argv: Sequence[str]) -> int:
    """
    Execute one workbench command.

    Args:
        argv: Arguments without the program name

    Returns:
        Exit code 0, 1 or 2; the JSON document goes to --output or stdout
    """
    output = None
    try:
        config = parse_args(argv)
        output = config.output
        status, document = execute(config)
    except InputError as e:
        status, document = EXIT_USAGE, {"version": WORKBENCH_VERSION, "error": str(e), "error_type": "UsageError"}
    except SystemExit as e:
        # --help
        return int(e.code or 0)

    text = dump_document(document)
    if output:
        try:
            with open(output, "w", encoding="utf-8") as handle:
                handle.write(text + "\n")
        except OSError as e:
            logger.error(f"Cannot write {output}: {e}")
            print(dump_document({"version": WORKBENCH_VERSION, "error": f"Cannot write {output}"}))
            return EXIT_USAGE
    else:
        print(text)
    return status


def main(argv: Optional[List[str]] = None) -> None:
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT, stream=sys.stderr)
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
