"""Command-line surface: validate, plan, deploy, convert."""

import argparse
import asyncio
import logging
import os
from pathlib import Path
import sys
import tempfile

from .adl import emit_adl, parse_adl
from .constants import ExitStatus
from .deployer import deploy
from .diagnostics import ParseError
from .engine import EngineConfig, OutcomeKind
from .native import emit_native, parse_native
from .planner import BackendCapabilities, CompileError, compile_plan, graph_to_dot, graph_to_text
from .runtime import RUNTIMES

_LOGGER = logging.getLogger(__name__)

PARSERS = {"native": parse_native, "adl": parse_adl}
EMITTERS = {"native": emit_native, "adl": emit_adl}


def error(message: str):
    """Print a user-facing error."""
    print(f"error: {message}")


def write_atomic(path: Path, text: str):
    """Write `text` to `path` through a temporary file renamed on success."""
    directory = path.parent if str(path.parent) else Path(".")
    fd, temporary = tempfile.mkstemp(prefix=f".{path.name}.", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(temporary, path)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
    _LOGGER.debug("Wrote %s", path)


def load(path: str, fmt: str):
    """Read and parse a description; returns (configuration, exit status)."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        error(f"cannot read {path}: {e}")
        return None, ExitStatus.PARSE_ERROR

    try:
        config = PARSERS[fmt](text, filename=path)
    except ParseError as e:
        for diagnostic in e.diagnostics:
            error(str(diagnostic))
        return None, ExitStatus.PARSE_ERROR if e.is_syntactic else ExitStatus.VALIDATION_ERROR

    _LOGGER.info("Loaded %s from %s", config, path)
    return config, ExitStatus.OK


def capabilities(backend: str) -> BackendCapabilities:
    runtime = RUNTIMES[backend]
    return BackendCapabilities(runtime.name, runtime.supports_hierarchy)


def cmd_validate(args) -> ExitStatus:
    """Parse and validate a description."""
    config, status = load(args.file, args.format)
    if config is None:
        return status
    print("OK")
    return ExitStatus.OK


def cmd_plan(args) -> ExitStatus:
    """Print the deployment plan of a description."""
    config, status = load(args.file, args.format)
    if config is None:
        return status

    try:
        graph = compile_plan(config, capabilities(args.backend))
    except CompileError as e:
        error(str(e))
        return ExitStatus.COMPILE_ERROR

    sys.stdout.write(graph_to_dot(graph) if args.out == "dot" else graph_to_text(graph))
    return ExitStatus.OK


def cmd_deploy(args) -> ExitStatus:
    """Deploy a description onto a simulated runtime."""
    config, status = load(args.file, args.format)
    if config is None:
        return status

    try:
        engine_config = EngineConfig(workers=args.workers)
    except ValueError as e:
        error(str(e))
        return ExitStatus.VALIDATION_ERROR

    try:
        deployment = asyncio.run(
            deploy(config, backend=args.backend, engine_config=engine_config, fail_tasks=args.fail_task)
        )
    except CompileError as e:
        error(str(e))
        return ExitStatus.COMPILE_ERROR

    trace = deployment.trace
    if args.trace:
        write_atomic(Path(args.trace), trace.serialize())

    outcome = trace.outcome
    if outcome.kind is OutcomeKind.CYCLE_DETECTED:
        error(f"cycle detected among {', '.join(sorted(outcome.remaining))}")
        return ExitStatus.CYCLE_DETECTED
    if outcome.kind is OutcomeKind.TASK_FAILED:
        error(f"task {outcome.task} failed: {outcome.reason}")
        return ExitStatus.TASK_FAILED

    if args.snapshot:
        write_atomic(Path(args.snapshot), deployment.snapshot.serialize())

    print(
        f"deployed {len(deployment.graph.nodes)} tasks on {args.backend}; "
        f"snapshot sha256={deployment.snapshot.digest()}"
    )
    return ExitStatus.OK


def cmd_convert(args) -> ExitStatus:
    """Translate a description into another language."""
    config, status = load(args.file, getattr(args, "from"))
    if config is None:
        return status
    sys.stdout.write(EMITTERS[args.to](config))
    return ExitStatus.OK


def build_parser() -> argparse.ArgumentParser:
    """Argument parser of the `polydeploy` command."""
    parser = argparse.ArgumentParser(prog="polydeploy", description="Configure and deploy component applications")
    parser.add_argument("-v", "--verbose", action="store_true", help="Enable debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    def source(command):
        command.add_argument("file", help="Description to read")

    def input_format(command):
        command.add_argument("--format", choices=sorted(PARSERS), default="native", help="Input language")

    def backend(command):
        command.add_argument("--backend", choices=sorted(RUNTIMES), default="hier", help="Target runtime")

    validate = commands.add_parser("validate", help="Check a description")
    source(validate)
    input_format(validate)
    validate.set_defaults(handler=cmd_validate)

    plan = commands.add_parser("plan", help="Print the deployment task graph")
    source(plan)
    input_format(plan)
    backend(plan)
    plan.add_argument("--out", choices=("dot", "text"), default="dot", help="Plan rendering")
    plan.set_defaults(handler=cmd_plan)

    deploy_command = commands.add_parser("deploy", help="Deploy onto a simulated runtime")
    source(deploy_command)
    input_format(deploy_command)
    backend(deploy_command)
    deploy_command.add_argument("--workers", type=int, default=1, help="Tasks allowed to run at once")
    deploy_command.add_argument("--trace", help="Write the execution trace to this file")
    deploy_command.add_argument("--snapshot", help="Write the final runtime snapshot to this file")
    deploy_command.add_argument(
        "--fail-task", action="append", default=[], metavar="ID", help="Make the task with this id fail (testing)"
    )
    deploy_command.set_defaults(handler=cmd_deploy)

    convert = commands.add_parser("convert", help="Translate between description languages")
    source(convert)
    convert.add_argument("--from", choices=sorted(PARSERS), default="native", help="Input language")
    convert.add_argument("--to", choices=sorted(EMITTERS), default="native", help="Output language")
    convert.set_defaults(handler=cmd_convert)

    return parser


def main(argv=None) -> int:
    """Run the command line and return its exit status."""
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    return int(args.handler(args))


if __name__ == "__main__":
    sys.exit(main())
