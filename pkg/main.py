"""Example script deploying a description and watching the orchestration."""

import argparse
import asyncio
import logging
from pathlib import Path

from polydeploy import Deployer, EngineConfig, HierarchicalRuntime, Orchestrator, compile_plan, parse_native

_LOGGER = logging.getLogger(__name__)


def observe_orchestration(orchestrator):
    """Subscribe to task events and log them."""
    orchestrator.events.subscribe(lambda event: _LOGGER.info("%s", event))


def observe_runtime(runtime):
    """Subscribe to runtime snapshots and log them."""
    runtime.state.subscribe(lambda snapshot: _LOGGER.info("Runtime state: %s", snapshot))


async def main(path: str, workers: int):
    """Run the example: compile, then deploy while observing."""
    config = parse_native(Path(path).read_text(encoding="utf-8"), filename=path)

    runtime = HierarchicalRuntime(config.types)
    observe_runtime(runtime)

    graph = compile_plan(config, runtime.capabilities)
    orchestrator = Orchestrator(graph, EngineConfig(workers=workers))
    observe_orchestration(orchestrator)

    trace = await orchestrator.run(Deployer(runtime))

    print(trace.serialize(), end="")
    print(runtime.snapshot().serialize(), end="")

if __name__ == "__main__":
    # Configure debug logging
    logging.basicConfig(
        level=logging.DEBUG,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    parser = argparse.ArgumentParser(description="Deploy a native description on the hierarchical runtime")
    parser.add_argument("--file", required=True, help="Native description to deploy")
    parser.add_argument("--workers", type=int, default=1, help="Tasks allowed to run at once")

    args = parser.parse_args()

    asyncio.run(main(args.file, args.workers))
