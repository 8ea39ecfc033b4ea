"""Deployer module: drives a runtime from the tasks of a deployment plan."""

import asyncio
from dataclasses import dataclass
from enum import Enum
import logging

from .constants import InterfaceKind
from .engine import EngineConfig, ExecutionTrace, Orchestrator, OutcomeKind, TaskInputs
from .model import Configuration
from .planner import TaskGraph, TaskNode, compile_plan
from .runtime import RUNTIMES, Runtime, RuntimeSnapshot

_LOGGER = logging.getLogger(__name__)


class TaskFailure(Exception):
    """Raised for a task that was asked to fail."""


class State(Enum):
    """Deployer state enumeration."""

    Idle = 0
    Deploying = 1
    Deployed = 2
    Failed = 10


class Deployer:
    """Executes deployment tasks against one runtime.

    An instance is the executor callback handed to the orchestrator: each
    task kind is dispatched to its `_execute_<Kind>` method, which makes
    the matching deployment API call.
    """

    def __init__(self, runtime: Runtime, fail_tasks=(), latency: float = 0.0):
        """Initialize deployer with its runtime and optional injected failures."""
        self.runtime = runtime
        self.fail_tasks = frozenset(fail_tasks)
        self.latency = latency
        self.state = State.Idle

        _LOGGER.debug("Initialized deployer on %s runtime", runtime.name)

    async def __call__(self, node: TaskNode, inputs: TaskInputs):
        """Execute one task."""
        if self.latency:
            await asyncio.sleep(self.latency)
        else:
            # let other running tasks interleave
            await asyncio.sleep(0)

        if node.id in self.fail_tasks:
            _LOGGER.warning("Failing task %s on request", node.id)
            raise TaskFailure(f"task {node.id} failed on request")

        method = getattr(self, "_execute_" + node.kind.name)
        _LOGGER.debug("Executing %s", node.label)
        return method(node, inputs)

    def _execute_Installation(self, node: TaskNode, inputs: TaskInputs):
        type_name, site = node.installation_target()
        return self.runtime.install(type_name, site)

    def _execute_Instantiation(self, node: TaskNode, inputs: TaskInputs):
        factory = inputs.get(InterfaceKind.FactoryProvider)
        return self.runtime.instantiate(factory, name=node.target)

    def _execute_AttributeSetter(self, node: TaskNode, inputs: TaskInputs):
        instance = inputs.get(InterfaceKind.InstanceProvider)
        self.runtime.set_attribute(instance, node.name_param, node.value_param)

    def _execute_BindingGetter(self, node: TaskNode, inputs: TaskInputs):
        instance = inputs.get(InterfaceKind.InstanceProvider)
        return self.runtime.get_binding(instance, node.name_param)

    def _execute_BindingSetter(self, node: TaskNode, inputs: TaskInputs):
        instance = inputs.get(InterfaceKind.InstanceProvider)
        target = inputs.get(InterfaceKind.BindingProvider)
        self.runtime.bind(instance, node.name_param, target)

    def _execute_AddComponent(self, node: TaskNode, inputs: TaskInputs):
        parent = inputs.get(InterfaceKind.InstanceProvider, role="parent")
        child = inputs.get(InterfaceKind.InstanceProvider, role="child")
        self.runtime.add_sub_component(parent, child, node.name_param)

    def _execute_Initialization(self, node: TaskNode, inputs: TaskInputs):
        instance = inputs.get(InterfaceKind.InstanceProvider)
        self.runtime.start(instance)

    async def run(self, graph: TaskGraph, config: EngineConfig | None = None) -> ExecutionTrace:
        """Orchestrate a whole plan against the runtime."""
        if self.state == State.Deploying:
            raise RuntimeError("Run can only be called once at a time")

        self.state = State.Deploying
        trace = None
        try:
            trace = await Orchestrator(graph, config).run(self)
        finally:
            completed = trace is not None and trace.outcome.kind is OutcomeKind.COMPLETED
            self.state = State.Deployed if completed else State.Failed
        _LOGGER.info("Deployment on %s runtime ended: %s", self.runtime.name, trace.outcome)
        return trace


@dataclass(frozen=True)
class Deployment:
    """Result of deploying a configuration."""

    graph: TaskGraph
    trace: ExecutionTrace
    snapshot: RuntimeSnapshot


async def deploy(
    config: Configuration,
    backend: str = "hier",
    engine_config: EngineConfig | None = None,
    fail_tasks=(),
    latency: float = 0.0,
) -> Deployment:
    """Compile a configuration for a backend and deploy it onto a fresh runtime.

    Raises `CompileError` when the configuration cannot be compiled for the
    backend; execution problems are reported through the trace outcome.
    """
    runtime = RUNTIMES[backend](config.types)
    graph = compile_plan(config, runtime.capabilities)
    deployer = Deployer(runtime, fail_tasks=fail_tasks, latency=latency)
    trace = await deployer.run(graph, engine_config)
    return Deployment(graph, trace, runtime.snapshot())
