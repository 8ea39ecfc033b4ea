"""Generic task orchestration over TP/TS dependency lists."""

import asyncio
from dataclasses import dataclass, field
from enum import Enum
import heapq
import inspect
import logging
from types import MappingProxyType
from typing import Any, Awaitable, Callable, Mapping

import rx
import rx.operators as ops

from .constants import InterfaceKind
from .planner import DependencyEdge, TaskGraph, TaskNode

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class DependencyLists:
    """Per-task predecessor (TP) and successor (TS) sets."""

    tp: Mapping[str, frozenset]
    ts: Mapping[str, frozenset]


def build_dependency_lists(graph: TaskGraph) -> DependencyLists:
    """Derive TP and TS from the edges of a graph."""
    tp: dict[str, set] = {n.id: set() for n in graph.nodes}
    ts: dict[str, set] = {n.id: set() for n in graph.nodes}
    for edge in graph.edges:
        tp[edge.consumer].add(edge.provider)
        ts[edge.provider].add(edge.consumer)

    return DependencyLists(
        tp=MappingProxyType({k: frozenset(v) for k, v in tp.items()}),
        ts=MappingProxyType({k: frozenset(v) for k, v in ts.items()}),
    )


@dataclass(frozen=True)
class EngineConfig:
    """How an orchestration runs.

    Ready tasks are claimed in ascending task id order. `priority`, when
    given, is consulted first: ready tasks are ordered by
    `(priority.get(id, 0), id)`.
    """

    workers: int = 1
    fail_fast: bool = True
    priority: Mapping[str, int] | None = None

    def __post_init__(self):
        """Reject worker counts below one."""
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")

    def sort_key(self, task: str):
        if self.priority is None:
            return (0, task)
        return (self.priority.get(task, 0), task)


class Phase(Enum):
    """Trace event phases."""

    START = "START"
    END = "END"


@dataclass(frozen=True)
class TraceEvent:
    """A task starting or ending on a worker."""

    seq: int
    phase: Phase
    task: str
    worker: int

    def __str__(self):
        """Trace line of the event."""
        return f"EVT {self.seq} {self.phase.value} {self.task} worker={self.worker}"


class OutcomeKind(Enum):
    """How an execution ended."""

    COMPLETED = "completed"
    CYCLE_DETECTED = "cycle_detected"
    TASK_FAILED = "task_failed"


@dataclass(frozen=True)
class Outcome:
    """Final state of an execution; `remaining` holds the tasks never started."""

    kind: OutcomeKind
    remaining: frozenset = frozenset()
    task: str | None = None
    reason: str | None = None

    def __str__(self):
        """Trace line of the outcome."""
        if self.kind is OutcomeKind.CYCLE_DETECTED:
            return f"OUTCOME {self.kind.value}:{','.join(sorted(self.remaining))}"
        if self.kind is OutcomeKind.TASK_FAILED:
            return f"OUTCOME {self.kind.value}:{self.task}"
        return f"OUTCOME {self.kind.value}"


@dataclass(frozen=True)
class ExecutionTrace:
    """Totally ordered record of an execution."""

    events: tuple[TraceEvent, ...]
    outcome: Outcome
    outputs: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)

    def order(self) -> list[str]:
        """Task ids in the order they started."""
        return [e.task for e in self.events if e.phase is Phase.START]

    def serialize(self) -> str:
        """Newline-delimited EVT records followed by the OUTCOME line."""
        return "".join(f"{event}\n" for event in self.events) + f"{self.outcome}\n"


class TaskInputs:
    """Outputs of a task's providers, keyed by (provider id, interface)."""

    def __init__(self, edges: list[DependencyEdge], outputs: Mapping[str, Any]):
        """Collect the provider outputs flowing into one task."""
        self._values = {(e.provider, e.interface): outputs[e.provider] for e in edges}
        self._edges = edges

    def __getitem__(self, key: tuple[str, InterfaceKind]):
        return self._values[key]

    def __len__(self):
        return len(self._values)

    def all(self, interface: InterfaceKind) -> list:
        """Outputs received through `interface`, ordered by provider id."""
        return [self._values[k] for k in sorted(self._values, key=lambda k: k[0]) if k[1] is interface]

    def get(self, interface: InterfaceKind, role: str | None = None):
        """The single output received through `interface` (and `role`, when given)."""
        matches = [
            self._values[(e.provider, e.interface)]
            for e in self._edges
            if e.interface is interface and (role is None or e.role == role)
        ]
        if len(matches) != 1:
            raise LookupError(f"expected one {interface.name} input (role={role}), found {len(matches)}")
        return matches[0]


Executor = Callable[[TaskNode, TaskInputs], Any]


class Orchestrator:
    """Runs the tasks of one graph in a dependency-respecting order.

    Tasks whose TP list is empty are ready; up to `workers` of them run at
    once, claimed in tie-break order. When a task ends it is removed from
    the TP list of every task in its TS list. Tasks left over once nothing
    is ready or running sit on (or behind) a cycle.
    """

    def __init__(self, graph: TaskGraph, config: EngineConfig | None = None):
        """Initialize orchestrator for a graph."""
        self.graph = graph
        self.config = config or EngineConfig()
        self.lists = build_dependency_lists(graph)
        self._running = False

        self._eventSubject = rx.subject.Subject()
        self.events = self._eventSubject.pipe(ops.as_observable())

    async def run(self, executor: Executor) -> ExecutionTrace:
        """Execute every task of the graph through `executor`."""
        if self._running:
            raise RuntimeError("Run can only be called once at a time")
        self._running = True
        try:
            return await self._run(executor)
        finally:
            self._running = False

    async def _run(self, executor: Executor) -> ExecutionTrace:
        config = self.config
        nodes = self.graph.node_map()
        incoming: dict[str, list[DependencyEdge]] = {task: [] for task in nodes}
        for edge in self.graph.edges:
            incoming[edge.consumer].append(edge)

        # working copy of TP; the graph itself is never touched
        tp = {task: set(preds) for task, preds in self.lists.tp.items()}
        ready = [(config.sort_key(task), task) for task, preds in tp.items() if not preds]
        heapq.heapify(ready)
        free_workers = list(range(1, config.workers + 1))

        events: list[TraceEvent] = []
        outputs: dict[str, Any] = {}
        started: set[str] = set()
        running: dict[asyncio.Task, tuple[str, int]] = {}
        failure: tuple[str, str] | None = None

        def record(phase, task, worker):
            event = TraceEvent(len(events) + 1, phase, task, worker)
            events.append(event)
            _LOGGER.debug("%s", event)
            self._eventSubject.on_next(event)

        _LOGGER.info("Orchestrating %s with %d worker(s)", self.graph, config.workers)

        try:
            while True:
                while ready and free_workers and not (failure and config.fail_fast):
                    _, task = heapq.heappop(ready)
                    worker = heapq.heappop(free_workers)
                    started.add(task)
                    record(Phase.START, task, worker)
                    inputs = TaskInputs(incoming[task], outputs)
                    future = asyncio.ensure_future(self._invoke(executor, nodes[task], inputs))
                    running[future] = (task, worker)

                if not running:
                    break

                done, _ = await asyncio.wait(running, return_when=asyncio.FIRST_COMPLETED)
                for future in sorted(done, key=lambda f: running[f][0]):
                    task, worker = running.pop(future)
                    record(Phase.END, task, worker)
                    heapq.heappush(free_workers, worker)

                    error = future.exception()
                    if error is not None:
                        _LOGGER.error("Task %s failed: %r", task, error)
                        if failure is None:
                            failure = (task, str(error) or type(error).__name__)
                        continue

                    outputs[task] = future.result()
                    for successor in self.lists.ts[task]:
                        tp[successor].discard(task)
                        if not tp[successor]:
                            heapq.heappush(ready, (config.sort_key(successor), successor))
        finally:
            # a cancelled run leaves no executor call behind
            for future in running:
                future.cancel()
            if running:
                await asyncio.gather(*running, return_exceptions=True)

        remaining = frozenset(nodes) - started
        if failure is not None:
            outcome = Outcome(OutcomeKind.TASK_FAILED, remaining, task=failure[0], reason=failure[1])
        elif remaining:
            _LOGGER.warning("Cycle detected, %d task(s) never became ready", len(remaining))
            outcome = Outcome(OutcomeKind.CYCLE_DETECTED, remaining)
        else:
            outcome = Outcome(OutcomeKind.COMPLETED)

        _LOGGER.info("Orchestration finished: %s", outcome)
        return ExecutionTrace(tuple(events), outcome, MappingProxyType(outputs))

    @staticmethod
    async def _invoke(executor: Executor, node: TaskNode, inputs: TaskInputs):
        result = executor(node, inputs)
        if inspect.isawaitable(result):
            result = await result
        return result

    def as_task(self, executor: Executor) -> Callable[[TaskNode, TaskInputs], Awaitable[ExecutionTrace]]:
        """Wrap this orchestration as a single task step of an outer plan.

        The wrapped step runs the whole inner graph and fails unless the
        inner outcome is completed; its output is the inner trace.
        """

        async def step(node: TaskNode, inputs: TaskInputs) -> ExecutionTrace:
            trace = await self.run(executor)
            if trace.outcome.kind is not OutcomeKind.COMPLETED:
                raise RuntimeError(f"sub-plan of {node.id} ended with {trace.outcome}")
            return trace

        return step


async def execute(graph: TaskGraph, executor: Executor, config: EngineConfig | None = None) -> ExecutionTrace:
    """Run `graph` through `executor` and return the execution trace."""
    return await Orchestrator(graph, config).run(executor)
