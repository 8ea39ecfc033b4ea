"""Compiles a configuration into a graph of elementary deployment tasks."""

from dataclasses import dataclass
import heapq
import logging

from .constants import NAMED_KINDS, InterfaceKind, TaskKind
from .model import Configuration, validate

_LOGGER = logging.getLogger(__name__)


class CompileError(ValueError):
    """Raised when a configuration cannot be compiled for a backend."""

    HIERARCHY_UNSUPPORTED = "HIERARCHY_UNSUPPORTED"
    INVALID_CONFIG = "INVALID_CONFIG"

    def __init__(self, code: str, message: str, violations=()):
        """Initialize compile error with code, message and optional violations."""
        super().__init__(f"{code}: {message}")
        self.code = code
        self.violations = list(violations)


@dataclass(frozen=True)
class BackendCapabilities:
    """What a platform personality can execute."""

    backend_name: str
    supports_hierarchy: bool


@dataclass(frozen=True)
class TaskNode:
    """One elementary deployment task."""

    id: str
    kind: TaskKind
    target: str
    name_param: str | None = None
    value_param: str | int | bool | None = None
    site_param: str | None = None

    def __post_init__(self):
        """Check parameters match the task kind."""
        if (self.site_param is not None) != (self.kind is TaskKind.Installation):
            raise ValueError(f"task {self.id}: site parameter does not match kind {self.kind.name}")
        if (self.name_param is not None) != (self.kind in NAMED_KINDS):
            raise ValueError(f"task {self.id}: name parameter does not match kind {self.kind.name}")
        if (self.value_param is not None) != (self.kind is TaskKind.AttributeSetter):
            raise ValueError(f"task {self.id}: value parameter does not match kind {self.kind.name}")

    @property
    def label(self) -> str:
        """Human readable `kind:target[:name]` label."""
        parts = [self.kind.name, self.target]
        if self.name_param is not None:
            parts.append(self.name_param)
        return ":".join(parts)

    def installation_target(self) -> tuple[str, str]:
        """(type, site) pair targeted by an Installation task."""
        return self.target.removesuffix(f"@{self.site_param}"), self.site_param

    def __str__(self):
        """String representation of task node."""
        return f"TaskNode({self.id})"

    __repr__ = __str__


@dataclass(frozen=True)
class DependencyEdge:
    """Provider task feeding a consumer task through an interface.

    `role` tells apart the two InstanceProvider inputs of an AddComponent
    task (`parent` and `child`); it is None everywhere else.
    """

    provider: str
    consumer: str
    interface: InterfaceKind
    role: str | None = None

    def sort_key(self):
        return (self.provider, self.consumer, self.interface.value, self.role or "")


@dataclass(frozen=True)
class TaskGraph:
    """The compiled deployment plan: task nodes wired by typed dependency edges."""

    nodes: tuple[TaskNode, ...] = ()
    edges: tuple[DependencyEdge, ...] = ()

    def __post_init__(self):
        """Check referential integrity of edges."""
        ids = {n.id for n in self.nodes}
        if len(ids) != len(self.nodes):
            raise ValueError("task identifiers must be unique")
        for edge in self.edges:
            if edge.provider == edge.consumer:
                raise ValueError(f"task {edge.provider} cannot depend on itself")
            if edge.provider not in ids or edge.consumer not in ids:
                raise ValueError(f"edge {edge.provider} -> {edge.consumer} references an unknown task")

    def node_map(self) -> dict[str, TaskNode]:
        return {n.id: n for n in self.nodes}

    def incoming(self, task_id: str) -> list[DependencyEdge]:
        return [e for e in self.edges if e.consumer == task_id]

    def __str__(self):
        """String representation of task graph."""
        return f"TaskGraph({len(self.nodes)} tasks, {len(self.edges)} dependencies)"


def task_id(kind: TaskKind, target: str, name_param: str | None = None) -> str:
    """Identifier `<Kind>/<target>[/<name>]` of a task."""
    if name_param is None:
        return f"{kind.name}/{target}"
    return f"{kind.name}/{target}/{name_param}"


class _GraphBuilder:
    """Accumulates nodes and edges in rule order."""

    def __init__(self):
        self.nodes: dict[str, TaskNode] = {}
        self.edges: list[DependencyEdge] = []

    def add(self, node: TaskNode) -> TaskNode:
        self.nodes.setdefault(node.id, node)
        return self.nodes[node.id]

    def wire(self, provider: TaskNode, consumer: TaskNode, interface: InterfaceKind, role=None):
        self.edges.append(DependencyEdge(provider.id, consumer.id, interface, role))

    def graph(self) -> TaskGraph:
        return TaskGraph(
            nodes=tuple(sorted(self.nodes.values(), key=lambda n: n.id)),
            edges=tuple(sorted(self.edges, key=DependencyEdge.sort_key)),
        )


def compile_plan(config: Configuration, caps: BackendCapabilities) -> TaskGraph:
    """Compile a configuration into its deployment task graph.

    Raises `CompileError` with INVALID_CONFIG when the configuration does
    not validate, and HIERARCHY_UNSUPPORTED when it has containments the
    backend cannot execute.
    """
    violations = validate(config)
    if violations:
        raise CompileError(
            CompileError.INVALID_CONFIG, f"configuration has {len(violations)} violation(s)", violations
        )

    if config.containments and not caps.supports_hierarchy:
        raise CompileError(
            CompileError.HIERARCHY_UNSUPPORTED,
            f"backend {caps.backend_name} cannot add sub-components ({len(config.containments)} containment(s))",
        )

    builder = _GraphBuilder()
    instantiations: dict[str, TaskNode] = {}
    initializations: dict[str, TaskNode] = {}

    # installation and instantiation
    for instance in config.instances:
        installation = builder.add(
            TaskNode(
                task_id(TaskKind.Installation, f"{instance.type}@{instance.site}"),
                TaskKind.Installation,
                f"{instance.type}@{instance.site}",
                site_param=instance.site,
            )
        )
        instantiation = builder.add(
            TaskNode(task_id(TaskKind.Instantiation, instance.id), TaskKind.Instantiation, instance.id)
        )
        builder.wire(installation, instantiation, InterfaceKind.FactoryProvider)
        instantiations[instance.id] = instantiation

    # Initialization nodes are created up front so configuration tasks can feed them as they appear
    for instance in config.instances:
        initialization = builder.add(
            TaskNode(task_id(TaskKind.Initialization, instance.id), TaskKind.Initialization, instance.id)
        )
        initializations[instance.id] = initialization

    def configures(node: TaskNode, *instance_ids: str):
        for instance_id in instance_ids:
            builder.wire(node, initializations[instance_id], InterfaceKind.InstanceConfiguration)

    for instance in config.instances:
        for value in instance.attribute_values:
            setter = builder.add(
                TaskNode(
                    task_id(TaskKind.AttributeSetter, instance.id, value.name),
                    TaskKind.AttributeSetter,
                    instance.id,
                    name_param=value.name,
                    value_param=value.value,
                )
            )
            builder.wire(instantiations[instance.id], setter, InterfaceKind.InstanceProvider)
            configures(setter, instance.id)

    for binding in config.bindings:
        getter = builder.add(
            TaskNode(
                f"{task_id(TaskKind.BindingGetter, binding.server_instance, binding.server_port)}"
                f"/{binding.client_endpoint}",
                TaskKind.BindingGetter,
                binding.server_instance,
                name_param=binding.server_port,
            )
        )
        setter = builder.add(
            TaskNode(
                task_id(TaskKind.BindingSetter, binding.client_instance, binding.client_port),
                TaskKind.BindingSetter,
                binding.client_instance,
                name_param=binding.client_port,
            )
        )
        builder.wire(instantiations[binding.server_instance], getter, InterfaceKind.InstanceProvider)
        builder.wire(instantiations[binding.client_instance], setter, InterfaceKind.InstanceProvider)
        builder.wire(getter, setter, InterfaceKind.BindingProvider)
        configures(getter, binding.server_instance)
        configures(setter, binding.client_instance)

    for containment in config.containments:
        adder = builder.add(
            TaskNode(
                task_id(TaskKind.AddComponent, containment.parent, containment.child_name),
                TaskKind.AddComponent,
                containment.parent,
                name_param=containment.child_name,
            )
        )
        builder.wire(instantiations[containment.parent], adder, InterfaceKind.InstanceProvider, role="parent")
        builder.wire(instantiations[containment.child], adder, InterfaceKind.InstanceProvider, role="child")
        configures(adder, containment.parent, containment.child)

    for instance in config.instances:
        builder.wire(instantiations[instance.id], initializations[instance.id], InterfaceKind.InstanceProvider)

    graph = builder.graph()
    _LOGGER.info("Compiled %s for backend %s into %s", config, caps.backend_name, graph)
    return graph


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(graph: TaskGraph) -> str:
    """Render a task graph as a DOT digraph with byte-stable ordering."""
    lines = ["digraph plan {"]
    for node in sorted(graph.nodes, key=lambda n: n.id):
        lines.append(f"  {_quote(node.id)} [label={_quote(node.label)}];")
    for edge in sorted(graph.edges, key=DependencyEdge.sort_key):
        lines.append(f"  {_quote(edge.provider)} -> {_quote(edge.consumer)} [label={_quote(edge.interface.name)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_text(graph: TaskGraph) -> str:
    """Render a task graph as one `task <- predecessors` line per task.

    Tasks appear in serial execution order, the smallest ready id first.
    Tasks on a cycle never become ready and are listed last, by id.
    """
    predecessors = {n.id: set() for n in graph.nodes}
    successors = {n.id: set() for n in graph.nodes}
    for edge in graph.edges:
        predecessors[edge.consumer].add(edge.provider)
        successors[edge.provider].add(edge.consumer)

    waiting = {task: len(preds) for task, preds in predecessors.items()}
    ready = [task for task, count in waiting.items() if not count]
    heapq.heapify(ready)
    order = []
    while ready:
        task = heapq.heappop(ready)
        order.append(task)
        for successor in successors[task]:
            waiting[successor] -= 1
            if not waiting[successor]:
                heapq.heappush(ready, successor)
    order.extend(sorted(set(predecessors) - set(order)))

    lines = []
    for task in order:
        suffix = f" <- {', '.join(sorted(predecessors[task]))}" if predecessors[task] else ""
        lines.append(f"{task}{suffix}")
    return "\n".join(lines) + ("\n" if lines else "")
