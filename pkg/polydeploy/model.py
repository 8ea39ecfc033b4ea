"""Platform-independent configuration model."""

from dataclasses import dataclass, field, replace
import logging

import networkx as nx

from .constants import DEFAULT_SITE, Direction, ValueKind, ViolationCode

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class InterfaceSignature:
    """Opaque named contract shared by a provided and a required port."""

    name: str


@dataclass(frozen=True)
class PortDecl:
    """A provided or required port of a component type."""

    name: str
    direction: Direction
    interface: str


@dataclass(frozen=True)
class AttributeDecl:
    """An attribute declared on a component type."""

    name: str
    kind: ValueKind


@dataclass(frozen=True)
class AttributeValue:
    """A literal assigned to an attribute of an instance."""

    name: str
    value: str | int | bool


@dataclass(frozen=True)
class ComponentType:
    """A component type: ports, attribute declarations and the artifact standing for its binary."""

    name: str
    ports: tuple[PortDecl, ...] = ()
    attributes: tuple[AttributeDecl, ...] = ()
    artifact: str = ""

    def port(self, name: str) -> PortDecl | None:
        """Port declared under `name`, if any."""
        return next((p for p in self.ports if p.name == name), None)

    def attribute(self, name: str) -> AttributeDecl | None:
        """Attribute declared under `name`, if any."""
        return next((a for a in self.attributes if a.name == name), None)

    @property
    def required_ports(self) -> tuple[PortDecl, ...]:
        return tuple(p for p in self.ports if p.direction is Direction.REQUIRED)

    @property
    def provided_ports(self) -> tuple[PortDecl, ...]:
        return tuple(p for p in self.ports if p.direction is Direction.PROVIDED)


@dataclass(frozen=True)
class Instance:
    """A component instance to create on a site."""

    id: str
    type: str
    site: str = DEFAULT_SITE
    attribute_values: tuple[AttributeValue, ...] = ()


@dataclass(frozen=True)
class Binding:
    """Connection from a required port of a client to a provided port of a server."""

    client_instance: str
    client_port: str
    server_instance: str
    server_port: str

    @property
    def client_endpoint(self) -> str:
        return f"{self.client_instance}.{self.client_port}"

    @property
    def server_endpoint(self) -> str:
        return f"{self.server_instance}.{self.server_port}"


@dataclass(frozen=True)
class Containment:
    """Parent/child relation of hierarchical component models."""

    parent: str
    child: str
    child_name: str

    @property
    def key(self) -> str:
        return f"{self.parent}>{self.child}"


@dataclass(frozen=True)
class Configuration:
    """The abstract configuration every frontend targets and the planner consumes."""

    interfaces: tuple[InterfaceSignature, ...] = ()
    types: tuple[ComponentType, ...] = ()
    instances: tuple[Instance, ...] = ()
    bindings: tuple[Binding, ...] = ()
    containments: tuple[Containment, ...] = ()

    def type_named(self, name: str) -> ComponentType | None:
        """Component type declared under `name`, if any."""
        return next((t for t in self.types if t.name == name), None)

    def instance(self, instance_id: str) -> Instance | None:
        """Instance declared under `instance_id`, if any."""
        return next((i for i in self.instances if i.id == instance_id), None)

    def canonical(self) -> "Configuration":
        """Copy with every list sorted by identifier, ports and attributes included."""
        return Configuration(
            interfaces=tuple(sorted(self.interfaces, key=lambda i: i.name)),
            types=tuple(
                sorted(
                    (
                        replace(
                            t,
                            ports=tuple(sorted(t.ports, key=lambda p: p.name)),
                            attributes=tuple(sorted(t.attributes, key=lambda a: a.name)),
                        )
                        for t in self.types
                    ),
                    key=lambda t: t.name,
                )
            ),
            instances=tuple(
                sorted(
                    (
                        replace(i, attribute_values=tuple(sorted(i.attribute_values, key=lambda v: v.name)))
                        for i in self.instances
                    ),
                    key=lambda i: i.id,
                )
            ),
            bindings=tuple(sorted(self.bindings, key=lambda b: (b.client_instance, b.client_port))),
            containments=tuple(sorted(self.containments, key=lambda c: (c.parent, c.child))),
        )

    def __str__(self):
        """String representation of configuration."""
        return (
            f"Configuration({len(self.types)} types, {len(self.instances)} instances, "
            f"{len(self.bindings)} bindings, {len(self.containments)} containments)"
        )


@dataclass(frozen=True)
class Violation:
    """One broken invariant of a configuration.

    `element` names the kind of offending element (interface, type, port,
    attribute, instance, value, binding, containment) and `subject` its
    identifier, so frontends can map a violation back to a source location.
    """

    code: ViolationCode
    element: str
    subject: str
    message: str
    members: tuple[str, ...] = field(default=())

    def __str__(self):
        """String representation of violation."""
        return f"{self.code.value} {self.element} {self.subject}: {self.message}"


def validate(config: Configuration) -> list[Violation]:
    """Report every invariant violation of `config`; an empty list means well-formed."""
    report = _Validator(config).run()
    _LOGGER.debug("Validated %s: %d violations", config, len(report))
    return report


class _Validator:
    """Single validation pass over one configuration."""

    def __init__(self, config: Configuration):
        self.config = config
        self.report: list[Violation] = []
        self.interfaces: set[str] = set()
        self.types: dict[str, ComponentType] = {}
        self.instances: dict[str, Instance] = {}

    def _add(self, code, element, subject, message, members=()):
        self.report.append(Violation(code, element, subject, message, tuple(members)))

    def run(self) -> list[Violation]:
        self._check_interfaces()
        self._check_types()
        self._check_instances()
        self._check_bindings()
        self._check_containments()
        return self.report

    def _check_interfaces(self):
        for signature in self.config.interfaces:
            if not signature.name:
                self._add(ViolationCode.EMPTY_NAME, "interface", "", "interface signature has an empty name")
            elif signature.name in self.interfaces:
                self._add(
                    ViolationCode.DUPLICATE_INTERFACE,
                    "interface",
                    signature.name,
                    f"interface {signature.name} declared twice",
                )
            self.interfaces.add(signature.name)

    def _check_types(self):
        for component_type in self.config.types:
            name = component_type.name
            if not name:
                self._add(ViolationCode.EMPTY_NAME, "type", "", "component type has an empty name")
            elif name in self.types:
                self._add(ViolationCode.DUPLICATE_TYPE, "type", name, f"type {name} declared twice")
                continue
            self.types[name] = component_type

            seen_ports = set()
            for port in component_type.ports:
                subject = f"{name}.{port.name}"
                if port.name in seen_ports:
                    self._add(ViolationCode.DUPLICATE_PORT, "port", subject, f"port {subject} declared twice")
                seen_ports.add(port.name)
                if port.interface not in self.interfaces:
                    self._add(
                        ViolationCode.UNKNOWN_INTERFACE,
                        "port",
                        subject,
                        f"port {subject} uses undeclared interface {port.interface}",
                    )

            seen_attributes = set()
            for attribute in component_type.attributes:
                subject = f"{name}.{attribute.name}"
                if attribute.name in seen_attributes:
                    self._add(
                        ViolationCode.DUPLICATE_ATTRIBUTE, "attribute", subject, f"attribute {subject} declared twice"
                    )
                seen_attributes.add(attribute.name)

    def _check_instances(self):
        for instance in self.config.instances:
            if not instance.id:
                self._add(ViolationCode.EMPTY_NAME, "instance", "", "instance has an empty identifier")
            elif instance.id in self.instances:
                self._add(
                    ViolationCode.DUPLICATE_INSTANCE, "instance", instance.id, f"instance {instance.id} declared twice"
                )
                continue
            self.instances[instance.id] = instance

            component_type = self.types.get(instance.type)
            if component_type is None:
                self._add(
                    ViolationCode.UNKNOWN_TYPE,
                    "instance",
                    instance.id,
                    f"instance {instance.id} has undeclared type {instance.type}",
                )
                continue

            assigned = set()
            for value in instance.attribute_values:
                subject = f"{instance.id}.{value.name}"
                if value.name in assigned:
                    self._add(ViolationCode.DUPLICATE_VALUE, "value", subject, f"attribute {subject} assigned twice")
                    continue
                assigned.add(value.name)

                declared = component_type.attribute(value.name)
                if declared is None:
                    self._add(
                        ViolationCode.UNKNOWN_ATTRIBUTE,
                        "value",
                        subject,
                        f"type {component_type.name} declares no attribute {value.name}",
                    )
                elif not declared.kind.accepts(value.value):
                    self._add(
                        ViolationCode.ATTRIBUTE_KIND,
                        "value",
                        subject,
                        f"attribute {subject} expects {declared.kind.value}, got {value.value!r}",
                    )

    def _resolve_port(self, binding_subject, instance_id, port_name):
        """Port of an instance, reporting what cannot be resolved."""
        instance = self.instances.get(instance_id)
        if instance is None:
            self._add(
                ViolationCode.UNKNOWN_INSTANCE, "binding", binding_subject, f"unknown instance {instance_id}"
            )
            return None

        component_type = self.types.get(instance.type)
        if component_type is None:
            # already reported on the instance
            return None

        port = component_type.port(port_name)
        if port is None:
            self._add(
                ViolationCode.UNKNOWN_PORT,
                "binding",
                binding_subject,
                f"type {component_type.name} has no port {port_name}",
            )
        return port

    def _check_bindings(self):
        bound = set()
        for binding in self.config.bindings:
            subject = binding.client_endpoint
            client_port = self._resolve_port(subject, binding.client_instance, binding.client_port)
            server_port = self._resolve_port(subject, binding.server_instance, binding.server_port)

            if (binding.client_instance, binding.client_port) in bound:
                self._add(
                    ViolationCode.AMBIGUOUS_BINDING, "binding", subject, f"port {subject} is bound more than once"
                )
                continue
            bound.add((binding.client_instance, binding.client_port))

            if client_port is None or server_port is None:
                continue

            if client_port.direction is not Direction.REQUIRED or server_port.direction is not Direction.PROVIDED:
                self._add(
                    ViolationCode.BINDING_DIRECTION,
                    "binding",
                    subject,
                    f"binding {subject} -> {binding.server_endpoint} must go from a required to a provided port",
                )
            elif client_port.interface != server_port.interface:
                self._add(
                    ViolationCode.INTERFACE_MISMATCH,
                    "binding",
                    subject,
                    f"{client_port.interface} cannot be bound to {server_port.interface}",
                )

    def _check_containments(self):
        parents: dict[str, str] = {}
        child_names: set[tuple[str, str]] = set()
        graph = nx.DiGraph()

        for containment in self.config.containments:
            subject = containment.key
            unknown = [i for i in (containment.parent, containment.child) if i not in self.instances]
            for instance_id in unknown:
                self._add(
                    ViolationCode.UNKNOWN_INSTANCE, "containment", subject, f"unknown instance {instance_id}"
                )
            if unknown:
                continue

            if containment.parent == containment.child:
                self._add(
                    ViolationCode.CONTAINMENT_SELF,
                    "containment",
                    subject,
                    f"instance {containment.parent} cannot contain itself",
                    (containment.parent,),
                )
                continue

            if containment.child in parents:
                self._add(
                    ViolationCode.MULTIPLE_PARENTS,
                    "containment",
                    subject,
                    f"instance {containment.child} already has parent {parents[containment.child]}",
                )
            else:
                parents[containment.child] = containment.parent

            if (containment.parent, containment.child_name) in child_names:
                self._add(
                    ViolationCode.DUPLICATE_CHILD_NAME,
                    "containment",
                    subject,
                    f"{containment.parent} already has a child named {containment.child_name}",
                )
            child_names.add((containment.parent, containment.child_name))

            graph.add_edge(containment.parent, containment.child, key=subject)

        components = sorted(sorted(c) for c in nx.strongly_connected_components(graph) if len(c) > 1)
        for members in components:
            keys = sorted(
                graph.edges[u, v]["key"] for u, v in graph.subgraph(members).edges
            )
            self._add(
                ViolationCode.CONTAINMENT_CYCLE,
                "containment",
                keys[0],
                f"containment cycle through {', '.join(members)}",
                members,
            )
