"""Simulated component runtimes driven through the abstract deployment API."""

import contextlib
from dataclasses import dataclass, field
import itertools
import json
import logging
import threading

from Crypto.Hash import SHA256
import rx

from .constants import Direction, ErrorCode
from .model import ComponentType
from .planner import BackendCapabilities

_LOGGER = logging.getLogger(__name__)

_RUNTIME_IDS = itertools.count(1)


class DeploymentError(Exception):
    """Raised by a runtime when a deployment API call is rejected."""

    def __init__(self, code: ErrorCode, message: str):
        """Initialize deployment error with its code."""
        super().__init__(f"{code.value}: {message}")
        self.code = code


@dataclass(frozen=True)
class FactoryRef:
    """Handle on an installed factory."""

    runtime: int
    handle: str


@dataclass(frozen=True)
class InstanceRef:
    """Handle on a component instance."""

    runtime: int
    handle: str


@dataclass(frozen=True)
class BindingRef:
    """Handle on a provided port of an instance."""

    runtime: int
    handle: str
    instance: str
    port: str


@dataclass(frozen=True)
class InstanceState:
    """Observable state of one instance."""

    handle: str
    type: str
    site: str
    attributes: tuple[tuple[str, object], ...] = ()
    links: tuple[tuple[str, str, str], ...] = ()
    started: bool = False


@dataclass(frozen=True)
class RuntimeSnapshot:
    """Observable end-state of a runtime, canonically ordered."""

    instances: tuple[InstanceState, ...] = ()
    containment: tuple[tuple[str, str, str], ...] = ()
    factories: tuple[tuple[str, str], ...] = ()

    def instance(self, handle: str) -> InstanceState | None:
        """State of the instance behind `handle`, if any."""
        return next((i for i in self.instances if i.handle == handle), None)

    def without_containment(self) -> "RuntimeSnapshot":
        """Same snapshot with the containment field cleared."""
        return RuntimeSnapshot(self.instances, (), self.factories)

    def serialize(self) -> str:
        """One line per fact, lexicographically sorted."""
        facts = [f"factory {type_name} {site}" for type_name, site in self.factories]
        for instance in self.instances:
            facts.append(
                f"instance {instance.handle} type={instance.type} site={instance.site} "
                f"started={'true' if instance.started else 'false'}"
            )
            facts.extend(
                f"attribute {instance.handle} {name} = {json.dumps(value, ensure_ascii=False)}"
                for name, value in instance.attributes
            )
            facts.extend(
                f"link {instance.handle}.{port} -> {server}.{server_port}"
                for port, server, server_port in instance.links
            )
        facts.extend(f"contain {parent} {child} as {name}" for parent, child, name in self.containment)
        return "".join(f"{fact}\n" for fact in sorted(facts))

    def digest(self) -> str:
        """SHA-256 of the serialized snapshot."""
        return SHA256.new(self.serialize().encode()).hexdigest()

    def __str__(self):
        """String representation of runtime snapshot."""
        started = sum(1 for i in self.instances if i.started)
        return f"RuntimeSnapshot({len(self.instances)} instances, {started} started, {len(self.factories)} factories)"


@dataclass
class _InstanceRecord:
    type: ComponentType
    site: str
    attributes: dict = field(default_factory=dict)
    links: dict = field(default_factory=dict)
    started: bool = False
    lock: threading.Lock = field(default_factory=threading.Lock)

    def state(self, handle: str) -> InstanceState:
        return InstanceState(
            handle,
            self.type.name,
            self.site,
            tuple(sorted(self.attributes.items())),
            tuple(sorted((port, ref.instance, ref.port) for port, ref in self.links.items())),
            self.started,
        )


class Runtime:
    """Mock component runtime implementing the abstract deployment API.

    Every call holds the registry lock throughout. Mutators of an instance
    also hold that instance's lock, taken in handle order when a call
    touches two instances. State is published before the registry lock is
    released. Handles are never recycled.
    """

    name = "runtime"
    supports_hierarchy = False

    # Platform operation each abstract call stands for, used in logs.
    OPERATIONS = {
        "install": "install",
        "instantiate": "instantiate",
        "set_attribute": "set_attribute",
        "get_binding": "get_binding",
        "bind": "bind",
        "add_sub_component": "add_sub_component",
        "start": "start",
    }

    def __init__(self, types=()):
        """Initialize runtime with its component type registry."""
        self.runtime_id = next(_RUNTIME_IDS)
        self._types: dict[str, ComponentType] = {t.name: t for t in types}
        self._factories: dict[str, tuple[str, str]] = {}
        self._instances: dict[str, _InstanceRecord] = {}
        self._parents: dict[str, tuple[str, str]] = {}
        self._counter = itertools.count(1)
        self._lock = threading.RLock()

        self.state = rx.subject.BehaviorSubject(self.snapshot())

        _LOGGER.info("Initialized %s runtime #%s with %d type(s)", self.name, self.runtime_id, len(self._types))

    @property
    def capabilities(self) -> BackendCapabilities:
        return BackendCapabilities(self.name, self.supports_hierarchy)

    def register_type(self, component_type: ComponentType):
        """Make a component type installable."""
        with self._lock:
            self._types[component_type.name] = component_type

    def _log(self, call, *args):
        _LOGGER.debug("%s %s%s", self.name, self.OPERATIONS[call], args)

    def _publish(self):
        self.state.on_next(self.snapshot())

    def _check_ref(self, ref, expected_type, registry):
        if not isinstance(ref, expected_type) or ref.runtime != self.runtime_id or ref.handle not in registry:
            raise DeploymentError(ErrorCode.STALE_HANDLE, f"{ref!r} is not a live handle of runtime #{self.runtime_id}")

    def _record(self, ref: InstanceRef) -> _InstanceRecord:
        self._check_ref(ref, InstanceRef, self._instances)
        return self._instances[ref.handle]

    @staticmethod
    def _check_not_started(ref: InstanceRef, record: _InstanceRecord):
        if record.started:
            raise DeploymentError(ErrorCode.ALREADY_STARTED, f"instance {ref.handle} is already started")

    def install(self, type_name: str, site: str) -> FactoryRef:
        """Install the factory of a type on a site; idempotent per (type, site)."""
        self._log("install", type_name, site)
        with self._lock:
            if type_name not in self._types:
                raise DeploymentError(ErrorCode.UNKNOWN_TYPE, f"type {type_name} is not registered")
            handle = f"{type_name}@{site}"
            if handle not in self._factories:
                self._factories[handle] = (type_name, site)
                self._publish()
            return FactoryRef(self.runtime_id, handle)

    def instantiate(self, factory: FactoryRef, name: str | None = None) -> InstanceRef:
        """Create an unstarted instance from a factory.

        The handle is `name` when given, otherwise a generated `#<n>`.
        """
        self._log("instantiate", getattr(factory, "handle", factory), name)
        with self._lock:
            self._check_ref(factory, FactoryRef, self._factories)
            handle = name if name is not None else f"#{next(self._counter)}"
            if handle in self._instances:
                raise DeploymentError(ErrorCode.DUPLICATE_INSTANCE, f"instance {handle} already exists")
            type_name, site = self._factories[factory.handle]
            self._instances[handle] = _InstanceRecord(self._types[type_name], site)
            self._publish()
            return InstanceRef(self.runtime_id, handle)

    def set_attribute(self, instance: InstanceRef, name: str, value):
        """Assign an attribute of an unstarted instance; last write wins."""
        self._log("set_attribute", getattr(instance, "handle", instance), name, value)
        with self._lock:
            record = self._record(instance)
            with record.lock:
                self._check_not_started(instance, record)
                declared = record.type.attribute(name)
                if declared is None:
                    raise DeploymentError(
                        ErrorCode.UNKNOWN_ATTRIBUTE, f"type {record.type.name} has no attribute {name}"
                    )
                if not declared.kind.accepts(value):
                    raise DeploymentError(
                        ErrorCode.TYPE_MISMATCH, f"attribute {name} expects {declared.kind.value}, got {value!r}"
                    )
                record.attributes[name] = value
            self._publish()

    def get_binding(self, instance: InstanceRef, provided_port: str) -> BindingRef:
        """Reference on a provided port; stable per (instance, port)."""
        self._log("get_binding", getattr(instance, "handle", instance), provided_port)
        with self._lock:
            record = self._record(instance)
            port = record.type.port(provided_port)
            if port is None or port.direction is not Direction.PROVIDED:
                raise DeploymentError(
                    ErrorCode.UNKNOWN_PORT, f"type {record.type.name} provides no port {provided_port}"
                )
        return BindingRef(self.runtime_id, f"{instance.handle}.{provided_port}", instance.handle, provided_port)

    def bind(self, instance: InstanceRef, required_port: str, target: BindingRef):
        """Connect a required port of an unstarted instance to a provided port."""
        self._log("bind", getattr(instance, "handle", instance), required_port, getattr(target, "handle", target))
        with self._lock:
            record = self._record(instance)
            if (
                not isinstance(target, BindingRef)
                or target.runtime != self.runtime_id
                or target.instance not in self._instances
            ):
                raise DeploymentError(ErrorCode.STALE_HANDLE, f"{target!r} is not a live binding reference")
            server_port = self._instances[target.instance].type.port(target.port)
            if server_port is None or server_port.direction is not Direction.PROVIDED:
                raise DeploymentError(ErrorCode.STALE_HANDLE, f"{target!r} does not reference a provided port")
            with record.lock:
                self._check_not_started(instance, record)
                port = record.type.port(required_port)
                if port is None or port.direction is not Direction.REQUIRED:
                    raise DeploymentError(
                        ErrorCode.UNKNOWN_PORT, f"type {record.type.name} requires no port {required_port}"
                    )
                if required_port in record.links:
                    raise DeploymentError(
                        ErrorCode.ALREADY_BOUND, f"port {instance.handle}.{required_port} is bound"
                    )
                if server_port.interface != port.interface:
                    raise DeploymentError(
                        ErrorCode.INTERFACE_MISMATCH, f"{port.interface} cannot be bound to {server_port.interface}"
                    )
                record.links[required_port] = target
            self._publish()

    def add_sub_component(self, parent: InstanceRef, child: InstanceRef, name: str):
        """Place `child` inside `parent` under `name`."""
        self._log("add_sub_component", getattr(parent, "handle", parent), getattr(child, "handle", child), name)
        raise DeploymentError(ErrorCode.UNSUPPORTED, f"{self.name} runtime has no hierarchical components")

    def start(self, instance: InstanceRef):
        """Start an instance once all its required ports are bound."""
        self._log("start", getattr(instance, "handle", instance))
        with self._lock:
            record = self._record(instance)
            with record.lock:
                self._check_not_started(instance, record)
                unbound = [p.name for p in record.type.required_ports if p.name not in record.links]
                if unbound:
                    raise DeploymentError(
                        ErrorCode.UNBOUND_PORT,
                        f"instance {instance.handle} has unbound port(s) {', '.join(unbound)}",
                    )
                record.started = True
            self._publish()

    def snapshot(self) -> RuntimeSnapshot:
        """Current observable state."""
        with self._lock:
            instances = []
            for handle in sorted(self._instances):
                record = self._instances[handle]
                with record.lock:
                    instances.append(record.state(handle))
            return RuntimeSnapshot(
                instances=tuple(instances),
                containment=tuple(
                    sorted((parent, child, name) for child, (parent, name) in self._parents.items())
                ),
                factories=tuple(sorted(self._factories.values())),
            )


class FlatRuntime(Runtime):
    """Runtime without component hierarchy, start acting as a configuration-complete gate."""

    name = "flat"
    supports_hierarchy = False

    OPERATIONS = {
        "install": "install_home",
        "instantiate": "create_component",
        "set_attribute": "set_attribute",
        "get_binding": "provide_facet",
        "bind": "connect",
        "add_sub_component": "add_sub_component",
        "start": "configuration_complete",
    }


class HierarchicalRuntime(Runtime):
    """Runtime whose components can contain sub-components."""

    name = "hier"
    supports_hierarchy = True

    OPERATIONS = {
        "install": "newFcInstance",
        "instantiate": "Factory.newFcInstance",
        "set_attribute": "AttributeController.set",
        "get_binding": "getFcInterface",
        "bind": "bindFc",
        "add_sub_component": "addFcSubComponent",
        "start": "startFc",
    }

    def add_sub_component(self, parent: InstanceRef, child: InstanceRef, name: str):
        """Place `child` inside `parent` under `name`, refusing cycles."""
        self._log("add_sub_component", getattr(parent, "handle", parent), getattr(child, "handle", child), name)
        with self._lock:
            records = {parent.handle: self._record(parent), child.handle: self._record(child)}
            with contextlib.ExitStack() as stack:
                for handle in sorted(records):
                    stack.enter_context(records[handle].lock)
                self._check_not_started(parent, records[parent.handle])
                self._check_not_started(child, records[child.handle])
                self._contain(parent, child, name)
            self._publish()

    def _contain(self, parent: InstanceRef, child: InstanceRef, name: str):
        ancestor = parent.handle
        while ancestor is not None:
            if ancestor == child.handle:
                raise DeploymentError(
                    ErrorCode.CYCLE, f"adding {child.handle} under {parent.handle} creates a containment cycle"
                )
            ancestor = self._parents.get(ancestor, (None, None))[0]

        if child.handle in self._parents:
            raise DeploymentError(
                ErrorCode.ALREADY_CONTAINED, f"{child.handle} is already inside {self._parents[child.handle][0]}"
            )
        if any(p == parent.handle and n == name for p, n in self._parents.values()):
            raise DeploymentError(ErrorCode.ALREADY_CONTAINED, f"{parent.handle} already has a child named {name}")

        self._parents[child.handle] = (parent.handle, name)


RUNTIMES = {runtime.name: runtime for runtime in (FlatRuntime, HierarchicalRuntime)}
