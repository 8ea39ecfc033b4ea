"""XML architecture description subset: parser and emitter."""

from dataclasses import dataclass, field
import logging
import re
from xml.parsers import expat
from xml.sax.saxutils import quoteattr

from .constants import DiagnosticCode, Direction, ValueKind
from .diagnostics import LocationMap, ParseDiagnostic, ParseError, SourceLocation, check_configuration
from .model import (
    AttributeDecl,
    AttributeValue,
    Binding,
    ComponentType,
    Configuration,
    Containment,
    Instance,
    InterfaceSignature,
    PortDecl,
)
from .native import format_literal

_LOGGER = logging.getLogger(__name__)

_ROLES = {"server": Direction.PROVIDED, "client": Direction.REQUIRED}

_INTEGER = re.compile(r"-?[0-9]+")

# Element name -> (allowed parents, required XML attributes).
_ELEMENTS = {
    "definition": ((None,), ("name",)),
    "component": (("definition", "component"), ("name", "definition")),
    "interface": (("component",), ("name", "role", "signature")),
    "attributes": (("component",), ()),
    "attribute": (("attributes",), ("name", "value")),
    "binding": (("definition", "component"), ("client", "server")),
}


@dataclass
class _Element:
    """An element of the document with the position of its start tag."""

    tag: str
    attrs: dict
    location: SourceLocation
    children: list = field(default_factory=list)


def infer_literal(text: str):
    """Typed literal for an attribute value written as XML text."""
    if text in ("true", "false"):
        return text == "true"
    if _INTEGER.fullmatch(text):
        return int(text)
    return text


class _AdlReader:
    """Builds an element tree from expat events, checking the closed element set."""

    def __init__(self, locations: LocationMap):
        self.locations = locations
        self.diagnostics: list[ParseDiagnostic] = []
        self.root: _Element | None = None
        self._stack: list[_Element | None] = []
        self._parser = expat.ParserCreate()
        self._parser.StartElementHandler = self._start
        self._parser.EndElementHandler = self._end

    def _here(self) -> SourceLocation:
        return self.locations.at(self._parser.CurrentLineNumber, self._parser.CurrentColumnNumber + 1)

    def read(self, text: str) -> _Element | None:
        try:
            self._parser.Parse(text, True)
        except expat.ExpatError as e:
            self.diagnostics.append(
                ParseDiagnostic(
                    self.locations.at(e.lineno, e.offset + 1),
                    DiagnosticCode.SYNTAX,
                    expat.ErrorString(e.code),
                )
            )
        return self.root

    def _start(self, tag, attrs):
        location = self._here()
        parent = self._stack[-1] if self._stack else None
        parent_tag = parent.tag if parent is not None else None

        if self._stack and parent is None:
            # inside an already rejected element
            self._stack.append(None)
            return

        allowed = _ELEMENTS.get(tag)
        if allowed is None or parent_tag not in allowed[0]:
            where = f"inside <{parent_tag}>" if parent_tag else "as document root"
            self.diagnostics.append(
                ParseDiagnostic(location, DiagnosticCode.UNSUPPORTED_ELEMENT, f"<{tag}> is not supported {where}")
            )
            self._stack.append(None)
            return

        missing = [name for name in allowed[1] if name not in attrs]
        if missing:
            self.diagnostics.append(
                ParseDiagnostic(
                    location, DiagnosticCode.SYNTAX, f"<{tag}> lacks attribute(s) {', '.join(missing)}"
                )
            )

        element = _Element(tag, dict(attrs), location)
        if parent is None:
            self.root = element
        else:
            parent.children.append(element)
        self._stack.append(element)

    def _end(self, tag):
        self._stack.pop()


class _AdlBuilder:
    """Maps the element tree onto configuration elements."""

    def __init__(self, locations: LocationMap):
        self.locations = locations
        self.diagnostics: list[ParseDiagnostic] = []
        self.interfaces: dict[str, InterfaceSignature] = {}
        self.ports: dict[str, dict[str, PortDecl]] = {}
        self.attributes: dict[str, dict[str, AttributeDecl]] = {}
        self.instances: list[Instance] = []
        self.bindings: list[Binding] = []
        self.containments: list[Containment] = []

    def _record(self, element, subject, location: SourceLocation):
        self.locations.record(element, subject, location.line, location.column)

    def _conflict(self, location, message):
        self.diagnostics.append(ParseDiagnostic(location, DiagnosticCode.INVALID, message))

    def build(self, root: _Element):
        for child in root.children:
            self._build(child, None)

    def _build(self, element: _Element, parent_id: str | None):
        method = getattr(self, "_build_" + element.tag)
        method(element, parent_id)

    def _build_component(self, element: _Element, parent_id: str | None):
        instance_id = element.attrs["name"]
        type_name = element.attrs["definition"]
        self._record("instance", instance_id, element.location)
        self._record("type", type_name, element.location)
        ports = self.ports.setdefault(type_name, {})
        attributes = self.attributes.setdefault(type_name, {})

        if parent_id is not None:
            containment = Containment(parent_id, instance_id, instance_id)
            self._record("containment", containment.key, element.location)
            self.containments.append(containment)

        values = []
        for child in element.children:
            if child.tag == "interface":
                self._declare_port(type_name, ports, child)
            elif child.tag == "attributes":
                for attribute in child.children:
                    value = self._declare_attribute(type_name, attributes, instance_id, attribute)
                    if value is not None:
                        values.append(value)
            else:
                self._build(child, instance_id)

        self.instances.append(Instance(instance_id, type_name, attribute_values=tuple(values)))

    def _declare_port(self, type_name, ports, element: _Element):
        name = element.attrs["name"]
        role = element.attrs["role"]
        if role not in _ROLES:
            self.diagnostics.append(
                ParseDiagnostic(element.location, DiagnosticCode.SYNTAX, f"role must be server or client, not {role!r}")
            )
            return

        port = PortDecl(name, _ROLES[role], element.attrs["signature"])
        self.interfaces.setdefault(port.interface, InterfaceSignature(port.interface))
        known = ports.setdefault(name, port)
        if known != port:
            self._conflict(element.location, f"interface {name} of {type_name} redeclared differently")
        self._record("port", f"{type_name}.{name}", element.location)

    def _declare_attribute(self, type_name, attributes, instance_id, element: _Element):
        name = element.attrs["name"]
        value = infer_literal(element.attrs["value"])
        declaration = AttributeDecl(name, ValueKind.of(value))
        known = attributes.setdefault(name, declaration)
        if known != declaration:
            self._conflict(element.location, f"attribute {name} of {type_name} used with another kind")
            return None
        self._record("attribute", f"{type_name}.{name}", element.location)
        self._record("value", f"{instance_id}.{name}", element.location)
        return AttributeValue(name, value)

    def _build_binding(self, element: _Element, parent_id: str | None):
        endpoints = []
        for key in ("client", "server"):
            instance_id, dot, port = element.attrs[key].partition(".")
            if not dot or not instance_id or not port:
                self.diagnostics.append(
                    ParseDiagnostic(
                        element.location, DiagnosticCode.SYNTAX, f"{key} endpoint must be component.port"
                    )
                )
                return
            endpoints.append((instance_id, port))

        (client, client_port), (server, server_port) = endpoints
        binding = Binding(client, client_port, server, server_port)
        self._record("binding", binding.client_endpoint, element.location)
        self.bindings.append(binding)

    def configuration(self) -> Configuration:
        types = tuple(
            ComponentType(
                name,
                tuple(self.ports[name].values()),
                tuple(self.attributes[name].values()),
                artifact=name,
            )
            for name in self.ports
        )
        return Configuration(
            interfaces=tuple(self.interfaces.values()),
            types=types,
            instances=tuple(self.instances),
            bindings=tuple(self.bindings),
            containments=tuple(self.containments),
        )


def parse_adl(xml: str, filename: str = "<input>") -> Configuration:
    """Parse an XML architecture definition into a validated configuration.

    Nested component elements become containment records. Raises
    `ParseError` with located diagnostics on failure.
    """
    locations = LocationMap(filename)
    reader = _AdlReader(locations)
    root = reader.read(xml)

    # expat reports a document without root element as a syntax error
    if reader.diagnostics or root is None:
        raise ParseError(reader.diagnostics)

    builder = _AdlBuilder(locations)
    builder.build(root)
    if builder.diagnostics:
        raise ParseError(builder.diagnostics)

    config = builder.configuration()
    _LOGGER.debug("Parsed architecture definition %s: %s", filename, config)
    return check_configuration(config, locations)


def emit_adl(config: Configuration, name: str = "application") -> str:
    """Render a configuration as an XML architecture definition.

    Sites, artifacts and unassigned attribute declarations have no
    spelling in this format and are dropped.
    """
    config = config.canonical()
    types = {t.name: t for t in config.types}
    children: dict[str, list[str]] = {}
    for containment in config.containments:
        children.setdefault(containment.parent, []).append(containment.child)
    contained = {c.child for c in config.containments}

    lines = [f"<definition name={quoteattr(name)}>"]

    def component(instance: Instance, depth: int):
        pad = "  " * depth
        lines.append(f"{pad}<component name={quoteattr(instance.id)} definition={quoteattr(instance.type)}>")
        for port in types[instance.type].ports:
            role = "server" if port.direction is Direction.PROVIDED else "client"
            lines.append(
                f"{pad}  <interface name={quoteattr(port.name)} role=\"{role}\" signature={quoteattr(port.interface)}/>"
            )
        if instance.attribute_values:
            lines.append(f"{pad}  <attributes>")
            for value in instance.attribute_values:
                text = value.value if isinstance(value.value, str) else format_literal(value.value)
                lines.append(f"{pad}    <attribute name={quoteattr(value.name)} value={quoteattr(text)}/>")
            lines.append(f"{pad}  </attributes>")
        for child_id in children.get(instance.id, ()):
            component(config.instance(child_id), depth + 1)
        lines.append(f"{pad}</component>")

    for instance in config.instances:
        if instance.id not in contained:
            component(instance, 1)

    for binding in config.bindings:
        lines.append(
            f"  <binding client={quoteattr(binding.client_endpoint)} server={quoteattr(binding.server_endpoint)}/>"
        )

    lines.append("</definition>")
    return "\n".join(lines) + "\n"
