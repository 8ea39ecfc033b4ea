"""Native configuration language: parser and emitter."""

import json
import logging
import re

from lark import Lark, Token, Tree
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput

from .constants import DEFAULT_SITE, DiagnosticCode, Direction, ValueKind
from .diagnostics import LocationMap, ParseDiagnostic, ParseError, check_configuration
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

_LOGGER = logging.getLogger(__name__)

GRAMMAR = r"""
    start: statement*

    ?statement: type_decl
              | instance_decl
              | bind_decl
              | contain_decl

    type_decl: "type" NAME "{" type_member* "}"

    ?type_member: port_decl
                | attribute_decl
                | artifact_decl

    port_decl: DIRECTION NAME ":" NAME
    attribute_decl: "attribute" NAME ":" VALUE_KIND
    artifact_decl: "artifact" STRING

    instance_decl: "instance" NAME ":" NAME [site] "{" assignment* "}"
    site: "@" (NAME | STRING)
    assignment: NAME "=" literal

    literal: STRING -> string_literal
           | INT -> integer_literal
           | "true" -> true_literal
           | "false" -> false_literal

    bind_decl: "bind" endpoint "->" endpoint
    endpoint: NAME "." NAME

    contain_decl: "contain" NAME NAME "as" NAME

    DIRECTION: "provides" | "requires"
    VALUE_KIND: "string" | "integer" | "boolean"
    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    INT: /-?[0-9]+/
    STRING: /"(\\.|[^"\\\n])*"/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

_PARSER = Lark(GRAMMAR, start="start", parser="lalr", propagate_positions=True)

_DIRECTIONS = {"provides": Direction.PROVIDED, "requires": Direction.REQUIRED}

HEADER = "# polydeploy native configuration"

_BARE_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_KEYWORDS = frozenset(
    {"type", "instance", "bind", "contain", "as", "attribute", "artifact", "true", "false"}
    | {"provides", "requires", "string", "integer", "boolean"}
)


def parse_native(text: str, filename: str = "<input>") -> Configuration:
    """Parse a native description into a validated configuration.

    Raises `ParseError` carrying located diagnostics when the text is not
    well-formed or does not describe a valid configuration.
    """
    locations = LocationMap(filename)
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as e:
        raise ParseError([_syntax_diagnostic(e, text, locations)]) from e

    builder = _NativeBuilder(locations)
    for statement in tree.children:
        builder.build(statement)

    if builder.diagnostics:
        raise ParseError(builder.diagnostics)

    config = builder.configuration()
    _LOGGER.debug("Parsed native description %s: %s", filename, config)
    return check_configuration(config, locations)


def _syntax_diagnostic(error: UnexpectedInput, text: str, locations: LocationMap) -> ParseDiagnostic:
    """Turn a lark error into a SYNTAX diagnostic inside the input."""
    line, column = getattr(error, "line", -1), getattr(error, "column", -1)
    if line is None or line < 1:
        lines = text.splitlines() or [""]
        line, column = len(lines), len(lines[-1]) + 1

    position = getattr(error, "pos_in_stream", None)
    if isinstance(error, UnexpectedCharacters) and position is not None and 0 <= position < len(text):
        message = f"unexpected character {text[position]!r}"
    elif isinstance(error, UnexpectedEOF):
        message = "unexpected end of input"
    else:
        token = getattr(error, "token", None)
        message = f"unexpected {token!r}" if token is not None else "syntax error"

    _LOGGER.debug("Syntax error at %s:%s: %s", line, column, message)
    return ParseDiagnostic(locations.at(line, column), DiagnosticCode.SYNTAX, message)


class _NativeBuilder:
    """Collects model elements from parse-tree statements."""

    def __init__(self, locations: LocationMap):
        self.locations = locations
        self.diagnostics: list[ParseDiagnostic] = []
        self.interfaces: dict[str, InterfaceSignature] = {}
        self.types: list[ComponentType] = []
        self.instances: list[Instance] = []
        self.bindings: list[Binding] = []
        self.containments: list[Containment] = []

    def build(self, statement: Tree):
        method = getattr(self, "_build_" + str(statement.data))
        method(statement)

    def configuration(self) -> Configuration:
        return Configuration(
            interfaces=tuple(self.interfaces.values()),
            types=tuple(self.types),
            instances=tuple(self.instances),
            bindings=tuple(self.bindings),
            containments=tuple(self.containments),
        )

    def _build_type_decl(self, tree: Tree):
        name_token, *members = tree.children
        name = str(name_token)
        self.locations.record("type", name, name_token.line, name_token.column)

        ports, attributes, artifact = [], [], None
        for member in members:
            if member.data == "port_decl":
                direction, port_name, interface = member.children
                self.locations.record("port", f"{name}.{port_name}", port_name.line, port_name.column)
                self.interfaces.setdefault(str(interface), InterfaceSignature(str(interface)))
                ports.append(PortDecl(str(port_name), _DIRECTIONS[str(direction)], str(interface)))

            elif member.data == "attribute_decl":
                attribute_name, kind = member.children
                self.locations.record(
                    "attribute", f"{name}.{attribute_name}", attribute_name.line, attribute_name.column
                )
                attributes.append(AttributeDecl(str(attribute_name), ValueKind(str(kind))))

            elif member.data == "artifact_decl":
                (literal,) = member.children
                if artifact is not None:
                    self.diagnostics.append(
                        ParseDiagnostic(
                            self.locations.at(literal.line, literal.column),
                            DiagnosticCode.DUPLICATE,
                            f"type {name} declares its artifact twice",
                        )
                    )
                artifact = self._string(literal)

        self.types.append(
            ComponentType(name, tuple(ports), tuple(attributes), artifact if artifact is not None else name)
        )

    def _build_instance_decl(self, tree: Tree):
        id_token, type_token, *rest = tree.children
        instance_id = str(id_token)
        self.locations.record("instance", instance_id, id_token.line, id_token.column)

        site = DEFAULT_SITE
        values = []
        for child in rest:
            if child is None:
                continue
            if child.data == "site":
                (token,) = child.children
                site = self._string(token) if token.type == "STRING" else str(token)
            elif child.data == "assignment":
                attribute_name, literal = child.children
                self.locations.record(
                    "value", f"{instance_id}.{attribute_name}", attribute_name.line, attribute_name.column
                )
                values.append(AttributeValue(str(attribute_name), self._literal(literal)))

        self.instances.append(Instance(instance_id, str(type_token), site, tuple(values)))

    def _build_bind_decl(self, tree: Tree):
        client, server = (tuple(str(t) for t in endpoint.children) for endpoint in tree.children)
        binding = Binding(client[0], client[1], server[0], server[1])
        self.locations.record("binding", binding.client_endpoint, tree.meta.line, tree.meta.column)
        self.bindings.append(binding)

    def _build_contain_decl(self, tree: Tree):
        parent, child, child_name = (str(t) for t in tree.children)
        containment = Containment(parent, child, child_name)
        self.locations.record("containment", containment.key, tree.meta.line, tree.meta.column)
        self.containments.append(containment)

    def _literal(self, literal: Tree):
        if literal.data == "true_literal":
            return True
        if literal.data == "false_literal":
            return False
        (token,) = literal.children
        if literal.data == "integer_literal":
            return int(token)
        return self._string(token)

    def _string(self, token: Token) -> str:
        try:
            return json.loads(str(token))
        except ValueError:
            self.diagnostics.append(
                ParseDiagnostic(
                    self.locations.at(token.line, token.column),
                    DiagnosticCode.SYNTAX,
                    f"invalid string literal {token}",
                )
            )
            return ""


def format_literal(value) -> str:
    """Native spelling of an attribute literal."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return json.dumps(value, ensure_ascii=False)


def format_site(site: str) -> str:
    """Native spelling of a site label, quoted unless it reads as a bare name."""
    if _BARE_NAME.fullmatch(site) and site not in _KEYWORDS:
        return site
    return json.dumps(site, ensure_ascii=False)


def emit_native(config: Configuration) -> str:
    """Render a configuration as native text, in canonical order."""
    config = config.canonical()
    blocks = []

    for component_type in config.types:
        lines = [f"type {component_type.name} {{"]
        for port in component_type.ports:
            keyword = "provides" if port.direction is Direction.PROVIDED else "requires"
            lines.append(f"    {keyword} {port.name}: {port.interface}")
        for attribute in component_type.attributes:
            lines.append(f"    attribute {attribute.name}: {attribute.kind.value}")
        lines.append(f"    artifact {json.dumps(component_type.artifact, ensure_ascii=False)}")
        lines.append("}")
        blocks.append("\n".join(lines))

    for instance in config.instances:
        site = f" @ {format_site(instance.site)}" if instance.site != DEFAULT_SITE else ""
        lines = [f"instance {instance.id}: {instance.type}{site} {{"]
        for value in instance.attribute_values:
            lines.append(f"    {value.name} = {format_literal(value.value)}")
        lines.append("}")
        blocks.append("\n".join(lines))

    if config.bindings:
        blocks.append(
            "\n".join(f"bind {b.client_endpoint} -> {b.server_endpoint}" for b in config.bindings)
        )

    if config.containments:
        blocks.append(
            "\n".join(f"contain {c.parent} {c.child} as {c.child_name}" for c in config.containments)
        )

    if not blocks:
        return ""

    return HEADER + "\n\n" + "\n\n".join(blocks) + "\n"
