"""Test module for the XML architecture definition frontend."""
import networkx as nx
import pytest

from polydeploy.adl import emit_adl, infer_literal, parse_adl
from polydeploy.constants import DiagnosticCode
from polydeploy.diagnostics import ParseError
from polydeploy.model import Configuration
from polydeploy.planner import BackendCapabilities, compile_plan
from tests.conftest import read_fixture

HIER = BackendCapabilities("hier", True)


def parse_failure(xml: str) -> ParseError:
    with pytest.raises(ParseError) as excinfo:
        parse_adl(xml, filename="broken.adl")
    return excinfo.value


def as_networkx(graph) -> nx.DiGraph:
    result = nx.DiGraph()
    for node in graph.nodes:
        result.add_node(node.id, kind=node.kind)
    for edge in graph.edges:
        result.add_edge(edge.provider, edge.consumer, interface=edge.interface)
    return result


def test_client_server_matches_native(client_server_adl, client_server):
    """Test the XML and native client/server fixtures describe the same application."""
    adl = client_server_adl.canonical()
    native = client_server.canonical()

    assert adl.instances == native.instances
    assert adl.bindings == native.bindings
    assert adl.interfaces == native.interfaces
    assert [(t.name, t.ports, t.attributes) for t in adl.types] == [
        (t.name, t.ports, t.attributes) for t in native.types
    ]
    # the definition name stands for the artifact
    assert adl.type_named("Server").artifact == "Server"


def test_fixtures_compile_to_isomorphic_graphs(client_server_adl, client_server):
    """Test both frontends lead to isomorphic task graphs."""
    adl = as_networkx(compile_plan(client_server_adl, HIER))
    native = as_networkx(compile_plan(client_server, HIER))

    assert nx.is_isomorphic(
        adl,
        native,
        node_match=lambda a, b: a["kind"] is b["kind"],
        edge_match=lambda a, b: a["interface"] is b["interface"],
    )


def test_nesting_becomes_containment(hierarchy):
    """Test a nested component is read as a containment record."""
    config = parse_adl(read_fixture("hierarchy.adl"))

    (containment,) = config.containments
    assert (containment.parent, containment.child, containment.child_name) == ("app", "logger", "logger")
    assert config.instance("logger").attribute_values[0].value == 3
    assert config.canonical() == hierarchy.canonical()


def test_empty_definition():
    """Test a definition without components."""
    assert parse_adl('<definition name="empty"/>') == Configuration()


@pytest.mark.parametrize(
    ("text", "expected"),
    [("true", True), ("false", False), ("42", 42), ("-7", -7), ("4.2", "4.2"), ("True", "True"), ("", "")],
)
def test_infer_literal(text, expected):
    """Test literal kinds are inferred from attribute text."""
    value = infer_literal(text)

    assert value == expected
    assert type(value) is type(expected)


def test_unsupported_element():
    """Test an element outside the supported subset is reported where it starts."""
    error = parse_failure(
        '<definition name="d">\n'
        '  <component name="a" definition="A">\n'
        '    <controller desc="primitive"/>\n'
        "  </component>\n"
        "</definition>\n"
    )

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.UNSUPPORTED_ELEMENT
    assert (diagnostic.location.line, diagnostic.location.column) == (3, 5)
    assert error.is_syntactic


def test_unsupported_root():
    """Test a document whose root is not a definition."""
    error = parse_failure('<component name="a" definition="A"/>')

    assert [d.code for d in error.diagnostics] == [DiagnosticCode.UNSUPPORTED_ELEMENT]


def test_malformed_xml():
    """Test malformed XML is a syntax error."""
    error = parse_failure('<definition name="d">\n  <component name="a" definition="A">\n</definition>\n')

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.SYNTAX
    assert diagnostic.location.line == 3


def test_empty_document():
    """Test a document without any element."""
    error = parse_failure("")

    assert [d.code for d in error.diagnostics] == [DiagnosticCode.SYNTAX]


def test_missing_attribute():
    """Test a component without its definition attribute."""
    error = parse_failure('<definition name="d">\n  <component name="a"/>\n</definition>\n')

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.SYNTAX
    assert diagnostic.location.line == 2


def test_unknown_role():
    """Test an interface role other than server or client."""
    error = parse_failure(
        '<definition name="d"><component name="a" definition="A">'
        '<interface name="s" role="both" signature="I"/></component></definition>'
    )

    assert [d.code for d in error.diagnostics] == [DiagnosticCode.SYNTAX]


def test_malformed_endpoint():
    """Test a binding endpoint without a port."""
    error = parse_failure('<definition name="d"><binding client="a" server="b.s"/></definition>')

    assert [d.code for d in error.diagnostics] == [DiagnosticCode.SYNTAX]


def test_conflicting_interfaces():
    """Test two components of one definition disagreeing on an interface."""
    error = parse_failure(
        '<definition name="d">\n'
        '  <component name="a" definition="A"><interface name="s" role="server" signature="I"/></component>\n'
        '  <component name="b" definition="A"><interface name="s" role="client" signature="I"/></component>\n'
        "</definition>\n"
    )

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.INVALID
    assert diagnostic.location.line == 3


def test_definition_union():
    """Test components sharing a definition contribute to one type."""
    config = parse_adl(
        '<definition name="d">'
        '<component name="a" definition="A"><interface name="s" role="server" signature="I"/></component>'
        '<component name="b" definition="A"><attributes><attribute name="n" value="1"/></attributes></component>'
        "</definition>"
    )

    (component_type,) = config.types
    assert [p.name for p in component_type.ports] == ["s"]
    assert [a.name for a in component_type.attributes] == ["n"]


def test_dangling_binding():
    """Test a binding to an unknown component is unresolved at the binding element."""
    text = read_fixture("client_server.adl").replace('server="srv.s"', 'server="ghost.s"')

    error = parse_failure(text)

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.UNRESOLVED
    assert diagnostic.location.line == 15
    assert not error.is_syntactic


def test_emit_round_trip(hierarchy):
    """Test emitting then parsing keeps the hierarchy."""
    text = emit_adl(hierarchy, name="Composite")

    assert text.startswith('<definition name="Composite">\n')
    assert parse_adl(text).canonical() == hierarchy.canonical()


def test_emit_drops_artifacts(client_server):
    """Test emitted definitions keep instances and bindings but not artifacts."""
    config = parse_adl(emit_adl(client_server))

    assert config.canonical().instances == client_server.canonical().instances
    assert config.bindings == client_server.bindings
    assert config.type_named("Server").artifact == "Server"
