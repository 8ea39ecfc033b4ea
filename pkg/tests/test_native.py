"""Test module for the native configuration language."""
import pytest

from polydeploy.constants import DEFAULT_SITE, DiagnosticCode, Direction, ValueKind
from polydeploy.diagnostics import ParseError
from polydeploy.model import Configuration
from polydeploy.native import HEADER, emit_native, parse_native
from tests.conftest import read_fixture, relocated
from tests.generators import random_configuration


def parse_failure(text: str) -> ParseError:
    with pytest.raises(ParseError) as excinfo:
        parse_native(text, filename="broken.native")
    return excinfo.value


def test_client_server(client_server):
    """Test the client/server source yields two types, two instances and one binding."""
    assert len(client_server.types) == 2
    assert len(client_server.instances) == 2
    assert len(client_server.bindings) == 1
    assert client_server.containments == ()
    assert [i.name for i in client_server.interfaces] == ["IService"]

    server = client_server.type_named("Server")
    assert server.artifact == "server.jar"
    assert server.port("s").direction is Direction.PROVIDED
    assert server.attribute("nom").kind is ValueKind.STRING

    srv = client_server.instance("srv")
    assert srv.site == DEFAULT_SITE
    assert srv.attribute_values[0].value == "the-server"


def test_empty_source():
    """Test empty and comment-only sources yield the empty configuration."""
    assert parse_native("") == Configuration()
    assert parse_native("# nothing here\n\n") == Configuration()


def test_contain_statement(hierarchy):
    """Test containment statements."""
    (containment,) = hierarchy.containments

    assert (containment.parent, containment.child, containment.child_name) == ("app", "logger", "logger")
    assert hierarchy.instance("logger").attribute_values[0].value == 3


def test_defaults_and_literals():
    """Test artifact and site defaults and literal decoding."""
    config = parse_native(
        """
        type Box {
            attribute label: string
            attribute size: integer
            attribute open: boolean
        }
        instance b: Box @ east {
            label = "say \\"hi\\"\\n"
            size = -12
            open = true
        }
        """
    )

    assert config.type_named("Box").artifact == "Box"
    box = config.instance("b")
    assert box.site == "east"
    assert [(v.name, v.value) for v in box.attribute_values] == [
        ("label", 'say "hi"\n'),
        ("size", -12),
        ("open", True),
    ]


def test_dangling_binding_is_unresolved():
    """Test a binding to an unknown instance is reported at the bind statement."""
    text = read_fixture("client_server.native").replace("bind cli.s -> srv.s", "bind cli.s -> ghost.s")
    bind_line = text.splitlines().index("bind cli.s -> ghost.s") + 1

    error = parse_failure(text)

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.UNRESOLVED
    assert diagnostic.location.file == "broken.native"
    assert diagnostic.location.line == bind_line
    assert diagnostic.location.column == 1
    assert not error.is_syntactic


def test_attribute_kind_is_invalid():
    """Test a literal of the wrong kind is reported on the assignment."""
    error = parse_failure(
        "type Box {\n    attribute size: integer\n}\ninstance b: Box {\n    size = \"big\"\n}\n"
    )

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.INVALID
    assert (diagnostic.location.line, diagnostic.location.column) == (5, 5)


def test_duplicate_instance():
    """Test a second declaration of an instance."""
    error = parse_failure("type Box {\n}\ninstance b: Box {\n}\ninstance b: Box {\n}\n")

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.DUPLICATE
    assert diagnostic.location.line == 5


def test_duplicate_artifact():
    """Test a type declaring two artifacts."""
    error = parse_failure('type Box {\n    artifact "a"\n    artifact "b"\n}\n')

    assert [d.code for d in error.diagnostics] == [DiagnosticCode.DUPLICATE]
    assert error.diagnostics[0].location.line == 3


def test_missing_colon_is_syntax_error():
    """Test a malformed port declaration."""
    error = parse_failure("type Server {\n    provides s IService\n}\n")

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.SYNTAX
    assert diagnostic.location.line == 2
    assert error.is_syntactic


def test_unexpected_character():
    """Test a character outside the language."""
    error = parse_failure("type Box {\n}\ninstance b: Box $ {\n}\n")

    (diagnostic,) = error.diagnostics
    assert diagnostic.code is DiagnosticCode.SYNTAX
    assert diagnostic.location.line == 3
    assert "'$'" in diagnostic.message


def test_unterminated_block():
    """Test running out of input inside a block."""
    error = parse_failure("type Server {\n    provides s: IService\n")

    assert error.is_syntactic
    assert error.diagnostics[0].location.line >= 1


def test_emit_empty_configuration():
    """Test the empty configuration renders as empty text."""
    assert emit_native(Configuration()) == ""


def test_emit_client_server(client_server):
    """Test emitted text starts with the header and lists the binding."""
    text = emit_native(client_server)

    assert text.startswith(HEADER + "\n")
    assert "bind cli.s -> srv.s\n" in text
    assert 'artifact "server.jar"' in text
    assert "@" not in text


@pytest.mark.parametrize(
    ("site", "spelling"),
    [
        ("east", "@ east {"),
        ("node-1", '@ "node-1" {'),
        ("10.0.0.1", '@ "10.0.0.1" {'),
        ("user@host", '@ "user@host" {'),
        ("rack a", '@ "rack a" {'),
        ("type", '@ "type" {'),
    ],
)
def test_free_form_sites_round_trip(client_server, site, spelling):
    """Test any site label survives emitting and parsing again."""
    config = relocated(client_server, "srv", site)

    text = emit_native(config)

    assert spelling in text
    assert parse_native(text).instance("srv").site == site
    assert parse_native(text) == config.canonical()


def test_client_server_round_trip(client_server):
    """Test emitting then parsing gives back the same configuration."""
    assert parse_native(emit_native(client_server)) == client_server.canonical()


@pytest.mark.parametrize("seed", range(200))
def test_generated_round_trip(seed):
    """Test parse and emit are inverse on generated configurations."""
    config = random_configuration(seed, hierarchy=seed % 3 == 0)

    text = emit_native(config)
    parsed = parse_native(text)

    assert parsed.canonical() == config.canonical()
    assert emit_native(parsed) == text
