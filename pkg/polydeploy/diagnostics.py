"""Diagnostics shared by the language frontends."""

from dataclasses import dataclass
import logging

from .constants import DiagnosticCode, ViolationCode
from .model import Configuration, validate

_LOGGER = logging.getLogger(__name__)

# Codes that make a diagnostic a parse failure rather than a validation failure.
SYNTACTIC_CODES = frozenset({DiagnosticCode.SYNTAX, DiagnosticCode.UNSUPPORTED_ELEMENT})

_UNRESOLVED = frozenset(
    {
        ViolationCode.UNKNOWN_INTERFACE,
        ViolationCode.UNKNOWN_TYPE,
        ViolationCode.UNKNOWN_ATTRIBUTE,
        ViolationCode.UNKNOWN_INSTANCE,
        ViolationCode.UNKNOWN_PORT,
    }
)

_DUPLICATE = frozenset(
    {
        ViolationCode.DUPLICATE_INTERFACE,
        ViolationCode.DUPLICATE_TYPE,
        ViolationCode.DUPLICATE_PORT,
        ViolationCode.DUPLICATE_ATTRIBUTE,
        ViolationCode.DUPLICATE_INSTANCE,
        ViolationCode.DUPLICATE_VALUE,
        ViolationCode.DUPLICATE_CHILD_NAME,
    }
)


@dataclass(frozen=True)
class SourceLocation:
    """Position inside a source document, 1-based."""

    file: str
    line: int
    column: int

    def __post_init__(self):
        """Reject positions outside the 1-based range."""
        if self.line < 1 or self.column < 1:
            raise ValueError(f"invalid source location {self.line}:{self.column}")

    def __str__(self):
        """String representation of source location."""
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class ParseDiagnostic:
    """A problem found while reading a concrete description."""

    location: SourceLocation
    code: DiagnosticCode
    message: str

    @property
    def is_syntactic(self) -> bool:
        return self.code in SYNTACTIC_CODES

    def __str__(self):
        """String representation of parse diagnostic."""
        return f"{self.location}: {self.code.value}: {self.message}"


class ParseError(ValueError):
    """Raised by a frontend when its input does not yield a valid configuration."""

    def __init__(self, diagnostics: list[ParseDiagnostic]):
        """Initialize parse error with its diagnostics."""
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = list(diagnostics)

    @property
    def is_syntactic(self) -> bool:
        """True when any diagnostic is a lexical/syntactic one."""
        return any(d.is_syntactic for d in self.diagnostics)


def diagnostic_code(code: ViolationCode) -> DiagnosticCode:
    """Diagnostic code a validation violation is reported under."""
    if code in _UNRESOLVED:
        return DiagnosticCode.UNRESOLVED
    if code in _DUPLICATE:
        return DiagnosticCode.DUPLICATE
    return DiagnosticCode.INVALID


class LocationMap:
    """Source locations of model elements, keyed by (element, subject)."""

    def __init__(self, file: str):
        """Initialize an empty map for `file`."""
        self.file = file
        self._locations: dict[tuple[str, str], SourceLocation] = {}

    def at(self, line: int, column: int) -> SourceLocation:
        """Location in this file, clamped to the 1-based range."""
        return SourceLocation(self.file, max(line, 1), max(column, 1))

    def record(self, element: str, subject: str, line: int, column: int) -> SourceLocation:
        """Remember where an element was declared; the latest declaration wins."""
        location = self.at(line, column)
        self._locations[(element, subject)] = location
        return location

    def lookup(self, element: str, subject: str) -> SourceLocation:
        """Where an element was declared, or the start of the document."""
        return self._locations.get((element, subject), self.at(1, 1))


def check_configuration(config: Configuration, locations: LocationMap) -> Configuration:
    """Validate a parsed configuration, raising `ParseError` with located diagnostics."""
    violations = validate(config)
    if not violations:
        return config

    diagnostics = [
        ParseDiagnostic(locations.lookup(v.element, v.subject), diagnostic_code(v.code), v.message)
        for v in violations
    ]
    _LOGGER.debug("Configuration from %s has %d violations", locations.file, len(diagnostics))
    raise ParseError(diagnostics)
