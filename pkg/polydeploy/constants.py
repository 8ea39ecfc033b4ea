"""Constants module for polydeploy."""
from enum import Enum, IntEnum

DEFAULT_SITE = "local"


class ValueKind(Enum):
    """Scalar kinds an attribute can be declared with."""

    STRING = "string"
    INTEGER = "integer"
    BOOLEAN = "boolean"

    def accepts(self, value) -> bool:
        """Check whether a literal value belongs to this kind."""
        if self is ValueKind.BOOLEAN:
            return isinstance(value, bool)
        if self is ValueKind.INTEGER:
            return isinstance(value, int) and not isinstance(value, bool)
        return isinstance(value, str)

    @classmethod
    def of(cls, value) -> "ValueKind":
        """Kind of a literal value."""
        if isinstance(value, bool):
            return cls.BOOLEAN
        if isinstance(value, int):
            return cls.INTEGER
        return cls.STRING


class Direction(Enum):
    """Port directions."""

    PROVIDED = "provided"
    REQUIRED = "required"


class TaskKind(Enum):
    """The elementary deployment tasks."""

    Installation = 1
    Instantiation = 2
    AttributeSetter = 3
    BindingGetter = 4
    BindingSetter = 5
    AddComponent = 6
    Initialization = 7


class InterfaceKind(Enum):
    """Interfaces through which deployment tasks feed each other."""

    FactoryProvider = 1
    InstanceProvider = 2
    BindingProvider = 3
    InstanceConfiguration = 4


# Interfaces each task kind offers to its consumers.
OFFERS = {
    TaskKind.Installation: frozenset({InterfaceKind.FactoryProvider}),
    TaskKind.Instantiation: frozenset({InterfaceKind.InstanceProvider}),
    TaskKind.AttributeSetter: frozenset({InterfaceKind.InstanceConfiguration}),
    TaskKind.BindingGetter: frozenset({InterfaceKind.BindingProvider, InterfaceKind.InstanceConfiguration}),
    TaskKind.BindingSetter: frozenset({InterfaceKind.InstanceConfiguration}),
    TaskKind.AddComponent: frozenset({InterfaceKind.InstanceConfiguration}),
    TaskKind.Initialization: frozenset(),
}

# Interfaces each task kind requires from its providers.
REQUIRES = {
    TaskKind.Installation: frozenset(),
    TaskKind.Instantiation: frozenset({InterfaceKind.FactoryProvider}),
    TaskKind.AttributeSetter: frozenset({InterfaceKind.InstanceProvider}),
    TaskKind.BindingGetter: frozenset({InterfaceKind.InstanceProvider}),
    TaskKind.BindingSetter: frozenset({InterfaceKind.InstanceProvider, InterfaceKind.BindingProvider}),
    TaskKind.AddComponent: frozenset({InterfaceKind.InstanceProvider}),
    TaskKind.Initialization: frozenset({InterfaceKind.InstanceProvider, InterfaceKind.InstanceConfiguration}),
}

# Kinds that carry a name parameter; AttributeSetter also carries a value.
NAMED_KINDS = frozenset(
    {TaskKind.AttributeSetter, TaskKind.BindingGetter, TaskKind.BindingSetter, TaskKind.AddComponent}
)


class ViolationCode(Enum):
    """Machine-readable codes reported by configuration validation."""

    EMPTY_NAME = "EMPTY_NAME"
    DUPLICATE_INTERFACE = "DUPLICATE_INTERFACE"
    DUPLICATE_TYPE = "DUPLICATE_TYPE"
    DUPLICATE_PORT = "DUPLICATE_PORT"
    DUPLICATE_ATTRIBUTE = "DUPLICATE_ATTRIBUTE"
    DUPLICATE_INSTANCE = "DUPLICATE_INSTANCE"
    DUPLICATE_VALUE = "DUPLICATE_VALUE"
    DUPLICATE_CHILD_NAME = "DUPLICATE_CHILD_NAME"
    UNKNOWN_INTERFACE = "UNKNOWN_INTERFACE"
    UNKNOWN_TYPE = "UNKNOWN_TYPE"
    UNKNOWN_ATTRIBUTE = "UNKNOWN_ATTRIBUTE"
    UNKNOWN_INSTANCE = "UNKNOWN_INSTANCE"
    UNKNOWN_PORT = "UNKNOWN_PORT"
    ATTRIBUTE_KIND = "ATTRIBUTE_KIND"
    BINDING_DIRECTION = "BINDING_DIRECTION"
    INTERFACE_MISMATCH = "INTERFACE_MISMATCH"
    AMBIGUOUS_BINDING = "AMBIGUOUS_BINDING"
    CONTAINMENT_SELF = "CONTAINMENT_SELF"
    CONTAINMENT_CYCLE = "CONTAINMENT_CYCLE"
    MULTIPLE_PARENTS = "MULTIPLE_PARENTS"


class DiagnosticCode(Enum):
    """Closed set of frontend diagnostic codes."""

    SYNTAX = "SYNTAX"
    UNRESOLVED = "UNRESOLVED"
    DUPLICATE = "DUPLICATE"
    INVALID = "INVALID"
    UNSUPPORTED_ELEMENT = "UNSUPPORTED_ELEMENT"


class ErrorCode(Enum):
    """Errors raised by the runtime deployment API."""

    UNKNOWN_TYPE = "UNKNOWN_TYPE"
    STALE_HANDLE = "STALE_HANDLE"
    UNKNOWN_ATTRIBUTE = "UNKNOWN_ATTRIBUTE"
    TYPE_MISMATCH = "TYPE_MISMATCH"
    ALREADY_STARTED = "ALREADY_STARTED"
    UNKNOWN_PORT = "UNKNOWN_PORT"
    ALREADY_BOUND = "ALREADY_BOUND"
    INTERFACE_MISMATCH = "INTERFACE_MISMATCH"
    UNSUPPORTED = "UNSUPPORTED"
    CYCLE = "CYCLE"
    UNBOUND_PORT = "UNBOUND_PORT"
    ALREADY_CONTAINED = "ALREADY_CONTAINED"
    DUPLICATE_INSTANCE = "DUPLICATE_INSTANCE"


class ExitStatus(IntEnum):
    """Process exit codes of the command-line surface."""

    OK = 0
    PARSE_ERROR = 1
    VALIDATION_ERROR = 2
    COMPILE_ERROR = 3
    CYCLE_DETECTED = 4
    TASK_FAILED = 5
