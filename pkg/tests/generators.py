"""Seeded random configurations for property tests."""
import random

from polydeploy.constants import DEFAULT_SITE, Direction, ValueKind
from polydeploy.model import (
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

SITES = (DEFAULT_SITE, "east", "west")


def _literal(rng: random.Random, kind: ValueKind):
    if kind is ValueKind.BOOLEAN:
        return rng.random() < 0.5
    if kind is ValueKind.INTEGER:
        return rng.randint(-1000, 1000)
    return rng.choice(["", "alpha", "two words", 'quote "q"', "accent é", "line\nbreak"])


def random_configuration(
    seed: int,
    max_instances: int = 20,
    max_bindings: int = 30,
    hierarchy: bool = False,
) -> Configuration:
    """Valid configuration where every required port is bound.

    Each interface is provided by at least one type, and an instance of a
    providing type is added whenever a required interface has no server yet,
    so the instance count may exceed `max_instances` by the interface count.
    """
    rng = random.Random(seed)
    interfaces = [f"I{i}" for i in range(rng.randint(1, 4))]

    types = []
    for index in range(rng.randint(1, 5)):
        provided = rng.sample(interfaces, rng.randint(0, len(interfaces)))
        if index < len(interfaces):
            provided = sorted(set(provided) | {interfaces[index]})
        required = rng.sample(interfaces, rng.randint(0, min(2, len(interfaces))))
        ports = [PortDecl(f"p{i}", Direction.PROVIDED, name) for i, name in enumerate(provided)]
        ports += [PortDecl(f"r{i}", Direction.REQUIRED, name) for i, name in enumerate(required)]
        attributes = [
            AttributeDecl(f"a{i}", rng.choice(list(ValueKind))) for i in range(rng.randint(0, 3))
        ]
        types.append(ComponentType(f"T{index}", tuple(ports), tuple(attributes), f"artifact-{index}"))
    # interfaces not covered by the first types still need a provider
    for name in interfaces[len(types):]:
        index = len(types)
        types.append(
            ComponentType(f"T{index}", (PortDecl("p0", Direction.PROVIDED, name),), (), f"artifact-{index}")
        )

    providers = {name: [t for t in types if any(p.interface == name for p in t.provided_ports)] for name in interfaces}

    instances: list[Instance] = []
    required_total = 0

    def add_instance(component_type: ComponentType):
        nonlocal required_total
        values = tuple(
            AttributeValue(a.name, _literal(rng, a.kind)) for a in component_type.attributes if rng.random() < 0.7
        )
        instances.append(Instance(f"i{len(instances)}", component_type.name, rng.choice(SITES), values))
        required_total += len(component_type.required_ports)

    target = rng.randint(1, max_instances)
    while len(instances) < target:
        component_type = rng.choice(types)
        if required_total + len(component_type.required_ports) > max_bindings:
            break
        add_instance(component_type)

    by_type = {t.name: t for t in types}
    bindings = []
    # servers added while binding are visited too; at most one per interface
    index = 0
    while index < len(instances):
        instance = instances[index]
        index += 1
        for port in by_type[instance.type].required_ports:
            servers = [
                i for i in instances if any(p.interface == port.interface for p in by_type[i.type].provided_ports)
            ]
            if not servers:
                add_instance(rng.choice(providers[port.interface]))
                servers = [instances[-1]]
            server = rng.choice(servers)
            server_port = rng.choice(
                [p for p in by_type[server.type].provided_ports if p.interface == port.interface]
            )
            bindings.append(Binding(instance.id, port.name, server.id, server_port.name))

    containments = []
    if hierarchy:
        for position, instance in enumerate(instances[1:], start=1):
            if rng.random() < 0.5:
                parent = instances[rng.randrange(position)]
                containments.append(Containment(parent.id, instance.id, f"c{instance.id}"))

    used_types = {i.type for i in instances}
    kept_types = [t for t in types if t.name in used_types or rng.random() < 0.5]
    # native text declares interfaces through ports only
    used_interfaces = {p.interface for t in kept_types for p in t.ports}
    return Configuration(
        interfaces=tuple(InterfaceSignature(name) for name in interfaces if name in used_interfaces),
        types=tuple(kept_types),
        instances=tuple(instances),
        bindings=tuple(bindings),
        containments=tuple(containments),
    )
