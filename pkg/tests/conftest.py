"""Shared fixtures for the polydeploy tests."""
from dataclasses import replace
from pathlib import Path

import pytest

from polydeploy.adl import parse_adl
from polydeploy.native import parse_native

FIXTURES = Path(__file__).parent / "fixtures"


def read_fixture(name: str) -> str:
    """Text of a file under tests/fixtures."""
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture
def client_server():
    """The client/server configuration: one server, one client, one binding."""
    return parse_native(read_fixture("client_server.native"), filename="client_server.native")


@pytest.fixture
def hierarchy():
    """A composite configuration: app contains and uses logger."""
    return parse_native(read_fixture("hierarchy.native"), filename="hierarchy.native")


@pytest.fixture
def client_server_adl():
    """The client/server configuration read from its XML definition."""
    return parse_adl(read_fixture("client_server.adl"), filename="client_server.adl")


# Final runtime state of the deployed client/server application.
CLIENT_SERVER_SNAPSHOT = (
    'attribute cli nom = "the-client"\n'
    'attribute srv nom = "the-server"\n'
    "factory Client local\n"
    "factory Server local\n"
    "instance cli type=Client site=local started=true\n"
    "instance srv type=Server site=local started=true\n"
    "link cli.s -> srv.s\n"
)


def relocated(config, instance_id: str, site: str):
    """Copy of `config` with one instance moved to another site."""
    instances = tuple(replace(i, site=site) if i.id == instance_id else i for i in config.instances)
    return replace(config, instances=instances)
