"""Multi-personality configuration and deployment of component-based applications."""

from .adl import emit_adl, parse_adl
from .deployer import Deployer, deploy
from .engine import EngineConfig, ExecutionTrace, Orchestrator, build_dependency_lists, execute
from .model import Configuration, validate
from .native import emit_native, parse_native
from .planner import BackendCapabilities, TaskGraph, compile_plan, graph_to_dot
from .runtime import FlatRuntime, HierarchicalRuntime, RuntimeSnapshot

__all__ = [
    "BackendCapabilities",
    "Configuration",
    "Deployer",
    "EngineConfig",
    "ExecutionTrace",
    "FlatRuntime",
    "HierarchicalRuntime",
    "Orchestrator",
    "RuntimeSnapshot",
    "TaskGraph",
    "build_dependency_lists",
    "compile_plan",
    "deploy",
    "emit_adl",
    "emit_native",
    "execute",
    "graph_to_dot",
    "parse_adl",
    "parse_native",
    "validate",
]
