"""Test module for deploying plans onto the simulated runtimes."""
import asyncio
import random

import pytest

from polydeploy.deployer import Deployer, State, deploy
from polydeploy.engine import EngineConfig, OutcomeKind
from polydeploy.planner import CompileError, compile_plan
from polydeploy.runtime import FlatRuntime, HierarchicalRuntime
from tests.conftest import CLIENT_SERVER_SNAPSHOT, relocated
from tests.generators import random_configuration


@pytest.mark.asyncio
async def test_deploy_client_server(client_server):
    """Test deploying the client/server application starts both instances."""
    deployment = await deploy(client_server)

    assert deployment.trace.outcome.kind is OutcomeKind.COMPLETED
    assert len(deployment.graph.nodes) == 10
    snapshot = deployment.snapshot
    assert [i.handle for i in snapshot.instances if i.started] == ["cli", "srv"]
    assert snapshot.instance("cli").links == (("s", "srv", "s"),)
    assert len(snapshot.factories) == 2
    assert snapshot.serialize() == CLIENT_SERVER_SNAPSHOT


@pytest.mark.asyncio
async def test_flat_and_hierarchical_agree(client_server):
    """Test both personalities reach the same state for a flat application."""
    flat = await deploy(client_server, backend="flat")
    hier = await deploy(client_server, backend="hier")

    assert flat.snapshot == hier.snapshot.without_containment()


@pytest.mark.asyncio
async def test_deploy_hierarchy(hierarchy):
    """Test sub-components are added on the hierarchical runtime."""
    deployment = await deploy(hierarchy, backend="hier")

    assert deployment.trace.outcome.kind is OutcomeKind.COMPLETED
    assert deployment.snapshot.containment == (("app", "logger", "logger"),)
    assert all(i.started for i in deployment.snapshot.instances)


@pytest.mark.asyncio
async def test_deploy_hierarchy_on_flat(hierarchy):
    """Test the flat runtime cannot take a hierarchical application."""
    with pytest.raises(CompileError) as excinfo:
        await deploy(hierarchy, backend="flat")

    assert excinfo.value.code == CompileError.HIERARCHY_UNSUPPORTED


@pytest.mark.asyncio
async def test_injected_failure(client_server):
    """Test a task asked to fail ends the deployment."""
    deployment = await deploy(client_server, fail_tasks=["BindingSetter/cli/s"])

    outcome = deployment.trace.outcome
    assert outcome.kind is OutcomeKind.TASK_FAILED
    assert outcome.task == "BindingSetter/cli/s"
    assert deployment.snapshot.instance("cli").links == ()
    assert not deployment.snapshot.instance("cli").started


@pytest.mark.asyncio
async def test_deployer_state(client_server):
    """Test the deployer tracks the result of its run."""
    runtime = FlatRuntime(client_server.types)
    deployer = Deployer(runtime)
    assert deployer.state is State.Idle

    trace = await deployer.run(compile_plan(client_server, runtime.capabilities))

    assert trace.outcome.kind is OutcomeKind.COMPLETED
    assert deployer.state is State.Deployed


@pytest.mark.asyncio
async def test_deployer_state_on_failure(client_server):
    """Test a failed run leaves the deployer failed."""
    runtime = HierarchicalRuntime(client_server.types)
    deployer = Deployer(runtime, fail_tasks=["Installation/Server@local"])

    await deployer.run(compile_plan(client_server, runtime.capabilities))

    assert deployer.state is State.Failed


@pytest.mark.asyncio
async def test_parallel_deploy_with_latency(client_server):
    """Test a parallel deployment with task latency reaches the serial state."""
    deployment = await deploy(client_server, engine_config=EngineConfig(workers=4), latency=0.001)

    assert deployment.snapshot.serialize() == CLIENT_SERVER_SNAPSHOT


@pytest.mark.asyncio
@pytest.mark.parametrize("seed", range(50))
async def test_schedule_invariance(seed):
    """Test worker counts and tie-break perturbations do not change the final state."""
    config = random_configuration(seed, hierarchy=seed % 2 == 0)
    task_ids = [n.id for n in compile_plan(config, HierarchicalRuntime().capabilities).nodes]
    rng = random.Random(seed)

    reference = await deploy(config)
    assert reference.trace.outcome.kind is OutcomeKind.COMPLETED
    expected = reference.snapshot.serialize()

    for workers in (1, 2, 4):
        for _ in range(10):
            priority = {task_id: rng.randrange(len(task_ids)) for task_id in task_ids}
            deployment = await deploy(config, engine_config=EngineConfig(workers=workers, priority=priority))

            assert deployment.trace.outcome.kind is OutcomeKind.COMPLETED
            assert deployment.snapshot.serialize() == expected


@pytest.mark.asyncio
@pytest.mark.parametrize("seed", range(20))
async def test_personalities_agree_on_flat_applications(seed):
    """Test flat applications deploy to the same state on both runtimes."""
    config = random_configuration(seed)

    flat = await deploy(config, backend="flat", engine_config=EngineConfig(workers=2))
    hier = await deploy(config, backend="hier", engine_config=EngineConfig(workers=3))

    assert flat.snapshot == hier.snapshot.without_containment()
    assert all(i.started for i in flat.snapshot.instances)


@pytest.mark.asyncio
@pytest.mark.parametrize("site", ["node-1", "10.0.0.1", "user@host"])
async def test_deploy_on_free_form_sites(client_server, site):
    """Test any site label deploys, including ones holding an @."""
    deployment = await deploy(relocated(client_server, "srv", site))

    assert deployment.trace.outcome.kind is OutcomeKind.COMPLETED
    assert ("Server", site) in deployment.snapshot.factories
    assert deployment.snapshot.instance("srv").site == site
    assert deployment.snapshot.instance("srv").started


@pytest.mark.asyncio
async def test_cancelled_run_leaves_deployer_failed(client_server):
    """Test an interrupted run does not leave the deployer deploying."""
    runtime = HierarchicalRuntime(client_server.types)
    deployer = Deployer(runtime, latency=0.05)
    graph = compile_plan(client_server, runtime.capabilities)

    run = asyncio.ensure_future(deployer.run(graph))
    await asyncio.sleep(0.01)
    run.cancel()
    with pytest.raises(asyncio.CancelledError):
        await run

    assert deployer.state is State.Failed

    deployer.latency = 0.0
    trace = await deployer.run(graph)
    assert trace.outcome.kind is OutcomeKind.COMPLETED
    assert deployer.state is State.Deployed
