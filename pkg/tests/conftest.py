import pytest

from continuum_conductor.fixtures import (
    derived_plan,
    port_assessment,
    port_rules,
    port_topology,
)


@pytest.fixture(scope="session")
def topology():
    return port_topology()


@pytest.fixture(scope="session")
def assessment():
    return port_assessment()


@pytest.fixture(scope="session")
def plan(topology):
    return derived_plan(topology)


@pytest.fixture(scope="session")
def rules():
    return port_rules()


@pytest.fixture(scope="session")
def skews(topology):
    return {n.node_id: n.clock_skew for n in topology.nodes}
