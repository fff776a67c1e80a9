import pytest

from continuum_conductor.continuum import (
    LinkSpec,
    NodeSpec,
    Tier,
    Topology,
    TrustZone,
    ViolationKind,
    ancestors,
    crosses_zone,
    depth,
    path_between,
    path_to_root,
    topology_from_json,
    topology_to_json,
    validate,
    zone_crossings,
)
from continuum_conductor.errors import UnknownNode


def tiny_topology():
    nodes = [
        NodeSpec("cloud", Tier.CLOUD, 1000.0, "dc"),
        NodeSpec("fog", Tier.FOG, 100.0, "site", parent="cloud"),
        NodeSpec("edge", Tier.EDGE, 10.0, "site", parent="fog"),
        NodeSpec("sensor", Tier.SENSOR, 1.0, "site", parent="edge"),
    ]
    links = [
        LinkSpec("fog", "cloud", bandwidth=1e6, latency=0.05),
        LinkSpec("edge", "fog", bandwidth=1e5, latency=0.01),
        LinkSpec("sensor", "edge", bandwidth=1e4, latency=0.005),
    ]
    zones = [
        TrustZone("dc", frozenset({"cloud"})),
        TrustZone("site", frozenset({"fog", "edge", "sensor"})),
    ]
    return Topology.build(nodes, links, zones)


class TestBuildAndAccess:
    def test_root_is_the_parentless_node(self):
        topo = tiny_topology()
        assert topo.root().node_id == "cloud"

    def test_node_lookup(self):
        topo = tiny_topology()
        assert topo.node("fog").tier is Tier.FOG
        assert topo.has_node("sensor")
        assert not topo.has_node("ghost")
        with pytest.raises(UnknownNode):
            topo.node("ghost")

    def test_children_listing(self):
        topo = tiny_topology()
        assert [n.node_id for n in topo.children_of("fog")] == ["edge"]
        assert topo.children_of("sensor") == []

    def test_link_above(self):
        topo = tiny_topology()
        link = topo.link_above("sensor")
        assert (link.child, link.parent) == ("sensor", "edge")
        assert topo.link_above("cloud") is None

    def test_zone_of(self):
        topo = tiny_topology()
        assert topo.zone_of("cloud") == "dc"
        assert topo.zone_of("edge") == "site"


class TestValidate:
    def test_single_cloud_node_is_valid(self):
        topo = Topology.build(
            [NodeSpec("c", Tier.CLOUD, 1.0, "z")],
            [],
            [TrustZone("z", frozenset({"c"}))],
        )
        assert validate(topo) == []

    def test_tiny_topology_is_valid(self):
        assert validate(tiny_topology()) == []

    def test_port_fixture_is_valid(self, topology):
        assert validate(topology) == []

    def test_two_roots_flagged(self):
        topo = Topology.build(
            [
                NodeSpec("c1", Tier.CLOUD, 1.0, "z"),
                NodeSpec("c2", Tier.CLOUD, 1.0, "z"),
            ],
            [],
            [TrustZone("z", frozenset({"c1", "c2"}))],
        )
        kinds = {v.kind for v in validate(topo)}
        assert ViolationKind.MULTIPLE_ROOTS in kinds

    def test_tier_inversion_flagged(self):
        topo = Topology.build(
            [
                NodeSpec("c", Tier.CLOUD, 1.0, "z"),
                NodeSpec("e", Tier.EDGE, 1.0, "z", parent="c"),
                NodeSpec("f", Tier.FOG, 1.0, "z", parent="e"),
            ],
            [
                LinkSpec("e", "c", bandwidth=1.0, latency=0.1),
                LinkSpec("f", "e", bandwidth=1.0, latency=0.1),
            ],
            [TrustZone("z", frozenset({"c", "e", "f"}))],
        )
        kinds = {v.kind for v in validate(topo)}
        assert ViolationKind.TIER_INVERSION in kinds

    def test_root_below_cloud_flagged(self):
        topo = Topology.build(
            [NodeSpec("f", Tier.FOG, 1.0, "z")],
            [],
            [TrustZone("z", frozenset({"f"}))],
        )
        kinds = {v.kind for v in validate(topo)}
        assert ViolationKind.ROOT_NOT_CLOUD in kinds

    def test_missing_link_flagged(self):
        topo = Topology.build(
            [
                NodeSpec("c", Tier.CLOUD, 1.0, "z"),
                NodeSpec("f", Tier.FOG, 1.0, "z", parent="c"),
            ],
            [],
            [TrustZone("z", frozenset({"c", "f"}))],
        )
        kinds = {v.kind for v in validate(topo)}
        assert ViolationKind.LINK_MISMATCH in kinds

    def test_violations_carry_messages(self):
        topo = Topology.build(
            [NodeSpec("f", Tier.FOG, 1.0, "z")],
            [],
            [TrustZone("z", frozenset({"f"}))],
        )
        for violation in validate(topo):
            assert violation.detail
            assert violation.kind in ViolationKind


class TestPaths:
    def test_path_to_root_chain(self):
        topo = tiny_topology()
        hops = path_to_root(topo, "sensor")
        assert [(h.child, h.parent) for h in hops] == [
            ("sensor", "edge"),
            ("edge", "fog"),
            ("fog", "cloud"),
        ]
        assert path_to_root(topo, "cloud") == []

    def test_depth(self):
        topo = tiny_topology()
        assert depth(topo, "cloud") == 0
        assert depth(topo, "fog") == 1
        assert depth(topo, "sensor") == 3

    def test_ancestors_start_at_the_node(self):
        topo = tiny_topology()
        assert ancestors(topo, "sensor") == ["sensor", "edge", "fog", "cloud"]
        assert ancestors(topo, "cloud") == ["cloud"]

    def test_path_between_up_and_down(self):
        topo = tiny_topology()
        up = path_between(topo, "sensor", "fog")
        assert [(h.child, h.parent) for h in up] == [
            ("sensor", "edge"),
            ("edge", "fog"),
        ]
        down = path_between(topo, "fog", "sensor")
        assert [(h.child, h.parent) for h in down] == [
            ("edge", "fog"),
            ("sensor", "edge"),
        ]
        assert path_between(topo, "edge", "edge") == []

    def test_path_between_siblings_meets_at_ancestor(self, topology):
        hops = path_between(topology, "edge-gate", "edge-yard")
        endpoints = {h.child for h in hops} | {h.parent for h in hops}
        assert "fog-cluster" in endpoints
        assert len(hops) == 2


class TestZones:
    def test_crosses_zone_examples(self):
        topo = tiny_topology()
        assert crosses_zone(topo, "sensor", "cloud")
        assert not crosses_zone(topo, "sensor", "fog")

    def test_crosses_zone_symmetric_irreflexive(self, topology):
        ids = [n.node_id for n in topology.nodes]
        for a in ids:
            assert not crosses_zone(topology, a, a)
            for b in ids:
                assert crosses_zone(topology, a, b) == crosses_zone(topology, b, a)

    def test_zone_crossings_counts_boundary_hops(self):
        topo = tiny_topology()
        hops = path_to_root(topo, "sensor")
        assert zone_crossings(topo, hops) == 1
        assert zone_crossings(topo, []) == 0

    def test_fixture_zone_split(self, topology):
        assert topology.zone_of("cloud") != topology.zone_of("fog-cluster")
        assert topology.zone_of("edge-gate") == topology.zone_of("fog-cluster")


class TestSerialization:
    def test_round_trip(self, topology):
        assert topology_from_json(topology_to_json(topology)) == topology

    def test_json_shape(self):
        record = topology_to_json(tiny_topology())
        assert set(record) == {"nodes", "links", "zones"}
        names = [n["id"] for n in record["nodes"]]
        assert names == ["cloud", "fog", "edge", "sensor"]
