import pytest

from continuum_conductor.conductor import Phase
from continuum_conductor.continuum import LinkSpec, NodeSpec, Tier, Topology, TrustZone
from continuum_conductor.errors import PlanTopologyMismatch, SeedMismatch
from continuum_conductor.events import RawReading, ReadingKind
from continuum_conductor.pipeline import FusionRule, PreprocessConfig
from continuum_conductor.placement import PlacementPlan, all_cloud_variant
from continuum_conductor.scenario import (
    DelayInjection,
    NoiseProfile,
    ScenarioConfig,
    generate_scenario,
)
from continuum_conductor.simulator import (
    compare,
    comparison_to_json,
    format_comparison_table,
    format_metrics_table,
    load_metrics,
    metrics_from_json,
    metrics_to_json,
    run,
    run_scenario,
    run_scenario_with_insights,
    run_with_insights,
    save_metrics,
)


def micro_topology(unreliable_uplink=False):
    nodes = [
        NodeSpec("cloud", Tier.CLOUD, 1000.0, "dc"),
        NodeSpec("edge", Tier.EDGE, 100.0, "site", parent="cloud"),
        NodeSpec("s1", Tier.SENSOR, 10.0, "site", parent="edge"),
        NodeSpec("s2", Tier.SENSOR, 10.0, "site", parent="edge"),
    ]
    links = [
        LinkSpec("edge", "cloud", bandwidth=1e6, latency=1.0),
        LinkSpec("s1", "edge", bandwidth=1e6, latency=0.5, reliable=not unreliable_uplink),
        LinkSpec("s2", "edge", bandwidth=1e6, latency=0.5),
    ]
    zones = [
        TrustZone("dc", frozenset({"cloud"})),
        TrustZone("site", frozenset({"edge", "s1", "s2"})),
    ]
    return Topology.build(nodes, links, zones)


GATE = FusionRule(
    rule_id="gate",
    input_labels=frozenset({"truck_at_gate", "plate_read"}),
    window=30.0,
    min_sources=2,
    output_activity="arrive",
)
REG = FusionRule(
    rule_id="reg",
    input_labels=frozenset({"clerk_scan", "desk_cam"}),
    window=30.0,
    min_sources=2,
    output_activity="register",
)
DEP = FusionRule(
    rule_id="dep",
    input_labels=frozenset({"exit_frame", "exit_loop"}),
    window=30.0,
    min_sources=2,
    output_activity="depart",
)


def micro_plan(assignment, label="derived"):
    return PlacementPlan(
        assignment=assignment,
        preprocess=PreprocessConfig(reduction_ratio=0.01, per_reading_cost=0.0),
        rules=(GATE, REG, DEP),
        watermark=5.0,
        stage_costs={},
        label=label,
    )


def all_cloud_plan():
    return micro_plan({phase: Tier.CLOUD for phase in Phase}, label="all-cloud")


def edge_pre_plan():
    assignment = {phase: Tier.CLOUD for phase in Phase}
    assignment[Phase.PREPROCESSING] = Tier.EDGE
    return micro_plan(assignment)


def r(rid, source, time, payload, label, sensitive=False):
    return RawReading(
        reading_id=rid,
        source=source,
        kind=ReadingKind.FRAME,
        true_time=time,
        observed_time=time,
        payload_size=payload,
        sensitive=sensitive,
        truth_label=label,
        truth_object="cargo:C0001",
    )


ARRIVE_READINGS = [
    r("r1", "s1", 0.0, 1_000_000, "truck_at_gate"),
    r("r2", "s2", 1.0, 500_000, "plate_read"),
]


class TestTransportArithmetic:
    def test_all_cloud_latency_is_pure_transport(self):
        log, metrics = run(all_cloud_plan(), ARRIVE_READINGS, micro_topology())
        assert metrics.event_count == 1
        assert metrics.latency_mean == pytest.approx(3.5)
        assert metrics.latency_p95 == pytest.approx(3.5)
        assert metrics.latency_max == pytest.approx(3.5)
        trace = log.traces["cargo:C0001"]
        assert [(e.activity, e.time) for e in trace] == [("arrive", 0.0)]

    def test_all_cloud_ships_raw_bytes_upstream(self):
        _, metrics = run(all_cloud_plan(), ARRIVE_READINGS, micro_topology())
        assert metrics.bytes_per_link == {
            "s1->edge": 1_000_000,
            "s2->edge": 500_000,
            "edge->cloud": 1_500_000,
        }
        assert metrics.total_bytes_to_cloud == 1_500_000

    def test_edge_preprocessing_sends_reduced_events(self):
        _, metrics = run(edge_pre_plan(), ARRIVE_READINGS, micro_topology())
        assert metrics.bytes_per_link == {
            "s1->edge": 1_000_000,
            "s2->edge": 500_000,
            "edge->cloud": 15_000,
        }
        assert metrics.total_bytes_to_cloud == 15_000
        assert metrics.latency_mean == pytest.approx(3.005)

    def test_per_stage_costs_slow_hosts_down(self):
        plan = PlacementPlan(
            assignment={phase: Tier.CLOUD for phase in Phase},
            preprocess=PreprocessConfig(reduction_ratio=0.01, per_reading_cost=100.0),
            rules=(GATE,),
            watermark=5.0,
            stage_costs={Phase.AGGREGATION: 500.0},
            label="all-cloud",
        )
        _, metrics = run(plan, ARRIVE_READINGS, micro_topology())
        assert metrics.latency_mean == pytest.approx(3.5 + 100.0 / 1000.0 + 500.0 / 1000.0)


class TestPrivacyAccounting:
    def test_sensitive_raw_payload_crossing_the_zone_boundary(self):
        readings = [
            r("r1", "s1", 0.0, 1_000_000, "truck_at_gate", sensitive=True),
            r("r2", "s2", 1.0, 500_000, "plate_read"),
        ]
        _, metrics = run(all_cloud_plan(), readings, micro_topology())
        assert metrics.sensitive_crossings == 1

    def test_anonymizing_edge_preprocessing_stops_crossings(self):
        readings = [
            r("r1", "s1", 0.0, 1_000_000, "truck_at_gate", sensitive=True),
            r("r2", "s2", 1.0, 500_000, "plate_read"),
        ]
        plan = PlacementPlan(
            assignment=edge_pre_plan().assignment,
            preprocess=PreprocessConfig(
                anonymize=True, reduction_ratio=0.01, per_reading_cost=0.0
            ),
            rules=(GATE,),
            watermark=5.0,
            stage_costs={},
        )
        _, metrics = run(plan, readings, micro_topology())
        assert metrics.sensitive_crossings == 0


class TestDrops:
    def test_reliable_links_never_drop(self):
        _, metrics = run(
            all_cloud_plan(), ARRIVE_READINGS, micro_topology(), drop_rate=0.9
        )
        assert metrics.dropped_count == 0
        assert metrics.event_count == 1

    def test_unreliable_hop_drops_deterministically(self):
        topo = micro_topology(unreliable_uplink=True)
        _, metrics = run(all_cloud_plan(), ARRIVE_READINGS, topo, drop_rate=1.0)
        assert metrics.dropped_count == 1
        assert metrics.event_count == 0
        _, again = run(all_cloud_plan(), ARRIVE_READINGS, topo, drop_rate=1.0)
        assert again == metrics


FULL_CASE_READINGS = ARRIVE_READINGS + [
    r("r3", "s1", 60.0, 100_000, "clerk_scan"),
    r("r4", "s2", 61.0, 100_000, "desk_cam"),
    r("r5", "s1", 120.0, 100_000, "exit_frame"),
    r("r6", "s2", 121.0, 100_000, "exit_loop"),
]


class TestDelayInjection:
    def test_clean_run_has_no_late_events(self):
        log, metrics = run(all_cloud_plan(), FULL_CASE_READINGS, micro_topology())
        assert metrics.late_event_count == 0
        assert [e.activity for e in log.traces["cargo:C0001"]] == [
            "arrive",
            "register",
            "depart",
        ]

    def test_large_delay_reopens_the_case(self):
        inject = DelayInjection(case_index=1, activity="arrive", delay=200.0)
        log, metrics = run(
            all_cloud_plan(), FULL_CASE_READINGS, micro_topology(), inject=inject
        )
        assert metrics.late_event_count == 1
        assert sorted(log.case_ids()) == ["cargo:C0001", "cargo:C0001#2"]
        straggler = log.traces["cargo:C0001#2"]
        assert [(e.activity, e.attributes.get("late")) for e in straggler] == [
            ("arrive", "1")
        ]
        assert [e.activity for e in log.traces["cargo:C0001"]] == ["register", "depart"]

    def test_delay_within_watermark_only_shifts_latency(self):
        inject = DelayInjection(case_index=1, activity="arrive", delay=4.0)
        log, metrics = run(
            all_cloud_plan(), FULL_CASE_READINGS, micro_topology(), inject=inject
        )
        assert metrics.late_event_count == 0
        assert sorted(log.case_ids()) == ["cargo:C0001"]


class TestDeterminism:
    def test_identical_runs_agree_exactly(self):
        scenario = generate_scenario(
            ScenarioConfig(
                seed=20,
                n_cases=5,
                noise=NoiseProfile(
                    confusion_rate=0.02,
                    duplicate_rate=0.05,
                    delay_max=10.0,
                    drop_rate=0.01,
                ),
            )
        )
        from continuum_conductor.fixtures import derived_plan, port_topology

        topo = port_topology()
        plan = derived_plan(topo)
        first = run_scenario(plan, scenario, topo)
        second = run_scenario(plan, scenario, topo)
        assert first == second

    def test_run_scenario_matches_manual_run(self):
        scenario = generate_scenario(ScenarioConfig(seed=20, n_cases=3))
        from continuum_conductor.fixtures import derived_plan, port_topology

        topo = port_topology()
        plan = derived_plan(topo)
        via_scenario = run_scenario(plan, scenario, topo)
        manual = run(
            plan,
            scenario.readings,
            topo,
            scenario_seed=scenario.config.seed,
            confusion_rate=scenario.config.noise.confusion_rate,
            drop_rate=scenario.config.noise.drop_rate,
            inject=scenario.config.inject,
        )
        assert via_scenario == manual


class TestInsights:
    def test_clean_run_fits_its_own_model(self):
        result = run_with_insights(
            all_cloud_plan(), FULL_CASE_READINGS, micro_topology()
        )
        assert result.insights.fitness == 1.0
        assert result.model_footprint is not None
        assert result.net is not None
        assert set(result.net.transitions) == {"arrive", "register", "depart"}

    def test_throughput_reflects_case_span(self):
        result = run_with_insights(
            all_cloud_plan(), FULL_CASE_READINGS, micro_topology()
        )
        assert result.insights.throughput == {"cargo:C0001": 120.0}

    def test_scenario_entry_point_carries_insights(self, topology, plan):
        scenario = generate_scenario(ScenarioConfig(seed=20, n_cases=2))
        result = run_scenario_with_insights(plan, scenario, topology)
        assert result.insights.fitness == 1.0
        assert result.metrics.event_count == result.log.num_events()


class TestGuards:
    def test_unknown_reading_source_is_rejected(self):
        stray = [r("r1", "nowhere", 0.0, 1_000, "truck_at_gate")]
        with pytest.raises(PlanTopologyMismatch):
            run(all_cloud_plan(), stray, micro_topology())

    def test_invalid_topology_is_rejected(self):
        broken = Topology.build(
            [NodeSpec("f", Tier.FOG, 1.0, "z")],
            [],
            [TrustZone("z", frozenset({"f"}))],
        )
        with pytest.raises(PlanTopologyMismatch):
            run(all_cloud_plan(), ARRIVE_READINGS, broken)


class TestCompare:
    def test_self_comparison_is_all_zero(self):
        _, metrics = run(all_cloud_plan(), ARRIVE_READINGS, micro_topology())
        report = compare(metrics, metrics)
        for delta in report.deltas:
            assert delta.delta == 0
            if delta.b == 0:
                assert delta.ratio is None
            else:
                assert delta.ratio == pytest.approx(1.0)

    def test_deltas_are_a_minus_b(self):
        topo = micro_topology()
        _, cloud = run(all_cloud_plan(), ARRIVE_READINGS, topo)
        _, edge = run(edge_pre_plan(), ARRIVE_READINGS, topo)
        report = compare(edge, cloud)
        by_name = {d.name: d for d in report.deltas}
        bytes_delta = by_name["total_bytes_to_cloud"]
        assert bytes_delta.delta == 15_000 - 1_500_000
        assert bytes_delta.ratio == pytest.approx(15_000 / 1_500_000)
        assert report.label_a == "derived"
        assert report.label_b == "all-cloud"

    def test_zero_baseline_has_no_ratio(self):
        _, metrics = run(all_cloud_plan(), ARRIVE_READINGS, micro_topology())
        report = compare(metrics, metrics)
        by_name = {d.name: d for d in report.deltas}
        assert by_name["late_event_count"].ratio is None

    def test_mixed_seeds_refuse_to_compare(self):
        topo = micro_topology()
        _, a = run(all_cloud_plan(), ARRIVE_READINGS, topo, scenario_seed=1)
        _, b = run(all_cloud_plan(), ARRIVE_READINGS, topo, scenario_seed=2)
        with pytest.raises(SeedMismatch):
            compare(a, b)

    def test_report_serializes_and_renders(self):
        topo = micro_topology()
        _, cloud = run(all_cloud_plan(), ARRIVE_READINGS, topo)
        _, edge = run(edge_pre_plan(), ARRIVE_READINGS, topo)
        report = compare(edge, cloud)
        record = comparison_to_json(report)
        assert record["a"] == "derived"
        assert record["b"] == "all-cloud"
        table = format_comparison_table(report)
        assert "total_bytes_to_cloud" in table


class TestMetricsSerialization:
    def test_round_trip(self, tmp_path):
        _, metrics = run(all_cloud_plan(), ARRIVE_READINGS, micro_topology())
        assert metrics_from_json(metrics_to_json(metrics)) == metrics
        path = tmp_path / "metrics.json"
        save_metrics(metrics, path)
        assert load_metrics(path) == metrics

    def test_json_groups_latency(self):
        _, metrics = run(all_cloud_plan(), ARRIVE_READINGS, micro_topology())
        record = metrics_to_json(metrics)
        assert record["latency"] == {"mean": 3.5, "p95": 3.5, "max": 3.5}
        assert record["plan_label"] == "all-cloud"

    def test_table_rendering_mentions_key_fields(self):
        _, metrics = run(all_cloud_plan(), ARRIVE_READINGS, micro_topology())
        table = format_metrics_table(metrics)
        assert "bytes to cloud" in table
        assert "late events" in table
        assert "all-cloud" in table
