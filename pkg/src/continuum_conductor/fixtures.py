"""Shipped inland-port fixtures: topology, rules, scenario, demands, assessment.

Everything is generated from code so files and in-memory objects cannot
drift apart; `install` writes the JSON files for CLI use.
"""

from __future__ import annotations

import json
from pathlib import Path

from .conductor import (
    Assessment,
    Answer,
    Phase,
    Verdict,
    assessment_from_json,
    assessment_to_json,
    catalog_to_json,
    polarity_to_json,
)
from .continuum import LinkSpec, NodeSpec, Tier, Topology, TrustZone, topology_to_json
from .pipeline import FusionRule, PreprocessConfig, rules_to_json
from .placement import PlacementPlan, plan_from_verdicts
from .scenario import NoiseProfile, ScenarioConfig, config_to_json

TERMINAL = "terminal"
PROVIDER = "provider"


def port_topology() -> Topology:
    """Four layers: six sensors, two edge boxes, one GPU fog cluster, cloud."""
    nodes = (
        NodeSpec("cloud", Tier.CLOUD, 10_000.0, PROVIDER),
        NodeSpec("fog-cluster", Tier.FOG, 500.0, TERMINAL, parent="cloud"),
        NodeSpec("edge-gate", Tier.EDGE, 50.0, TERMINAL, parent="fog-cluster"),
        NodeSpec("edge-yard", Tier.EDGE, 50.0, TERMINAL, parent="fog-cluster"),
        NodeSpec("cam-gate-entry", Tier.SENSOR, 2.0, TERMINAL, parent="edge-gate"),
        NodeSpec("cam-gate-exit", Tier.SENSOR, 2.0, TERMINAL, parent="edge-gate"),
        NodeSpec("cam-crane", Tier.SENSOR, 2.0, TERMINAL, parent="edge-yard", clock_skew=2.0),
        NodeSpec("cam-reach-stacker", Tier.SENSOR, 2.0, TERMINAL, parent="edge-yard", clock_skew=-1.5),
        NodeSpec("cam-drone", Tier.SENSOR, 2.0, TERMINAL, parent="edge-yard", clock_skew=0.8),
        NodeSpec("sensor-box-crane", Tier.SENSOR, 2.0, TERMINAL, parent="edge-yard", clock_skew=0.3),
    )
    links = (
        LinkSpec("fog-cluster", "cloud", 20_000_000.0, 0.030),
        LinkSpec("edge-gate", "fog-cluster", 50_000_000.0, 0.005),
        LinkSpec("edge-yard", "fog-cluster", 50_000_000.0, 0.005),
        # Fixed gate cameras are wired; vehicle and drone cameras ride a
        # lossy wireless uplink.
        LinkSpec("cam-gate-entry", "edge-gate", 10_000_000.0, 0.002),
        LinkSpec("cam-gate-exit", "edge-gate", 10_000_000.0, 0.002),
        LinkSpec("cam-crane", "edge-yard", 2_000_000.0, 0.010, reliable=False),
        LinkSpec("cam-reach-stacker", "edge-yard", 2_000_000.0, 0.010, reliable=False),
        LinkSpec("cam-drone", "edge-yard", 2_000_000.0, 0.010, reliable=False),
        LinkSpec("sensor-box-crane", "edge-yard", 10_000_000.0, 0.002),
    )
    zones = (
        TrustZone(
            TERMINAL,
            frozenset(
                {
                    "fog-cluster",
                    "edge-gate",
                    "edge-yard",
                    "cam-gate-entry",
                    "cam-gate-exit",
                    "cam-crane",
                    "cam-reach-stacker",
                    "cam-drone",
                    "sensor-box-crane",
                }
            ),
        ),
        TrustZone(PROVIDER, frozenset({"cloud"})),
    )
    return Topology(nodes=nodes, links=links, zones=zones)


def port_rules() -> list[FusionRule]:
    cargo_guard = {"object_prefix": "cargo:"}
    return [
        FusionRule("trailer_entry", frozenset({"gate_entry_frame"}), 30.0, 2, "arrive", cargo_guard),
        FusionRule("registration", frozenset({"plate_read", "driver_checkin"}), 30.0, 2, "register"),
        FusionRule(
            "container_unload",
            frozenset({"spreader_lift", "spreader_setdown", "spreader_height_change"}),
            30.0,
            2,
            "unload",
        ),
        FusionRule("container_storage", frozenset({"stacker_move", "aerial_stack_frame"}), 30.0, 2, "store", cargo_guard),
        FusionRule(
            "container_relocation",
            frozenset({"stacker_shuffle", "aerial_restack_frame"}),
            30.0,
            2,
            "relocate",
            cargo_guard,
        ),
        FusionRule("container_load", frozenset({"stacker_lift", "aerial_load_frame"}), 30.0, 2, "load", cargo_guard),
        FusionRule("trailer_exit", frozenset({"gate_exit_frame"}), 30.0, 2, "depart", cargo_guard),
    ]


def port_scenario_config() -> ScenarioConfig:
    return ScenarioConfig(
        seed=20,
        n_cases=1000,
        case_spacing=35.0,
        relocate_fraction=0.3,
        sensitive_fraction=0.3,
        noise=NoiseProfile(
            confusion_rate=0.02,
            duplicate_rate=0.05,
            delay_max=10.0,
            drop_rate=0.01,
        ),
    )


def port_demands() -> dict[Phase, float]:
    return {
        Phase.PREPROCESSING: 10.0,
        Phase.AGGREGATION: 100.0,
        Phase.CORRELATION: 150.0,
        Phase.DISCOVERY: 2000.0,
        Phase.INSIGHTS: 2000.0,
    }


def port_preprocess_config() -> PreprocessConfig:
    return PreprocessConfig(
        anonymize=True,
        filter_min_confidence=0.5,
        reduction_ratio=0.01,
        per_reading_cost=10.0,
    )


_FIXTURE_VERDICTS: dict[str, Verdict] = {
    "Pre1": Verdict.DECENTRALIZED_FAVORABLE,
    "Pre2": Verdict.DECENTRALIZED_CRITICAL,
    "Pre3": Verdict.DECENTRALIZED_CRITICAL,
    "Pre4": Verdict.DECENTRALIZED_FAVORABLE,
    "Agg1": Verdict.CENTRALIZED_FAVORABLE,
    "Agg2": Verdict.DECENTRALIZED_FAVORABLE,
    "Agg3": Verdict.DECENTRALIZED_FAVORABLE,
    "Agg4": Verdict.DECENTRALIZED_FAVORABLE,
    "Cor1": Verdict.DECENTRALIZED_FAVORABLE,
    "Cor2": Verdict.CENTRALIZED_FAVORABLE,
    "Cor3": Verdict.DECENTRALIZED_FAVORABLE,
    "Dis1": Verdict.CENTRALIZED_FAVORABLE,
    "Dis2": Verdict.CENTRALIZED_FAVORABLE,
    "Dis3": Verdict.CENTRALIZED_CRITICAL,
    "Ins1": Verdict.CENTRALIZED_CRITICAL,
    "Ins2": Verdict.CENTRALIZED_CRITICAL,
}


def port_assessment() -> Assessment:
    return Assessment.from_answers(
        Answer(question_id=qid, verdict=verdict)
        for qid, verdict in _FIXTURE_VERDICTS.items()
    )


def derived_plan(topology: Topology | None = None) -> PlacementPlan:
    """The fixture plan: assessment verdicts applied to the port topology."""
    from .conductor import decide_all

    topology = topology or port_topology()
    return plan_from_verdicts(
        decide_all(port_assessment()),
        topology,
        port_demands(),
        preprocess=port_preprocess_config(),
        rules=port_rules(),
        watermark=20.0,
        skew_correction=True,
    )


def demands_to_json(demands: dict[Phase, float]) -> dict:
    return {phase.key: demand for phase, demand in sorted(demands.items())}


def demands_from_json(record) -> dict[Phase, float]:
    return {Phase.from_key(k): float(v) for k, v in record.items()}


ASSESSMENT_FILE = "integreatdrones.assessment.json"


def fixture_payloads() -> dict[str, object]:
    """All fixtures as JSON-compatible payloads, keyed by file name."""
    return {
        ASSESSMENT_FILE: assessment_to_json(port_assessment()),
        "port_topology.json": topology_to_json(port_topology()),
        "port_rules.json": rules_to_json(port_rules()),
        "port_scenario.json": config_to_json(port_scenario_config()),
        "port_demands.json": demands_to_json(port_demands()),
        "catalog.json": catalog_to_json(),
        "polarity.json": polarity_to_json(),
    }


def install(directory) -> list[Path]:
    """Write every fixture file into the directory; returns the paths."""
    target = Path(directory)
    target.mkdir(parents=True, exist_ok=True)
    written = []
    for name, payload in sorted(fixture_payloads().items()):
        path = target / name
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    return written


def load_assessment(path) -> Assessment:
    with open(path, encoding="utf-8") as fh:
        return assessment_from_json(json.load(fh))
