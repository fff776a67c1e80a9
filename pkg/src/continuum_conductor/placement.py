"""Turning phase verdicts into a concrete stage-to-tier placement plan.

Centralized verdicts pin a stage to the cloud. Decentralized verdicts get
the lowest tier that can host the stage's compute demand on every data
source's path, so the stage runs as close to the sensors as capacity
allows. Later stages never run below earlier ones; the data only flows
upward.
"""

from __future__ import annotations

import json
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace

from .conductor import HINT_TEXTS, HintKind, Phase, PhaseOutcome, PhaseVerdict, ResolutionHint
from .continuum import Tier, Topology, path_to_root
from .errors import InsufficientCapacity, ParseError, UnresolvedConflict
from .pipeline import FusionRule, PreprocessConfig, rules_from_json, rules_to_json

# Per-event compute cost of the stages that run after preprocessing
# (preprocessing cost lives in PreprocessConfig.per_reading_cost).
DEFAULT_STAGE_COSTS: dict[Phase, float] = {
    Phase.AGGREGATION: 0.5,
    Phase.CORRELATION: 0.2,
    Phase.DISCOVERY: 0.05,
    Phase.INSIGHTS: 0.05,
}


@dataclass(frozen=True)
class PlacementPlan:
    assignment: Mapping[Phase, Tier]
    preprocess: PreprocessConfig
    rules: tuple[FusionRule, ...]
    watermark: float
    skew_correction: bool = True
    stage_costs: Mapping[Phase, float] = field(
        default_factory=lambda: dict(DEFAULT_STAGE_COSTS)
    )
    label: str = "derived"

    def __post_init__(self):
        if set(self.assignment) != set(Phase):
            raise ValueError("assignment must cover all five phases")
        if self.watermark < 0:
            raise ValueError("watermark must be >= 0")
        tiers = [self.assignment[p] for p in Phase]
        if any(b < a for a, b in zip(tiers, tiers[1:])):
            raise ValueError("assigned tiers must be non-decreasing along the pipeline")

    def tier_for(self, phase: Phase) -> Tier:
        return self.assignment[phase]


def all_cloud_variant(plan: PlacementPlan) -> PlacementPlan:
    """Same stage configs, every stage at the cloud; the comparison baseline."""
    return replace(
        plan,
        assignment={phase: Tier.CLOUD for phase in Phase},
        label="all-cloud",
    )


def host_for(topology: Topology, source: str, tier: Tier) -> str:
    """First node at or above `tier` on the path from a source to the root."""
    node = topology.node(source)
    if node.tier >= tier:
        return node.node_id
    for link in path_to_root(topology, source):
        if topology.node(link.parent).tier >= tier:
            return link.parent
    raise InsufficientCapacity(
        f"no node at tier {tier.key} or above on the path from {source}",
        hints=(ResolutionHint(HintKind.STRONGER_EDGE_HARDWARE, HINT_TEXTS[HintKind.STRONGER_EDGE_HARDWARE]),),
    )


def _data_sources(topology: Topology) -> list[str]:
    sensors = [n.node_id for n in topology.nodes if n.tier is Tier.SENSOR]
    return sorted(sensors)


def _tier_feasible(topology: Topology, sources: Sequence[str], tier: Tier, demand: float) -> bool:
    try:
        hosts = {host_for(topology, s, tier) for s in sources}
    except InsufficientCapacity:
        return False
    return all(topology.node(h).compute_capacity >= demand for h in hosts)


def _capacity_error(phase: Phase, demand: float) -> InsufficientCapacity:
    hint = ResolutionHint(
        HintKind.STRONGER_EDGE_HARDWARE, HINT_TEXTS[HintKind.STRONGER_EDGE_HARDWARE]
    )
    return InsufficientCapacity(
        f"no tier can host {phase.key} at demand {demand:g}", hints=(hint,)
    )


def plan_from_verdicts(
    verdicts: Mapping[Phase, PhaseVerdict],
    topology: Topology,
    stage_demands: Mapping[Phase, float],
    preprocess: PreprocessConfig | None = None,
    rules: Sequence[FusionRule] = (),
    watermark: float = 20.0,
    skew_correction: bool = True,
) -> PlacementPlan:
    """Derive the placement plan; refuses to plan over an unresolved conflict."""
    conflicted = [p for p in Phase if verdicts[p].outcome is PhaseOutcome.CONFLICT]
    if conflicted:
        hints: list[ResolutionHint] = []
        details = []
        for p in conflicted:
            v = verdicts[p]
            for hint in v.resolution_hints:
                if hint not in hints:
                    hints.append(hint)
            central = ",".join(v.centralized_critical_ids) or "-"
            decentral = ",".join(v.decentralized_critical_ids) or "-"
            details.append(f"{p.key} ({central} vs {decentral})")
        raise UnresolvedConflict(
            "cannot plan while phases are in conflict: " + "; ".join(details),
            phases=tuple(conflicted),
            hints=tuple(hints),
        )

    sources = _data_sources(topology)
    assignment: dict[Phase, Tier] = {}
    floor = Tier.SENSOR
    for phase in Phase:
        outcome = verdicts[phase].outcome
        demand = float(stage_demands.get(phase, 0.0))
        if outcome.is_centralized:
            tier = Tier.CLOUD
            if not _tier_feasible(topology, sources, tier, demand):
                raise _capacity_error(phase, demand)
        else:
            candidates = [t for t in Tier if t >= floor]
            feasible = [
                t for t in candidates if _tier_feasible(topology, sources, t, demand)
            ]
            if not feasible:
                raise _capacity_error(phase, demand)
            tier = feasible[0]
            if outcome is PhaseOutcome.DECENTRALIZED_MANDATORY and tier is Tier.CLOUD:
                # Every lower tier is short on capacity; this is the
                # hardware-upgrade situation, not a plannable outcome.
                raise _capacity_error(phase, demand)
        tier = max(tier, floor)
        assignment[phase] = tier
        floor = tier

    return PlacementPlan(
        assignment=assignment,
        preprocess=preprocess or PreprocessConfig(),
        rules=tuple(rules),
        watermark=watermark,
        skew_correction=skew_correction,
    )


def stage_hosts(plan: PlacementPlan, topology: Topology) -> dict[Phase, dict[str, str]]:
    """Per phase: each data source's hosting node under the plan."""
    sources = _data_sources(topology)
    return {
        phase: {s: host_for(topology, s, plan.tier_for(phase)) for s in sources}
        for phase in Phase
    }


# --- Plan file ----------------------------------------------------------------

def plan_to_json(plan: PlacementPlan) -> dict:
    return {
        "label": plan.label,
        "assignment": {phase.key: plan.assignment[phase].key for phase in Phase},
        "preprocess": {
            "anonymize": plan.preprocess.anonymize,
            "filter_min_confidence": plan.preprocess.filter_min_confidence,
            "reduction_ratio": plan.preprocess.reduction_ratio,
            "per_reading_cost": plan.preprocess.per_reading_cost,
        },
        "rules": rules_to_json(plan.rules),
        "watermark": plan.watermark,
        "skew_correction": plan.skew_correction,
        "stage_costs": {phase.key: cost for phase, cost in sorted(plan.stage_costs.items())},
    }


def plan_from_json(record: Mapping) -> PlacementPlan:
    try:
        assignment = {
            Phase.from_key(k): Tier.from_key(v) for k, v in record["assignment"].items()
        }
        stage_costs = {
            Phase.from_key(k): float(v)
            for k, v in record.get("stage_costs", {}).items()
        } or dict(DEFAULT_STAGE_COSTS)
        return PlacementPlan(
            assignment=assignment,
            preprocess=PreprocessConfig(**record.get("preprocess", {})),
            rules=tuple(rules_from_json(record.get("rules", []))),
            watermark=float(record.get("watermark", 20.0)),
            skew_correction=bool(record.get("skew_correction", True)),
            stage_costs=stage_costs,
            label=record.get("label", "derived"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad plan record: {exc}") from exc


def load_plan(path) -> PlacementPlan:
    with open(path, encoding="utf-8") as fh:
        try:
            record = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}", line=exc.lineno) from exc
    return plan_from_json(record)


def save_plan(plan: PlacementPlan, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_json(plan), fh, indent=2, sort_keys=True)
        fh.write("\n")
