"""Deterministic execution of a placement plan over the continuum.

Every reading travels up the tree; each hop costs link latency plus
size/bandwidth, each stage costs compute/capacity at its hosting node.
Delays compose additively, there is no queueing model: the simulator is an
auditable calculator, and (plan, seed) fully determine its output.
Unreliable links drop a seeded subset of messages when a drop rate is set.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .conductor import Phase
from .continuum import Topology, path_between, validate, zone_crossings
from .discovery import (
    FootprintMatrix,
    Kpis,
    ProcessNet,
    alpha_net,
    dfg_from_log,
    fitness,
    kpis,
    merge_dfg,
    footprint,
)
from .errors import InsufficientCapacity, PlanTopologyMismatch, SeedMismatch
from .events import EventLog, HighLevelEvent, LowLevelEvent, RawReading
from .pipeline import (
    CorrelatorState,
    Fuser,
    Recognizer,
    apply_skew_correction,
    correlate,
    flush_correlator,
    preprocess,
)
from .placement import PlacementPlan, host_for, stage_hosts
from .rng import rng_for
from .scenario import DelayInjection, Scenario, case_id_for

# Declared handling durations for waiting-time insights, seconds.
SERVICE_DURATIONS: dict[str, float] = {
    "arrive": 2.0,
    "register": 30.0,
    "unload": 15.0,
    "store": 20.0,
    "relocate": 20.0,
    "load": 15.0,
    "depart": 2.0,
}


@dataclass(frozen=True)
class SimMetrics:
    scenario_seed: int
    plan_label: str
    bytes_per_link: Mapping[str, int]
    total_bytes_to_cloud: int
    event_count: int
    latency_mean: float
    latency_p95: float
    latency_max: float
    sensitive_crossings: int
    late_event_count: int
    dropped_count: int


@dataclass(frozen=True)
class RunResult:
    log: EventLog
    metrics: SimMetrics
    model_footprint: FootprintMatrix | None
    net: ProcessNet | None
    insights: Kpis


class _Tally:
    def __init__(self):
        self.bytes_per_link: dict[str, int] = {}
        self.sensitive_crossings = 0
        self.dropped = 0


def _send(
    topology: Topology,
    tally: _Tally,
    seed: int,
    drop_rate: float,
    msg_id: str,
    size: int,
    sensitive: bool,
    frm: str,
    to: str,
    start: float,
) -> float | None:
    """Arrival time of a message, or None if an unreliable hop dropped it."""
    time = start
    for link in path_between(topology, frm, to):
        if (
            not link.reliable
            and drop_rate > 0
            and rng_for(seed, "drop", link.child, link.parent, msg_id).random() < drop_rate
        ):
            tally.dropped += 1
            return None
        key = f"{link.child}->{link.parent}"
        tally.bytes_per_link[key] = tally.bytes_per_link.get(key, 0) + size
        if sensitive and zone_crossings(topology, [link]) > 0:
            tally.sensitive_crossings += 1
        time += link.latency + size / link.bandwidth
    return time


def _p95(values: Sequence[float]) -> float:
    if not values:
        return 0.0
    ordered = sorted(values)
    rank = max(0, math.ceil(0.95 * len(ordered)) - 1)
    return ordered[rank]


def _check_plan(plan: PlacementPlan, readings: Iterable[RawReading], topology: Topology):
    violations = validate(topology)
    if violations:
        summary = "; ".join(f"{v.kind.value}: {v.detail}" for v in violations[:3])
        raise PlanTopologyMismatch(f"topology invalid: {summary}")
    for reading in readings:
        if not topology.has_node(reading.source):
            raise PlanTopologyMismatch(f"reading source {reading.source!r} not in topology")
    try:
        return stage_hosts(plan, topology)
    except InsufficientCapacity as exc:
        raise PlanTopologyMismatch(f"plan does not fit topology: {exc}") from exc


def run(
    plan: PlacementPlan,
    readings: Sequence[RawReading],
    topology: Topology,
    scenario_seed: int = 0,
    confusion_rate: float = 0.0,
    drop_rate: float = 0.0,
    inject: DelayInjection | None = None,
    service_durations: Mapping[str, float] | None = None,
) -> tuple[EventLog, SimMetrics]:
    result = run_with_insights(
        plan,
        readings,
        topology,
        scenario_seed=scenario_seed,
        confusion_rate=confusion_rate,
        drop_rate=drop_rate,
        inject=inject,
        service_durations=service_durations,
    )
    return result.log, result.metrics


def run_with_insights(
    plan: PlacementPlan,
    readings: Sequence[RawReading],
    topology: Topology,
    scenario_seed: int = 0,
    confusion_rate: float = 0.0,
    drop_rate: float = 0.0,
    inject: DelayInjection | None = None,
    service_durations: Mapping[str, float] | None = None,
) -> RunResult:
    hosts = _check_plan(plan, readings, topology)
    tally = _Tally()
    capacity = {n.node_id: n.compute_capacity for n in topology.nodes}
    cost = plan.stage_costs

    alphabet = tuple(sorted({r.truth_label for r in readings if r.truth_label}))
    recognizer = Recognizer(
        seed=scenario_seed, confusion_rate=confusion_rate, alphabet=alphabet
    )

    # Stage 1: raw transport to the preprocessing host, recognition, reduction.
    ll_avail: dict[str, float] = {}
    agg_batches: dict[str, list[tuple[float, LowLevelEvent]]] = {}
    for reading in sorted(readings, key=lambda r: (r.true_time + r.emit_delay, r.reading_id)):
        pre_host = hosts[Phase.PREPROCESSING][reading.source]
        arrival = _send(
            topology, tally, scenario_seed, drop_rate,
            reading.reading_id, reading.payload_size, reading.sensitive,
            reading.source, pre_host, reading.true_time + reading.emit_delay,
        )
        if arrival is None:
            continue
        avail = arrival + plan.preprocess.per_reading_cost / capacity[pre_host]
        event = preprocess(reading, plan.preprocess, recognizer)
        if event is None:
            continue
        event = apply_skew_correction([event], topology, plan.skew_correction)[0]

        agg_host = hosts[Phase.AGGREGATION][reading.source]
        arrival = _send(
            topology, tally, scenario_seed, drop_rate,
            event.event_id, event.size, event.sensitive,
            pre_host, agg_host, avail,
        )
        if arrival is None:
            continue
        ll_avail[event.event_id] = arrival
        agg_batches.setdefault(agg_host, []).append((arrival, event))

    # Stage 2: fusion per aggregation host, in arrival order.
    fused: list[tuple[float, HighLevelEvent, str]] = []
    for agg_host in sorted(agg_batches):
        batch = sorted(
            agg_batches[agg_host], key=lambda p: (p[0], p[1].time, p[1].event_id)
        )
        fuser = Fuser(plan.rules, namespace=agg_host)
        agg_time = cost.get(Phase.AGGREGATION, 0.0) / capacity[agg_host]

        def _avail_of(event: HighLevelEvent, trigger: float) -> float:
            contribs = fuser.contributors.get(event.event_id, ())
            inputs = max((ll_avail[c] for c in contribs), default=trigger)
            return max(trigger, inputs) + agg_time

        last_trigger = 0.0
        for arrival, ll in batch:
            last_trigger = arrival
            for event in fuser.feed([ll]):
                fused.append((_avail_of(event, arrival), event, agg_host))
        for event in fuser.flush():
            fused.append((_avail_of(event, last_trigger), event, agg_host))

    # Optional lateness injection at the correlation hand-off.
    if inject is not None:
        target_case = case_id_for(inject.case_index)
        fused = [
            (
                avail + inject.delay
                if event.case_id == target_case and event.activity == inject.activity
                else avail,
                event,
                agg_host,
            )
            for avail, event, agg_host in fused
        ]

    # Stage 3: correlation per correlation host, in arrival order.
    cor_batches: dict[str, list[tuple[float, HighLevelEvent]]] = {}
    for avail, event, agg_host in fused:
        cor_host = host_for(topology, agg_host, plan.tier_for(Phase.CORRELATION))
        arrival = _send(
            topology, tally, scenario_seed, drop_rate,
            event.event_id, event.size, False, agg_host, cor_host, avail,
        )
        if arrival is None:
            continue
        cor_batches.setdefault(cor_host, []).append((arrival, event))

    correlated: list[tuple[float, HighLevelEvent, str]] = []
    late_total = 0
    for cor_host in sorted(cor_batches):
        batch = sorted(
            cor_batches[cor_host], key=lambda p: (p[0], p[1].time, p[1].event_id)
        )
        state = CorrelatorState(watermark=plan.watermark)
        cor_time = cost.get(Phase.CORRELATION, 0.0) / capacity[cor_host]
        in_avail = {event.event_id: avail for avail, event in batch}
        last_trigger = 0.0
        for arrival, event in batch:
            last_trigger = arrival
            emitted, state = correlate([event], state)
            for out in emitted:
                avail = max(in_avail[out.event_id], arrival) + cor_time
                correlated.append((avail, out, cor_host))
        for out in flush_correlator(state):
            avail = max(in_avail[out.event_id], last_trigger) + cor_time
            correlated.append((avail, out, cor_host))
        late_total += state.late_events

    # Stages 4-5: ship to discovery, then to insights if hosted elsewhere.
    latencies: list[float] = []
    final_events: list[HighLevelEvent] = []
    partial: dict[str, list[HighLevelEvent]] = {}
    for avail, event, cor_host in sorted(
        correlated, key=lambda p: (p[0], p[1].time, p[1].event_id)
    ):
        dis_host = host_for(topology, cor_host, plan.tier_for(Phase.DISCOVERY))
        arrival = _send(
            topology, tally, scenario_seed, drop_rate,
            event.event_id, event.size, False, cor_host, dis_host, avail,
        )
        if arrival is None:
            continue
        avail = arrival + cost.get(Phase.DISCOVERY, 0.0) / capacity[dis_host]
        latencies.append(avail - event.time)
        final_events.append(event)
        partial.setdefault(dis_host, []).append(event)

        ins_host = host_for(topology, dis_host, plan.tier_for(Phase.INSIGHTS))
        if ins_host != dis_host:
            _send(
                topology, tally, scenario_seed, drop_rate,
                event.event_id, event.size, False, dis_host, ins_host, avail,
            )

    log = EventLog.from_events(final_events)
    parts = [
        dfg_from_log(EventLog.from_events(partial[host])) for host in sorted(partial)
    ]
    dfg = merge_dfg(parts)
    model = footprint(dfg) if dfg.activities else None
    net: ProcessNet | None = None
    if model is not None and dfg.start_counts and dfg.end_counts:
        net = alpha_net(model, dfg)
    fitness_value = fitness(log, model) if model is not None else 1.0
    insights = kpis(
        log,
        service_durations if service_durations is not None else SERVICE_DURATIONS,
        fitness_value=fitness_value,
    )

    root = topology.root().node_id
    to_cloud = sum(
        n for key, n in tally.bytes_per_link.items() if key.endswith(f"->{root}")
    )
    metrics = SimMetrics(
        scenario_seed=scenario_seed,
        plan_label=plan.label,
        bytes_per_link=dict(sorted(tally.bytes_per_link.items())),
        total_bytes_to_cloud=to_cloud,
        event_count=len(final_events),
        latency_mean=round(sum(latencies) / len(latencies), 6) if latencies else 0.0,
        latency_p95=round(_p95(latencies), 6),
        latency_max=round(max(latencies), 6) if latencies else 0.0,
        sensitive_crossings=tally.sensitive_crossings,
        late_event_count=late_total,
        dropped_count=tally.dropped,
    )
    return RunResult(log=log, metrics=metrics, model_footprint=model, net=net, insights=insights)


def run_scenario(
    plan: PlacementPlan, scenario: Scenario, topology: Topology
) -> tuple[EventLog, SimMetrics]:
    return run(
        plan,
        scenario.readings,
        topology,
        scenario_seed=scenario.config.seed,
        confusion_rate=scenario.config.noise.confusion_rate,
        drop_rate=scenario.config.noise.drop_rate,
        inject=scenario.config.inject,
    )


def run_scenario_with_insights(
    plan: PlacementPlan, scenario: Scenario, topology: Topology
) -> RunResult:
    return run_with_insights(
        plan,
        scenario.readings,
        topology,
        scenario_seed=scenario.config.seed,
        confusion_rate=scenario.config.noise.confusion_rate,
        drop_rate=scenario.config.noise.drop_rate,
        inject=scenario.config.inject,
    )


# --- Comparison -----------------------------------------------------------------

@dataclass(frozen=True)
class MetricDelta:
    name: str
    a: float
    b: float
    delta: float  # a minus b
    ratio: float | None  # a over b, None when b is zero


@dataclass(frozen=True)
class ComparisonReport:
    label_a: str
    label_b: str
    scenario_seed: int
    deltas: tuple[MetricDelta, ...]

    def delta(self, name: str) -> MetricDelta:
        for d in self.deltas:
            if d.name == name:
                return d
        raise KeyError(name)


_COMPARED_FIELDS = (
    "total_bytes_to_cloud",
    "event_count",
    "latency_mean",
    "latency_p95",
    "latency_max",
    "sensitive_crossings",
    "late_event_count",
    "dropped_count",
)


def compare(a: SimMetrics, b: SimMetrics) -> ComparisonReport:
    """Per-metric deltas (a minus b) and ratios for same-seed runs."""
    if a.scenario_seed != b.scenario_seed:
        raise SeedMismatch(
            f"cannot compare runs of different scenarios "
            f"(seed {a.scenario_seed} vs {b.scenario_seed})"
        )
    deltas = []
    for name in _COMPARED_FIELDS:
        va = float(getattr(a, name))
        vb = float(getattr(b, name))
        deltas.append(
            MetricDelta(
                name=name,
                a=va,
                b=vb,
                delta=round(va - vb, 6),
                ratio=round(va / vb, 6) if vb != 0 else None,
            )
        )
    return ComparisonReport(
        label_a=a.plan_label,
        label_b=b.plan_label,
        scenario_seed=a.scenario_seed,
        deltas=tuple(deltas),
    )


# --- Serialization ----------------------------------------------------------------

def metrics_to_json(m: SimMetrics) -> dict:
    return {
        "scenario_seed": m.scenario_seed,
        "plan_label": m.plan_label,
        "bytes_per_link": dict(m.bytes_per_link),
        "total_bytes_to_cloud": m.total_bytes_to_cloud,
        "event_count": m.event_count,
        "latency": {"mean": m.latency_mean, "p95": m.latency_p95, "max": m.latency_max},
        "sensitive_crossings": m.sensitive_crossings,
        "late_event_count": m.late_event_count,
        "dropped_count": m.dropped_count,
    }


def metrics_from_json(record: Mapping) -> SimMetrics:
    latency = record.get("latency", {})
    return SimMetrics(
        scenario_seed=int(record["scenario_seed"]),
        plan_label=record.get("plan_label", ""),
        bytes_per_link={k: int(v) for k, v in record.get("bytes_per_link", {}).items()},
        total_bytes_to_cloud=int(record["total_bytes_to_cloud"]),
        event_count=int(record.get("event_count", 0)),
        latency_mean=float(latency.get("mean", 0.0)),
        latency_p95=float(latency.get("p95", 0.0)),
        latency_max=float(latency.get("max", 0.0)),
        sensitive_crossings=int(record.get("sensitive_crossings", 0)),
        late_event_count=int(record.get("late_event_count", 0)),
        dropped_count=int(record.get("dropped_count", 0)),
    )


def save_metrics(m: SimMetrics, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metrics_to_json(m), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_metrics(path) -> SimMetrics:
    with open(path, encoding="utf-8") as fh:
        return metrics_from_json(json.load(fh))


def comparison_to_json(report: ComparisonReport) -> dict:
    return {
        "a": report.label_a,
        "b": report.label_b,
        "scenario_seed": report.scenario_seed,
        "deltas": [
            {
                "name": d.name,
                "a": d.a,
                "b": d.b,
                "delta": d.delta,
                "ratio": d.ratio,
            }
            for d in report.deltas
        ],
    }


def format_metrics_table(m: SimMetrics) -> str:
    rows = [
        ("plan", m.plan_label),
        ("events", str(m.event_count)),
        ("bytes to cloud", str(m.total_bytes_to_cloud)),
        ("latency mean (s)", f"{m.latency_mean:.3f}"),
        ("latency p95 (s)", f"{m.latency_p95:.3f}"),
        ("latency max (s)", f"{m.latency_max:.3f}"),
        ("sensitive crossings", str(m.sensitive_crossings)),
        ("late events", str(m.late_event_count)),
        ("dropped messages", str(m.dropped_count)),
    ]
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name.ljust(width)}  {value}" for name, value in rows)


def format_comparison_table(report: ComparisonReport) -> str:
    name_w = max(len(d.name) for d in report.deltas)
    header = (
        f"{'metric'.ljust(name_w)}  {report.label_a:>14}  {report.label_b:>14}"
        f"  {'delta':>14}  {'ratio':>8}"
    )
    lines = [header]
    for d in report.deltas:
        ratio = f"{d.ratio:.4f}" if d.ratio is not None else "-"
        lines.append(
            f"{d.name.ljust(name_w)}  {d.a:>14.3f}  {d.b:>14.3f}  {d.delta:>14.3f}  {ratio:>8}"
        )
    return "\n".join(lines)
