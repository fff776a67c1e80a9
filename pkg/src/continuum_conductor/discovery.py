"""Model discovery and insight extraction over event logs.

Discovery is footprint-matrix based: directly-follows counts feed a
footprint, the footprint feeds a classic alpha-style net construction.
Partial graphs from case-disjoint log fragments merge by count addition;
the footprint is always derived after merging because footprints themselves
merge lossily (two one-sided causality fragments hide a parallel pair).
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from statistics import fmean

from .errors import DegenerateLog
from .events import EventLog


@dataclass(frozen=True)
class DirectlyFollowsGraph:
    """Immediate-succession counts within traces, plus trace boundary counts."""

    activities: tuple[str, ...] = ()
    edge_counts: Mapping[tuple[str, str], int] = field(default_factory=dict)
    start_counts: Mapping[str, int] = field(default_factory=dict)
    end_counts: Mapping[str, int] = field(default_factory=dict)

    def count(self, a: str, b: str) -> int:
        return self.edge_counts.get((a, b), 0)

    def num_traces(self) -> int:
        return sum(self.start_counts.values())


def dfg_from_log(log: EventLog) -> DirectlyFollowsGraph:
    seen: set[str] = set()
    edges: dict[tuple[str, str], int] = {}
    starts: dict[str, int] = {}
    ends: dict[str, int] = {}

    for case_id in log.case_ids():
        trace = log.traces[case_id]
        if not trace:
            continue
        labels = [e.activity for e in trace]
        seen.update(labels)
        starts[labels[0]] = starts.get(labels[0], 0) + 1
        ends[labels[-1]] = ends.get(labels[-1], 0) + 1
        for a, b in zip(labels, labels[1:]):
            edges[(a, b)] = edges.get((a, b), 0) + 1

    return DirectlyFollowsGraph(
        activities=tuple(sorted(seen)),
        edge_counts=edges,
        start_counts=starts,
        end_counts=ends,
    )


def merge_dfg(parts: Iterable[DirectlyFollowsGraph]) -> DirectlyFollowsGraph:
    """Pointwise sum of counts; valid when each case lived in exactly one part."""
    seen: set[str] = set()
    edges: dict[tuple[str, str], int] = {}
    starts: dict[str, int] = {}
    ends: dict[str, int] = {}

    for part in parts:
        seen.update(part.activities)
        for key, n in part.edge_counts.items():
            edges[key] = edges.get(key, 0) + n
        for label, n in part.start_counts.items():
            starts[label] = starts.get(label, 0) + n
        for label, n in part.end_counts.items():
            ends[label] = ends.get(label, 0) + n

    return DirectlyFollowsGraph(
        activities=tuple(sorted(seen)),
        edge_counts=edges,
        start_counts=starts,
        end_counts=ends,
    )


class Relation(str, enum.Enum):
    CAUSALITY = "->"
    REVERSE = "<-"
    PARALLEL = "||"
    CHOICE = "#"


@dataclass(frozen=True)
class FootprintMatrix:
    activities: tuple[str, ...]
    relations: Mapping[tuple[str, str], Relation]

    def relation(self, a: str, b: str) -> Relation:
        return self.relations[(a, b)]

    def permits(self, a: str, b: str) -> bool:
        """Whether b directly after a conforms to this footprint."""
        rel = self.relations.get((a, b))
        return rel in (Relation.CAUSALITY, Relation.PARALLEL)


def footprint(dfg: DirectlyFollowsGraph, min_count: int = 1) -> FootprintMatrix:
    """Footprint relations from the graph; edges below min_count are noise."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    relations: dict[tuple[str, str], Relation] = {}
    for a in dfg.activities:
        for b in dfg.activities:
            ab = dfg.count(a, b) >= min_count
            ba = dfg.count(b, a) >= min_count
            if ab and ba:
                rel = Relation.PARALLEL
            elif ab:
                rel = Relation.CAUSALITY
            elif ba:
                rel = Relation.REVERSE
            else:
                rel = Relation.CHOICE
            relations[(a, b)] = rel
    return FootprintMatrix(activities=dfg.activities, relations=relations)


@dataclass(frozen=True)
class Place:
    inputs: frozenset[str]
    outputs: frozenset[str]

    def sort_key(self) -> tuple:
        return (sorted(self.inputs), sorted(self.outputs))


@dataclass(frozen=True)
class ProcessNet:
    transitions: tuple[str, ...]
    places: tuple[Place, ...]
    source: Place
    sink: Place


def _choice_closed_subsets(candidates: list[str], fp: FootprintMatrix) -> list[frozenset[str]]:
    """All non-empty subsets whose members are pairwise (and self) Choice."""
    subsets: list[frozenset[str]] = []

    def extend(base: tuple[str, ...], rest: list[str]):
        for i, x in enumerate(rest):
            if fp.relation(x, x) is not Relation.CHOICE:
                continue
            if all(fp.relation(x, y) is Relation.CHOICE for y in base):
                cur = base + (x,)
                subsets.append(frozenset(cur))
                extend(cur, rest[i + 1 :])

    extend((), candidates)
    return subsets


def alpha_net(fp: FootprintMatrix, dfg: DirectlyFollowsGraph) -> ProcessNet:
    """Classic alpha construction from a footprint.

    Places are the maximal (A, B) pairs with causality from every a in A to
    every b in B and choice inside A and inside B, plus a source place into
    the start activities and a sink place out of the end activities.
    """
    starts = frozenset(dfg.start_counts)
    ends = frozenset(dfg.end_counts)
    if not starts or not ends:
        raise DegenerateLog("net construction needs at least one trace")

    sources = [a for a in fp.activities if any(
        fp.relation(a, b) is Relation.CAUSALITY for b in fp.activities)]
    targets = [b for b in fp.activities if any(
        fp.relation(a, b) is Relation.CAUSALITY for a in fp.activities)]

    candidate_as = _choice_closed_subsets(sources, fp)
    candidate_bs = _choice_closed_subsets(targets, fp)

    pairs = [
        (a_set, b_set)
        for a_set in candidate_as
        for b_set in candidate_bs
        if all(fp.relation(a, b) is Relation.CAUSALITY for a in a_set for b in b_set)
    ]
    maximal = [
        (a_set, b_set)
        for a_set, b_set in pairs
        if not any(
            (a_set, b_set) != (a2, b2) and a_set <= a2 and b_set <= b2
            for a2, b2 in pairs
        )
    ]

    places = sorted((Place(inputs=a, outputs=b) for a, b in maximal), key=Place.sort_key)
    source = Place(inputs=frozenset(), outputs=starts)
    sink = Place(inputs=ends, outputs=frozenset())
    return ProcessNet(
        transitions=fp.activities,
        places=tuple(places),
        source=source,
        sink=sink,
    )


def fitness(log: EventLog, fp: FootprintMatrix) -> float:
    """Fraction of adjacent in-trace pairs the footprint permits; 1.0 if none."""
    permitted = 0
    total = 0
    for case_id in log.case_ids():
        trace = log.traces[case_id]
        for prev, nxt in zip(trace, trace[1:]):
            total += 1
            if fp.permits(prev.activity, nxt.activity):
                permitted += 1
    return permitted / total if total else 1.0


@dataclass(frozen=True)
class ActivityStat:
    observations: int
    service_mean: float
    service_max: float
    waiting_mean: float
    waiting_max: float


@dataclass(frozen=True)
class Kpis:
    throughput: Mapping[str, float]  # per case, last minus first event time
    activity_stats: Mapping[str, ActivityStat]
    fitness: float | None = None

    def throughput_mean(self) -> float:
        return fmean(self.throughput.values()) if self.throughput else 0.0


def kpis(
    log: EventLog,
    activity_durations: Mapping[str, float] | None = None,
    fitness_value: float | None = None,
) -> Kpis:
    """Throughput per case plus per-activity service/waiting statistics.

    An activity's declared duration caps its observable service time at the
    gap to the next event; whatever the gap has left over is waiting time
    attributed to the successor activity.
    """
    durations = activity_durations or {}
    throughput: dict[str, float] = {}
    service: dict[str, list[float]] = {}
    waiting: dict[str, list[float]] = {}

    for case_id in log.case_ids():
        trace = log.traces[case_id]
        if not trace:
            continue
        throughput[case_id] = trace[-1].time - trace[0].time
        for prev, nxt in zip(trace, trace[1:]):
            gap = nxt.time - prev.time
            served = min(gap, durations.get(prev.activity, 0.0))
            service.setdefault(prev.activity, []).append(served)
            waiting.setdefault(nxt.activity, []).append(gap - served)

    stats: dict[str, ActivityStat] = {}
    for activity in sorted(set(service) | set(waiting)):
        s = service.get(activity, [])
        w = waiting.get(activity, [])
        stats[activity] = ActivityStat(
            observations=max(len(s), len(w)),
            service_mean=fmean(s) if s else 0.0,
            service_max=max(s) if s else 0.0,
            waiting_mean=fmean(w) if w else 0.0,
            waiting_max=max(w) if w else 0.0,
        )
    return Kpis(throughput=throughput, activity_stats=stats, fitness=fitness_value)


# --- Text exports -------------------------------------------------------------

def footprint_grid(fp: FootprintMatrix) -> str:
    """Plain-text relation grid in the footprint's activity order."""
    names = list(fp.activities)
    width = max([len(n) for n in names] + [2]) if names else 2
    header = " " * (width + 1) + " ".join(n.ljust(width) for n in names)
    rows = [header.rstrip()]
    for a in names:
        cells = " ".join(fp.relation(a, b).value.ljust(width) for b in names)
        rows.append(f"{a.ljust(width)} {cells}".rstrip())
    return "\n".join(rows) + "\n"


def _place_name(place: Place, index: int) -> str:
    if not place.inputs:
        return "source"
    if not place.outputs:
        return "sink"
    return f"p{index}"


def net_to_dot(net: ProcessNet) -> str:
    """Dot text for eyeballing the net; not parsed back."""
    lines = ["digraph net {", "  rankdir=LR;"]
    for t in net.transitions:
        lines.append(f'  "{t}" [shape=box];')
    all_places = [net.source, *net.places, net.sink]
    for i, place in enumerate(all_places):
        name = _place_name(place, i)
        lines.append(f'  "{name}" [shape=circle, label=""];')
        for a in sorted(place.inputs):
            lines.append(f'  "{a}" -> "{name}";')
        for b in sorted(place.outputs):
            lines.append(f'  "{name}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
