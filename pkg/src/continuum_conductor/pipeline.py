"""Pipeline stages 1-3: preprocessing, fusion, correlation, skew correction.

Every operator is a single-threaded state machine over immutable events.
Recognition is simulated: a seeded confusion of the reading's ground-truth
label stands in for the real model and its confidence expresses the
uncertainty the downstream filter acts on.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .continuum import Topology
from .errors import MissingCaseId, ParseError
from .events import HighLevelEvent, LowLevelEvent, RawReading
from .rng import rng_for

PERSON_HINT_PREFIX = "person:"


@dataclass(frozen=True)
class PreprocessConfig:
    anonymize: bool = False
    filter_min_confidence: float = 0.0
    reduction_ratio: float = 1.0
    per_reading_cost: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.reduction_ratio <= 1.0:
            raise ValueError(f"reduction_ratio must be in (0,1], got {self.reduction_ratio}")
        if not 0.0 <= self.filter_min_confidence <= 1.0:
            raise ValueError("filter_min_confidence must be in [0,1]")
        if self.per_reading_cost < 0:
            raise ValueError("per_reading_cost must be >= 0")


@dataclass(frozen=True)
class Recognizer:
    """Seeded stand-in for activity recognition.

    With probability confusion_rate the true label is swapped for another
    alphabet member; confidence is drawn high for correct and low for
    confused recognitions, per-reading deterministic.
    """

    seed: int = 0
    confusion_rate: float = 0.0
    alphabet: tuple[str, ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.confusion_rate <= 1.0:
            raise ValueError("confusion_rate must be in [0,1]")

    def recognize(self, reading: RawReading) -> tuple[str, float] | None:
        if reading.truth_label is None:
            return None
        rng = rng_for(self.seed, "recognize", reading.reading_id)
        others = [l for l in self.alphabet if l != reading.truth_label]
        confused = bool(others) and rng.random() < self.confusion_rate
        if confused:
            label = rng.choice(others)
            confidence = 0.35 + 0.30 * rng.random()
        else:
            label = reading.truth_label
            confidence = 0.75 + 0.25 * rng.random()
        return label, round(confidence, 6)


PERFECT_RECOGNIZER = Recognizer()


def preprocess(
    reading: RawReading,
    config: PreprocessConfig,
    recognizer: Recognizer = PERFECT_RECOGNIZER,
) -> LowLevelEvent | None:
    """One reading in, at most one low-level event out.

    Unrecognizable readings and recognitions below the confidence filter
    are dropped, which is a normal outcome, not an error. Anonymization
    clears the sensitive flag and strips person-identifying hints; object
    codes survive because correlation needs them.
    """
    recognized = recognizer.recognize(reading)
    if recognized is None:
        return None
    label, confidence = recognized
    if confidence < config.filter_min_confidence:
        return None

    object_hint = reading.truth_object
    sensitive = reading.sensitive
    if config.anonymize:
        sensitive = False
        if object_hint is not None and object_hint.startswith(PERSON_HINT_PREFIX):
            object_hint = None

    return LowLevelEvent(
        event_id=f"ll-{reading.reading_id}",
        source=reading.source,
        time=reading.observed_time,
        label=label,
        confidence=confidence,
        size=math.ceil(reading.payload_size * config.reduction_ratio),
        object_hint=object_hint,
        sensitive=sensitive,
    )


# --- Fusion -------------------------------------------------------------------

@dataclass(frozen=True)
class FusionRule:
    rule_id: str
    input_labels: frozenset[str]
    window: float
    min_sources: int
    output_activity: str
    # Optional contributor filter: {"object_prefix": p} and/or {"source_prefix": p}.
    context_guard: Mapping[str, str] | None = None

    def __post_init__(self):
        if self.window <= 0:
            raise ValueError("window must be > 0")
        if self.min_sources < 1:
            raise ValueError("min_sources must be >= 1")

    def admits(self, event: LowLevelEvent) -> bool:
        if event.label not in self.input_labels:
            return False
        if not self.context_guard:
            return True
        for key, value in self.context_guard.items():
            if key == "object_prefix":
                if event.object_hint is None or not event.object_hint.startswith(value):
                    return False
            elif key == "source_prefix":
                if not event.source.startswith(value):
                    return False
            else:
                raise ValueError(f"unknown context_guard key {key!r}")
        return True


class Fuser:
    """Window-close fusion of low-level events into high-level events.

    Per rule, matching events collect into an event-time window anchored at
    the first contributor; the window fires when a matching event falls
    beyond it or at flush. Firing needs min_sources distinct sources. Each
    low-level event joins at most one window per rule, so it is consumed by
    at most one firing.
    """

    def __init__(self, rules: Sequence[FusionRule], namespace: str = "fus"):
        self.rules = list(rules)
        self.namespace = namespace
        self._open: dict[str, list[LowLevelEvent]] = {r.rule_id: [] for r in self.rules}
        self._counters: dict[str, int] = {r.rule_id: 0 for r in self.rules}
        # Contributor low-level ids per fired event, for latency accounting.
        self.contributors: dict[str, tuple[str, ...]] = {}

    def feed(self, events: Iterable[LowLevelEvent]) -> list[HighLevelEvent]:
        out: list[HighLevelEvent] = []
        for event in sorted(events, key=lambda e: (e.time, e.event_id)):
            # Every arrival advances event time for all rules: windows whose
            # span has passed expire before the new event is admitted.
            for rule in self.rules:
                window = self._open[rule.rule_id]
                # Windows are anchored at their earliest member's event time;
                # a straggler may arrive late in the stream yet still belong.
                anchor = min((w.time for w in window), default=event.time)
                if window and event.time - anchor > rule.window:
                    fired = self._close(rule)
                    if fired is not None:
                        out.append(fired)
            for rule in self.rules:
                if rule.admits(event):
                    self._open[rule.rule_id].append(event)
        return out

    def flush(self) -> list[HighLevelEvent]:
        out = []
        for rule in self.rules:
            fired = self._close(rule)
            if fired is not None:
                out.append(fired)
        out.sort(key=lambda e: (e.time, e.event_id))
        return out

    def _close(self, rule: FusionRule) -> HighLevelEvent | None:
        contributors = self._open[rule.rule_id]
        self._open[rule.rule_id] = []
        if not contributors:
            return None
        if len({c.source for c in contributors}) < rule.min_sources:
            return None

        weights: dict[str, float] = {}
        for c in contributors:
            if c.object_hint is not None:
                weights[c.object_hint] = weights.get(c.object_hint, 0.0) + c.confidence
        if weights:
            best = max(weights.values())
            leaders = sorted(h for h, w in weights.items() if w == best)
            case_id = leaders[0]
            ambiguous = len(leaders) > 1
        else:
            case_id = "unknown"
            ambiguous = True

        self._counters[rule.rule_id] += 1
        n = self._counters[rule.rule_id]
        mean_conf = sum(c.confidence for c in contributors) / len(contributors)
        attributes = {
            "rule": rule.rule_id,
            "sources": str(len({c.source for c in contributors})),
            "confidence": f"{mean_conf:.3f}",
        }
        if ambiguous:
            attributes["ambiguous"] = "1"
        event_id = f"{self.namespace}:{rule.rule_id}:{n}"
        self.contributors[event_id] = tuple(c.event_id for c in contributors)
        return HighLevelEvent(
            event_id=event_id,
            time=min(c.time for c in contributors),
            activity=rule.output_activity,
            case_id=case_id,
            size=min(sum(c.size for c in contributors), 256),
            attributes=attributes,
        )


def fuse(events: Iterable[LowLevelEvent], rules: Sequence[FusionRule],
         namespace: str = "fus") -> list[HighLevelEvent]:
    """Batch fusion: feed everything, then flush, in one deterministic pass."""
    fuser = Fuser(rules, namespace=namespace)
    out = fuser.feed(events)
    out.extend(fuser.flush())
    out.sort(key=lambda e: (e.time, e.event_id))
    return out


def rules_to_json(rules: Iterable[FusionRule]) -> list[dict]:
    out = []
    for r in rules:
        record = {
            "id": r.rule_id,
            "input_labels": sorted(r.input_labels),
            "window": r.window,
            "min_sources": r.min_sources,
            "output_activity": r.output_activity,
        }
        if r.context_guard:
            record["context_guard"] = dict(sorted(r.context_guard.items()))
        out.append(record)
    return out


def rules_from_json(records: Iterable[Mapping]) -> list[FusionRule]:
    try:
        return [
            FusionRule(
                rule_id=r["id"],
                input_labels=frozenset(r["input_labels"]),
                window=float(r["window"]),
                min_sources=int(r["min_sources"]),
                output_activity=r["output_activity"],
                context_guard=r.get("context_guard"),
            )
            for r in records
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad fusion rule: {exc}") from exc


def load_rules(path) -> list[FusionRule]:
    with open(path, encoding="utf-8") as fh:
        try:
            records = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}", line=exc.lineno) from exc
    return rules_from_json(records)


# --- Correlation ----------------------------------------------------------------

@dataclass
class CorrelatorState:
    """Per-case buffers with an event-time watermark.

    An event is held until stream time passes event.time + watermark, then
    emitted in (time, event_id) order within its case. Events arriving
    below their case's emission high-water mark are late: they reopen the
    case as a fresh instance `case#k` and are flagged.
    """

    watermark: float
    buffers: dict[str, list[HighLevelEvent]] = field(default_factory=dict)
    emitted_low_time: dict[str, float] = field(default_factory=dict)
    late_instances: dict[str, int] = field(default_factory=dict)
    late_events: int = 0
    stream_time: float = float("-inf")

    def __post_init__(self):
        if self.watermark < 0:
            raise ValueError("watermark must be >= 0")


def _drain(state: CorrelatorState, horizon: float | None) -> list[HighLevelEvent]:
    """Emit buffered events with time <= horizon (all of them if None)."""
    emitted: list[HighLevelEvent] = []
    for case_id in sorted(state.buffers):
        buffer = state.buffers[case_id]
        buffer.sort(key=lambda e: (e.time, e.event_id))
        keep: list[HighLevelEvent] = []
        for event in buffer:
            if horizon is None or event.time <= horizon:
                emitted.append(event)
                state.emitted_low_time[case_id] = max(
                    state.emitted_low_time.get(case_id, float("-inf")), event.time
                )
            else:
                keep.append(event)
        state.buffers[case_id] = keep
    emitted.sort(key=lambda e: (e.time, e.event_id))
    return emitted


def correlate(
    events: Iterable[HighLevelEvent], state: CorrelatorState
) -> tuple[list[HighLevelEvent], CorrelatorState]:
    """Feed events through the watermark buffer; returns what got emitted."""
    out: list[HighLevelEvent] = []
    for event in sorted(events, key=lambda e: (e.time, e.event_id)):
        if not event.case_id:
            raise MissingCaseId("correlation requires a case id")
        state.stream_time = max(state.stream_time, event.time)
        low = state.emitted_low_time.get(event.case_id)
        if low is not None and event.time < low:
            state.late_events += 1
            k = state.late_instances.get(event.case_id, 1) + 1
            state.late_instances[event.case_id] = k
            attributes = dict(event.attributes)
            attributes["late"] = "1"
            out.append(
                HighLevelEvent(
                    event_id=event.event_id,
                    time=event.time,
                    activity=event.activity,
                    case_id=f"{event.case_id}#{k}",
                    size=event.size,
                    attributes=attributes,
                )
            )
            continue
        state.buffers.setdefault(event.case_id, []).append(event)
        out.extend(_drain(state, state.stream_time - state.watermark))
    return out, state


def flush_correlator(state: CorrelatorState) -> list[HighLevelEvent]:
    """End of stream: everything still buffered is emitted in order."""
    return _drain(state, None)


def apply_skew_correction(
    events: Iterable[LowLevelEvent], topology: Topology, enabled: bool = True
) -> list[LowLevelEvent]:
    """Subtract each source's clock skew, restoring true time; no-op if disabled."""
    out = []
    for event in events:
        skew = topology.node(event.source).clock_skew
        if enabled and skew != 0.0:
            event = LowLevelEvent(
                event_id=event.event_id,
                source=event.source,
                time=round(event.time - skew, 9),
                label=event.label,
                confidence=event.confidence,
                size=event.size,
                object_hint=event.object_hint,
                sensitive=event.sensitive,
            )
        out.append(event)
    return out
