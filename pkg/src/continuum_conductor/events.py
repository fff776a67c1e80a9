"""Data shapes for every pipeline hand-off, plus their file formats.

Raw sensor readings become low-level events, then high-level events grouped
into an event log. Files are line-delimited UTF-8 with comma-separated
fields in fixed order; free-text fields are percent-escaped so one record
is always one line. Ground-truth fields on readings travel in `#truth`
comment lines that pipeline readers skip.
"""

from __future__ import annotations

import enum
import json
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field, replace
from urllib.parse import quote, unquote

from .errors import DuplicateEvent, EmptyCaseId, ParseError

# Characters that must never appear raw inside a field.
_SAFE = " :._-/"


def _esc(value: str) -> str:
    return quote(value, safe=_SAFE)


def _unesc(value: str) -> str:
    return unquote(value)


def format_time(t: float) -> str:
    """Fixed 3-digit decimal seconds; the one time format used in files."""
    return f"{t:.3f}"


class ReadingKind(str, enum.Enum):
    FRAME = "frame"
    GPS = "gps"
    ACCEL = "accel"
    SPREADER_HEIGHT = "spreader_height"


@dataclass(frozen=True)
class RawReading:
    """One sensor emission.

    truth_label/truth_object carry generator ground truth for scoring and
    never flow through pipeline operators. emit_delay postpones arrival at
    the pipeline without moving the reading's own timestamps.
    """

    reading_id: str
    source: str
    kind: ReadingKind
    true_time: float
    observed_time: float
    payload_size: int
    sensitive: bool = False
    emit_delay: float = 0.0
    truth_label: str | None = None
    truth_object: str | None = None

    def __post_init__(self):
        if self.payload_size <= 0:
            raise ValueError(f"payload_size must be > 0, got {self.payload_size}")
        if self.emit_delay < 0:
            raise ValueError("emit_delay must be >= 0")

    def without_truth(self) -> "RawReading":
        return replace(self, truth_label=None, truth_object=None)


@dataclass(frozen=True)
class LowLevelEvent:
    event_id: str
    source: str
    time: float
    label: str
    confidence: float
    size: int
    object_hint: str | None = None
    sensitive: bool = False

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0,1], got {self.confidence}")
        if self.size <= 0:
            raise ValueError(f"size must be > 0, got {self.size}")


@dataclass(frozen=True)
class HighLevelEvent:
    event_id: str
    time: float
    activity: str
    case_id: str
    size: int
    attributes: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.case_id:
            raise EmptyCaseId("high-level event requires a case id")
        for key in self.attributes:
            if key.startswith("_"):
                raise ValueError(f"attribute keys starting with '_' are reserved: {key!r}")


def _trace_key(e: HighLevelEvent) -> tuple[float, str]:
    return (e.time, e.event_id)


@dataclass(frozen=True)
class EventLog:
    """Traces per case id; within a trace events sort by (time, event_id)."""

    traces: Mapping[str, tuple[HighLevelEvent, ...]] = field(default_factory=dict)

    def case_ids(self) -> list[str]:
        return sorted(self.traces)

    def events(self) -> Iterable[HighLevelEvent]:
        """All events in canonical (case, time, event_id) order."""
        for case_id in self.case_ids():
            yield from self.traces[case_id]

    def num_events(self) -> int:
        return sum(len(t) for t in self.traces.values())

    def event_ids(self) -> set[str]:
        return {e.event_id for e in self.events()}

    def activities(self) -> set[str]:
        return {e.activity for e in self.events()}

    @classmethod
    def from_events(cls, events: Iterable[HighLevelEvent]) -> "EventLog":
        seen: set[str] = set()
        traces: dict[str, list[HighLevelEvent]] = {}
        for event in events:
            if not event.case_id:
                raise EmptyCaseId("high-level event requires a case id")
            if event.event_id in seen:
                raise DuplicateEvent(f"event id {event.event_id!r} already present")
            seen.add(event.event_id)
            traces.setdefault(event.case_id, []).append(event)
        return cls(
            traces={c: tuple(sorted(t, key=_trace_key)) for c, t in traces.items()}
        )


def append(log: EventLog, event: HighLevelEvent) -> EventLog:
    """A new log with the event slotted into its case's trace in time order."""
    if not event.case_id:
        raise EmptyCaseId("high-level event requires a case id")
    if event.event_id in log.event_ids():
        raise DuplicateEvent(f"event id {event.event_id!r} already present")
    traces = dict(log.traces)
    trace = list(traces.get(event.case_id, ()))
    trace.append(event)
    trace.sort(key=_trace_key)
    traces[event.case_id] = tuple(trace)
    return EventLog(traces=traces)


# --- Event log files --------------------------------------------------------

def _attrs_to_field(event: HighLevelEvent) -> str:
    pairs = [("_id", event.event_id), ("_size", str(event.size))]
    pairs.extend(sorted(event.attributes.items()))
    return ";".join(f"{_esc(k)}={_esc(v)}" for k, v in pairs)


def _attrs_from_field(raw: str, line_no: int) -> tuple[str, int, dict[str, str]]:
    event_id = None
    size = None
    attrs: dict[str, str] = {}
    if raw:
        for pair in raw.split(";"):
            if "=" not in pair:
                raise ParseError(f"malformed attribute {pair!r}", line=line_no)
            key, value = pair.split("=", 1)
            key, value = _unesc(key), _unesc(value)
            if key == "_id":
                event_id = value
            elif key == "_size":
                size = value
            else:
                attrs[key] = value
    if event_id is None or size is None:
        raise ParseError("record lacks _id/_size attributes", line=line_no)
    try:
        return event_id, int(size), attrs
    except ValueError:
        raise ParseError(f"bad size {size!r}", line=line_no) from None


def log_to_lines(log: EventLog) -> list[str]:
    events = sorted(log.events(), key=lambda e: (e.case_id, e.time, e.event_id))
    return [
        ",".join(
            (_esc(e.case_id), _esc(e.activity), format_time(e.time), _attrs_to_field(e))
        )
        for e in events
    ]


def write_log(log: EventLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in log_to_lines(log):
            fh.write(line + "\n")


def read_log(path) -> EventLog:
    with open(path, encoding="utf-8") as fh:
        return log_from_lines(fh)


def log_from_lines(lines: Iterable[str]) -> EventLog:
    log = EventLog()
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split(",", 3)
        if len(parts) != 4:
            raise ParseError(f"expected 4 fields, got {len(parts)}", line=line_no)
        case_raw, activity_raw, time_raw, attrs_raw = parts
        try:
            time = float(time_raw)
        except ValueError:
            raise ParseError(f"bad time {time_raw!r}", line=line_no) from None
        event_id, size, attrs = _attrs_from_field(attrs_raw, line_no)
        event = HighLevelEvent(
            event_id=event_id,
            time=time,
            activity=_unesc(activity_raw),
            case_id=_unesc(case_raw),
            size=size,
            attributes=attrs,
        )
        log = append(log, event)
    return log


# --- Raw reading files -------------------------------------------------------

def readings_to_lines(readings: Iterable[RawReading], include_truth: bool = True) -> list[str]:
    lines = []
    for r in readings:
        lines.append(
            ",".join(
                (
                    _esc(r.reading_id),
                    _esc(r.source),
                    r.kind.value,
                    format_time(r.true_time),
                    format_time(r.observed_time),
                    str(r.payload_size),
                    "1" if r.sensitive else "0",
                    format_time(r.emit_delay),
                )
            )
        )
        if include_truth and (r.truth_label or r.truth_object):
            label = _esc(r.truth_label or "")
            obj = _esc(r.truth_object or "")
            lines.append(f"#truth,{_esc(r.reading_id)},{label},{obj}")
    return lines


def write_readings(readings: Iterable[RawReading], path, include_truth: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in readings_to_lines(readings, include_truth=include_truth):
            fh.write(line + "\n")


def read_readings(path, include_truth: bool = False) -> list[RawReading]:
    """Parse a readings file; `#` lines are skipped unless truth is requested."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()

    truth: dict[str, tuple[str | None, str | None]] = {}
    if include_truth:
        for line_no, line in enumerate(lines, start=1):
            line = line.rstrip("\n")
            if not line.startswith("#truth,"):
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ParseError(f"malformed truth line", line=line_no)
            rid = _unesc(parts[1])
            truth[rid] = (_unesc(parts[2]) or None, _unesc(parts[3]) or None)

    readings: list[RawReading] = []
    for line_no, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise ParseError(f"expected 8 fields, got {len(parts)}", line=line_no)
        try:
            kind = ReadingKind(parts[2])
            true_time = float(parts[3])
            observed_time = float(parts[4])
            payload = int(parts[5])
            sensitive = parts[6] == "1"
            emit_delay = float(parts[7])
        except ValueError as exc:
            raise ParseError(f"bad reading field: {exc}", line=line_no) from None
        rid = _unesc(parts[0])
        label, obj = truth.get(rid, (None, None))
        readings.append(
            RawReading(
                reading_id=rid,
                source=_unesc(parts[1]),
                kind=kind,
                true_time=true_time,
                observed_time=observed_time,
                payload_size=payload,
                sensitive=sensitive,
                emit_delay=emit_delay,
                truth_label=label,
                truth_object=obj,
            )
        )
    return readings


# --- JSON views for the HTTP service -----------------------------------------

def high_level_event_to_json(e: HighLevelEvent) -> dict:
    return {
        "event_id": e.event_id,
        "time": round(e.time, 3),
        "activity": e.activity,
        "case_id": e.case_id,
        "size": e.size,
        "attributes": dict(sorted(e.attributes.items())),
    }


def log_to_json(log: EventLog) -> dict:
    return {
        "traces": {
            case_id: [high_level_event_to_json(e) for e in log.traces[case_id]]
            for case_id in log.case_ids()
        }
    }


def log_from_json(record: Mapping) -> EventLog:
    events = []
    for trace in record.get("traces", {}).values():
        for r in trace:
            events.append(
                HighLevelEvent(
                    event_id=r["event_id"],
                    time=float(r["time"]),
                    activity=r["activity"],
                    case_id=r["case_id"],
                    size=int(r["size"]),
                    attributes=dict(r.get("attributes", {})),
                )
            )
    return EventLog.from_events(events)


def dumps_log(log: EventLog) -> str:
    return json.dumps(log_to_json(log), sort_keys=True)
