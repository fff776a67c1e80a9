"""Seeded inland-port scenario generator.

Cargo units move through a fixed lifecycle (arrive, register, unload,
store, optionally relocate, load, depart). Each lifecycle step is watched
by at least two sensors; the generator emits their raw readings with
configurable noise and keeps a ground-truth event log for scoring. The
same seed always yields byte-identical output.
"""

from __future__ import annotations

import json
from collections.abc import Mapping
from dataclasses import dataclass, field

from .errors import ParseError
from .events import EventLog, HighLevelEvent, RawReading, ReadingKind
from .rng import rng_for

ACTIVITIES = ("arrive", "register", "unload", "store", "relocate", "load", "depart")

# Seconds after the case start at which each lifecycle step happens.
SLOT_OFFSETS: dict[str, float] = {
    "arrive": 0.0,
    "register": 60.0,
    "unload": 120.0,
    "store": 180.0,
    "relocate": 210.0,
    "load": 240.0,
    "depart": 300.0,
}

_CARGO = "cargo"
_PERSON = "person"
_NONE = "none"

# Observation schedule: per activity, (source, label, kind, payload bytes,
# offset seconds, hint type). Every activity is covered by two distinct
# sources so fusion tolerates a single outage.
OBSERVATIONS: dict[str, tuple[tuple[str, str, ReadingKind, int, float, str], ...]] = {
    "arrive": (
        ("cam-gate-entry", "gate_entry_frame", ReadingKind.FRAME, 400_000, 0.0, _CARGO),
        ("cam-gate-exit", "gate_entry_frame", ReadingKind.FRAME, 400_000, 0.5, _CARGO),
    ),
    "register": (
        ("cam-gate-entry", "plate_read", ReadingKind.FRAME, 150_000, 0.0, _CARGO),
        ("cam-gate-exit", "driver_checkin", ReadingKind.FRAME, 200_000, 1.0, _PERSON),
    ),
    "unload": (
        ("cam-crane", "spreader_lift", ReadingKind.FRAME, 350_000, 0.0, _CARGO),
        ("sensor-box-crane", "spreader_height_change", ReadingKind.SPREADER_HEIGHT, 1_000, 0.5, _NONE),
        ("cam-crane", "spreader_setdown", ReadingKind.FRAME, 350_000, 8.0, _CARGO),
        ("sensor-box-crane", "spreader_height_change", ReadingKind.SPREADER_HEIGHT, 1_000, 8.5, _NONE),
    ),
    "store": (
        ("cam-reach-stacker", "stacker_move", ReadingKind.GPS, 2_000, 0.0, _CARGO),
        ("cam-drone", "aerial_stack_frame", ReadingKind.FRAME, 500_000, 2.0, _CARGO),
    ),
    "relocate": (
        ("cam-reach-stacker", "stacker_shuffle", ReadingKind.GPS, 2_000, 0.0, _CARGO),
        ("cam-drone", "aerial_restack_frame", ReadingKind.FRAME, 500_000, 2.0, _CARGO),
    ),
    "load": (
        ("cam-reach-stacker", "stacker_lift", ReadingKind.GPS, 2_000, 0.0, _CARGO),
        ("cam-drone", "aerial_load_frame", ReadingKind.FRAME, 500_000, 1.5, _CARGO),
    ),
    "depart": (
        ("cam-gate-exit", "gate_exit_frame", ReadingKind.FRAME, 400_000, 0.0, _CARGO),
        ("cam-gate-entry", "gate_exit_frame", ReadingKind.FRAME, 400_000, 0.5, _CARGO),
    ),
}

LOW_LEVEL_LABELS: tuple[str, ...] = tuple(
    sorted({obs[1] for schedule in OBSERVATIONS.values() for obs in schedule})
)


@dataclass(frozen=True)
class NoiseProfile:
    confusion_rate: float = 0.0
    duplicate_rate: float = 0.0
    delay_max: float = 0.0
    drop_rate: float = 0.0

    def __post_init__(self):
        for name in ("confusion_rate", "duplicate_rate", "drop_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {value}")
        if self.delay_max < 0:
            raise ValueError("delay_max must be >= 0")


@dataclass(frozen=True)
class DelayInjection:
    """Hold one case's activity back on its way into correlation.

    The delay applies to the fused event at the aggregation-to-correlation
    hand-off (the simulator consumes it); raw readings are not moved, so
    fusion stays intact and the lateness hits exactly one high-level event.
    """

    case_index: int  # 1-based
    activity: str
    delay: float


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 7
    n_cases: int = 100
    case_spacing: float = 35.0
    relocate_fraction: float = 0.3
    sensitive_fraction: float = 0.3
    noise: NoiseProfile = field(default_factory=NoiseProfile)
    inject: DelayInjection | None = None

    def __post_init__(self):
        if self.n_cases < 0:
            raise ValueError("n_cases must be >= 0")
        if self.case_spacing <= 0:
            raise ValueError("case_spacing must be > 0")
        for name in ("relocate_fraction", "sensitive_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {value}")


@dataclass(frozen=True)
class Scenario:
    config: ScenarioConfig
    readings: tuple[RawReading, ...]
    truth_log: EventLog  # the generator's ground-truth ledger


def case_id_for(index: int) -> str:
    return f"{_CARGO}:C{index:04d}"


def _case_activities(config: ScenarioConfig, index: int) -> list[str]:
    relocates = rng_for(config.seed, "relocate", index).random() < config.relocate_fraction
    return [a for a in ACTIVITIES if a != "relocate" or relocates]


def generate_scenario(config: ScenarioConfig, skews: Mapping[str, float] | None = None) -> Scenario:
    """Deterministic readings plus the ground-truth ledger.

    skews maps source node id to clock skew seconds; observed_time is
    true_time plus the source's skew, mirroring unsynchronized clocks.
    """
    skews = skews or {}
    readings: list[RawReading] = []
    truth_events: list[HighLevelEvent] = []

    for index in range(1, config.n_cases + 1):
        case_id = case_id_for(index)
        start = (index - 1) * config.case_spacing
        for activity in _case_activities(config, index):
            slot = start + SLOT_OFFSETS[activity]
            truth_events.append(
                HighLevelEvent(
                    event_id=f"gt:{index}:{activity}",
                    time=slot,
                    activity=activity,
                    case_id=case_id,
                    size=64,
                )
            )
            for obs_no, (source, label, kind, payload, offset, hint_type) in enumerate(
                OBSERVATIONS[activity]
            ):
                rid = f"r{index:04d}-{activity}-{obs_no}"
                true_time = slot + offset
                if hint_type == _CARGO:
                    hint = case_id
                elif hint_type == _PERSON:
                    hint = f"{_PERSON}:D{index:04d}"
                else:
                    hint = None

                if hint_type == _PERSON:
                    sensitive = True
                elif kind is ReadingKind.FRAME:
                    sensitive = (
                        rng_for(config.seed, "sensitive", rid).random()
                        < config.sensitive_fraction
                    )
                else:
                    sensitive = False

                delay = 0.0
                if config.noise.delay_max > 0:
                    delay = rng_for(config.seed, "delay", rid).random() * config.noise.delay_max

                reading = RawReading(
                    reading_id=rid,
                    source=source,
                    kind=kind,
                    true_time=true_time,
                    observed_time=round(true_time + skews.get(source, 0.0), 6),
                    payload_size=payload,
                    sensitive=sensitive,
                    emit_delay=round(delay, 6),
                    truth_label=label,
                    truth_object=hint,
                )
                readings.append(reading)
                if (
                    config.noise.duplicate_rate > 0
                    and rng_for(config.seed, "dup", rid).random() < config.noise.duplicate_rate
                ):
                    readings.append(
                        RawReading(
                            reading_id=f"{rid}-dup",
                            source=source,
                            kind=kind,
                            true_time=round(true_time + 0.2, 6),
                            observed_time=round(true_time + 0.2 + skews.get(source, 0.0), 6),
                            payload_size=payload,
                            sensitive=sensitive,
                            emit_delay=round(delay, 6),
                            truth_label=label,
                            truth_object=hint,
                        )
                    )

    readings.sort(key=lambda r: (r.true_time, r.reading_id))
    return Scenario(
        config=config,
        readings=tuple(readings),
        truth_log=EventLog.from_events(truth_events),
    )


# --- Config file ------------------------------------------------------------

def config_to_json(config: ScenarioConfig) -> dict:
    record = {
        "seed": config.seed,
        "n_cases": config.n_cases,
        "case_spacing": config.case_spacing,
        "relocate_fraction": config.relocate_fraction,
        "sensitive_fraction": config.sensitive_fraction,
        "noise": {
            "confusion_rate": config.noise.confusion_rate,
            "duplicate_rate": config.noise.duplicate_rate,
            "delay_max": config.noise.delay_max,
            "drop_rate": config.noise.drop_rate,
        },
    }
    if config.inject is not None:
        record["inject"] = {
            "case_index": config.inject.case_index,
            "activity": config.inject.activity,
            "delay": config.inject.delay,
        }
    return record


def config_from_json(record: Mapping) -> ScenarioConfig:
    try:
        noise = NoiseProfile(**record.get("noise", {}))
        inject = None
        if record.get("inject") is not None:
            inject = DelayInjection(**record["inject"])
        return ScenarioConfig(
            seed=int(record.get("seed", 7)),
            n_cases=int(record.get("n_cases", 100)),
            case_spacing=float(record.get("case_spacing", 35.0)),
            relocate_fraction=float(record.get("relocate_fraction", 0.3)),
            sensitive_fraction=float(record.get("sensitive_fraction", 0.3)),
            noise=noise,
            inject=inject,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad scenario config: {exc}") from exc


def load_config(path) -> ScenarioConfig:
    with open(path, encoding="utf-8") as fh:
        try:
            record = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}", line=exc.lineno) from exc
    return config_from_json(record)


def save_config(config: ScenarioConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(config_to_json(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
