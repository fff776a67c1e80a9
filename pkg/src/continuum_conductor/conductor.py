"""Placement decision framework for the five-stage mining pipeline.

A fixed catalog of 16 questions, each tagged with the challenges and goals
it probes, is answered on a four-valued scale (centralized/decentralized x
critical/favorable). Per pipeline phase the answers aggregate into a single
verdict; criticals on both sides produce a conflict together with the
resolution strategies that apply to the tags involved.
"""

from __future__ import annotations

import enum
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

from .errors import MissingPolarity, PhaseMismatch, UnknownQuestion


class Phase(enum.IntEnum):
    """Pipeline stages in execution order."""

    PREPROCESSING = 0
    AGGREGATION = 1
    CORRELATION = 2
    DISCOVERY = 3
    INSIGHTS = 4

    @property
    def key(self) -> str:
        return self.name.lower()

    @classmethod
    def from_key(cls, key: str) -> "Phase":
        try:
            return cls[key.upper()]
        except KeyError:
            raise ValueError(f"unknown phase {key!r}") from None


class Challenge(enum.Enum):
    C1 = "Large volume of unstructured data"
    C2 = "Uncertainty"
    C3 = "Sensitivity to ambiguous context"
    C4 = "Network and computing limitations"
    C5 = "Erroneous and incomplete data"
    C6 = "Necessity of shared case/object notion"

    @property
    def label(self) -> str:
        return self.value


class Goal(enum.Enum):
    G1 = "Privacy preservation"
    G2 = "Real-time responsiveness"
    G3 = "Resource efficiency"

    @property
    def label(self) -> str:
        return self.value


Tag = Challenge | Goal


def tag_from_code(code: str) -> Tag:
    if code in Challenge.__members__:
        return Challenge[code]
    if code in Goal.__members__:
        return Goal[code]
    raise ValueError(f"unknown tag code {code!r}")


class Verdict(str, enum.Enum):
    """Four-valued placement evaluation of a single question."""

    CENTRALIZED_CRITICAL = "centralized-critical"
    CENTRALIZED_FAVORABLE = "centralized-favorable"
    DECENTRALIZED_FAVORABLE = "decentralized-favorable"
    DECENTRALIZED_CRITICAL = "decentralized-critical"
    UNANSWERED = "unanswered"

    @property
    def is_centralized(self) -> bool:
        return self in (Verdict.CENTRALIZED_CRITICAL, Verdict.CENTRALIZED_FAVORABLE)

    @property
    def is_decentralized(self) -> bool:
        return self in (Verdict.DECENTRALIZED_CRITICAL, Verdict.DECENTRALIZED_FAVORABLE)

    @property
    def is_critical(self) -> bool:
        return self in (Verdict.CENTRALIZED_CRITICAL, Verdict.DECENTRALIZED_CRITICAL)


class PhaseOutcome(str, enum.Enum):
    CENTRALIZED_MANDATORY = "centralized-mandatory"
    CENTRALIZED_FAVORABLE = "centralized-favorable"
    DECENTRALIZED_FAVORABLE = "decentralized-favorable"
    DECENTRALIZED_MANDATORY = "decentralized-mandatory"
    CONFLICT = "conflict"

    @property
    def is_centralized(self) -> bool:
        return self in (PhaseOutcome.CENTRALIZED_MANDATORY, PhaseOutcome.CENTRALIZED_FAVORABLE)

    @property
    def is_decentralized(self) -> bool:
        return self in (
            PhaseOutcome.DECENTRALIZED_MANDATORY,
            PhaseOutcome.DECENTRALIZED_FAVORABLE,
        )


class HintKind(str, enum.Enum):
    STRONGER_EDGE_HARDWARE = "stronger-edge-hardware"
    NEW_ALGORITHM_PRIVACY_UTILITY = "new-algorithm-privacy-utility"


@dataclass(frozen=True)
class ResolutionHint:
    kind: HintKind
    text: str


HINT_TEXTS = {
    HintKind.STRONGER_EDGE_HARDWARE: (
        "Deploy more capable hardware closer to the data source so the "
        "compute-critical step can still run decentrally."
    ),
    HintKind.NEW_ALGORITHM_PRIVACY_UTILITY: (
        "Adopt an algorithm that quantifies and optimizes the trade-off "
        "between privacy and utility instead of shipping complete raw data "
        "to one place."
    ),
}

# Tags whose critical involvement points at a hardware upgrade vs. at a new
# algorithm balancing privacy/completeness against utility.
_HARDWARE_TAGS: frozenset[Tag] = frozenset({Challenge.C1, Challenge.C4})
_ALGORITHM_TAGS: frozenset[Tag] = frozenset({Goal.G1, Challenge.C5, Challenge.C6})


@dataclass(frozen=True)
class Question:
    id: str
    phase: Phase
    text: str
    tags: frozenset[Tag]


def _q(qid: str, phase: Phase, text: str, *tags: Tag) -> Question:
    return Question(id=qid, phase=phase, text=text, tags=frozenset(tags))


CATALOG: tuple[Question, ...] = (
    _q("Pre1", Phase.PREPROCESSING, "Are compute resources enough for preprocessing?", Challenge.C1),
    _q("Pre2", Phase.PREPROCESSING, "Is raw data privacy-critical?", Goal.G1),
    _q("Pre3", Phase.PREPROCESSING, "Does raw data transfer need high bandwidth?", Challenge.C4, Goal.G3),
    _q("Pre4", Phase.PREPROCESSING, "Is preprocessing faster on device?", Challenge.C4, Goal.G2),
    _q("Agg1", Phase.AGGREGATION, "Are low level events still privacy critical?", Goal.G1),
    _q("Agg2", Phase.AGGREGATION, "Are low level events still high-volume?", Challenge.C1),
    _q("Agg3", Phase.AGGREGATION, "Can events be build from local context?", Challenge.C3),
    _q("Agg4", Phase.AGGREGATION, "Can sensor/network outages be tolerated?", Challenge.C4, Challenge.C5),
    _q("Cor1", Phase.CORRELATION, "Does a global notion of case/object ids exist?", Challenge.C6),
    _q("Cor2", Phase.CORRELATION, "Is the time synchronized between the nodes?", Challenge.C5),
    _q("Cor3", Phase.CORRELATION, "Do out of order events violate real-time objectives?", Challenge.C5, Goal.G2),
    _q("Dis1", Phase.DISCOVERY, "Is the process model privacy-critical?", Challenge.C6, Goal.G1),
    _q("Dis2", Phase.DISCOVERY, "Does the discovery algorithm benefit from locality?", Goal.G2, Goal.G3),
    _q(
        "Dis3",
        Phase.DISCOVERY,
        "Does the process mining algorithm require consistent and complete event logs?",
        Challenge.C5,
    ),
    _q("Ins1", Phase.INSIGHTS, "Does insight extraction need advanced hardware?", Challenge.C4),
    _q("Ins2", Phase.INSIGHTS, "Can insight extraction tolerate partial results?", Challenge.C5, Goal.G1),
)

_BY_ID: dict[str, Question] = {q.id: q for q in CATALOG}
_ROW_INDEX: dict[str, int] = {q.id: i for i, q in enumerate(CATALOG)}


def catalog() -> list[Question]:
    """The shipped question catalog, in table row order."""
    return list(CATALOG)


def question(qid: str) -> Question:
    try:
        return _BY_ID[qid]
    except KeyError:
        raise UnknownQuestion(f"no question with id {qid!r}") from None


def questions_for(phase: Phase) -> list[Question]:
    return [q for q in CATALOG if q.phase == phase]


@dataclass(frozen=True)
class Answer:
    question_id: str
    verdict: Verdict
    note: str | None = None


class TieBreak(str, enum.Enum):
    PREFER_DECENTRALIZED = "decentralized"
    PREFER_CENTRALIZED = "centralized"


@dataclass(frozen=True)
class Assessment:
    """A set of answers, at most one per catalog question."""

    answers: Mapping[str, Answer] = field(default_factory=dict)
    tie_break: TieBreak = TieBreak.PREFER_DECENTRALIZED

    def __post_init__(self):
        for qid, answer in self.answers.items():
            if qid not in _BY_ID:
                raise UnknownQuestion(f"no question with id {qid!r}")
            if answer.question_id != qid:
                raise ValueError(
                    f"answer keyed under {qid!r} claims question {answer.question_id!r}"
                )

    @classmethod
    def from_answers(
        cls, answers: Iterable[Answer], tie_break: TieBreak = TieBreak.PREFER_DECENTRALIZED
    ) -> "Assessment":
        by_id: dict[str, Answer] = {}
        for answer in answers:
            if answer.question_id in by_id:
                raise ValueError(f"duplicate answer for question {answer.question_id!r}")
            by_id[answer.question_id] = answer
        return cls(answers=by_id, tie_break=tie_break)

    def answer_for(self, qid: str) -> Answer | None:
        return self.answers.get(qid)


@dataclass(frozen=True)
class PhaseVerdict:
    phase: Phase
    outcome: PhaseOutcome
    centralized_ids: tuple[str, ...]
    decentralized_ids: tuple[str, ...]
    centralized_critical_ids: tuple[str, ...] = ()
    decentralized_critical_ids: tuple[str, ...] = ()
    resolution_hints: tuple[ResolutionHint, ...] = ()


def _hints_for(critical_questions: Iterable[Question]) -> tuple[ResolutionHint, ...]:
    involved: set[Tag] = set()
    for q in critical_questions:
        involved |= q.tags
    kinds: list[HintKind] = []
    if involved & _HARDWARE_TAGS:
        kinds.append(HintKind.STRONGER_EDGE_HARDWARE)
    if involved & _ALGORITHM_TAGS:
        kinds.append(HintKind.NEW_ALGORITHM_PRIVACY_UTILITY)
    if not kinds:
        # Conflicts must always carry actionable hints; without a tag match
        # both archetypes remain on the table.
        kinds = [HintKind.STRONGER_EDGE_HARDWARE, HintKind.NEW_ALGORITHM_PRIVACY_UTILITY]
    return tuple(ResolutionHint(kind=k, text=HINT_TEXTS[k]) for k in kinds)


def _phase_answers(
    phase: Phase, assessment: Assessment | Mapping[str, Answer] | Iterable[Answer]
) -> list[Answer]:
    if isinstance(assessment, Assessment):
        items: Iterable[Answer] = assessment.answers.values()
        strict = False
    elif isinstance(assessment, Mapping):
        items = assessment.values()
        strict = False
    else:
        items = assessment
        strict = True

    selected = []
    for answer in items:
        q = question(answer.question_id)
        if q.phase != phase:
            if strict:
                raise PhaseMismatch(
                    f"question {q.id} belongs to {q.phase.key}, not {phase.key}"
                )
            continue
        selected.append(answer)
    return selected


def decide_phase(
    phase: Phase,
    assessment: Assessment | Mapping[str, Answer] | Iterable[Answer],
    tie_break: TieBreak | None = None,
) -> PhaseVerdict:
    """Aggregate one phase's answers into a placement verdict.

    Given an :class:`Assessment` (or plain mapping) the other phases'
    answers are ignored; given a bare collection of answers every entry must
    belong to ``phase`` or :class:`PhaseMismatch` is raised.
    """
    if tie_break is None:
        tie_break = (
            assessment.tie_break
            if isinstance(assessment, Assessment)
            else TieBreak.PREFER_DECENTRALIZED
        )
    answers = _phase_answers(phase, assessment)
    answered = [a for a in answers if a.verdict is not Verdict.UNANSWERED]

    central = [a for a in answered if a.verdict.is_centralized]
    decentral = [a for a in answered if a.verdict.is_decentralized]
    central_crit = [a for a in central if a.verdict.is_critical]
    decentral_crit = [a for a in decentral if a.verdict.is_critical]

    order = lambda ids: tuple(sorted(ids, key=_ROW_INDEX.__getitem__))
    central_ids = order(a.question_id for a in central)
    decentral_ids = order(a.question_id for a in decentral)

    hints: tuple[ResolutionHint, ...] = ()
    if central_crit and decentral_crit:
        outcome = PhaseOutcome.CONFLICT
        hints = _hints_for(
            question(a.question_id) for a in central_crit + decentral_crit
        )
    elif central_crit:
        outcome = PhaseOutcome.CENTRALIZED_MANDATORY
    elif decentral_crit:
        outcome = PhaseOutcome.DECENTRALIZED_MANDATORY
    elif len(central) > len(decentral):
        outcome = PhaseOutcome.CENTRALIZED_FAVORABLE
    elif len(decentral) > len(central):
        outcome = PhaseOutcome.DECENTRALIZED_FAVORABLE
    elif tie_break is TieBreak.PREFER_CENTRALIZED:
        outcome = PhaseOutcome.CENTRALIZED_FAVORABLE
    else:
        outcome = PhaseOutcome.DECENTRALIZED_FAVORABLE

    return PhaseVerdict(
        phase=phase,
        outcome=outcome,
        centralized_ids=central_ids,
        decentralized_ids=decentral_ids,
        centralized_critical_ids=order(a.question_id for a in central_crit),
        decentralized_critical_ids=order(a.question_id for a in decentral_crit),
        resolution_hints=hints,
    )


def decide_all(assessment: Assessment) -> dict[Phase, PhaseVerdict]:
    """Phase verdicts for the whole pipeline; pure in (assessment, tie_break)."""
    return {phase: decide_phase(phase, assessment) for phase in Phase}


PolarityTable = Mapping[str, tuple[Verdict, Verdict]]

# Default yes/no-to-verdict mapping. This is editable data, not a rule of the
# framework: the four-valued Answer stays the canonical input and this table
# only serves quick boolean intake. The choices reproduce the shipped
# inland-port assessment when fed its yes/no answers (see fixtures).
DEFAULT_POLARITY: dict[str, tuple[Verdict, Verdict]] = {
    # yes: edge/device capacity suffices; no: decentral compute is impossible.
    "Pre1": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_CRITICAL),
    # yes: anonymization must happen at the source.
    "Pre2": (Verdict.DECENTRALIZED_CRITICAL, Verdict.CENTRALIZED_FAVORABLE),
    # yes: raw transfer would exceed the network; reduce before shipping.
    "Pre3": (Verdict.DECENTRALIZED_CRITICAL, Verdict.CENTRALIZED_FAVORABLE),
    "Pre4": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_FAVORABLE),
    "Agg1": (Verdict.DECENTRALIZED_CRITICAL, Verdict.CENTRALIZED_FAVORABLE),
    "Agg2": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_FAVORABLE),
    # no: events need global context that only a central view provides.
    "Agg3": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_CRITICAL),
    # no: distributed fusion would be too fragile under outages.
    "Agg4": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_CRITICAL),
    # yes: shared ids let every site correlate its own slice.
    "Cor1": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_CRITICAL),
    "Cor2": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_FAVORABLE),
    # yes: late reordering must be caught near the source to react in time.
    "Cor3": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_FAVORABLE),
    # yes: the model itself may not be assembled in one place.
    "Dis1": (Verdict.DECENTRALIZED_CRITICAL, Verdict.CENTRALIZED_FAVORABLE),
    "Dis2": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_FAVORABLE),
    # yes: a complete, consistent log forces central discovery.
    "Dis3": (Verdict.CENTRALIZED_CRITICAL, Verdict.DECENTRALIZED_FAVORABLE),
    "Ins1": (Verdict.CENTRALIZED_CRITICAL, Verdict.DECENTRALIZED_FAVORABLE),
    # no: insights need the comprehensive view.
    "Ins2": (Verdict.DECENTRALIZED_FAVORABLE, Verdict.CENTRALIZED_CRITICAL),
}


def answers_from_booleans(
    raw: Mapping[str, bool],
    polarity: PolarityTable | None = None,
    tie_break: TieBreak = TieBreak.PREFER_DECENTRALIZED,
) -> Assessment:
    """Convert yes/no intake to a four-valued assessment via a polarity table."""
    if polarity is None:
        polarity = DEFAULT_POLARITY
    answers = []
    for qid, value in raw.items():
        question(qid)  # reject unknown ids
        if qid not in polarity:
            raise MissingPolarity(f"no polarity entry for question {qid!r}")
        if_yes, if_no = polarity[qid]
        answers.append(Answer(question_id=qid, verdict=if_yes if value else if_no))
    return Assessment.from_answers(answers, tie_break=tie_break)


# --- JSON-compatible views -------------------------------------------------

def question_to_json(q: Question) -> dict:
    codes = sorted(t.name for t in q.tags)
    return {"id": q.id, "phase": q.phase.key, "text": q.text, "tags": codes}


def catalog_to_json() -> list[dict]:
    return [question_to_json(q) for q in CATALOG]


def polarity_to_json(polarity: PolarityTable | None = None) -> list[dict]:
    if polarity is None:
        polarity = DEFAULT_POLARITY
    return [
        {"id": qid, "if_yes": if_yes.value, "if_no": if_no.value}
        for qid, (if_yes, if_no) in polarity.items()
    ]


def polarity_from_json(records: Iterable[Mapping]) -> dict[str, tuple[Verdict, Verdict]]:
    return {
        r["id"]: (Verdict(r["if_yes"]), Verdict(r["if_no"]))
        for r in records
    }


def answer_to_json(a: Answer) -> dict:
    out = {"question_id": a.question_id, "verdict": a.verdict.value}
    if a.note:
        out["note"] = a.note
    return out


def answer_from_json(record: Mapping) -> Answer:
    return Answer(
        question_id=record["question_id"],
        verdict=Verdict(record["verdict"]),
        note=record.get("note"),
    )


def assessment_to_json(assessment: Assessment) -> dict:
    ordered = sorted(assessment.answers.values(), key=lambda a: _ROW_INDEX[a.question_id])
    return {
        "tie_break": assessment.tie_break.value,
        "answers": [answer_to_json(a) for a in ordered],
    }


def assessment_from_json(record: Mapping) -> Assessment:
    tie = TieBreak(record.get("tie_break", TieBreak.PREFER_DECENTRALIZED.value))
    return Assessment.from_answers(
        (answer_from_json(r) for r in record.get("answers", [])), tie_break=tie
    )


def verdict_to_json(v: PhaseVerdict) -> dict:
    return {
        "phase": v.phase.key,
        "outcome": v.outcome.value,
        "centralized_ids": list(v.centralized_ids),
        "decentralized_ids": list(v.decentralized_ids),
        "centralized_critical_ids": list(v.centralized_critical_ids),
        "decentralized_critical_ids": list(v.decentralized_critical_ids),
        "resolution_hints": [{"kind": h.kind.value, "text": h.text} for h in v.resolution_hints],
    }
