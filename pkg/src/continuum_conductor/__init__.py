"""Placement decisions and a deterministic simulator for a five-stage
process-mining pipeline on the edge-cloud continuum."""

from .conductor import (
    Answer,
    Assessment,
    Phase,
    PhaseOutcome,
    PhaseVerdict,
    Question,
    ResolutionHint,
    TieBreak,
    Verdict,
    answers_from_booleans,
    catalog,
    decide_all,
    decide_phase,
)
from .continuum import LinkSpec, NodeSpec, Tier, Topology, TrustZone, validate
from .discovery import (
    DirectlyFollowsGraph,
    FootprintMatrix,
    Kpis,
    ProcessNet,
    Relation,
    alpha_net,
    dfg_from_log,
    fitness,
    footprint,
    kpis,
    merge_dfg,
)
from .events import EventLog, HighLevelEvent, LowLevelEvent, RawReading, append
from .pipeline import (
    CorrelatorState,
    FusionRule,
    Fuser,
    PreprocessConfig,
    Recognizer,
    apply_skew_correction,
    correlate,
    flush_correlator,
    fuse,
    preprocess,
)
from .placement import PlacementPlan, all_cloud_variant, plan_from_verdicts
from .scenario import NoiseProfile, Scenario, ScenarioConfig, generate_scenario
from .simulator import ComparisonReport, SimMetrics, compare, run, run_scenario

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "Assessment",
    "Phase",
    "PhaseOutcome",
    "PhaseVerdict",
    "Question",
    "ResolutionHint",
    "TieBreak",
    "Verdict",
    "answers_from_booleans",
    "catalog",
    "decide_all",
    "decide_phase",
    "LinkSpec",
    "NodeSpec",
    "Tier",
    "Topology",
    "TrustZone",
    "validate",
    "DirectlyFollowsGraph",
    "FootprintMatrix",
    "Kpis",
    "ProcessNet",
    "Relation",
    "alpha_net",
    "dfg_from_log",
    "fitness",
    "footprint",
    "kpis",
    "merge_dfg",
    "EventLog",
    "HighLevelEvent",
    "LowLevelEvent",
    "RawReading",
    "append",
    "CorrelatorState",
    "FusionRule",
    "Fuser",
    "PreprocessConfig",
    "Recognizer",
    "apply_skew_correction",
    "correlate",
    "flush_correlator",
    "fuse",
    "preprocess",
    "PlacementPlan",
    "all_cloud_variant",
    "plan_from_verdicts",
    "NoiseProfile",
    "Scenario",
    "ScenarioConfig",
    "generate_scenario",
    "ComparisonReport",
    "SimMetrics",
    "compare",
    "run",
    "run_scenario",
    "__version__",
]
