/** Mirrors of the HTTP API payloads; the UI never computes these itself. */

export type Phase =
  | "preprocessing"
  | "aggregation"
  | "correlation"
  | "discovery"
  | "insights";

export const PHASES: readonly Phase[] = [
  "preprocessing",
  "aggregation",
  "correlation",
  "discovery",
  "insights",
];

export type VerdictValue =
  | "centralized-critical"
  | "centralized-favorable"
  | "decentralized-favorable"
  | "decentralized-critical"
  | "unanswered";

export interface Question {
  id: string;
  phase: Phase;
  text: string;
  tags: string[];
}

export interface Answer {
  question_id: string;
  verdict: VerdictValue;
}

export interface ResolutionHint {
  kind: string;
  text: string;
}

export interface PhaseVerdict {
  phase: Phase;
  outcome: string;
  centralized_ids: string[];
  decentralized_ids: string[];
  centralized_critical_ids: string[];
  decentralized_critical_ids: string[];
  resolution_hints: ResolutionHint[];
}

export interface AnswersResponse {
  session: string;
  verdicts: PhaseVerdict[];
}

export interface TopologyNode {
  id: string;
  tier: string;
  capacity: number;
  zone: string;
  parent: string | null;
  clock_skew: number;
}

export interface TopologyLink {
  child: string;
  parent: string;
  bandwidth: number;
  latency: number;
  reliable: boolean;
}

export interface Topology {
  nodes: TopologyNode[];
  links: TopologyLink[];
}

export interface PlacementPlan {
  label: string;
  assignment: Record<Phase, string>;
  preprocess: {
    anonymize: boolean;
    filter_min_confidence: number;
    reduction_ratio: number;
    per_reading_cost: number;
  };
  rules: unknown[];
  watermark: number;
  skew_correction: boolean;
  stage_costs: Record<string, number>;
}

export interface SimMetrics {
  scenario_seed: number;
  plan_label: string;
  bytes_per_link: Record<string, number>;
  total_bytes_to_cloud: number;
  event_count: number;
  latency: { mean: number; p95: number; max: number };
  sensitive_crossings: number;
  late_event_count: number;
  dropped_count: number;
}

export interface MetricDelta {
  name: string;
  a: number;
  b: number;
  delta: number;
  ratio: number | null;
}

export interface ComparisonReport {
  a: string;
  b: string;
  scenario_seed: number;
  deltas: MetricDelta[];
}

/** Shape of the structured `detail` in 409 planning errors. */
export interface ConflictDetail {
  error: string;
  message: string;
  phases?: string[];
  hints: ResolutionHint[];
}

export type PlanVariant = "derived" | "all-cloud";

/** The selector labels, verbatim from the decision model's four
 * possibilities, plus the explicit no-answer state. */
export const VERDICT_OPTIONS: readonly { value: VerdictValue; label: string }[] = [
  { value: "unanswered", label: "unanswered" },
  { value: "centralized-critical", label: "centralized (critical)" },
  { value: "centralized-favorable", label: "centralized (favorable)" },
  { value: "decentralized-favorable", label: "decentralized (favorable)" },
  { value: "decentralized-critical", label: "decentralized (critical)" },
];

export const PHASE_LABELS: Record<Phase, string> = {
  preprocessing: "Preprocessing",
  aggregation: "Aggregation",
  correlation: "Correlation",
  discovery: "Discovery",
  insights: "Insights",
};

export const PHASE_BADGES: Record<Phase, string> = {
  preprocessing: "Pre",
  aggregation: "Agg",
  correlation: "Cor",
  discovery: "Dis",
  insights: "Ins",
};
