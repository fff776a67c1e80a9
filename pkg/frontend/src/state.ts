/** Client-side session state: local answers plus API-fetched results.
 *
 * Answers are the only UI-owned data; verdicts, plans, metrics, and
 * comparisons are stored exactly as the API returned them, so reloading
 * and re-fetching reproduces the identical view.
 */

import type {
  Answer,
  AnswersResponse,
  ComparisonReport,
  PhaseVerdict,
  PlacementPlan,
  PlanVariant,
  SimMetrics,
  VerdictValue,
} from "./types.js";

export interface UiSession {
  session: string;
  answers: Record<string, VerdictValue>;
  /** Question ids changed locally but not yet acknowledged by the API. */
  dirty: Set<string>;
  verdicts: PhaseVerdict[] | null;
  plan: PlacementPlan | null;
  runs: Partial<Record<PlanVariant, SimMetrics>>;
  report: ComparisonReport | null;
  offline: boolean;
  /** At most one simulation request in flight; buttons disable meanwhile. */
  running: PlanVariant | null;
}

export function newSession(session: string): UiSession {
  return {
    session,
    answers: {},
    dirty: new Set(),
    verdicts: null,
    plan: null,
    runs: {},
    report: null,
    offline: false,
    running: null,
  };
}

/** Record a local answer change; downstream results are stale until the
 * API confirms, so plan, runs, and comparison reset. */
export function setAnswer(
  state: UiSession,
  questionId: string,
  verdict: VerdictValue,
): void {
  state.answers[questionId] = verdict;
  state.dirty.add(questionId);
  state.plan = null;
  state.runs = {};
  state.report = null;
}

export function answersPayload(state: UiSession): Answer[] {
  return Object.entries(state.answers)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0))
    .map(([question_id, verdict]) => ({ question_id, verdict }));
}

export function applyVerdicts(state: UiSession, response: AnswersResponse): void {
  state.verdicts = response.verdicts;
  state.dirty.clear();
  state.offline = false;
}

export function applyPlan(state: UiSession, plan: PlacementPlan): void {
  state.plan = plan;
  state.runs = {};
  state.report = null;
}

export function applyRun(
  state: UiSession,
  variant: PlanVariant,
  metrics: SimMetrics,
): void {
  state.runs[variant] = metrics;
  state.report = null;
}

export function bothRunsDone(state: UiSession): boolean {
  return Boolean(state.runs["derived"] && state.runs["all-cloud"]);
}

export function conflictedPhases(verdicts: PhaseVerdict[] | null): PhaseVerdict[] {
  return (verdicts ?? []).filter((v) => v.outcome === "conflict");
}

const STORAGE_KEY = "continuum-conductor-ui";

interface PersistedState {
  session: string;
  answers: Record<string, VerdictValue>;
}

export interface StringStore {
  getItem(key: string): string | null;
  setItem(key: string, value: string): void;
}

/** Persist only the UI-owned data (session id and answers); everything
 * else is re-fetched so the server stays the single source of truth. */
export function persist(state: UiSession, store: StringStore): void {
  const snapshot: PersistedState = {
    session: state.session,
    answers: state.answers,
  };
  store.setItem(STORAGE_KEY, JSON.stringify(snapshot));
}

export function restore(store: StringStore): UiSession | null {
  const raw = store.getItem(STORAGE_KEY);
  if (raw === null) {
    return null;
  }
  let parsed: PersistedState;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof parsed?.session !== "string" || typeof parsed?.answers !== "object") {
    return null;
  }
  const state = newSession(parsed.session);
  state.answers = { ...parsed.answers };
  return state;
}

export function freshSessionId(now: () => number = Date.now): string {
  return `ui-${now().toString(36)}`;
}
