/** Pure HTML renderers; every value shown comes verbatim from an API
 * payload, so rendering the same payloads always yields the same markup.
 */

import type {
  ComparisonReport,
  ConflictDetail,
  MetricDelta,
  PhaseVerdict,
  PlacementPlan,
  Question,
  Topology,
  TopologyNode,
  VerdictValue,
} from "./types.js";
import { PHASES, PHASE_BADGES, PHASE_LABELS, VERDICT_OPTIONS } from "./types.js";
import type { UiSession } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function verdictSelect(questionId: string, selected: VerdictValue): string {
  const options = VERDICT_OPTIONS.map(
    (o) =>
      `<option value="${o.value}"${o.value === selected ? " selected" : ""}>` +
      `${escapeHtml(o.label)}</option>`,
  ).join("");
  return (
    `<select class="verdict-select" data-question="${escapeHtml(questionId)}">` +
    `${options}</select>`
  );
}

function tagBadges(tags: string[]): string {
  return tags
    .map((t) => `<span class="badge tag">${escapeHtml(t)}</span>`)
    .join("");
}

function hintList(hints: { kind: string; text: string }[]): string {
  const items = hints
    .map(
      (h) =>
        `<li class="hint hint-${escapeHtml(h.kind)}">` +
        `<span class="hint-kind">${escapeHtml(h.kind)}</span> ` +
        `${escapeHtml(h.text)}</li>`,
    )
    .join("");
  return `<ul class="hints">${items}</ul>`;
}

function conflictBanner(verdict: PhaseVerdict): string {
  const contested = [
    ...verdict.centralized_critical_ids,
    ...verdict.decentralized_critical_ids,
  ]
    .map((id) => `<a href="#q-${escapeHtml(id)}">${escapeHtml(id)}</a>`)
    .join(", ");
  return (
    `<div class="banner conflict">conflict between ${contested}` +
    `${hintList(verdict.resolution_hints)}</div>`
  );
}

function questionRow(
  question: Question,
  answer: VerdictValue,
  dirty: boolean,
): string {
  return (
    `<li class="question${dirty ? " dirty" : ""}" id="q-${escapeHtml(question.id)}">` +
    `<span class="qid">${escapeHtml(question.id)}</span>` +
    `<span class="qtext">${escapeHtml(question.text)}</span>` +
    `<span class="tags">${tagBadges(question.tags)}</span>` +
    verdictSelect(question.id, answer) +
    (dirty ? `<span class="dirty-marker" title="not yet saved">*</span>` : "") +
    `</li>`
  );
}

/** The 16 questions grouped by phase, each group headed by its verdict
 * badge and, on conflict, a banner with the resolution hints. */
export function renderQuestionnaire(
  catalog: Question[],
  answers: Record<string, VerdictValue>,
  verdicts: PhaseVerdict[] | null,
  dirty: ReadonlySet<string>,
): string {
  const byPhase = new Map(PHASES.map((p) => [p, [] as Question[]]));
  for (const question of catalog) {
    byPhase.get(question.phase)?.push(question);
  }
  const verdictOf = new Map((verdicts ?? []).map((v) => [v.phase, v]));

  const sections = PHASES.map((phase) => {
    const verdict = verdictOf.get(phase);
    const badge = verdict
      ? `<span class="badge outcome outcome-${escapeHtml(verdict.outcome)}">` +
        `${escapeHtml(verdict.outcome)}</span>`
      : `<span class="badge outcome outcome-pending">no verdict yet</span>`;
    const banner =
      verdict && verdict.outcome === "conflict" ? conflictBanner(verdict) : "";
    const rows = (byPhase.get(phase) ?? [])
      .map((q) =>
        questionRow(q, answers[q.id] ?? "unanswered", dirty.has(q.id)),
      )
      .join("");
    return (
      `<section class="phase" data-phase="${phase}">` +
      `<header><h2>${PHASE_LABELS[phase]}</h2>${badge}</header>` +
      banner +
      `<ol class="questions">${rows}</ol>` +
      `</section>`
    );
  });
  return `<div class="questionnaire">${sections.join("")}</div>`;
}

function stageBadges(node: TopologyNode, plan: PlacementPlan | null): string {
  if (plan === null) {
    return "";
  }
  return PHASES.filter((p) => plan.assignment[p] === node.tier)
    .map((p) => `<span class="badge stage">${PHASE_BADGES[p]}</span>`)
    .join("");
}

function nodeTree(
  nodes: TopologyNode[],
  parent: string | null,
  plan: PlacementPlan | null,
): string {
  const children = nodes.filter((n) => n.parent === parent);
  if (children.length === 0) {
    return "";
  }
  const items = children
    .map(
      (n) =>
        `<li class="node tier-${escapeHtml(n.tier)}">` +
        `<span class="node-id">${escapeHtml(n.id)}</span>` +
        `<span class="badge tier">${escapeHtml(n.tier)}</span>` +
        stageBadges(n, plan) +
        nodeTree(nodes, n.id, plan) +
        `</li>`,
    )
    .join("");
  return `<ul class="topology">${items}</ul>`;
}

/** The choice panel after a planning attempt hit critical answers on both
 * sides: names the phases and links back to the contested questions. */
export function renderConflictPanel(
  detail: ConflictDetail,
  verdicts: PhaseVerdict[] | null,
): string {
  const phases = detail.phases ?? [];
  const links = (verdicts ?? [])
    .filter((v) => phases.includes(v.phase))
    .flatMap((v) => [
      ...v.centralized_critical_ids,
      ...v.decentralized_critical_ids,
    ])
    .map((id) => `<a href="#q-${escapeHtml(id)}">${escapeHtml(id)}</a>`)
    .join(", ");
  return (
    `<div class="banner conflict-panel">` +
    `<p>${escapeHtml(detail.message)}</p>` +
    (links ? `<p>revisit: ${links}</p>` : "") +
    hintList(detail.hints) +
    `</div>`
  );
}

/** Topology as an indented tree with stage badges on assigned tiers,
 * plus the plan and baseline run controls. */
export function renderPlacement(
  topology: Topology,
  state: Pick<UiSession, "plan" | "verdicts" | "running">,
  conflictDetail: ConflictDetail | null,
): string {
  const { plan, verdicts, running } = state;
  const planLine = plan
    ? `<p class="plan-label">plan: ${escapeHtml(plan.label)}</p>`
    : `<p class="plan-label">no plan derived yet</p>`;
  const deriveDisabled = verdicts === null || running !== null;
  const runDisabled = plan === null || running !== null;
  const disable = (flag: boolean) => (flag ? " disabled" : "");
  return (
    `<div class="placement">` +
    nodeTree(topology.nodes, null, plan) +
    planLine +
    (conflictDetail ? renderConflictPanel(conflictDetail, verdicts) : "") +
    `<div class="controls">` +
    `<button class="derive"${disable(deriveDisabled)}>derive plan</button>` +
    `<button class="run" data-variant="derived"${disable(runDisabled)}>run derived plan</button>` +
    `<button class="run" data-variant="all-cloud"${disable(runDisabled)}>run all-cloud baseline</button>` +
    `</div>` +
    `</div>`
  );
}

const COMPARED_METRICS: readonly { name: string; label: string }[] = [
  { name: "total_bytes_to_cloud", label: "bytes to cloud" },
  { name: "latency_p95", label: "latency p95 (s)" },
  { name: "sensitive_crossings", label: "sensitive crossings" },
  { name: "late_event_count", label: "late events" },
];

function deltaRow(label: string, d: MetricDelta): string {
  const ratio = d.ratio === null ? "-" : String(d.ratio);
  return (
    `<tr class="delta-${escapeHtml(d.name)}">` +
    `<th>${escapeHtml(label)}</th>` +
    `<td class="num">${String(d.a)}</td>` +
    `<td class="num">${String(d.b)}</td>` +
    `<td class="num">${String(d.delta)}</td>` +
    `<td class="num">${ratio}</td>` +
    `</tr>`
  );
}

/** Side-by-side metric deltas for the two recorded runs; empty state
 * until both plans have been simulated. */
export function renderComparison(
  report: ComparisonReport | null,
  runsDone: { derived: boolean; allCloud: boolean },
): string {
  if (report === null) {
    const done = [
      runsDone.derived ? "derived" : null,
      runsDone.allCloud ? "all-cloud baseline" : null,
    ].filter((x) => x !== null);
    const status =
      done.length === 0
        ? "no runs yet"
        : `recorded: ${done.join(", ")}`;
    return (
      `<div class="comparison empty">` +
      `<p>run both plans on the fixture scenario to compare (${status})</p>` +
      `</div>`
    );
  }
  const byName = new Map(report.deltas.map((d) => [d.name, d]));
  const rows = COMPARED_METRICS.map((m) => {
    const d = byName.get(m.name);
    return d ? deltaRow(m.label, d) : "";
  }).join("");
  return (
    `<div class="comparison">` +
    `<table class="deltas">` +
    `<thead><tr><th>metric</th><th>${escapeHtml(report.a)}</th>` +
    `<th>${escapeHtml(report.b)}</th><th>delta</th><th>ratio</th></tr></thead>` +
    `<tbody>${rows}</tbody>` +
    `</table>` +
    `<p class="seed">scenario seed ${String(report.scenario_seed)}</p>` +
    `</div>`
  );
}

export function renderOfflineBanner(offline: boolean): string {
  if (!offline) {
    return "";
  }
  return (
    `<div class="banner offline">service unreachable; answers are kept ` +
    `locally and resubmitted on retry <button class="retry">retry</button></div>`
  );
}

/** Whole-page assembly; app.ts re-renders this on every state change. */
export function renderApp(
  state: UiSession,
  catalog: Question[],
  topology: Topology,
  conflictDetail: ConflictDetail | null,
): string {
  return (
    `<main>` +
    `<h1>continuum conductor</h1>` +
    renderOfflineBanner(state.offline) +
    renderQuestionnaire(catalog, state.answers, state.verdicts, state.dirty) +
    `<h2 class="section">placement</h2>` +
    renderPlacement(topology, state, conflictDetail) +
    `<h2 class="section">comparison</h2>` +
    renderComparison(state.report, {
      derived: Boolean(state.runs["derived"]),
      allCloud: Boolean(state.runs["all-cloud"]),
    }) +
    `</main>`
  );
}
