/** DOM wiring: delegates events, talks to the API, re-renders the page.
 *
 * All rendering goes through the pure views module; this file only moves
 * payloads between the API, the session state, and the DOM.
 */

import {
  ApiError,
  derivePlan,
  fetchCatalog,
  fetchComparison,
  fetchFixtures,
  runSimulation,
  submitAnswers,
} from "./api.js";
import {
  answersPayload,
  applyPlan,
  applyRun,
  applyVerdicts,
  bothRunsDone,
  freshSessionId,
  newSession,
  persist,
  restore,
  setAnswer,
  type UiSession,
} from "./state.js";
import type {
  Answer,
  ConflictDetail,
  PlanVariant,
  Question,
  Topology,
  VerdictValue,
} from "./types.js";
import { renderApp } from "./views.js";

interface FixtureAssessment {
  answers: Answer[];
}

export class App {
  private state: UiSession;
  private conflictDetail: ConflictDetail | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly catalog: Question[],
    private readonly topology: Topology,
    private readonly fixtureAssessment: FixtureAssessment,
    private readonly storage: Storage,
  ) {
    this.state = restore(storage) ?? newSession(freshSessionId());
    root.addEventListener("change", (ev) => this.onChange(ev));
    root.addEventListener("click", (ev) => this.onClick(ev));
  }

  render(): void {
    this.root.innerHTML = renderApp(
      this.state,
      this.catalog,
      this.topology,
      this.conflictDetail,
    );
  }

  /** Push the full local answer set; the response carries all verdicts. */
  async sync(): Promise<void> {
    try {
      const response = await submitAnswers(
        this.state.session,
        answersPayload(this.state),
      );
      applyVerdicts(this.state, response);
    } catch (err) {
      if (err instanceof ApiError && err.offline) {
        this.state.offline = true;
      } else {
        throw err;
      }
    }
    this.render();
  }

  loadFixtureAssessment(): Promise<void> {
    for (const answer of this.fixtureAssessment.answers) {
      setAnswer(this.state, answer.question_id, answer.verdict);
    }
    this.conflictDetail = null;
    persist(this.state, this.storage);
    return this.sync();
  }

  private onChange(ev: Event): void {
    const target = ev.target as HTMLElement;
    if (!(target instanceof HTMLSelectElement)) {
      return;
    }
    const questionId = target.dataset["question"];
    if (!questionId) {
      return;
    }
    setAnswer(this.state, questionId, target.value as VerdictValue);
    this.conflictDetail = null;
    persist(this.state, this.storage);
    void this.sync();
  }

  private onClick(ev: Event): void {
    const target = ev.target as HTMLElement;
    if (!(target instanceof HTMLButtonElement) || target.disabled) {
      return;
    }
    if (target.classList.contains("retry")) {
      void this.sync();
    } else if (target.classList.contains("load-fixture")) {
      void this.loadFixtureAssessment();
    } else if (target.classList.contains("derive")) {
      void this.derive();
    } else if (target.classList.contains("run")) {
      const variant = target.dataset["variant"] as PlanVariant;
      void this.run(variant);
    }
  }

  private async derive(): Promise<void> {
    this.conflictDetail = null;
    try {
      applyPlan(this.state, await derivePlan(this.state.session));
    } catch (err) {
      if (!(err instanceof ApiError)) {
        throw err;
      }
      if (err.offline) {
        this.state.offline = true;
      } else if (typeof err.detail === "object" && err.detail !== null) {
        this.conflictDetail = err.detail as ConflictDetail;
      }
    }
    this.render();
  }

  private async run(variant: PlanVariant): Promise<void> {
    if (this.state.running !== null) {
      return;
    }
    this.state.running = variant;
    this.render();
    try {
      applyRun(this.state, variant, await runSimulation(this.state.session, variant));
      if (bothRunsDone(this.state)) {
        this.state.report = await fetchComparison(this.state.session);
      }
    } catch (err) {
      if (err instanceof ApiError && err.offline) {
        this.state.offline = true;
      } else if (!(err instanceof ApiError)) {
        throw err;
      }
    } finally {
      this.state.running = null;
    }
    this.render();
  }
}

export async function mount(root: HTMLElement): Promise<App> {
  const [catalog, fixtures] = await Promise.all([fetchCatalog(), fetchFixtures()]);
  const topology = fixtures["port_topology.json"] as Topology;
  const fixtureAssessment = fixtures[
    "integreatdrones.assessment.json"
  ] as FixtureAssessment;
  const app = new App(root, catalog, topology, fixtureAssessment, localStorage);
  const toolbar = document.querySelector("#toolbar");
  if (toolbar) {
    toolbar.innerHTML = `<button class="load-fixture">load fixture assessment</button>`;
    toolbar.addEventListener("click", (ev) => {
      const target = ev.target as HTMLElement;
      if (target instanceof HTMLButtonElement && target.classList.contains("load-fixture")) {
        void app.loadFixtureAssessment();
      }
    });
  }
  app.render();
  await app.sync();
  return app;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void mount(document.getElementById("app") as HTMLElement);
}
