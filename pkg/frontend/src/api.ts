/** Thin client over the placement service; one function per endpoint. */

import type {
  Answer,
  AnswersResponse,
  ComparisonReport,
  PlacementPlan,
  PlanVariant,
  Question,
  SimMetrics,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
    this.name = "ApiError";
  }

  /** True for network-level failures, where no response arrived at all. */
  get offline(): boolean {
    return this.status === 0;
  }
}

async function request<T>(path: string, init?: RequestInit): Promise<T> {
  let response: Response;
  try {
    response = await fetch(path, init);
  } catch (err) {
    throw new ApiError(0, String(err));
  }
  const body = await response.json().catch(() => null);
  if (!response.ok) {
    throw new ApiError(response.status, body?.detail ?? body);
  }
  return body as T;
}

function jsonInit(method: string, payload: unknown): RequestInit {
  return {
    method,
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  };
}

export function fetchCatalog(): Promise<Question[]> {
  return request("/api/catalog");
}

export function fetchFixtures(): Promise<Record<string, unknown>> {
  return request("/api/fixtures");
}

export function submitAnswers(
  session: string,
  answers: Answer[],
): Promise<AnswersResponse> {
  return request(
    `/api/session/${encodeURIComponent(session)}/answers`,
    jsonInit("PUT", { answers }),
  );
}

export function derivePlan(session: string): Promise<PlacementPlan> {
  return request(`/api/session/${encodeURIComponent(session)}/plan`, {
    method: "POST",
  });
}

export function runSimulation(
  session: string,
  plan: PlanVariant,
): Promise<SimMetrics> {
  return request(
    `/api/session/${encodeURIComponent(session)}/run`,
    jsonInit("POST", { plan, scenario: "port" }),
  );
}

export function fetchComparison(session: string): Promise<ComparisonReport> {
  return request(`/api/session/${encodeURIComponent(session)}/compare`);
}
