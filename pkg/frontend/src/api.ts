// Typed client for the maturity service HTTP API. The UI talks to the engine
// exclusively through this module.

import type {
  AssessmentDoc,
  AssessmentSummaryDoc,
  ErrorBody,
  EvaluationDoc,
  Level,
  MaturityLevelName,
  ModelDoc,
  PlanDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly diagnostics: ErrorBody["diagnostics"] = [],
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<ApiError> {
  try {
    const body = (await response.json()) as ErrorBody;
    return new ApiError(response.status, body.code, body.message, body.diagnostics);
  } catch {
    return new ApiError(response.status, "HTTP_ERROR", response.statusText);
  }
}

export class SmmApi {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  listAssessments(): Promise<AssessmentSummaryDoc[]> {
    return this.request("/api/assessments");
  }

  getModel(modelId: string): Promise<{ revision: number; model: ModelDoc }> {
    return this.request(`/api/models/${encodeURIComponent(modelId)}`);
  }

  getAssessment(id: string): Promise<{ revision: number; assessment: AssessmentDoc }> {
    return this.request(`/api/assessments/${encodeURIComponent(id)}`);
  }

  patchScore(
    assessmentId: string,
    parameterId: string,
    level: Level,
    note?: string,
  ): Promise<{ id: string; revision: number }> {
    const entry = note === undefined ? { level } : { level, note };
    return this.request(`/api/assessments/${encodeURIComponent(assessmentId)}/scores`, {
      method: "PATCH",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ [parameterId]: entry }),
    });
  }

  getEvaluation(assessmentId: string): Promise<EvaluationDoc> {
    return this.request(`/api/assessments/${encodeURIComponent(assessmentId)}/evaluation`);
  }

  whatIf(assessmentId: string, overrides: Record<string, Level>): Promise<EvaluationDoc> {
    return this.request(`/api/assessments/${encodeURIComponent(assessmentId)}/what-if`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ overrides }),
    });
  }

  plan(
    assessmentId: string,
    kpaId: string,
    target: MaturityLevelName,
    method: "compensatory" | "two-tier" = "compensatory",
  ): Promise<PlanDoc> {
    return this.request(`/api/assessments/${encodeURIComponent(assessmentId)}/plan`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ kpa_id: kpaId, target, method }),
    });
  }
}
