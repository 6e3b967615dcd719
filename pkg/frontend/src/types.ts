// Wire types mirroring the service's JSON documents (docs/api.md,
// docs/report-schema.json in the engine repo).

export type Level = 0 | 1 | 2;

export type MaturityLevelName = "initial" | "intermediate" | "advanced" | "optimizing";

export type MethodName = "compensatory" | "two-tier" | "both";

export type CategoryKey = "process" | "estimation" | "product" | "team" | "technology";

export const CATEGORY_LABELS: Record<CategoryKey, string> = {
  process: "Process Quality",
  estimation: "Estimation Accuracy",
  product: "Product Quality",
  team: "Team Quality",
  technology: "Technology Quality",
};

export interface GoalDoc {
  id: string;
  tier: "basic" | "advanced";
  completeness: number;
}

export interface KpaDoc {
  id: string;
  name: string;
  plm_stage: string;
  goals: GoalDoc[];
  compensatory?: { score: number; level: MaturityLevelName };
  two_tier?: { basic_score: number; advanced_score: number; level: MaturityLevelName };
  categories: Partial<Record<CategoryKey, number>>;
}

export interface DiagnosticDoc {
  severity: "error" | "warning";
  rule_code: string;
  message: string;
  location?: { file: string; line: number; column: number };
}

export interface EvaluationDoc {
  assessment_id: string;
  model_id: string;
  model_version: number;
  date: string;
  method: MethodName;
  kpas: KpaDoc[];
  warnings: DiagnosticDoc[];
}

export interface BindingDoc {
  parameter_id: string;
  weight: number;
}

export interface ModelGoalDoc {
  id: string;
  name: string;
  tier: "basic" | "advanced";
  bindings: BindingDoc[];
}

export interface ModelKpaDoc {
  id: string;
  name: string;
  plm_stage: string;
  goals: ModelGoalDoc[];
}

export interface ParameterDoc {
  id: string;
  description: string;
  category: CategoryKey;
  step_cost: number;
}

export interface ModelDoc {
  id: string;
  name: string;
  version: number;
  parameters: ParameterDoc[];
  kpas: ModelKpaDoc[];
}

export interface ScoreDoc {
  level: Level;
  note?: string;
}

export interface AssessmentDoc {
  id: string;
  model_id: string;
  model_version: number;
  date: string;
  team: string;
  status: "draft" | "reviewed" | "final";
  scores: Record<string, ScoreDoc>;
}

export interface AssessmentSummaryDoc {
  id: string;
  model_id: string;
  model_version: number;
  team: string;
  date: string;
  status: string;
  revision: number;
}

export interface PlanStepDoc {
  parameter_id: string;
  from_level: number;
  to_level: number;
  cost: number;
}

export interface PlanDoc {
  kpa_id: string;
  method: string;
  target: MaturityLevelName;
  steps: PlanStepDoc[];
  total_cost: number;
  achieved: boolean;
  exact: boolean;
}

export interface ErrorBody {
  status: number;
  code: string;
  message: string;
  diagnostics?: DiagnosticDoc[];
}
