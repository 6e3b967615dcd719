// Session state for one assessment workbench. Scores displayed anywhere in
// the UI come from server evaluation responses held here; nothing is
// aggregated client-side. Staged what-if overrides are a separate layer that
// is never included in save operations and does not survive a page reload.

import { ApiError, SmmApi } from "./api.js";
import type {
  AssessmentDoc,
  EvaluationDoc,
  Level,
  MaturityLevelName,
  ModelDoc,
  PlanDoc,
} from "./types.js";

export interface PendingWrite {
  parameterId: string;
  level: Level;
  note?: string;
}

export class SessionViewModel {
  model?: ModelDoc;
  assessment?: AssessmentDoc;
  revision = 0;

  /** Latest server evaluation of the saved assessment. */
  evaluation?: EvaluationDoc;
  /** Server evaluation with staged overrides applied; undefined when none staged. */
  hypothetical?: EvaluationDoc;

  readonly overrides = new Map<string, Level>();
  dirty = new Set<string>();

  plan?: PlanDoc;
  selectedKpa?: string;

  /** A write hit a revision conflict: another editor won; prompt a reload. */
  conflictPrompt = false;
  /** Writes that could not reach the server; retried by flushPending(). */
  readonly pending: PendingWrite[] = [];
  offline = false;

  constructor(private readonly api: SmmApi) {}

  async load(assessmentId: string): Promise<void> {
    const { revision, assessment } = await this.api.getAssessment(assessmentId);
    this.assessment = assessment;
    this.revision = revision;
    this.model = (await this.api.getModel(assessment.model_id)).model;
    this.evaluation = await this.api.getEvaluation(assessmentId);
    this.selectedKpa = this.selectedKpa ?? this.evaluation.kpas[0]?.id;
    this.conflictPrompt = false;
  }

  /** Persist one score and refresh the evaluation in the same round trip. */
  async scoreEntry(parameterId: string, level: Level, note?: string): Promise<void> {
    if (!this.assessment) throw new Error("no session loaded");
    try {
      const { revision } = await this.api.patchScore(this.assessment.id, parameterId, level, note);
      this.revision = revision;
      this.assessment.scores[parameterId] = note === undefined ? { level } : { level, note };
      this.dirty.delete(parameterId);
      this.evaluation = await this.api.getEvaluation(this.assessment.id);
      if (this.overrides.size > 0) {
        await this.refreshWhatIf();
      }
      this.offline = false;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.conflictPrompt = true;
        return;
      }
      if (error instanceof ApiError) throw error;
      // Network failure: queue the write so nothing is lost silently.
      this.pending.push({ parameterId, level, note });
      this.offline = true;
    }
  }

  async flushPending(): Promise<void> {
    while (this.pending.length > 0) {
      const write = this.pending[0];
      await this.scoreEntry(write.parameterId, write.level, write.note);
      if (this.offline || this.conflictPrompt) return;
      this.pending.shift();
    }
  }

  /** Stage a hypothetical level; the saved assessment is untouched. */
  async stageOverride(parameterId: string, level: Level): Promise<void> {
    this.overrides.set(parameterId, level);
    await this.refreshWhatIf();
  }

  async unstageOverride(parameterId: string): Promise<void> {
    this.overrides.delete(parameterId);
    if (this.overrides.size === 0) {
      this.hypothetical = undefined;
      return;
    }
    await this.refreshWhatIf();
  }

  /** Drop every staged override; the view falls back to the actual evaluation. */
  clearOverrides(): void {
    this.overrides.clear();
    this.hypothetical = undefined;
  }

  async refreshWhatIf(): Promise<void> {
    if (!this.assessment) throw new Error("no session loaded");
    this.hypothetical = await this.api.whatIf(
      this.assessment.id,
      Object.fromEntries(this.overrides),
    );
  }

  async requestPlan(
    kpaId: string,
    target: MaturityLevelName,
    method: "compensatory" | "two-tier" = "compensatory",
  ): Promise<PlanDoc> {
    if (!this.assessment) throw new Error("no session loaded");
    this.plan = await this.api.plan(this.assessment.id, kpaId, target, method);
    return this.plan;
  }

  /** Load the current plan's steps as staged what-if overrides. */
  async stagePlan(): Promise<void> {
    if (!this.plan) return;
    const finalLevels = new Map<string, Level>();
    for (const step of this.plan.steps) {
      finalLevels.set(step.parameter_id, step.to_level as Level);
    }
    for (const [parameterId, level] of finalLevels) {
      this.overrides.set(parameterId, level);
    }
    if (this.overrides.size > 0) {
      await this.refreshWhatIf();
    }
  }

  /** Navigating between KPAs keeps staged overrides alive. */
  selectKpa(kpaId: string): void {
    this.selectedKpa = kpaId;
  }
}
