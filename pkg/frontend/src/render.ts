// Pure HTML renderers. Every number shown is a server-reported score passed
// through fmt() (one decimal, matching the engine's display rule); this
// module never adds, averages or thresholds scores.

import type {
  CategoryKey,
  EvaluationDoc,
  GoalDoc,
  KpaDoc,
  Level,
  ParameterDoc,
  PlanDoc,
  ScoreDoc,
} from "./types.js";
import { CATEGORY_LABELS } from "./types.js";

export const fmt = (score: number): string => score.toFixed(1);

const esc = (text: string): string =>
  text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

function gaugeSvg(score: number, label: string): string {
  // 180-degree dial; the needle angle is presentational scaling of the
  // server value, the printed number is the value itself.
  const angle = (score / 100) * 180 - 90;
  return `<div class="gauge" role="img" aria-label="${esc(label)} ${fmt(score)}">
    <svg viewBox="0 0 100 56" class="dial">
      <path d="M 8 50 A 42 42 0 0 1 92 50" fill="none" stroke="#e3e3e8" stroke-width="8" />
      <line x1="50" y1="50" x2="50" y2="14" stroke="#2b5fad" stroke-width="3"
            transform="rotate(${angle.toFixed(2)} 50 50)" />
    </svg>
    <span class="score">${fmt(score)}</span>
    <span class="gauge-label">${esc(label)}</span>
  </div>`;
}

function levelChip(level: string): string {
  return `<span class="chip level-${esc(level)}">${esc(level)}</span>`;
}

function goalBars(goals: GoalDoc[], tier: "basic" | "advanced"): string {
  const rows = goals
    .filter((goal) => goal.tier === tier)
    .map(
      (goal) => `<div class="goal-row" data-goal="${esc(goal.id)}">
      <span class="goal-id">${esc(goal.id)}</span>
      <span class="bar"><span class="fill" style="width:${goal.completeness}%"></span></span>
      <span class="goal-score">${fmt(goal.completeness)}</span>
    </div>`,
    );
  if (rows.length === 0) return "";
  return `<div class="goals tier-${tier}"><h4>${tier} goals</h4>${rows.join("")}</div>`;
}

function categoryRadar(categories: KpaDoc["categories"]): string {
  const entries = Object.entries(categories) as [CategoryKey, number][];
  if (entries.length === 0) return "";
  const cx = 60;
  const cy = 60;
  const radius = 50;
  const points = entries.map(([, value], index) => {
    const angle = (2 * Math.PI * index) / entries.length - Math.PI / 2;
    const r = (value / 100) * radius;
    return `${(cx + r * Math.cos(angle)).toFixed(1)},${(cy + r * Math.sin(angle)).toFixed(1)}`;
  });
  const axes = entries.map(([key], index) => {
    const angle = (2 * Math.PI * index) / entries.length - Math.PI / 2;
    const x = cx + radius * Math.cos(angle);
    const y = cy + radius * Math.sin(angle);
    return `<line x1="${cx}" y1="${cy}" x2="${x.toFixed(1)}" y2="${y.toFixed(1)}" class="axis" />`;
  });
  const legend = entries
    .map(
      ([key, value]) =>
        `<li data-category="${key}">${esc(CATEGORY_LABELS[key])}: <b>${fmt(value)}</b></li>`,
    )
    .join("");
  return `<div class="radar-wrap">
    <svg viewBox="0 0 120 120" class="radar">
      <circle cx="${cx}" cy="${cy}" r="${radius}" class="ring" />
      ${axes.join("")}
      <polygon points="${points.join(" ")}" class="area" />
    </svg>
    <ul class="radar-legend">${legend}</ul>
  </div>`;
}

export function renderKpaCard(kpa: KpaDoc): string {
  const compensatory = kpa.compensatory
    ? `<div class="method-block compensatory">
        ${gaugeSvg(kpa.compensatory.score, "compensatory")}
        ${levelChip(kpa.compensatory.level)}
      </div>`
    : "";
  const twoTier = kpa.two_tier
    ? `<div class="method-block two-tier">
        ${gaugeSvg(kpa.two_tier.basic_score, "basic")}
        ${gaugeSvg(kpa.two_tier.advanced_score, "advanced")}
        ${levelChip(kpa.two_tier.level)}
      </div>`
    : `<div class="method-block two-tier two-tier-na">two-tier: not applicable</div>`;
  return `<section class="kpa-card" data-kpa="${esc(kpa.id)}">
    <h3>${esc(kpa.name)} <span class="plm">PLM: ${esc(kpa.plm_stage)}</span></h3>
    <div class="gauges">${compensatory}${twoTier}</div>
    ${goalBars(kpa.goals, "basic")}
    ${goalBars(kpa.goals, "advanced")}
    ${categoryRadar(kpa.categories)}
  </section>`;
}

/**
 * Dashboard for one evaluation document. With a hypothetical document staged
 * the actual and hypothetical cards render side by side; the hypothetical
 * column is visually distinct. There is deliberately no cross-KPA summary.
 */
export function renderDashboard(
  evaluation: EvaluationDoc,
  hypothetical?: EvaluationDoc,
): string {
  const cards = evaluation.kpas
    .map((kpa) => {
      if (!hypothetical) {
        return `<div class="kpa-pair">${renderKpaCard(kpa)}</div>`;
      }
      const counterpart = hypothetical.kpas.find((candidate) => candidate.id === kpa.id);
      return `<div class="kpa-pair">
        <div class="column actual"><h5>actual</h5>${renderKpaCard(kpa)}</div>
        <div class="column hypothetical"><h5>what-if</h5>${counterpart ? renderKpaCard(counterpart) : ""}</div>
      </div>`;
    })
    .join("");
  const warnings =
    evaluation.warnings.length > 0
      ? `<ul class="warnings">${evaluation.warnings
          .map((warning) => `<li>[${esc(warning.rule_code)}] ${esc(warning.message)}</li>`)
          .join("")}</ul>`
      : "";
  return `<div class="dashboard">${cards}${warnings}</div>`;
}

/** Score entry control: exactly three levels exist, so exactly three radios. */
export function renderScoreControl(parameter: ParameterDoc, current?: ScoreDoc): string {
  const levels: Level[] = [0, 1, 2];
  const radios = levels
    .map(
      (level) => `<label class="level-option">
      <input type="radio" name="score-${esc(parameter.id)}" value="${level}"
             ${current && current.level === level ? "checked" : ""} />${level}
    </label>`,
    )
    .join("");
  return `<div class="score-row" data-parameter="${esc(parameter.id)}">
    <span class="param-id" title="${esc(parameter.description)}">${esc(parameter.id)}</span>
    <span class="param-category">${esc(CATEGORY_LABELS[parameter.category])}</span>
    <span class="levels">${radios}</span>
    <input type="text" class="note" placeholder="note"
           value="${current?.note ? esc(current.note) : ""}" />
    <button class="stage" title="stage a what-if level">stage</button>
  </div>`;
}

export function renderOverrideBadges(overrides: Map<string, Level>): string {
  if (overrides.size === 0) return "";
  const badges = [...overrides.entries()]
    .map(
      ([parameterId, level]) =>
        `<span class="override-badge" data-parameter="${esc(parameterId)}">${esc(parameterId)} → ${level}
         <button class="unstage" data-parameter="${esc(parameterId)}">×</button></span>`,
    )
    .join("");
  return `<div class="override-tray">staged (not saved): ${badges}
    <button class="clear-overrides">clear all</button></div>`;
}

export function renderPlan(plan: PlanDoc): string {
  if (plan.steps.length === 0) {
    return `<div class="plan empty-plan">no steps needed — already at ${esc(plan.target)} or above</div>`;
  }
  const rows = plan.steps
    .map(
      (step, index) => `<tr class="plan-step">
      <td>${index + 1}</td>
      <td>${esc(step.parameter_id)}</td>
      <td>${step.from_level} → ${step.to_level}</td>
      <td>${step.cost}</td>
    </tr>`,
    )
    .join("");
  const kind = plan.exact ? "exact minimum" : "greedy";
  return `<div class="plan">
    <h4>Plan for ${esc(plan.kpa_id)} → ${esc(plan.target)} (${esc(plan.method)}, ${kind})</h4>
    <table class="plan-steps">
      <thead><tr><th>#</th><th>parameter</th><th>change</th><th>cost</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <div class="plan-total">total cost: ${plan.total_cost}</div>
    <button class="stage-plan">stage this plan</button>
  </div>`;
}

export function renderConflictPrompt(): string {
  return `<div class="conflict-prompt">
    Someone else changed this assessment (revision conflict).
    <button class="reload">Reload</button>
  </div>`;
}

export function renderOfflineIndicator(pendingCount: number): string {
  if (pendingCount === 0) return "";
  return `<div class="offline-indicator">offline — ${pendingCount} change(s) queued
    <button class="retry">retry</button></div>`;
}
