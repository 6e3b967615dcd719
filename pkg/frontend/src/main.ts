// Workbench bootstrap: loads an assessment, wires score entry, what-if
// staging and planning to the session view model, and re-renders from server
// responses only.

import { SmmApi } from "./api.js";
import {
  renderConflictPrompt,
  renderDashboard,
  renderOfflineIndicator,
  renderOverrideBadges,
  renderPlan,
  renderScoreControl,
} from "./render.js";
import { SessionViewModel } from "./session.js";
import type { Level, MaturityLevelName } from "./types.js";

const api = new SmmApi(new URLSearchParams(location.search).get("api") ?? "");
const vm = new SessionViewModel(api);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

function render(): void {
  const header = el("header-line");
  if (vm.assessment && vm.model) {
    header.textContent =
      `${vm.model.name} v${vm.model.version} — ${vm.assessment.team} ` +
      `(${vm.assessment.id}, ${vm.assessment.date}, ${vm.assessment.status})`;
  }

  el("notices").innerHTML =
    (vm.conflictPrompt ? renderConflictPrompt() : "") +
    renderOfflineIndicator(vm.pending.length);

  el("overrides").innerHTML = renderOverrideBadges(vm.overrides);

  if (vm.evaluation) {
    el("dashboard").innerHTML = renderDashboard(vm.evaluation, vm.hypothetical);
  }

  if (vm.model && vm.assessment) {
    el("score-form").innerHTML = vm.model.parameters
      .map((parameter) => renderScoreControl(parameter, vm.assessment!.scores[parameter.id]))
      .join("");
  }

  if (vm.model) {
    const select = el<HTMLSelectElement>("plan-kpa");
    if (select.options.length === 0) {
      select.innerHTML = vm.model.kpas
        .map((kpa) => `<option value="${kpa.id}">${kpa.name}</option>`)
        .join("");
    }
  }

  el("plan-result").innerHTML = vm.plan ? renderPlan(vm.plan) : "";
}

function wire(): void {
  el("score-form").addEventListener("change", (event) => {
    const input = event.target as HTMLInputElement;
    const row = input.closest<HTMLElement>(".score-row");
    if (!row || input.type !== "radio") return;
    const parameterId = row.dataset.parameter!;
    const note = row.querySelector<HTMLInputElement>(".note")!.value || undefined;
    void vm.scoreEntry(parameterId, Number(input.value) as Level, note).then(render);
  });

  el("score-form").addEventListener("click", (event) => {
    const button = event.target as HTMLElement;
    if (!button.classList.contains("stage")) return;
    const row = button.closest<HTMLElement>(".score-row")!;
    const parameterId = row.dataset.parameter!;
    const checked = row.querySelector<HTMLInputElement>("input[type=radio]:checked");
    const level = Number(checked?.value ?? 0) as Level;
    void vm.stageOverride(parameterId, level).then(render);
  });

  el("overrides").addEventListener("click", (event) => {
    const button = event.target as HTMLElement;
    if (button.classList.contains("clear-overrides")) {
      vm.clearOverrides();
      render();
    } else if (button.classList.contains("unstage")) {
      void vm.unstageOverride(button.dataset.parameter!).then(render);
    }
  });

  el("notices").addEventListener("click", (event) => {
    const button = event.target as HTMLElement;
    if (button.classList.contains("reload")) {
      location.reload();
    } else if (button.classList.contains("retry")) {
      void vm.flushPending().then(render);
    }
  });

  el("plan-request").addEventListener("click", () => {
    const kpaId = el<HTMLSelectElement>("plan-kpa").value;
    const target = el<HTMLSelectElement>("plan-target").value as MaturityLevelName;
    const method = el<HTMLSelectElement>("plan-method").value as "compensatory" | "two-tier";
    void vm.requestPlan(kpaId, target, method).then(render);
  });

  el("plan-result").addEventListener("click", (event) => {
    const button = event.target as HTMLElement;
    if (button.classList.contains("stage-plan")) {
      void vm.stagePlan().then(render);
    }
  });
}

async function boot(): Promise<void> {
  const requested = new URLSearchParams(location.search).get("assessment");
  let assessmentId = requested;
  if (!assessmentId) {
    const summaries = await api.listAssessments();
    if (summaries.length === 0) {
      el("header-line").textContent = "no assessments in the store";
      return;
    }
    assessmentId = summaries[0].id;
  }
  await vm.load(assessmentId);
  render();
}

wire();
void boot();
