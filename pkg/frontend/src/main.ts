/** Browser entry point: campaign wizard plus live dashboard.
 *
 * All markup is produced by the pure renderers in render.ts; this file
 * only wires DOM events to the controller and swaps innerHTML.
 */

import { ApiClient } from "./api.js";
import { DashboardController, type DashboardState } from "./controller.js";
import { defaultConfig, GMD_METHODS, STRATEGY_KNOBS } from "./presets.js";
import {
  renderAxisPicker,
  renderError,
  renderObservationForm,
  renderPending,
  renderPosteriorChart,
  renderSummary,
  renderTraceChart,
} from "./render.js";
import { GRADIENT_STRATEGIES, STRATEGIES, type Strategy, type VariableSpec } from "./types.js";
import { boundsOf, validateWizard, type WizardForm } from "./validate.js";

const api = new ApiClient(localStorage.getItem("sparsebo-api") ?? "http://127.0.0.1:8000");

function $(id: string): HTMLElement {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el;
}

function readVariables(): VariableSpec[] {
  const rows = document.querySelectorAll<HTMLElement>("#variables .variable-row");
  return Array.from(rows).map((row) => ({
    name: row.querySelector<HTMLInputElement>("[name=name]")!.value,
    lower: Number(row.querySelector<HTMLInputElement>("[name=lower]")!.value),
    upper: Number(row.querySelector<HTMLInputElement>("[name=upper]")!.value),
    unit: row.querySelector<HTMLInputElement>("[name=unit]")!.value || undefined,
  }));
}

function variableRow(): string {
  return `<div class="variable-row">
    <input name="name" placeholder="name" required>
    <input name="lower" type="number" step="any" placeholder="lower" required>
    <input name="upper" type="number" step="any" placeholder="upper" required>
    <input name="unit" placeholder="unit (optional)">
  </div>`;
}

function knobFields(strategy: Strategy): string {
  const knobs = STRATEGY_KNOBS[strategy];
  return knobs
    .map((k) => {
      if (k.key === "gmd_method") {
        const opts = GMD_METHODS.map((m) => `<option value="${m}">${m}</option>`).join("");
        return `<label>${k.label} <select name="knob-${k.key}">${opts}</select></label>`;
      }
      return `<label>${k.label}
        <input type="number" name="knob-${k.key}" value="${k.value}"
               ${k.min !== undefined ? `min="${k.min}"` : ""}
               ${k.step !== undefined ? `step="${k.step}"` : ""}>
      </label>`;
    })
    .join("");
}

function readWizard(): WizardForm {
  const strategy = (document.querySelector<HTMLSelectElement>("#strategy")!
    .value) as Strategy;
  const config = defaultConfig(strategy);
  for (const knob of STRATEGY_KNOBS[strategy]) {
    const el = document.querySelector<HTMLInputElement | HTMLSelectElement>(
      `[name="knob-${knob.key}"]`,
    );
    if (el === null) continue;
    config[knob.key] = knob.key === "gmd_method" ? el.value : Number(el.value);
  }
  return {
    variables: readVariables(),
    strategy,
    sense: document.querySelector<HTMLSelectElement>("#sense")!.value,
    seed: Number(document.querySelector<HTMLInputElement>("#seed")!.value),
    config,
  };
}

let controller: DashboardController | null = null;

function paint(state: DashboardState): void {
  if (controller === null) return;
  const { summary } = state;
  $("summary-panel").innerHTML = renderSummary(summary, controller.variables);
  $("pending-panel").innerHTML =
    renderPending(summary, controller.variables) +
    renderObservationForm(summary, controller.variables);
  $("trace-panel").innerHTML = renderTraceChart(state.trace, summary.sense);
  $("posterior-panel").innerHTML =
    renderAxisPicker(controller.variables, controller.axis) +
    (state.posterior !== null
      ? renderPosteriorChart(
          state.posterior,
          state.acquisition,
          controller.variables[controller.axis]?.name ?? `axis ${controller.axis}`,
        )
      : "<p>No observations yet.</p>");
  $("error-panel").innerHTML = state.error !== null ? renderError(state.error) : "";
  $("ask-button").toggleAttribute("disabled", summary.pending !== null);

  const form = document.querySelector<HTMLFormElement>("#tell-form");
  form?.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(form);
    const y = Number(data.get("y"));
    let gradient: number[] | undefined;
    if (GRADIENT_STRATEGIES.includes(summary.strategy)) {
      const g = controller!.variables.map((_, i) => Number(data.get(`grad${i}`) ?? ""));
      if (g.every((v) => Number.isFinite(v))) gradient = g;
    }
    void controller!.tell(y, gradient).then(paint);
  });
  const picker = document.querySelector<HTMLSelectElement>("#axis-picker");
  picker?.addEventListener("change", () => {
    void controller!.setAxis(Number(picker.value)).then(paint);
  });
}

function showDashboard(): void {
  $("wizard").hidden = true;
  $("dashboard").hidden = false;
}

async function startCampaign(form: WizardForm): Promise<void> {
  const summary = await api.createCampaign({
    bounds: boundsOf(form.variables),
    sense: form.sense as "min" | "max",
    strategy: form.strategy as Strategy,
    seed: form.seed,
    model_config: form.config,
  });
  localStorage.setItem("sparsebo-campaign", summary.id);
  localStorage.setItem("sparsebo-variables", JSON.stringify(form.variables));
  controller = new DashboardController(api, summary.id, form.variables);
  showDashboard();
  paint(await controller.refresh());
}

async function resumeCampaign(id: string, variables: VariableSpec[]): Promise<void> {
  controller = new DashboardController(api, id, variables);
  showDashboard();
  paint(await controller.refresh());
}

export function bootstrap(): void {
  $("strategy-select-wrap").innerHTML = `<select id="strategy">${STRATEGIES.map(
    (s) => `<option value="${s}">${s}</option>`,
  ).join("")}</select>`;
  $("variables").innerHTML = variableRow();
  $("knobs").innerHTML = knobFields("StandardBO");

  document.querySelector<HTMLSelectElement>("#strategy")!.addEventListener("change", (ev) => {
    $("knobs").innerHTML = knobFields((ev.target as HTMLSelectElement).value as Strategy);
  });
  $("add-variable").addEventListener("click", () => {
    $("variables").insertAdjacentHTML("beforeend", variableRow());
  });
  $("wizard-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    const form = readWizard();
    const errors = validateWizard(form);
    $("wizard-errors").innerHTML = Object.entries(errors)
      .map(([field, msg]) => `<li>${field}: ${msg}</li>`)
      .join("");
    if (Object.keys(errors).length > 0) return;
    void startCampaign(form).catch((e) => {
      $("wizard-errors").innerHTML = `<li>${e instanceof Error ? e.message : e}</li>`;
    });
  });
  $("ask-button").addEventListener("click", () => {
    void controller?.ask().then(paint);
  });

  const saved = localStorage.getItem("sparsebo-campaign");
  const savedVars = localStorage.getItem("sparsebo-variables");
  if (saved !== null && savedVars !== null) {
    void resumeCampaign(saved, JSON.parse(savedVars) as VariableSpec[]).catch(() => {
      localStorage.removeItem("sparsebo-campaign");
    });
  }
}

if (typeof document !== "undefined" && document.getElementById("wizard") !== null) {
  bootstrap();
}
