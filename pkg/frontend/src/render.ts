/** Pure HTML/SVG renderers for the dashboard.
 *
 * Every function maps API response data to a markup string; the only
 * arithmetic here is chart scaling (data range to pixel range).  That
 * keeps the view auditable and testable without a browser.
 */

import type {
  AcquisitionSlice,
  CampaignSummary,
  PosteriorSlice,
  TraceRow,
  VariableSpec,
} from "./types.js";
import { GRADIENT_STRATEGIES } from "./types.js";

const W = 560;
const H = 240;
const PAD = 36;

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function fmt(x: number): string {
  if (!Number.isFinite(x)) return String(x);
  const a = Math.abs(x);
  if (a !== 0 && (a >= 1e5 || a < 1e-4)) return x.toExponential(4);
  return String(Math.round(x * 1e6) / 1e6);
}

interface Scale {
  (v: number): number;
}

function scaleLinear(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

function polyline(xs: number[], ys: number[], sx: Scale, sy: Scale): string {
  return xs.map((x, i) => `${sx(x).toFixed(1)},${sy(ys[i]).toFixed(1)}`).join(" ");
}

export function renderSummary(c: CampaignSummary, variables: VariableSpec[]): string {
  const inc = c.incumbent
    ? `<span class="incumbent-value" data-testid="incumbent">${fmt(c.incumbent.y)}</span>
       <span class="incumbent-at">at ${c.incumbent.x.map(fmt).join(", ")}</span>`
    : `<span class="incumbent-value" data-testid="incumbent">none yet</span>`;
  return `
  <dl class="summary">
    <dt>Campaign</dt><dd>${esc(c.id)}</dd>
    <dt>Strategy</dt><dd>${esc(c.strategy)} (${c.sense === "min" ? "minimizing" : "maximizing"})</dd>
    <dt>Observations</dt><dd data-testid="n-observations">${c.n_observations}</dd>
    <dt>Best so far</dt><dd>${inc}</dd>
  </dl>`;
}

export function renderPending(
  c: CampaignSummary,
  variables: VariableSpec[],
): string {
  if (c.pending === null) {
    return `<p class="no-pending" data-testid="pending">No suggestion pending — ask for one.</p>`;
  }
  const rows = c.pending
    .map((v, i) => {
      const spec = variables[i];
      const unit = spec?.unit ? ` <span class="unit">${esc(spec.unit)}</span>` : "";
      return `<tr><th>${esc(spec?.name ?? `x${i + 1}`)}</th><td>${fmt(v)}${unit}</td></tr>`;
    })
    .join("");
  const note = c.last_ask_fallback
    ? `<p class="fallback-note">Model fit failed; this point was drawn at random inside the bounds.</p>`
    : "";
  return `<table class="pending" data-testid="pending">${rows}</table>${note}`;
}

export function renderObservationForm(c: CampaignSummary, variables: VariableSpec[]): string {
  if (c.pending === null) return "";
  const wantsGradient = GRADIENT_STRATEGIES.includes(c.strategy);
  const gradFields = wantsGradient
    ? variables
        .map(
          (v, i) =>
            `<label>∂f/∂${esc(v.name)} <input type="number" step="any" name="grad${i}"></label>`,
        )
        .join("")
    : "";
  return `
  <form id="tell-form">
    <label>Measured value
      <input type="number" step="any" name="y" required data-testid="y-input">
    </label>
    ${gradFields}
    <button type="submit">Record observation</button>
  </form>`;
}

export function renderError(message: string): string {
  return `<div class="error-banner" role="alert" data-testid="error">${esc(message)}</div>`;
}

export function renderTraceChart(rows: TraceRow[], sense: string): string {
  if (rows.length === 0) return `<svg class="chart" viewBox="0 0 ${W} ${H}"></svg>`;
  const ys = rows.flatMap((r) => [r.y, r.incumbent]);
  const lo = Math.min(...ys);
  const hi = Math.max(...ys);
  const sx = scaleLinear(0, Math.max(rows.length - 1, 1), PAD, W - PAD);
  const sy = scaleLinear(lo, hi, H - PAD, PAD);
  const dots = rows
    .map(
      (r) =>
        `<circle cx="${sx(r.iter).toFixed(1)}" cy="${sy(r.y).toFixed(1)}" r="2.5" class="obs-dot"/>`,
    )
    .join("");
  const line = polyline(
    rows.map((r) => r.iter),
    rows.map((r) => r.incumbent),
    sx,
    sy,
  );
  return `<svg class="chart" viewBox="0 0 ${W} ${H}" data-testid="trace-chart">
    <polyline points="${line}" class="incumbent-line" fill="none"/>
    ${dots}
    <text x="${PAD}" y="14" class="axis-label">${sense === "min" ? "best (lowest) value" : "best (highest) value"}</text>
  </svg>`;
}

export function renderPosteriorChart(
  slice: PosteriorSlice,
  acq: AcquisitionSlice | null,
  axisName: string,
): string {
  const lo = Math.min(...slice.lower);
  const hi = Math.max(...slice.upper);
  const sx = scaleLinear(slice.grid[0], slice.grid[slice.grid.length - 1], PAD, W - PAD);
  const sy = scaleLinear(lo, hi, H - PAD, PAD);
  const band =
    polyline(slice.grid, slice.upper, sx, sy) +
    " " +
    polyline([...slice.grid].reverse(), [...slice.lower].reverse(), sx, sy);
  const mean = polyline(slice.grid, slice.mean, sx, sy);
  const obs = slice.observations
    .map(
      (o) =>
        `<circle cx="${sx(o.x[slice.axis]).toFixed(1)}" cy="${sy(o.y).toFixed(1)}" r="3" class="obs-dot"/>`,
    )
    .join("");
  let overlay = "";
  if (acq !== null && acq.values.length === slice.grid.length) {
    const aLo = Math.min(...acq.values);
    const aHi = Math.max(...acq.values);
    const ay = scaleLinear(aLo, aHi, H - PAD, H - PAD - 50);
    overlay = `<polyline points="${polyline(acq.grid, acq.values, sx, ay)}" class="acq-line" fill="none"/>`;
  }
  return `<svg class="chart" viewBox="0 0 ${W} ${H}" data-testid="posterior-chart">
    <polygon points="${band}" class="band"/>
    <polyline points="${mean}" class="mean-line" fill="none"/>
    ${obs}
    ${overlay}
    <text x="${W / 2}" y="${H - 6}" class="axis-label">${esc(axisName)}</text>
  </svg>`;
}

export function renderAxisPicker(variables: VariableSpec[], current: number): string {
  if (variables.length < 2) return "";
  const opts = variables
    .map(
      (v, i) =>
        `<option value="${i}"${i === current ? " selected" : ""}>${esc(v.name)}</option>`,
    )
    .join("");
  return `<label>Slice axis <select id="axis-picker">${opts}</select></label>`;
}
