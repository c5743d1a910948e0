/** Client-side form validation for the campaign wizard. */

import type { VariableSpec } from "./types.js";

export interface WizardForm {
  variables: VariableSpec[];
  strategy: string;
  sense: string;
  seed: number;
  config: Record<string, unknown>;
}

/** Returns a map of field name to human-readable problem; empty means valid. */
export function validateWizard(form: WizardForm): Record<string, string> {
  const errors: Record<string, string> = {};
  if (form.variables.length === 0) {
    errors["variables"] = "at least one variable is required";
  }
  form.variables.forEach((v, i) => {
    if (!v.name.trim()) errors[`variables.${i}.name`] = "name is required";
    if (!Number.isFinite(v.lower) || !Number.isFinite(v.upper)) {
      errors[`variables.${i}.bounds`] = "bounds must be numbers";
    } else if (v.lower >= v.upper) {
      errors[`variables.${i}.bounds`] = "lower bound must be below upper bound";
    }
  });
  if (!Number.isInteger(form.seed) || form.seed < 0) {
    errors["seed"] = "seed must be a nonnegative integer";
  }
  const m = form.config["m"];
  if (m !== undefined && (!Number.isInteger(m) || (m as number) < 1)) {
    errors["config.m"] = "m must be an integer ≥ 1";
  }
  const lam = form.config["lam"];
  if (lam !== undefined && (typeof lam !== "number" || lam < 0)) {
    errors["config.lam"] = "λ must be ≥ 0";
  }
  const q = form.config["q"];
  if (q !== undefined && (typeof q !== "number" || q <= 0 || q >= 1)) {
    errors["config.q"] = "q must lie strictly between 0 and 1";
  }
  return errors;
}

export function boundsOf(variables: VariableSpec[]): number[][] {
  return variables.map((v) => [v.lower, v.upper]);
}
