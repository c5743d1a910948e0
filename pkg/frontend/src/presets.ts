/** Default model-knob values offered by the campaign wizard.
 *
 * These only prefill the form; the server owns the real defaults and
 * receives whatever the experimenter submits.
 */

import type { Strategy } from "./types.js";

export interface KnobSpec {
  key: string;
  label: string;
  value: number;
  min?: number;
  step?: number;
}

const SPECTRUM_KNOBS: KnobSpec[] = [
  { key: "m", label: "Spectral frequencies (m)", value: 20, min: 1, step: 1 },
];

export const STRATEGY_KNOBS: Record<Strategy, KnobSpec[]> = {
  StandardBO: [],
  BOTD: [],
  BODMM: [
    { key: "q", label: "Degree prior decay (q)", value: 0.5, min: 0.01, step: 0.01 },
    { key: "max_degree", label: "Max polynomial degree", value: 10, min: 1, step: 1 },
  ],
  BOSGPD: [
    { key: "m", label: "Inducing points (m)", value: 10, min: 1, step: 1 },
  ],
  "SSGP-BO": SPECTRUM_KNOBS,
  "RSSGP-BO": [
    ...SPECTRUM_KNOBS,
    { key: "lam", label: "Entropy weight (λ)", value: 10, min: 0, step: 0.5 },
    { key: "gmd_method", label: "Maximizer-distribution estimator", value: NaN },
  ],
};

export const GMD_METHODS = ["ei", "thompson", "smc"] as const;

export function defaultConfig(strategy: Strategy): Record<string, unknown> {
  const cfg: Record<string, unknown> = {};
  for (const knob of STRATEGY_KNOBS[strategy]) {
    if (knob.key === "gmd_method") cfg[knob.key] = GMD_METHODS[0];
    else cfg[knob.key] = knob.value;
  }
  return cfg;
}
