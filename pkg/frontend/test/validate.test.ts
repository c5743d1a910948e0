import { describe, expect, it } from "vitest";

import { defaultConfig } from "../src/presets.js";
import { boundsOf, validateWizard, type WizardForm } from "../src/validate.js";

function baseForm(): WizardForm {
  return {
    variables: [
      { name: "temperature", lower: 20, upper: 90, unit: "°C" },
      { name: "flow", lower: 0.1, upper: 2.0 },
    ],
    strategy: "StandardBO",
    sense: "min",
    seed: 0,
    config: {},
  };
}

describe("validateWizard", () => {
  it("accepts a well-formed form", () => {
    expect(validateWizard(baseForm())).toEqual({});
  });

  it("requires at least one variable", () => {
    const form = { ...baseForm(), variables: [] };
    expect(validateWizard(form)).toHaveProperty("variables");
  });

  it("rejects inverted bounds", () => {
    const form = baseForm();
    form.variables[0] = { name: "t", lower: 5, upper: 5 };
    expect(validateWizard(form)).toHaveProperty("variables.0.bounds");
  });

  it("rejects non-numeric bounds", () => {
    const form = baseForm();
    form.variables[1] = { name: "f", lower: NaN, upper: 1 };
    expect(validateWizard(form)).toHaveProperty("variables.1.bounds");
  });

  it("requires a variable name", () => {
    const form = baseForm();
    form.variables[0] = { name: "   ", lower: 0, upper: 1 };
    expect(validateWizard(form)).toHaveProperty("variables.0.name");
  });

  it("rejects negative or fractional seeds", () => {
    expect(validateWizard({ ...baseForm(), seed: -1 })).toHaveProperty("seed");
    expect(validateWizard({ ...baseForm(), seed: 1.5 })).toHaveProperty("seed");
  });

  it("checks model knobs when present", () => {
    const form = baseForm();
    form.config = { m: 0 };
    expect(validateWizard(form)).toHaveProperty("config.m");
    form.config = { lam: -2 };
    expect(validateWizard(form)).toHaveProperty("config.lam");
    form.config = { q: 1.5 };
    expect(validateWizard(form)).toHaveProperty("config.q");
  });
});

describe("presets", () => {
  it("gives each strategy a usable default config", () => {
    expect(defaultConfig("StandardBO")).toEqual({});
    expect(defaultConfig("BODMM")).toMatchObject({ q: 0.5 });
    expect(defaultConfig("RSSGP-BO")).toMatchObject({ m: 20, lam: 10, gmd_method: "ei" });
    expect(validateWizard({ ...baseForm(), strategy: "RSSGP-BO", config: defaultConfig("RSSGP-BO") })).toEqual({});
  });
});

describe("boundsOf", () => {
  it("turns variable specs into bound pairs", () => {
    expect(boundsOf(baseForm().variables)).toEqual([
      [20, 90],
      [0.1, 2.0],
    ]);
  });
});
