/** Wire types mirroring the campaign service's JSON bodies. */

export type Sense = "min" | "max";

export type Strategy =
  | "StandardBO"
  | "BOTD"
  | "BODMM"
  | "BOSGPD"
  | "SSGP-BO"
  | "RSSGP-BO";

export const STRATEGIES: Strategy[] = [
  "StandardBO",
  "BOTD",
  "BODMM",
  "BOSGPD",
  "SSGP-BO",
  "RSSGP-BO",
];

/** Strategies whose observation form offers per-variable gradient inputs. */
export const GRADIENT_STRATEGIES: Strategy[] = ["BOTD", "BOSGPD"];

export interface VariableSpec {
  name: string;
  lower: number;
  upper: number;
  unit?: string;
}

export interface CreateCampaignBody {
  bounds: number[][];
  sense: Sense;
  strategy: Strategy;
  seed: number;
  model_config: Record<string, unknown>;
}

export interface Incumbent {
  x: number[];
  y: number;
}

export interface CampaignSummary {
  id: string;
  bounds: number[][];
  sense: Sense;
  strategy: Strategy;
  model_config: Record<string, unknown>;
  seed: number;
  n_observations: number;
  pending: number[] | null;
  incumbent: Incumbent | null;
  last_ask_fallback: boolean;
}

export interface AskResult {
  x: number[];
  fallback: boolean;
  campaign: string;
}

export interface TellBody {
  x: number[];
  y: number;
  gradient?: number[];
  out_of_band?: boolean;
}

export interface TraceRow {
  iter: number;
  y: number;
  incumbent: number;
}

export interface TraceResponse {
  campaign: string;
  sense: Sense;
  rows: TraceRow[];
}

export interface PosteriorSlice {
  campaign: string;
  axis: number;
  grid: number[];
  mean: number[];
  lower: number[];
  upper: number[];
  observations: Incumbent[];
}

export interface AcquisitionSlice {
  campaign: string;
  axis: number;
  grid: number[];
  values: number[];
}

export interface ApiErrorBody {
  code: "NotFound" | "Conflict" | "Invalid" | "ModelFailure";
  message: string;
  campaign: string | null;
}
