/** Dashboard state machine: every field is derived from API responses.
 *
 * The controller never caches computed quantities of its own — after each
 * action it re-fetches the campaign summary so the view always reflects
 * what the server persisted (a page reload therefore loses nothing).
 */

import { ApiClient, ApiError } from "./api.js";
import type {
  AcquisitionSlice,
  CampaignSummary,
  PosteriorSlice,
  TraceRow,
  VariableSpec,
} from "./types.js";

export interface DashboardState {
  summary: CampaignSummary;
  trace: TraceRow[];
  posterior: PosteriorSlice | null;
  acquisition: AcquisitionSlice | null;
  error: string | null;
}

function friendly(e: unknown): string {
  if (e instanceof ApiError) {
    if (e.code === "Conflict") {
      return e.message.includes("pending")
        ? "A suggestion is already pending — record its outcome first."
        : e.message;
    }
    return e.message;
  }
  return e instanceof Error ? e.message : String(e);
}

export class DashboardController {
  private state: DashboardState | null = null;

  constructor(
    readonly api: ApiClient,
    readonly campaignId: string,
    readonly variables: VariableSpec[],
    public axis = 0,
  ) {}

  current(): DashboardState {
    if (this.state === null) throw new Error("refresh() has not completed yet");
    return this.state;
  }

  /** Pulls summary, trace, and (when data exists) the posterior slice. */
  async refresh(): Promise<DashboardState> {
    const summary = await this.api.getCampaign(this.campaignId);
    const trace = (await this.api.trace(this.campaignId)).rows;
    let posterior: PosteriorSlice | null = null;
    let acquisition: AcquisitionSlice | null = null;
    if (summary.n_observations > 0) {
      try {
        posterior = await this.api.posterior(this.campaignId, this.axis);
        acquisition = await this.api.acquisition(this.campaignId, this.axis);
      } catch {
        // charts are best-effort; the numeric panels stay authoritative
      }
    }
    this.state = { summary, trace, posterior, acquisition, error: null };
    return this.state;
  }

  async ask(): Promise<DashboardState> {
    try {
      await this.api.ask(this.campaignId);
    } catch (e) {
      return this.withError(friendly(e));
    }
    return this.refresh();
  }

  async tell(y: number, gradient?: number[]): Promise<DashboardState> {
    const pending = this.state?.summary.pending;
    if (!pending) return this.withError("no pending suggestion to report against");
    try {
      await this.api.tell(this.campaignId, { x: pending, y, gradient });
    } catch (e) {
      return this.withError(friendly(e));
    }
    return this.refresh();
  }

  async setAxis(axis: number): Promise<DashboardState> {
    this.axis = axis;
    return this.refresh();
  }

  private async withError(message: string): Promise<DashboardState> {
    const fresh = await this.refresh();
    this.state = { ...fresh, error: message };
    return this.state;
  }
}
