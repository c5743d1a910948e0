/** Thin typed client for the campaign HTTP service.
 *
 * Every dashboard number comes out of these responses; the client adds
 * no computation beyond poll-loop plumbing for asynchronous asks.
 */

import type {
  AcquisitionSlice,
  ApiErrorBody,
  AskResult,
  CampaignSummary,
  CreateCampaignBody,
  PosteriorSlice,
  TellBody,
  TraceResponse,
} from "./types.js";

export class ApiError extends Error {
  readonly code: ApiErrorBody["code"];
  readonly campaign: string | null;

  constructor(body: ApiErrorBody) {
    super(body.message);
    this.code = body.code;
    this.campaign = body.campaign;
  }
}

async function parseError(res: Response): Promise<never> {
  let body: ApiErrorBody;
  try {
    body = (await res.json()) as ApiErrorBody;
  } catch {
    body = { code: "ModelFailure", message: `HTTP ${res.status}`, campaign: null };
  }
  throw new ApiError(body);
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly pollIntervalMs = 250,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      headers: { "content-type": "application/json" },
      ...init,
    });
    if (!res.ok && res.status !== 202) return parseError(res);
    if (res.status === 204) return undefined as T;
    return (await res.json()) as T;
  }

  createCampaign(body: CreateCampaignBody): Promise<CampaignSummary> {
    return this.request("/campaigns", { method: "POST", body: JSON.stringify(body) });
  }

  getCampaign(id: string): Promise<CampaignSummary> {
    return this.request(`/campaigns/${id}`);
  }

  /** Ask for the next suggestion, transparently following 202 poll tokens. */
  async ask(id: string): Promise<AskResult> {
    const res = await fetch(`${this.baseUrl}/campaigns/${id}/ask`, { method: "POST" });
    if (res.status === 200) return (await res.json()) as AskResult;
    if (res.status !== 202) return parseError(res);
    const { poll } = (await res.json()) as { poll: string };
    for (;;) {
      await new Promise((r) => setTimeout(r, this.pollIntervalMs));
      const p = await fetch(this.baseUrl + poll);
      if (p.status === 200) return (await p.json()) as AskResult;
      if (p.status !== 202) return parseError(p);
    }
  }

  tell(id: string, body: TellBody): Promise<CampaignSummary> {
    return this.request(`/campaigns/${id}/tell`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  trace(id: string): Promise<TraceResponse> {
    return this.request(`/campaigns/${id}/trace`);
  }

  posterior(id: string, axis: number, grid = 101): Promise<PosteriorSlice> {
    return this.request(`/campaigns/${id}/posterior?axis=${axis}&grid=${grid}`);
  }

  acquisition(id: string, axis: number, grid = 101): Promise<AcquisitionSlice> {
    return this.request(`/campaigns/${id}/acquisition?axis=${axis}&grid=${grid}`);
  }

  deleteCampaign(id: string): Promise<void> {
    return this.request(`/campaigns/${id}`, { method: "DELETE" });
  }
}
