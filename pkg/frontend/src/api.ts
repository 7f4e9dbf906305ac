// Thin typed client for the review service. Every method either
// returns the parsed payload or throws ApiError with the HTTP status
// and the service's `detail` message.

import type {
  ExportResponse,
  FramesResponse,
  PromptEntry,
  ScoresResponse,
  SelectionResponse,
  SelectRequest,
  StatusResponse,
} from "./types.js";

export class ApiError extends Error {
  status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.name = "ApiError";
    this.status = status;
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  let res: Response;
  try {
    res = await fetch(url, init);
  } catch (err) {
    throw new ApiError(0, err instanceof Error ? err.message : "service unreachable");
  }
  if (!res.ok) {
    let detail = `${res.status} ${res.statusText}`;
    try {
      const body = await res.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body, keep the status line
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

function post<T>(url: string, body: unknown): Promise<T> {
  return request<T>(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
}

export class ReviewApi {
  constructor(private base = "") {}

  getStatus(): Promise<StatusResponse> {
    return request(`${this.base}/api/status`);
  }

  getFrames(): Promise<FramesResponse> {
    return request(`${this.base}/api/frames`);
  }

  setReference(frameId: string): Promise<ScoresResponse> {
    return post(`${this.base}/api/reference`, { frame_id: frameId });
  }

  getScores(): Promise<ScoresResponse> {
    return request(`${this.base}/api/scores`);
  }

  select(req: SelectRequest): Promise<SelectionResponse> {
    return post(`${this.base}/api/select`, req);
  }

  savePrompts(entry: PromptEntry): Promise<PromptEntry> {
    return post(`${this.base}/api/prompts`, entry);
  }

  getExport(strategy: string, seed: number): Promise<ExportResponse> {
    const q = new URLSearchParams({ strategy, seed: String(seed) });
    return request(`${this.base}/api/export?${q}`);
  }
}
