// Thin typed client; the fetch implementation is injectable so tests can run
// against recorded fixtures without a browser or a live server.

import type {
  ComputeRequest,
  ComputeResponse,
  PlacementRequest,
  PlacementResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: Record<string, unknown>,
  ) {
    super(`HTTP ${status}: ${body["error"] ?? "request failed"}`);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body);
  }
  return body as T;
}

export class Client {
  constructor(
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private base = "",
  ) {}

  async layer<T>(name: string): Promise<T> {
    return parse<T>(await this.fetchImpl(`${this.base}/api/layers/${name}`));
  }

  async accessibility(request: ComputeRequest): Promise<ComputeResponse> {
    return parse<ComputeResponse>(
      await this.fetchImpl(`${this.base}/api/accessibility`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(request),
      }),
    );
  }

  async placement(request: PlacementRequest): Promise<PlacementResponse> {
    return parse<PlacementResponse>(
      await this.fetchImpl(`${this.base}/api/placement`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(request),
      }),
    );
  }
}
