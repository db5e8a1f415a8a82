// What-if state machine. Every displayed number comes from a server response;
// the client only tracks toggles and decides which response is current.
//
// Requests carry sequence numbers. A response renders only if it is newer
// than the last rendered one, so rapid toggling settles on exactly one
// consistent render; superseded responses are discarded.

import { ApiError, Client } from "./api.js";
import type { ComputeRequest, ComputeResponse, PlacementRequest, PlacementResponse } from "./types.js";

export interface ShelterInfo {
  id: string;
  status: "open" | "candidate";
}

export interface RenderEvent {
  response: ComputeResponse;
  seq: number;
}

export interface ToggleError {
  shelterId: string | null;
  error: unknown;
}

export class Planner {
  scenario = "case3";
  congestion: boolean | null = null;
  readonly disabledOpen = new Set<string>();
  readonly enabledCandidates = new Set<string>();

  private statuses = new Map<string, "open" | "candidate">();
  private nextSeq = 0;
  private renderedSeq = 0;
  private inFlight = 0;

  onRender: ((event: RenderEvent) => void) | null = null;
  onToggleError: ((failure: ToggleError) => void) | null = null;
  onPending: ((pending: boolean) => void) | null = null;

  constructor(private client: Client) {}

  registerShelters(shelters: ShelterInfo[]): void {
    for (const s of shelters) this.statuses.set(s.id, s.status);
  }

  shelterActive(id: string): boolean {
    const status = this.statuses.get(id);
    if (status === "open") return !this.disabledOpen.has(id);
    return this.enabledCandidates.has(id);
  }

  private request(): ComputeRequest {
    return {
      scenario: this.scenario,
      enable: [...this.enabledCandidates].sort(),
      disable: [...this.disabledOpen].sort(),
      congestion: this.congestion,
      decay: null,
    };
  }

  private flip(id: string): void {
    const status = this.statuses.get(id);
    if (status === "open") {
      if (this.disabledOpen.has(id)) this.disabledOpen.delete(id);
      else this.disabledOpen.add(id);
    } else if (status === "candidate") {
      if (this.enabledCandidates.has(id)) this.enabledCandidates.delete(id);
      else this.enabledCandidates.add(id);
    }
  }

  /** Optimistically flip a marker, recompute, and reconcile on response. */
  async toggleShelter(id: string): Promise<void> {
    if (!this.statuses.has(id)) {
      this.onToggleError?.({ shelterId: id, error: new Error(`unknown shelter ${id}`) });
      return;
    }
    this.flip(id);
    await this.issue(id);
  }

  /** Recompute with the current toggle state (initial load, scenario switch). */
  async refresh(): Promise<void> {
    await this.issue(null);
  }

  private async issue(toggledId: string | null): Promise<void> {
    const seq = ++this.nextSeq;
    this.inFlight += 1;
    this.onPending?.(true);
    try {
      const response = await this.client.accessibility(this.request());
      if (seq > this.renderedSeq) {
        this.renderedSeq = seq;
        this.onRender?.({ response, seq });
      }
    } catch (error) {
      if (toggledId !== null) {
        this.flip(toggledId); // revert the optimistic change
      }
      this.onToggleError?.({ shelterId: toggledId, error });
      if (error instanceof ApiError && error.status >= 500) throw error;
    } finally {
      this.inFlight -= 1;
      this.onPending?.(this.inFlight > 0);
    }
  }

  async runPlacement(request: PlacementRequest): Promise<PlacementResponse> {
    // placement renders through the same sequencing gate as toggles
    const seq = ++this.nextSeq;
    this.inFlight += 1;
    this.onPending?.(true);
    try {
      const response = await this.client.placement(request);
      if (seq > this.renderedSeq) {
        this.renderedSeq = seq;
        this.onRender?.({ response: response.compute, seq });
      }
      return response;
    } finally {
      this.inFlight -= 1;
      this.onPending?.(this.inFlight > 0);
    }
  }
}
