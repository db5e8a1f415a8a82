// Test transport backed by responses recorded from the live service on the
// bundled mini dataset (see tests/fixtures). No network, no browser.

import { readFileSync } from "node:fs";
import { resolve } from "node:path";

import type { FetchLike } from "../src/api.js";
import type { ComputeRequest, ComputeResponse } from "../src/types.js";

export function fixture<T>(name: string): T {
  const path = resolve(process.cwd(), "tests", "fixtures", `${name}.json`);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

export const LAYERS: Record<string, unknown> = {
  zones: fixture("layers_zones"),
  perimeters: fixture("layers_perimeters"),
  grid: fixture("layers_grid"),
  shelters: fixture("layers_shelters"),
};

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

const OPEN_IDS = [
  "harbor-gym", "midtown-rec", "eastside-church", "fairground",
  "convention-hall", "expo-center", "south-armory", "valley-school",
];

export function emptyComputeResponse(): ComputeResponse {
  const base = fixture<ComputeResponse>("compute_base");
  return {
    ...base,
    supply_ids: [],
    cells: [],
    gini: null,
    gini_reason: "every accessibility score is zero",
    max_score: null,
  };
}

/** Routes requests the way the recorded server session answered them. */
export function fixtureTransport(): FetchLike {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    if (init?.method === "POST" && path === "/api/accessibility") {
      const request = JSON.parse(String(init.body)) as ComputeRequest;
      const known = new Set([
        ...OPEN_IDS,
        ...(fixture<{ features: { properties: { id: string } }[] }>("layers_shelters").features.map(
          (f) => f.properties.id,
        )),
      ]);
      const unknown = [...request.enable, ...request.disable].filter((id) => !known.has(id));
      if (unknown.length > 0) {
        return json(422, { error: "unknown shelter ids", unknown_ids: unknown.sort() });
      }
      const enable = [...request.enable].sort().join(",");
      const disable = [...request.disable].sort().join(",");
      if (enable === "" && disable === "") return json(200, fixture("compute_base"));
      if (enable === "" && disable === "harbor-gym") return json(200, fixture("compute_no_harbor"));
      if (enable === "nw-lodge" && disable === "") return json(200, fixture("compute_lodge"));
      if (disable === OPEN_IDS.slice().sort().join(",")) return json(200, emptyComputeResponse());
      throw new Error(`no fixture recorded for enable=[${enable}] disable=[${disable}]`);
    }
    if (init?.method === "POST" && path === "/api/placement") {
      const request = JSON.parse(String(init.body)) as { method: string; k: number };
      if (request.k > 50) {
        return json(409, { error: "placement infeasible: short by 2000000 capacity", shortfall: 2_000_000, zone: null });
      }
      return json(200, fixture(`placement_${request.method}`));
    }
    const layer = path.match(/^\/api\/layers\/(\w+)$/)?.[1];
    if (layer) {
      if (!(layer in LAYERS)) return json(404, { error: `unknown layer '${layer}'` });
      return json(200, LAYERS[layer]);
    }
    throw new Error(`unrouted request: ${init?.method ?? "GET"} ${path}`);
  };
}

export interface Deferred {
  resolve(body: unknown): void;
  request: ComputeRequest;
}

/** Transport whose compute responses resolve only when the test says so. */
export function manualTransport(): { fetchImpl: FetchLike; pending: Deferred[] } {
  const pending: Deferred[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    if (url.endsWith("/api/accessibility")) {
      return new Promise<Response>((resolve) => {
        pending.push({
          request: JSON.parse(String(init?.body)) as ComputeRequest,
          resolve: (body: unknown) => resolve(json(200, body)),
        });
      });
    }
    return fixtureTransport()(url, init);
  };
  return { fetchImpl, pending };
}
