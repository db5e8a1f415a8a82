// Planner bootstrap: load layers, wire the map, legend, gauge, and panels.
// Everything displayed is read from the most recent server response.

import { ApiError, Client } from "./api.js";
import { renderLegend } from "./legend.js";
import { PlannerMap } from "./map.js";
import { Planner } from "./state.js";
import type {
  CellScore,
  ComputeResponse,
  GridLayer,
  PlacementResponse,
  ShelterLayer,
  ZoneLayer,
} from "./types.js";

export interface PlannerApp {
  planner: Planner;
  map: PlannerMap;
  root: HTMLElement;
  toggleShelter(id: string): Promise<void>;
  runPlacement(method: "capacity" | "distance", k: number, ringStepM: number): Promise<void>;
  lastResponse(): ComputeResponse | null;
}

const PAGE = `
<div class="layout">
  <div class="map-panel">
    <div id="banner" class="banner hidden"></div>
    <div id="map"></div>
    <div id="toast" class="toast hidden"></div>
  </div>
  <div class="side-panel">
    <h1>Shelter access planner</h1>
    <section>
      <label>Scenario
        <select id="scenario">
          <option value="case2">road closures</option>
          <option value="case3" selected>closures + congestion</option>
          <option value="case4">full network + congestion</option>
        </select>
      </label>
      <label>Congestion
        <select id="congestion">
          <option value="default" selected>scenario default</option>
          <option value="on">forced on</option>
          <option value="off">forced off</option>
        </select>
      </label>
    </section>
    <section id="gauge" class="gauge">
      <div class="gauge-row"><span>Gini</span><strong id="gini-value">-</strong></div>
      <div class="gauge-row"><span>Max score</span><span id="max-score">-</span></div>
      <div class="gauge-row"><span>Supply</span><span id="supply-total">-</span></div>
      <div class="gauge-row"><span>Demand gap</span><span id="demand-gap">-</span></div>
      <div id="pending" class="pending hidden">computing...</div>
    </section>
    <section>
      <h2>Legend</h2>
      <div id="legend"></div>
    </section>
    <section>
      <h2>Layers</h2>
      <label><input type="checkbox" data-layer="zones" checked> evacuation zones</label>
      <label><input type="checkbox" data-layer="perimeters" checked> fire perimeters</label>
      <label><input type="checkbox" data-layer="cells" checked> population cells</label>
      <label><input type="checkbox" data-layer="shelters" checked> shelters</label>
    </section>
    <section>
      <h2>Placement</h2>
      <label>Method
        <select id="place-method">
          <option value="capacity">capacity-based</option>
          <option value="distance">distance-based</option>
        </select>
      </label>
      <label>k <input id="place-k" type="number" value="2" min="1" step="0.5"></label>
      <label>ring step (m) <input id="place-ring" type="number" value="1609.34" min="1"></label>
      <button id="place-run">Run placement</button>
      <div id="placement-result"></div>
    </section>
    <section>
      <h2>Cell</h2>
      <div id="cell-detail">click a cell</div>
    </section>
  </div>
  <dialog id="shortfall-dialog">
    <p id="shortfall-text"></p>
    <button id="shortfall-close">close</button>
  </dialog>
</div>
`;

function fmt(value: number | null | undefined, digits = 1): string {
  if (value === null || value === undefined) return "-";
  return value.toFixed(digits);
}

export async function bootPlanner(root: HTMLElement, client: Client): Promise<PlannerApp> {
  root.innerHTML = PAGE;
  const byId = <T extends HTMLElement>(id: string) => root.querySelector<T>(`#${id}`)!;

  const [zones, perimeters, grid, shelters] = await Promise.all([
    client.layer<ZoneLayer>("zones"),
    client.layer<ZoneLayer>("perimeters"),
    client.layer<GridLayer>("grid"),
    client.layer<ShelterLayer>("shelters"),
  ]);

  const map = new PlannerMap(byId("map"));
  map.setLayers(zones, perimeters, grid, shelters);

  const planner = new Planner(client);
  planner.registerShelters(
    shelters.features.map((f) => ({ id: f.properties.id, status: f.properties.status })),
  );

  const cellInfo = new Map(grid.features.map((f) => [f.properties.cell_id, f.properties]));
  let last: ComputeResponse | null = null;
  let lastCells = new Map<string, CellScore>();

  const banner = byId("banner");
  const toast = byId("toast");
  let toastTimer: ReturnType<typeof setTimeout> | null = null;

  function showToast(message: string): void {
    toast.textContent = message;
    toast.classList.remove("hidden");
    if (toastTimer) clearTimeout(toastTimer);
    toastTimer = setTimeout(() => toast.classList.add("hidden"), 4000);
  }

  // one render path: legend, choropleth, gauge, and markers all come from
  // the same response, so no frame mixes two compute results
  function render(response: ComputeResponse): void {
    last = response;
    lastCells = new Map(response.cells.map((c) => [c.cell_id, c]));
    map.setChoropleth(response.cells);
    renderLegend(byId("legend"), response.class_labels);
    byId("gini-value").textContent = response.gini === null ? `n/a (${response.gini_reason ?? "no scores"})` : String(response.gini);
    byId("max-score").textContent = fmt(response.max_score, 4);
    byId("supply-total").textContent = fmt(response.summary.total_supply, 0);
    byId("demand-gap").textContent = fmt(response.summary.gap, 0);
    for (const f of shelters.features) {
      map.setShelterActive(f.properties.id, planner.shelterActive(f.properties.id));
    }
    banner.classList.toggle("hidden", response.cells.length > 0);
    if (response.cells.length === 0) {
      banner.textContent = "no cells in this scenario's demand set";
    }
  }

  planner.onRender = ({ response }) => render(response);
  planner.onPending = (pending) => byId("pending").classList.toggle("hidden", !pending);
  planner.onToggleError = ({ shelterId, error }) => {
    if (shelterId) {
      map.setShelterActive(shelterId, planner.shelterActive(shelterId));
    }
    const detail = error instanceof ApiError ? (error.body["error"] as string) : String(error);
    showToast(shelterId ? `toggle ${shelterId} failed: ${detail}` : `compute failed: ${detail}`);
  };

  map.onShelterClick = (id) => {
    map.setShelterActive(id, !planner.shelterActive(id)); // optimistic
    void planner.toggleShelter(id);
  };

  map.onCellClick = (id) => {
    const props = cellInfo.get(id);
    const score = lastCells.get(id);
    const detail = byId("cell-detail");
    if (!props) {
      detail.textContent = id;
      return;
    }
    const lines = [
      `<strong>${id}</strong>`,
      `population ${props.population}`,
      `zone ${props.zone}${props.zone_name ? ` (${props.zone_name})` : ""}`,
    ];
    if (score) {
      lines.push(`score ${score.score.toPrecision(6)} (${score.label})`);
      lines.push(
        score.nearest_minutes === null
          ? "no shelter reachable"
          : `nearest shelter ${fmt(score.nearest_minutes)} min`,
      );
    } else {
      lines.push("outside current demand set");
    }
    detail.innerHTML = lines.join("<br>");
  };

  for (const box of root.querySelectorAll<HTMLInputElement>("input[data-layer]")) {
    box.addEventListener("change", () => map.setLayerVisible(box.dataset.layer!, box.checked));
  }

  byId<HTMLSelectElement>("scenario").addEventListener("change", (event) => {
    planner.scenario = (event.target as HTMLSelectElement).value;
    void planner.refresh();
  });
  byId<HTMLSelectElement>("congestion").addEventListener("change", (event) => {
    const value = (event.target as HTMLSelectElement).value;
    planner.congestion = value === "default" ? null : value === "on";
    void planner.refresh();
  });

  const dialog = byId<HTMLDialogElement>("shortfall-dialog");
  const openDialog = () => {
    if (typeof dialog.showModal === "function") dialog.showModal();
    else dialog.setAttribute("open", "");
  };
  byId("shortfall-close").addEventListener("click", () => {
    if (typeof dialog.close === "function") dialog.close();
    else dialog.removeAttribute("open");
  });

  async function runPlacement(
    method: "capacity" | "distance",
    k: number,
    ringStepM: number,
  ): Promise<void> {
    try {
      const response: PlacementResponse = await planner.runPlacement({
        method,
        k,
        ring_step_m: ringStepM,
      });
      map.setSelection(response.placement.selected_ids);
      const perZone = Object.entries(response.placement.per_zone);
      const rows = perZone
        .map(
          ([name, z]) =>
            `<tr><td>${name}</td><td>${fmt(z.capacity, 0)}</td><td>${fmt(z.demand, 0)}</td><td>${fmt(z.radius_m / 1000, 1)} km</td></tr>`,
        )
        .join("");
      byId("placement-result").innerHTML = `
        <p>${response.placement.selected_ids.length} shelters, capacity ${fmt(response.placement.total_capacity, 0)}</p>
        ${perZone.length ? `<table><tr><th>zone</th><th>capacity</th><th>demand</th><th>radius</th></tr>${rows}</table>` : ""}
      `;
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        byId("shortfall-text").textContent =
          `Placement infeasible${error.body["zone"] ? ` for zone ${error.body["zone"]}` : ""}: ` +
          `short by ${error.body["shortfall"]} capacity`;
        openDialog();
        return;
      }
      showToast(`placement failed: ${error instanceof Error ? error.message : error}`);
    }
  }

  byId("place-run").addEventListener("click", () => {
    const method = byId<HTMLSelectElement>("place-method").value as "capacity" | "distance";
    const k = parseFloat(byId<HTMLInputElement>("place-k").value);
    const ring = parseFloat(byId<HTMLInputElement>("place-ring").value);
    void runPlacement(method, k, ring);
  });

  await planner.refresh();

  return {
    planner,
    map,
    root,
    toggleShelter: (id) => {
      map.setShelterActive(id, !planner.shelterActive(id));
      return planner.toggleShelter(id);
    },
    runPlacement,
    lastResponse: () => last,
  };
}

declare global {
  interface Window {
    plannerApp?: PlannerApp;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void bootPlanner(document.getElementById("app")!, new Client()).then((app) => {
    window.plannerApp = app;
  });
}
