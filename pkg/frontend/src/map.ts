// Offline SVG map: plain polygon rendering of the shipped layers, a cell
// choropleth, and clickable shelter markers. No tiles, no network assets.

import { NO_DATA_COLOR, classColor } from "./legend.js";
import type { CellScore, GridLayer, LonLat, ShelterLayer, ZoneLayer } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

interface Projection {
  x(lon: number): number;
  y(lat: number): number;
  cellSize: number;
}

function modalSpacing(values: number[]): number {
  const sorted = [...new Set(values)].sort((a, b) => a - b);
  const gaps = new Map<string, number>();
  for (let i = 1; i < sorted.length; i++) {
    const gap = (sorted[i] - sorted[i - 1]).toFixed(6);
    gaps.set(gap, (gaps.get(gap) ?? 0) + 1);
  }
  let best = 0.009;
  let bestCount = -1;
  for (const [gap, count] of gaps) {
    if (count > bestCount) {
      best = parseFloat(gap);
      bestCount = count;
    }
  }
  return best;
}

export class PlannerMap {
  private svg: SVGSVGElement;
  private groups: Record<string, SVGGElement> = {};
  private cellRects = new Map<string, SVGRectElement>();
  private shelterMarks = new Map<string, SVGCircleElement>();
  private proj!: Projection;

  onCellClick: ((cellId: string) => void) | null = null;
  onShelterClick: ((shelterId: string) => void) | null = null;

  constructor(
    private container: HTMLElement,
    private width = 860,
    private height = 720,
  ) {
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
    this.svg.setAttribute("class", "planner-map");
    for (const name of ["zones", "perimeters", "cells", "shelters"]) {
      const g = document.createElementNS(SVG_NS, "g");
      g.dataset.layer = name;
      this.groups[name] = g;
      this.svg.append(g);
    }
    container.append(this.svg);
  }

  private fit(lons: number[], lats: number[]): void {
    const pad = 14;
    const minLon = Math.min(...lons);
    const maxLon = Math.max(...lons);
    const minLat = Math.min(...lats);
    const maxLat = Math.max(...lats);
    const midLat = (minLat + maxLat) / 2;
    const stretch = Math.cos((midLat * Math.PI) / 180);
    const spanX = (maxLon - minLon) * stretch || 1e-6;
    const spanY = maxLat - minLat || 1e-6;
    const k = Math.min((this.width - 2 * pad) / spanX, (this.height - 2 * pad) / spanY);
    this.proj = {
      x: (lon) => pad + (lon - minLon) * stretch * k,
      y: (lat) => pad + (maxLat - lat) * k,
      cellSize: 1,
    };
  }

  private ringPath(ring: LonLat[]): string {
    return (
      ring
        .map(([lon, lat], i) => `${i === 0 ? "M" : "L"}${this.proj.x(lon).toFixed(1)} ${this.proj.y(lat).toFixed(1)}`)
        .join(" ") + " Z"
    );
  }

  setLayers(zones: ZoneLayer, perimeters: ZoneLayer, grid: GridLayer, shelters: ShelterLayer): void {
    const lons: number[] = [];
    const lats: number[] = [];
    for (const layer of [zones, perimeters]) {
      for (const f of layer.features) {
        for (const ring of f.geometry.coordinates) {
          for (const [lon, lat] of ring) {
            lons.push(lon);
            lats.push(lat);
          }
        }
      }
    }
    for (const f of grid.features) {
      lons.push(f.geometry.coordinates[0]);
      lats.push(f.geometry.coordinates[1]);
    }
    this.fit(lons, lats);

    const gridLons = grid.features.map((f) => f.geometry.coordinates[0]);
    const gridLats = grid.features.map((f) => f.geometry.coordinates[1]);
    const sizeX = modalSpacing(gridLons) * Math.abs(this.proj.x(1) - this.proj.x(0));
    const sizeY = modalSpacing(gridLats) * Math.abs(this.proj.y(0) - this.proj.y(1));
    const cell = Math.max(3, Math.min(sizeX, sizeY));

    for (const f of zones.features) {
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("d", f.geometry.coordinates.map((r) => this.ringPath(r)).join(" "));
      path.setAttribute("class", `zone zone-${f.properties.layer}`);
      this.groups["zones"].append(path);
    }
    for (const f of perimeters.features) {
      const path = document.createElementNS(SVG_NS, "path");
      path.setAttribute("d", f.geometry.coordinates.map((r) => this.ringPath(r)).join(" "));
      path.setAttribute("class", "fire-perimeter");
      this.groups["perimeters"].append(path);
    }
    for (const f of grid.features) {
      const [lon, lat] = f.geometry.coordinates;
      const rect = document.createElementNS(SVG_NS, "rect");
      rect.setAttribute("x", (this.proj.x(lon) - cell / 2).toFixed(1));
      rect.setAttribute("y", (this.proj.y(lat) - cell / 2).toFixed(1));
      rect.setAttribute("width", cell.toFixed(1));
      rect.setAttribute("height", cell.toFixed(1));
      rect.setAttribute("class", "cell");
      rect.setAttribute("fill", NO_DATA_COLOR);
      rect.dataset.cellId = f.properties.cell_id;
      rect.addEventListener("click", () => this.onCellClick?.(f.properties.cell_id));
      this.cellRects.set(f.properties.cell_id, rect);
      this.groups["cells"].append(rect);
    }
    for (const f of shelters.features) {
      const [lon, lat] = f.geometry.coordinates;
      const mark = document.createElementNS(SVG_NS, "circle");
      mark.setAttribute("cx", this.proj.x(lon).toFixed(1));
      mark.setAttribute("cy", this.proj.y(lat).toFixed(1));
      mark.setAttribute("r", f.properties.status === "open" ? "7" : "5");
      mark.dataset.shelterId = f.properties.id;
      mark.dataset.status = f.properties.status;
      this.setMarkerState(mark, f.properties.status === "open");
      mark.addEventListener("click", () => this.onShelterClick?.(f.properties.id));
      this.shelterMarks.set(f.properties.id, mark);
      this.groups["shelters"].append(mark);
    }
  }

  private setMarkerState(mark: SVGCircleElement, active: boolean): void {
    const status = mark.dataset.status;
    mark.setAttribute(
      "class",
      `shelter shelter-${status} ${active ? "shelter-active" : "shelter-inactive"}`,
    );
  }

  setShelterActive(id: string, active: boolean): void {
    const mark = this.shelterMarks.get(id);
    if (mark) this.setMarkerState(mark, active);
  }

  shelterActive(id: string): boolean {
    return this.shelterMarks.get(id)?.classList.contains("shelter-active") ?? false;
  }

  setSelection(ids: string[]): void {
    const selected = new Set(ids);
    for (const [id, mark] of this.shelterMarks) {
      mark.classList.toggle("shelter-selected", selected.has(id));
    }
  }

  setChoropleth(cells: CellScore[]): void {
    const byId = new Map(cells.map((c) => [c.cell_id, c]));
    for (const [id, rect] of this.cellRects) {
      const cell = byId.get(id);
      rect.setAttribute("fill", cell ? classColor(cell.label) : NO_DATA_COLOR);
      rect.classList.toggle("cell-excluded", !cell);
    }
  }

  setLayerVisible(name: string, visible: boolean): void {
    const g = this.groups[name];
    if (g) g.setAttribute("display", visible ? "inline" : "none");
  }

  cellFill(id: string): string {
    return this.cellRects.get(id)?.getAttribute("fill") ?? "";
  }
}
