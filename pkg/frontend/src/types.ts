// Shapes of the service API bodies and the GeoJSON layers it serves.

export interface ComputeRequest {
  scenario: string;
  enable: string[];
  disable: string[];
  congestion: boolean | null;
  decay: { sigma_minutes?: number; t0_minutes?: number } | null;
}

export interface CellScore {
  cell_id: string;
  score: number;
  label: string;
  population: number;
  nearest_minutes: number | null;
}

export interface Summary {
  total_order: number;
  total_warning: number;
  total: number;
  total_supply: number;
  gap: number;
}

export interface ComputeResponse {
  scenario: string;
  supply_ids: string[];
  cells: CellScore[];
  gini: number | null;
  gini_reason: string | null;
  summary: Summary;
  max_score: number | null;
  ref_max: number | null;
  class_labels: string[];
  compute_ms: number;
  cached: boolean;
}

export interface ZoneAssignment {
  shelter_ids: string[];
  capacity: number;
  demand: number;
  radius_m: number;
}

export interface PlacementBody {
  method: string;
  selected_ids: string[];
  total_capacity: number;
  final_radius_m: number;
  per_zone: Record<string, ZoneAssignment>;
}

export interface PlacementResponse {
  placement: PlacementBody;
  compute: ComputeResponse;
}

export interface PlacementRequest {
  method: "capacity" | "distance";
  k: number;
  ring_step_m: number;
}

export type LonLat = [number, number];

export interface Feature<G, P> {
  type: "Feature";
  geometry: G;
  properties: P;
}

export interface PointGeom {
  type: "Point";
  coordinates: LonLat;
}

export interface PolygonGeom {
  type: "Polygon";
  coordinates: LonLat[][];
}

export interface FeatureCollection<F> {
  type: "FeatureCollection";
  features: F[];
}

export interface ZoneProps {
  layer: string;
  name: string;
}

export interface GridProps {
  cell_id: string;
  population: number;
  zone: string;
  zone_name: string;
  in_fire: boolean;
}

export interface ShelterProps {
  id: string;
  name: string;
  status: "open" | "candidate";
  capacity: number | null;
  floor_area: number | null;
  effective_capacity: number;
  occupied: number;
}

export type ZoneLayer = FeatureCollection<Feature<PolygonGeom, ZoneProps>>;
export type GridLayer = FeatureCollection<Feature<PointGeom, GridProps>>;
export type ShelterLayer = FeatureCollection<Feature<PointGeom, ShelterProps>>;
