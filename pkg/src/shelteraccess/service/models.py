"""Request/response bodies for the HTTP service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class DecayOverride(BaseModel):
    sigma_minutes: float | None = None
    t0_minutes: float | None = None


class ComputeRequest(BaseModel):
    scenario: str = "case3"
    enable: list[str] = Field(default_factory=list)
    disable: list[str] = Field(default_factory=list)
    congestion: bool | None = None
    decay: DecayOverride | None = None


class CellScore(BaseModel):
    cell_id: str
    score: float
    label: str
    population: float
    nearest_minutes: float | None = None


class SummaryBody(BaseModel):
    total_order: float
    total_warning: float
    total: float
    total_supply: float
    gap: float


class ComputeResponse(BaseModel):
    scenario: str
    supply_ids: list[str]
    cells: list[CellScore]
    gini: float | None
    gini_reason: str | None = None
    summary: SummaryBody
    max_score: float | None
    ref_max: float | None
    class_labels: list[str]
    compute_ms: float
    cached: bool


class PlacementRequest(BaseModel):
    method: Literal["capacity", "distance"]
    k: float = 2.0
    ring_step_m: float = 1609.34


class ZoneAssignmentBody(BaseModel):
    shelter_ids: list[str]
    capacity: float
    demand: float
    radius_m: float


class PlacementBody(BaseModel):
    method: str
    selected_ids: list[str]
    total_capacity: float
    final_radius_m: float
    per_zone: dict[str, ZoneAssignmentBody]


class PlacementResponse(BaseModel):
    placement: PlacementBody
    compute: ComputeResponse


class ErrorBody(BaseModel):
    error: str
    unknown_ids: list[str] | None = None
    shortfall: float | None = None
    zone: str | None = None
