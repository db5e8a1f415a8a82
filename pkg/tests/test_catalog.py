"""Capacity estimation, demand filtering, and demand/supply summaries."""

import pytest
from hypothesis import given, strategies as st

from shelteraccess.catalog import (
    DemandCell,
    Shelter,
    demand_summary,
    effective_capacity,
    estimate_capacity,
    filter_demand,
    load_population_csv,
    load_shelters_csv,
    tag_cells,
)
from shelteraccess.errors import InputError
from shelteraccess.geometry import GeoPoint, GeoPolygon


def rect(x0, y0, x1, y1, tag, name="") -> GeoPolygon:
    return GeoPolygon(
        exterior=(
            GeoPoint(x0, y0),
            GeoPoint(x1, y0),
            GeoPoint(x1, y1),
            GeoPoint(x0, y1),
            GeoPoint(x0, y0),
        ),
        tag=tag,
        name=name,
    )


class TestEstimateCapacity:
    @pytest.mark.parametrize(
        "sqft,expected",
        [(15_000, 105), (130_000, 910), (28_985, 202)],
    )
    def test_published_square_footages(self, sqft, expected):
        assert estimate_capacity(sqft) == expected

    def test_square_meters_converted(self):
        assert abs(estimate_capacity(10_573.27, unit="sqm") - 797) <= 2

    def test_large_venue_within_documented_slack(self):
        assert abs(estimate_capacity(150_686) - 1056) <= 2

    def test_non_positive_area_rejected(self):
        with pytest.raises(InputError):
            estimate_capacity(0)
        with pytest.raises(InputError):
            estimate_capacity(-100)

    def test_unknown_unit_rejected(self):
        with pytest.raises(InputError):
            estimate_capacity(1000, unit="acres")

    @given(st.floats(min_value=1, max_value=1e7), st.floats(min_value=0, max_value=1e6))
    def test_monotone_and_non_negative(self, area, bump):
        low = estimate_capacity(area)
        high = estimate_capacity(area + bump)
        assert 0 <= low <= high


def shelter(sid="s", capacity=None, floor_area=None, occupied=0.0, status="open"):
    return Shelter(
        id=sid,
        name=sid,
        location=GeoPoint(-118.5, 34.0),
        capacity=capacity,
        floor_area=floor_area,
        occupied=occupied,
        status=status,
    )


class TestEffectiveCapacity:
    def test_published_capacity_untouched(self):
        assert effective_capacity(shelter(capacity=356)) == 356

    def test_fully_occupied_saturates_at_zero(self):
        assert effective_capacity(shelter(capacity=356, occupied=356)) == 0

    def test_floor_area_estimate_minus_occupants(self):
        assert effective_capacity(shelter(floor_area=15_000, occupied=5)) == 100

    def test_capacity_wins_over_floor_area(self):
        s = shelter(capacity=100, floor_area=15_000)
        assert effective_capacity(s) == 100

    def test_missing_both_rejected(self):
        with pytest.raises(InputError):
            shelter()

    def test_negative_capacity_rejected(self):
        with pytest.raises(InputError):
            shelter(capacity=-5)


ORDER = rect(0, 0, 1, 1, "evac_order", name="west")
WARNING = rect(1, 0, 2, 1, "evac_warning", name="west")
FIRE = rect(0.4, 0.4, 0.6, 0.6, "fire_perimeter")


def cell(cid, lon, lat, pop):
    return DemandCell(id=cid, centroid=GeoPoint(lon, lat), population=pop)


class TestFilterDemand:
    def setup_method(self):
        self.cells = [
            cell("in-order", 0.2, 0.2, 100),
            cell("in-order-fire", 0.5, 0.5, 40),
            cell("in-warning", 1.5, 0.5, 70),
            cell("outside", 3.0, 3.0, 999),
        ]

    def test_zone_membership_by_centroid(self):
        tagged = tag_cells(self.cells, [ORDER, WARNING], [FIRE])
        tags = {c.id: c.zone_tag for c in tagged}
        assert tags == {
            "in-order": "order",
            "in-order-fire": "order",
            "in-warning": "warning",
            "outside": "none",
        }
        assert next(c for c in tagged if c.id == "in-order-fire").in_fire

    def test_include_both_zones_keeps_fire_cells(self):
        kept = filter_demand(
            self.cells, [ORDER, WARNING], [FIRE], include={"order", "warning"}, exclude_fire=False
        )
        assert {c.id for c in kept} == {"in-order", "in-order-fire", "in-warning"}

    def test_exclude_fire_drops_burning_cells(self):
        kept = filter_demand(
            self.cells, [ORDER, WARNING], [FIRE], include={"order", "warning"}, exclude_fire=True
        )
        assert {c.id for c in kept} == {"in-order", "in-warning"}

    def test_empty_include_set(self):
        assert filter_demand(self.cells, [ORDER, WARNING], [FIRE], include=set(), exclude_fire=False) == []

    def test_output_is_subset_with_smaller_population(self):
        kept = filter_demand(
            self.cells, [ORDER, WARNING], [FIRE], include={"order"}, exclude_fire=True
        )
        assert {c.id for c in kept} <= {c.id for c in self.cells}
        assert sum(c.population for c in kept) <= sum(c.population for c in self.cells)


def paper_totals_fixture():
    """Synthetic cells and shelters mirroring the stated January 12 aggregates."""
    cells = []
    for i in range(4):
        cells.append(cell(f"o{i}", 0.2 + 0.1 * i, 0.2, 11_087))
    for i, pop in enumerate([10_566, 10_566, 10_566, 10_565]):
        cells.append(cell(f"w{i}", 1.2 + 0.1 * i, 0.2, pop))
    shelters = [shelter(sid=f"s{i}", capacity=653) for i in range(8)]
    return cells, shelters


class TestDemandSummary:
    def test_january_12_aggregates(self):
        cells, shelters = paper_totals_fixture()
        tagged = tag_cells(cells, [ORDER, WARNING], [])
        summary = demand_summary(tagged, shelters)
        assert summary.total_order == 44_348
        assert summary.total_warning == 42_263
        assert summary.total == 86_611
        assert summary.total_supply == 5_224
        assert summary.gap == 81_387

    def test_zero_shelters_gap_equals_total(self):
        cells, _ = paper_totals_fixture()
        tagged = tag_cells(cells, [ORDER, WARNING], [])
        summary = demand_summary(tagged, [])
        assert summary.gap == summary.total == 86_611

    def test_oversupply_floors_gap_at_zero(self):
        tagged = tag_cells([cell("a", 0.5, 0.5, 10)], [ORDER], [])
        summary = demand_summary(tagged, [shelter(capacity=1000)])
        assert summary.gap == 0

    def test_candidates_do_not_count_as_supply(self):
        tagged = tag_cells([cell("a", 0.5, 0.5, 10)], [ORDER], [])
        summary = demand_summary(tagged, [shelter(capacity=1000, status="candidate")])
        assert summary.total_supply == 0


class TestCsvLoaders:
    def test_population_csv(self, tmp_path):
        path = tmp_path / "population.csv"
        path.write_text("cell_id,lon,lat,population\nc1,-118.5,34.0,120\nc2,-118.4,34.1,0\n")
        cells = load_population_csv(path)
        assert [c.id for c in cells] == ["c1", "c2"]
        assert cells[0].population == 120.0

    def test_shelter_csv(self, tmp_path):
        path = tmp_path / "shelters.csv"
        path.write_text(
            "id,name,lon,lat,capacity,floor_area,area_unit,status,occupied\n"
            "s1,Main Gym,-118.5,34.0,356,,,open,12\n"
            "s2,Annex,-118.4,34.0,,15000,sqft,candidate,\n"
        )
        shelters = load_shelters_csv(path)
        assert shelters[0].capacity == 356
        assert shelters[0].occupied == 12
        assert shelters[1].capacity is None
        assert effective_capacity(shelters[1]) == 105

    def test_negative_population_rejected(self, tmp_path):
        path = tmp_path / "population.csv"
        path.write_text("cell_id,lon,lat,population\nc1,-118.5,34.0,-3\n")
        with pytest.raises(InputError):
            load_population_csv(path)
