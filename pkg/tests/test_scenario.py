"""Scenario pipelines on the bundled mini dataset."""

import json

import pytest
import yaml

from shelteraccess.access import nearest_shelter_times
from shelteraccess.catalog import load_population_csv, load_shelters_csv
from shelteraccess.errors import ConfigError
from shelteraccess.placement import PlacementParams, place_capacity_based
from shelteraccess.roadnet import derive_times, impute_speeds, load_roads_csv
from shelteraccess.scenario import (
    ScenarioStageError,
    export_result,
    load_config,
    read_scores_csv,
    result_report,
    run,
)
from shelteraccess.geometry import load_polygon_layers


@pytest.fixture(scope="module")
def results(mini_dir):
    out = {}
    for case in ("case1", "case2", "case3", "case4_capacity", "case4_distance"):
        out[case] = run(load_config(mini_dir / "scenarios" / f"{case}.yaml"))
    return out


class TestCase1:
    def test_matches_module_level_nearest_times(self, mini_dir, results):
        graph = derive_times(impute_speeds(load_roads_csv(mini_dir / "roads.csv")))
        shelters = [s for s in load_shelters_csv(mini_dir / "shelters.csv") if s.status == "open"]
        expected = nearest_shelter_times(results["case1"].cells, shelters, graph)
        assert results["case1"].nearest_minutes == expected

    def test_no_scores_and_no_gini(self, results):
        r = results["case1"]
        assert r.access == []
        assert r.gini is None
        assert r.gini_reason

    def test_summary_covers_all_zone_population(self, results):
        r = results["case1"]
        assert r.summary.total == sum(c.population for c in r.cells)
        assert r.summary.total > 0


class TestCongestionContrast:
    def test_case3_never_beats_case2(self, results):
        s2 = {r.cell_id: r.score for r in results["case2"].access}
        s3 = {r.cell_id: r.score for r in results["case3"].access}
        assert set(s2) == set(s3)
        for cid in s2:
            assert s3[cid] <= s2[cid] + 1e-12

    def test_gini_rises_under_congestion(self, results):
        assert results["case3"].gini >= results["case2"].gini

    def test_matrix_entries_never_improve_under_congestion(self, mini_workspace):
        free = mini_workspace.matrix(True, False, True, 120.0)
        jammed = mini_workspace.matrix(True, True, True, 120.0)
        assert set(jammed) <= set(free)
        for pair, minutes in jammed.items():
            assert minutes >= free[pair] - 1e-12

    def test_matrix_entries_never_improve_under_closures(self, mini_workspace):
        full = mini_workspace.matrix(False, False, False, 120.0)
        closed = mini_workspace.matrix(True, False, False, 120.0)
        assert set(closed) <= set(full)
        for pair, minutes in closed.items():
            assert minutes >= full[pair] - 1e-12

    def test_fire_cells_excluded_from_demand(self, results):
        assert all(not c.in_fire for c in results["case2"].cells)

    def test_case2_conserves_reachable_capacity(self, results):
        r = results["case2"]
        served = {x.cell_id: x.score for x in r.access}
        total = sum(c.population * served[c.id] for c in r.cells)
        reachable = {x.shelter_id for x in r.ratios}
        shelters = {s.id: s for s in r.shelters}
        from shelteraccess.catalog import effective_capacity

        supplied = sum(effective_capacity(shelters[sid]) for sid in reachable)
        assert total == pytest.approx(supplied, rel=1e-9)


class TestCase4:
    def test_capacity_parity_with_direct_call(self, mini_dir, results):
        r = results["case4_capacity"]
        shelters = load_shelters_csv(mini_dir / "shelters.csv")
        zones = load_polygon_layers(mini_dir / "zones.geojson", layers={"evac_order", "evac_warning"})
        direct = place_capacity_based(
            [s for s in shelters if s.status == "candidate"],
            zones,
            demand_total=sum(c.population for c in r.cells),
            params=PlacementParams(k=2.0, ring_step_m=1609.34),
            open_shelters=[s for s in shelters if s.status == "open"],
        )
        assert r.placement.selected_ids == direct.selected_ids
        assert r.placement.total_capacity == direct.total_capacity

    def test_distance_placement_covers_every_zone(self, results):
        r = results["case4_distance"]
        for name, assignment in r.placement.per_zone.items():
            assert assignment.capacity >= assignment.demand, name

    def test_case4_uses_all_zone_population(self, results):
        # fire-area demand is not excluded in the hypothetical-shelter case
        assert any(c.in_fire for c in results["case4_capacity"].cells)

    def test_placement_raises_accessibility_over_open_only_baseline(self, results, mini_workspace):
        # same network and demand as case4, but supply limited to the open set
        from shelteraccess.access import DecayParams, e2sfca

        cells = mini_workspace.demand_cells(exclude_fire=False)
        matrix = mini_workspace.matrix(False, True, False, 120.0)
        _, baseline = e2sfca(cells, mini_workspace.open_shelters(), matrix, DecayParams())
        base_mass = sum(c.population * r.score for c, r in zip(cells, baseline))
        for case in ("case4_capacity", "case4_distance"):
            r = results[case]
            mass = sum(c.population * x.score for c, x in zip(r.cells, r.access))
            assert mass > base_mass
            by_id = {x.cell_id: x.score for x in r.access}
            for c, b in zip(cells, baseline):
                assert by_id[c.id] >= b.score - 1e-12


class TestExport:
    def test_report_gini_matches_equity_field(self, results, tmp_path):
        r = results["case3"]
        export_result(r, tmp_path)
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["gini"] == r.gini

    def test_scores_csv_round_trip(self, results, tmp_path):
        r = results["case2"]
        export_result(r, tmp_path)
        back = read_scores_csv(tmp_path / "scores.csv")
        assert [(b.cell_id, b.score, b.label) for b in back] == [
            (a.cell_id, a.score, a.label) for a in r.access
        ]

    def test_cells_geojson_feature_count(self, results, tmp_path):
        r = results["case2"]
        export_result(r, tmp_path)
        collection = json.loads((tmp_path / "cells.geojson").read_text())
        assert len(collection["features"]) == len(r.cells)

    def test_empty_access_produces_valid_empty_collection(self, results, tmp_path):
        r = results["case1"]
        export_result(r, tmp_path / "c1")
        scores = (tmp_path / "c1" / "scores.csv").read_text().splitlines()
        assert scores == ["cell_id,score,class"]

    def test_reruns_are_byte_identical(self, mini_dir, tmp_path):
        config = load_config(mini_dir / "scenarios" / "case3.yaml")
        export_result(run(config), tmp_path / "a")
        export_result(run(config), tmp_path / "b")
        assert (tmp_path / "a" / "report.json").read_bytes() == (
            tmp_path / "b" / "report.json"
        ).read_bytes()


class TestConfigValidation:
    def write_config(self, tmp_path, mini_dir, **overrides):
        raw = yaml.safe_load((mini_dir / "scenarios" / "case2.yaml").read_text())
        for key, value in overrides.items():
            if value is None:
                raw.pop(key, None)
            else:
                raw[key] = value
        # keep input paths valid relative to the new location
        raw["inputs"] = {k: str(mini_dir / v.split("/")[-1]) for k, v in raw["inputs"].items()}
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump(raw))
        return path

    def test_unknown_case_rejected(self, tmp_path, mini_dir):
        path = self.write_config(tmp_path, mini_dir, case="case99")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_case2_requires_perimeters(self, tmp_path, mini_dir):
        raw = yaml.safe_load((mini_dir / "scenarios" / "case2.yaml").read_text())
        raw["inputs"] = {
            k: str(mini_dir / v.split("/")[-1]) for k, v in raw["inputs"].items() if k != "perimeters"
        }
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump(raw))
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_input_key_rejected(self, tmp_path, mini_dir):
        raw = yaml.safe_load((mini_dir / "scenarios" / "case2.yaml").read_text())
        raw["inputs"].pop("roads")
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump(raw))
        with pytest.raises(ConfigError):
            load_config(path)

    def test_stage_error_names_the_stage(self, tmp_path, mini_dir):
        # a zone cell stranded >5 km from any road node fails the travel matrix
        grid = tmp_path / "population.csv"
        rows = load_population_csv(mini_dir / "population.csv")
        lines = ["cell_id,lon,lat,population"]
        lines.append("stranded,-118.66,33.79,50")  # inside west warning box, far from roads
        for c in rows[:5]:
            lines.append(f"{c.id},{c.centroid.lon},{c.centroid.lat},{c.population}")
        grid.write_text("\n".join(lines) + "\n")
        raw = yaml.safe_load((mini_dir / "scenarios" / "case2.yaml").read_text())
        raw["inputs"] = {k: str(mini_dir / v.split("/")[-1]) for k, v in raw["inputs"].items()}
        raw["inputs"]["grid"] = str(grid)
        path = tmp_path / "config.yaml"
        path.write_text(yaml.safe_dump(raw))
        with pytest.raises(ScenarioStageError) as err:
            run(load_config(path))
        assert err.value.stage == "travel-matrix"

    def test_classification_reference_shares_breakpoints(self, mini_dir, tmp_path):
        base = run(load_config(mini_dir / "scenarios" / "case2.yaml"))
        export_result(base, tmp_path / "ref")
        raw = yaml.safe_load((mini_dir / "scenarios" / "case3.yaml").read_text())
        raw["inputs"] = {k: str(mini_dir / v.split("/")[-1]) for k, v in raw["inputs"].items()}
        raw["classification_reference"] = str(tmp_path / "ref" / "report.json")
        path = tmp_path / "case3.yaml"
        path.write_text(yaml.safe_dump(raw))
        shared = run(load_config(path))
        assert shared.scheme.ref_max == base.scheme.ref_max
