from __future__ import annotations

import json

import pytest

from usher.catalog import (
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario,
    options_at,
    prefix_key,
    parse_prefix_key,
    validate_unique_solution,
)
from usher.constraints import satisfies

from conftest import reload_scenario, scenario_doc


def test_bundled_scenarios_load(scenarios):
    assert set(scenarios) == {"family_matinee", "parents_anniversary",
                              "sibling_bmovie", "starfall_circuit"}
    titles = {s.title for s in scenarios.values()}
    assert "Parents Anniversary Gift" in titles
    assert "Sibling B-Movie Comedy Night" in titles


def test_options_at_fig3_catalog_order(fig3):
    labels = [o.label for o in options_at(fig3, ())]
    assert labels == ["Lantern Bakery", "Maple Detectives", "Sky Circus Express",
                      "Pocket Parade"]


def test_options_at_fig1_catalog_order(fig1):
    labels = [o.label for o in options_at(fig1, ())]
    assert labels == ["CloseUp 12", "Riverview 8", "Cedar Commons 6"]


def test_options_at_is_pure(parents):
    first = options_at(parents, (("movie", "m_velvet"),))
    second = options_at(parents, (("movie", "m_velvet"),))
    assert first == second
    assert [o.id for o in first] == ["t_yorkville", "t_empress"]


def test_options_at_confirmation_stage_empty(parents):
    prefix = parents.solution
    assert options_at(parents, prefix) == []


def test_options_at_unknown_prefix(parents):
    with pytest.raises(KeyError):
        options_at(parents, (("movie", "m_nope"),))


def test_every_option_in_universe(parents):
    from usher.catalog import reachable_prefixes
    for prefix in reachable_prefixes(parents):
        stage = parents.stage_after(prefix)
        universe = {o.id for o in parents.items[stage.id]}
        for option in options_at(parents, prefix):
            assert option.id in universe


def test_prefix_key_roundtrip():
    prefix = (("movie", "m_velvet"), ("seat", "D4+D5"))
    assert parse_prefix_key(prefix_key(prefix)) == prefix
    assert parse_prefix_key("") == ()


def test_empty_workflow_rejected():
    doc = {"workflow": {"stages": []}, "options": {}, "brief": "x",
           "scriptedPreferences": [], "solution": []}
    with pytest.raises(ScenarioValidationError):
        load_scenario(json.dumps(doc))


def test_unknown_top_level_key_rejected():
    doc = scenario_doc("family_matinee")
    doc["extraField"] = 1
    with pytest.raises(ScenarioParseError, match="extraField"):
        reload_scenario(doc)


def test_dangling_availability_reference_named():
    doc = scenario_doc("family_matinee")
    doc["options"]["time"]["byPrefix"][
        "movie:m_pocket/theater:t_palace/date:d_sat"] = ["tf_ghost"]
    with pytest.raises(ScenarioValidationError, match="tf_ghost"):
        reload_scenario(doc)


def test_attribute_kind_mismatch_rejected():
    doc = scenario_doc("family_matinee")
    doc["options"]["movie"]["items"][0]["attributes"]["runtime"] = "long"
    with pytest.raises(ScenarioValidationError, match="runtime"):
        reload_scenario(doc)


def test_missing_availability_for_reachable_prefix():
    doc = scenario_doc("family_matinee")
    del doc["options"]["time"]["byPrefix"]["movie:m_sky/theater:t_palace/date:d_sat"]
    with pytest.raises(ScenarioValidationError, match="reachable"):
        reload_scenario(doc)


def test_unreachable_availability_rejected():
    doc = scenario_doc("family_matinee")
    doc["options"]["date"]["byPrefix"]["movie:m_pocket/theater:t_ghost"] = ["d_sat"]
    with pytest.raises(ScenarioValidationError):
        reload_scenario(doc)


def test_filterable_flag_tied_to_ui_kind():
    doc = scenario_doc("family_matinee")
    doc["workflow"]["stages"][2]["filterable"] = True  # calendar stage
    with pytest.raises(ScenarioValidationError, match="filterable"):
        reload_scenario(doc)


def test_seat_options_cross_checked_against_grid():
    doc = scenario_doc("family_matinee")
    key = "movie:m_pocket/theater:t_palace/date:d_sat/time:tf_pocket"
    row = doc["seatGrids"][key]["rows"][1]
    assert row["id"] == "B"
    row["seats"] = "X" + row["seats"][1:]  # B1 now taken, option B1+B2 invalid
    with pytest.raises(ScenarioValidationError, match="B1"):
        reload_scenario(doc)


def test_unique_solution_on_bundled(scenarios):
    for scenario in scenarios.values():
        report = validate_unique_solution(scenario)
        assert report["solutionCount"] == 1, scenario.id
        assert report["witnessPaths"] == [scenario.solution]
        assert report["passes"]


def _independent_dfs_witnesses(scenario):
    """Depth-first enumeration written against the raw availability table,
    kept separate from the catalog module's own walkers."""
    stage_ids = scenario.workflow.stage_ids()[:-1]
    hard = scenario.hard_scripted()
    witnesses = []

    def ok(path):
        chosen = dict(path)
        for pref in hard:
            option = scenario.item(pref.stage, chosen[pref.stage])
            orders = scenario.workflow.stage(pref.stage).ordinal_orders()
            if not satisfies(pref.constraint, option.attributes, ordinal_orders=orders):
                return False
        return True

    def walk(path):
        if len(path) == len(stage_ids):
            if ok(path):
                witnesses.append(tuple(path))
            return
        stage_id = stage_ids[len(path)]
        for option_id in scenario.availability[tuple(path)]:
            path.append((stage_id, option_id))
            walk(path)
            path.pop()

    walk([])
    return witnesses


def test_enumeration_agrees_with_independent_dfs(scenarios):
    for scenario in scenarios.values():
        report = validate_unique_solution(scenario)
        assert report["witnessPaths"] == _independent_dfs_witnesses(scenario)


def test_unsatisfiable_hard_constraints_count_zero():
    doc = scenario_doc("family_matinee")
    doc["scriptedPreferences"].append({
        "stage": "movie", "description": "impossible rating", "strength": "hard",
        "constraint": {"attribute": "rating", "comparator": "eq", "value": "R"}})
    scenario = reload_scenario(doc)
    assert validate_unique_solution(scenario)["solutionCount"] == 0


def test_no_hard_constraints_counts_all_paths():
    doc = scenario_doc("family_matinee")
    doc["scriptedPreferences"] = [p for p in doc["scriptedPreferences"]
                                  if p["strength"] != "hard"]
    scenario = reload_scenario(doc)
    from usher.catalog import full_paths
    report = validate_unique_solution(scenario)
    assert report["solutionCount"] == len(full_paths(scenario))
    assert report["solutionCount"] > 1


def test_parents_scenario_shape(parents):
    # Six linear stages ending at confirmation, and the seat stage carries
    # the adjacent-premium-pair requirement as a hard scripted preference.
    assert parents.workflow.stage_ids() == ["movie", "theater", "date", "time",
                                            "seat", "confirm"]
    assert parents.workflow.stages[-1].ui_kind == "confirmation"
    seat_hards = [p for p in parents.hard_scripted() if p.stage == "seat"]
    assert len(seat_hards) == 1
    read = seat_hards[0].constraint.attributes_read()
    assert {"adjacent", "count", "tier"} <= read
