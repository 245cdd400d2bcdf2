from __future__ import annotations

import pytest

from usher.harness import (
    Persona,
    PersonaStep,
    brute_force_oracle,
    compute_unpreferred,
    compute_violations,
    expected_ledger_counts,
    run_trial,
)
from usher.navigation import PathSelection
from usher.nlu import Utterance, extract, ExtractionContext, ProviderConfig
from usher.preferences import PreferenceMemory


class TestMetricsOps:
    def test_solution_path_zero_violations(self, parents):
        assert compute_violations(parents.solution, parents) == 0

    def test_two_distinct_hard_misses_count_two(self, parents):
        # Wrong rating at the movie stage and wrong tier at the seat stage.
        path = (("movie", "m_glass"), ("theater", "t_yorkville"),
                ("date", "d_mar14"), ("time", "ts_sat_y4"), ("seat", "C3+C4"))
        # m_glass violates the rating bound only (it is still a romance);
        # C3+C4 is standard tier: violates the premium-pair preference.
        assert compute_violations(path, parents) == 2

    def test_no_hard_preferences_zero_violations(self, fig3):
        from conftest import reload_scenario, scenario_doc
        doc = scenario_doc("family_matinee")
        doc["scriptedPreferences"] = []
        scenario = reload_scenario(doc)
        assert compute_violations(scenario.solution, scenario) == 0

    def test_unpreferred_counts_repeats(self, parents):
        log = [PathSelection("movie", "m_glass"),
               PathSelection("movie", "m_glass"),
               PathSelection("movie", "m_velvet")]
        assert compute_unpreferred(log, parents) == 2

    def test_unpreferred_one_violation_then_fix(self, parents):
        log = [PathSelection("movie", "m_glass"), PathSelection("movie", "m_velvet")]
        assert compute_unpreferred(log, parents) == 1

    def test_unpreferred_empty_on_solution_only(self, parents):
        log = [PathSelection(s, o) for s, o in parents.solution]
        assert compute_unpreferred(log, parents) == 0


class TestOracle:
    def fig1_memory(self, fig1):
        memory = PreferenceMemory()
        result = extract(
            Utterance("I would like to watch a blockbuster on an IMAX screen. "
                      "The closer the better!", 1),
            ExtractionContext(fig1, fig1.workflow.stage("theater"), memory),
            ProviderConfig(kind="rules"))
        for record in result.records:
            memory.upsert(record, workflow_stages=fig1.workflow.stage_ids())
        return memory

    def test_fig1_two_feasible_theaters(self, fig1):
        memory = self.fig1_memory(fig1)
        report = brute_force_oracle(fig1, memory)
        assert report.per_prefix_satisfying[""] == ("t_riverview", "t_cedar")
        assert report.per_prefix_alternative_counts[""] == 2

    def test_unsatisfiable_memory_no_feasible_paths(self, fig1):
        memory = PreferenceMemory()
        from usher.constraints import Constraint
        from usher.preferences import PreferenceRecord
        memory.upsert(PreferenceRecord(
            id="x", description="impossible", strength="hard",
            relevant_stages=("theater",),
            compiled=Constraint("screens", "eq", 99)))
        report = brute_force_oracle(fig1, memory)
        assert report.feasible_paths == []
        assert report.optimal_path is None

    def test_scripted_hard_set_leaves_only_solution(self, parents, sibling):
        from usher.preferences import PreferenceRecord
        for scenario in (parents, sibling):
            memory = PreferenceMemory()
            for i, pref in enumerate(scenario.hard_scripted()):
                memory.upsert(PreferenceRecord(
                    id=f"h{i}", description=pref.description, strength="hard",
                    relevant_stages=(pref.stage,), compiled=pref.constraint))
            report = brute_force_oracle(scenario, memory)
            assert report.feasible_paths == [scenario.solution]
            assert report.optimal_path == scenario.solution

    def test_empty_memory_counts_availability(self, fig3):
        report = brute_force_oracle(fig3, PreferenceMemory())
        assert report.per_prefix_alternative_counts[""] == 4


class TestRunTrial:
    def test_optimal_personas_reach_solution(self, scenarios, personas):
        for pid in ("parents_optimal", "sibling_optimal", "family_optimal",
                    "starfall_optimal"):
            persona = personas[pid]
            result = run_trial(scenarios[persona.scenario_id], persona)
            assert result.metrics.task_success == 1, pid
            assert result.metrics.violation_count == 0, pid
            assert result.metrics.protocol_error is None, pid

    def test_empty_persona_stops_immediately(self, fig3):
        persona = Persona(id="empty", scenario_id="family_matinee", steps=())
        result = run_trial(fig3, persona)
        assert result.metrics.task_success == 0
        assert result.metrics.turn_count == 0
        assert not result.metrics.submitted
        assert result.metrics.violation_count is None

    def test_repeat_mistake_persona_metrics(self, parents, personas):
        result = run_trial(parents, personas["parents_repeat"])
        assert result.metrics.unpreferred_selection_count == 2
        assert result.metrics.violation_count == 0
        assert result.metrics.task_success == 1

    def test_trusting_persona_accepts_everything(self, parents, personas):
        result = run_trial(parents, personas["parents_trusting"])
        assert result.metrics.task_success == 1
        assert result.metrics.dead_ends_recorded >= 2
        assert result.metrics.backtracks >= 2

    def test_utterance_counts(self, parents, personas):
        result = run_trial(parents, personas["parents_optimal"])
        counts = result.metrics.utterance_counts
        assert counts["preferenceStatement"] == 5
        assert counts.get("actionRequest", 0) >= 2  # accepted backtrack "yes" turns
        assert sum(counts.values()) == result.metrics.to_dict()["totalUtterances"]

    def test_metrics_determinism(self, sibling, personas):
        one = run_trial(sibling, personas["sibling_trusting"])
        two = run_trial(sibling, personas["sibling_trusting"])
        assert one.metrics.to_dict() == two.metrics.to_dict()
        assert one.transcript_bytes() == two.transcript_bytes()

    def test_protocol_error_on_illegal_action(self, fig3):
        persona = Persona(id="bad", scenario_id="family_matinee", steps=(
            PersonaStep(click={"kind": "select", "optionId": "m_pocket"}),
            PersonaStep(click={"kind": "submit"}),  # submit before confirmation
        ))
        result = run_trial(fig3, persona)
        assert not result.metrics.submitted
        assert result.metrics.protocol_error is not None
        assert "step 2" in result.metrics.protocol_error

    def test_post_submission_steps_not_executed(self, fig3):
        steps = [PersonaStep(click={"kind": "select", "optionId": o})
                 for _, o in fig3.solution]
        script: list[PersonaStep] = []
        for step in steps:
            script += [step, PersonaStep(click={"kind": "continue"})]
        script.append(PersonaStep(click={"kind": "submit"}))
        script.append(PersonaStep(say="hello after submission"))
        persona = Persona(id="post", scenario_id="family_matinee", steps=tuple(script))
        result = run_trial(fig3, persona)
        # The submit-or-turn-limit stop condition leaves the trailing step
        # unexecuted rather than failing the trial.
        assert result.metrics.submitted
        assert result.metrics.protocol_error is None

    def test_baseline_mode_transcript_has_no_adaptations(self, parents, personas):
        result = run_trial(parents, personas["parents_optimal"], mode="baseline")
        kinds = {line["kind"] for line in result.transcript if line["type"] == "event"}
        assert "adaptation" not in kinds
        assert "backtrackProposal" not in kinds

    def test_transcript_structure(self, fig3, personas):
        result = run_trial(fig3, personas["family_optimal"])
        header = result.transcript[0]
        assert header["type"] == "header"
        assert header["scenario"] == "family_matinee"
        assert header["persona"]["steps"]
        footer = result.transcript[-1]
        assert footer["type"] == "metrics"
        indices = [line["index"] for line in result.transcript
                   if line["type"] == "event"]
        assert indices == list(range(len(indices)))


class TestEngineOracleAgreement:
    @pytest.mark.parametrize("pid", [
        "parents_optimal", "parents_trusting", "parents_wanderer", "parents_repeat",
        "sibling_optimal", "sibling_trusting", "sibling_wanderer",
    ])
    def test_ledger_matches_oracle_every_step(self, scenarios, personas, pid):
        persona = personas[pid]
        scenario = scenarios[persona.scenario_id]
        failures: list[str] = []

        def hook(agent):
            expected = expected_ledger_counts(scenario, agent)
            actual = agent.session.ledger.counts
            if expected != actual:
                failures.append(f"turn {len(agent.session.history)}: "
                                f"expected {expected} actual {actual}")

        result = run_trial(scenario, persona, step_hook=hook)
        assert result.metrics.protocol_error is None
        assert failures == []
