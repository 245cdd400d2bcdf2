from __future__ import annotations

import json

import pytest

from usher.constraints import Constraint, PredicateCall
from usher.nlu import (
    ExtractionContext,
    ProviderConfig,
    Utterance,
    classify_only,
    classify_text,
    extract,
    parse_clock,
)
from usher.preferences import PreferenceMemory

RULES = ProviderConfig(kind="rules")


def ctx(scenario, stage_id):
    return ExtractionContext(scenario=scenario,
                             stage=scenario.workflow.stage(stage_id),
                             memory=PreferenceMemory())


def run(scenario, stage_id, text, turn=1):
    return extract(Utterance(text=text, turn_index=turn), ctx(scenario, stage_id), RULES)


class TestClassification:
    @pytest.mark.parametrize("text,expected", [
        ("I prefer the closest theater", "preferenceStatement"),
        ("I need a G or PG rated kid-friendly movie, preferably the shorter one",
         "preferenceStatement"),
        ("How long is the movie?", "informationSeeking"),
        ("Go back", "actionRequest"),
        ("March 11th", "actionRequest"),
        ("", "other"),
        ("yes", "actionRequest"),
        ("show all", "actionRequest"),
        ("I would start with the closer theater, but can switch for better timing.",
         "preferenceStatement"),
        ("I need two adjacent seats, not in the back rows.", "preferenceStatement"),
        ("the weather was nice on the drive over here today", "other"),
    ])
    def test_labels(self, text, expected):
        assert classify_text(text) == expected

    def test_classify_only_contract(self):
        assert classify_only(Utterance("I prefer the closest theater", 1), RULES) == \
            "preferenceStatement"

    def test_rules_determinism(self, fig3):
        text = "I need a G or PG rated kid-friendly movie, preferably the shorter one"
        results = [run(fig3, "movie", text) for _ in range(3)]
        dicts = [[(r.id, r.description, r.strength, r.compiled) for r in res.records]
                 for res in results]
        assert dicts[0] == dicts[1] == dicts[2]


class TestExtraction:
    def test_fig3_utterance(self, fig3):
        result = run(fig3, "movie",
                     "I need a G or PG rated kid-friendly movie, preferably the shorter one")
        assert result.utterance_class == "preferenceStatement"
        assert len(result.records) == 2
        rating, runtime = result.records
        assert rating.strength == "hard"
        assert rating.compiled == Constraint("rating", "inSet", frozenset({"G", "PG"}))
        assert rating.relevant_stages == ("movie",)
        assert runtime.strength == "soft"
        assert runtime.objective.attribute == "runtime"
        assert runtime.objective.direction == "minimize"

    def test_fig1_teaser_utterance(self, fig1):
        result = run(fig1, "theater",
                     "I would like to watch a blockbuster on an IMAX screen. "
                     "The closer the better!")
        assert len(result.records) == 3
        genre, imax, distance = result.records
        assert genre.strength == "soft"
        assert genre.objective.prefer_set == frozenset({"blockbuster"})
        assert genre.relevant_stages == ("theater",)  # no stage carries genre
        assert imax.strength == "hard"
        assert imax.compiled == Constraint("imax", "eq", True)
        assert distance.objective.direction == "minimize"

    def test_information_seeking_yields_no_records(self, fig3):
        result = run(fig3, "movie", "How long is the movie?")
        assert result.records == ()
        assert result.utterance_class == "informationSeeking"

    def test_action_request_yields_no_records(self, fig3):
        result = run(fig3, "movie", "Go back")
        assert result.records == ()
        assert result.utterance_class == "actionRequest"

    def test_gui_channel_never_yields_records(self, fig3):
        utterance = Utterance(text="I need a G or PG rated movie", turn_index=1,
                              channel="guiAction")
        result = extract(utterance, ctx(fig3, "movie"), RULES)
        assert result.records == ()

    def test_parents_movie_line(self, parents):
        result = run(parents, "movie",
                     "I need a PG-13 or below romance movie, preferably warm and "
                     "familiar in tone.")
        assert len(result.records) == 3
        rating, genre, tone = result.records
        assert rating.compiled == Constraint("rating", "le", "PG-13")
        assert rating.strength == "hard"
        assert genre.compiled == Constraint("genre", "eq", "romance")
        assert genre.strength == "hard"
        assert tone.strength == "soft"
        assert tone.objective.prefer_set == frozenset({"warm"})

    def test_parents_date_line(self, parents):
        result = run(parents, "date",
                     "I prefer Saturday, March 14, but Sunday, March 15 also works.")
        hard = [r for r in result.records if r.strength == "hard"]
        soft = [r for r in result.records if r.strength == "soft"]
        assert len(hard) == 1 and len(soft) == 1
        assert hard[0].compiled == Constraint("date", "inSet", frozenset({"mar14", "mar15"}))
        assert soft[0].objective.attribute == "weekday"
        assert soft[0].objective.prefer_set == frozenset({"Sat"})

    def test_parents_conditional_time_line(self, parents):
        result = run(parents, "time",
                     "I need it to start after 4:00 PM and end by 9:00 PM on Saturday, "
                     "and on Sunday I need a true morning show.")
        assert len(result.records) == 1
        record = result.records[0]
        assert record.strength == "hard"
        assert record.relevant_stages == ("time",)
        c = record.constraint
        assert c.comparator == "or" and len(c.parts) == 2
        saturday, sunday = c.parts
        assert Constraint("day", "eq", "sat") in saturday.parts
        assert Constraint("time", "predicate", PredicateCall("startsAfter", (960,))) \
            in saturday.parts
        assert Constraint("endTime", "predicate", PredicateCall("endsBy", (1260,))) \
            in saturday.parts
        assert Constraint("day", "eq", "sun") in sunday.parts
        assert Constraint("time", "le", 690) in sunday.parts

    def test_parents_seat_line(self, parents):
        result = run(parents, "seat",
                     "I need two adjacent premium seats - standard would feel too ordinary.")
        assert len(result.records) == 1
        record = result.records[0]
        assert record.strength == "hard"
        parts = record.constraint.parts
        assert Constraint("adjacent", "predicate", PredicateCall("adjacentSeats", (2,))) \
            in parts
        assert Constraint("tier", "predicate", PredicateCall("tierIs", ("premium",))) \
            in parts
        assert all("standard" not in str(p.value) for p in parts
                   if p.comparator == "predicate")

    def test_sibling_movie_line(self, sibling):
        result = run(sibling, "movie",
                     "I want a cult comedy, and I prefer the lower-rated one over the "
                     "higher-rated one.")
        assert len(result.records) == 2
        genre, score = result.records
        assert genre.strength == "soft"
        assert genre.objective.prefer_set == frozenset({"cult comedy"})
        assert score.objective.attribute == "audienceScore"
        assert score.objective.direction == "minimize"

    def test_sibling_theater_line(self, sibling):
        result = run(sibling, "theater", "I need it at the single-screen theater.")
        assert len(result.records) == 1
        assert result.records[0].compiled == Constraint("screens", "eq", 1)
        assert result.records[0].strength == "hard"

    def test_sibling_time_line(self, sibling):
        result = run(sibling, "time",
                     "I need it starting after 6:00 PM and ending by 10:00 PM, "
                     "preferring the earlier showtime.")
        assert len(result.records) == 2
        window, earlier = result.records
        assert window.strength == "hard"
        assert Constraint("time", "predicate", PredicateCall("startsAfter", (1080,))) \
            in window.constraint.parts
        assert Constraint("endTime", "predicate", PredicateCall("endsBy", (1320,))) \
            in window.constraint.parts
        assert earlier.objective.attribute == "time"
        assert earlier.objective.direction == "minimize"

    def test_sibling_seat_line(self, sibling):
        result = run(sibling, "seat", "I need two adjacent seats, not in the back rows.")
        assert len(result.records) == 1
        parts = result.records[0].constraint.parts
        assert Constraint("adjacent", "predicate", PredicateCall("adjacentSeats", (2,))) \
            in parts
        assert Constraint("backRow", "eq", False) in parts

    def test_home_by_phrase(self, parents):
        result = run(parents, "time", "Friend A must be home by 10 PM.")
        assert len(result.records) == 1
        record = result.records[0]
        assert record.strength == "hard"
        assert record.compiled == Constraint(
            "endTime", "predicate", PredicateCall("endsBy", (1320,)))

    def test_records_pass_memory_invariants(self, parents):
        memory = PreferenceMemory()
        stage_ids = parents.workflow.stage_ids()
        for turn, (stage_id, line) in enumerate([
            ("movie", "I need a PG-13 or below romance movie, preferably warm in tone."),
            ("date", "I prefer Saturday, March 14, but Sunday, March 15 also works."),
            ("seat", "I need two adjacent premium seats."),
        ], start=1):
            for record in run(parents, stage_id, line, turn=turn).records:
                memory.upsert(record, workflow_stages=stage_ids)
        assert len(memory.active_records()) >= 5

    def test_clock_parsing(self):
        assert parse_clock("4:00 PM") == 960
        assert parse_clock("10 PM") == 1320
        assert parse_clock("10:30 AM") == 630
        assert parse_clock("12:00 AM") == 0
        assert parse_clock("12:15 PM") == 735
        assert parse_clock("no time here") is None


@pytest.fixture
def fake_remote(monkeypatch):
    """Monkeypatched chat-completion endpoint for degradation tests."""
    state = {"fail_times": 0, "calls": 0, "response": None}

    def fake_post(url, json=None, timeout=None):
        import httpx
        state["calls"] += 1
        if state["calls"] <= state["fail_times"]:
            raise httpx.ConnectError("connection refused")

        class Response:
            status_code = 200

            def raise_for_status(self):
                return None

            def json(self):
                return state["response"]

        return Response()

    monkeypatch.setattr("usher.nlu.httpx.post", fake_post)
    return state


class TestRemoteProvider:
    CONFIG = ProviderConfig(kind="remote", endpoint="http://fake", retry_limit=2)

    def test_remote_tool_calls_parsed(self, fig3, fake_remote):
        fake_remote["response"] = {"choices": [{"message": {"tool_calls": [
            {"function": {"name": "extract_preferences", "arguments": json.dumps({
                "records": [{
                    "description": "kid friendly",
                    "strength": "hard",
                    "relevantStages": ["movie"],
                    "compiled": {"constraint": {"attribute": "rating",
                                                "comparator": "inSet",
                                                "value": ["G", "PG"]}},
                }]})}},
            {"function": {"name": "classify_utterance",
                          "arguments": json.dumps({"utteranceClass": "preferenceStatement"})}},
        ]}}]}
        result = extract(Utterance("kid friendly please", 3), ctx(fig3, "movie"), self.CONFIG)
        assert result.utterance_class == "preferenceStatement"
        assert len(result.records) == 1
        assert result.records[0].compiled == Constraint(
            "rating", "inSet", frozenset({"G", "PG"}))
        assert result.provider_trace["provider"] == "remote"

    def test_degrades_to_rules_after_retries(self, fig3, fake_remote):
        fake_remote["fail_times"] = 99
        result = extract(
            Utterance("I need a G or PG rated movie, preferably the shorter one", 1),
            ctx(fig3, "movie"), self.CONFIG)
        assert result.provider_trace["degraded"] is True
        assert fake_remote["calls"] == 2  # retry_limit
        assert len(result.records) == 2  # rules grammar still extracted

    def test_unparseable_output_degrades(self, fig3, fake_remote):
        fake_remote["response"] = {"choices": [{"message": {"tool_calls": [
            {"function": {"name": "classify_utterance", "arguments": "not json"}}]}}]}
        result = extract(Utterance("I prefer the shorter one", 1),
                         ctx(fig3, "movie"), self.CONFIG)
        assert result.provider_trace.get("degraded") is True

    def test_remote_requires_endpoint(self):
        with pytest.raises(ValueError):
            ProviderConfig(kind="remote")

    def test_classify_only_degrades(self, fake_remote):
        fake_remote["fail_times"] = 99
        label = classify_only(Utterance("Go back", 1), self.CONFIG)
        assert label == "actionRequest"
