"""Headless trials: scripted personas drive sessions and yield metrics.

Also hosts the brute-force oracle: an exhaustive enumeration of the
scenario's path space under the session's hard preferences, computed from
first principles and independent of the navigation module, used to verify
alternative counts and feasibility.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Callable, Iterable

from .agent import Agent, SessionClosed
from .catalog import (
    Prefix,
    Scenario,
    full_paths,
    load_scenario,
    prefix_key,
    reachable_prefixes,
)
from .constraints import satisfies
from .navigation import PathSelection
from .nlu import ProviderConfig, Utterance, classify_only
from .preferences import PreferenceMemory

TRANSCRIPT_SCHEMA = "usher-transcript/1"
ORACLE_PATH_LIMIT = 100_000


class OracleScaleExceeded(RuntimeError):
    """Scenario path space is too large for exhaustive enumeration."""


@dataclass(frozen=True)
class PersonaStep:
    say: str | None = None
    click: dict[str, Any] | None = None

    def __post_init__(self) -> None:
        if (self.say is None) == (self.click is None):
            raise ValueError("persona step needs exactly one of say/click")


@dataclass(frozen=True)
class Persona:
    id: str
    scenario_id: str
    steps: tuple[PersonaStep, ...]
    accept_proposals: str = "backtracksOnly"   # always | never | backtracksOnly
    turn_limit: int = 80

    def __post_init__(self) -> None:
        if self.accept_proposals not in ("always", "never", "backtracksOnly"):
            raise ValueError(f"bad acceptProposals {self.accept_proposals!r}")


@dataclass
class TrialMetrics:
    task_success: int
    violation_count: int | None
    unpreferred_selection_count: int
    turn_count: int
    utterance_counts: dict[str, int]
    backtracks: int
    dead_ends_recorded: int
    submitted: bool
    protocol_error: str | None = None

    def to_dict(self) -> dict:
        return {
            "taskSuccess": self.task_success,
            "violationCount": self.violation_count,
            "unpreferredSelectionCount": self.unpreferred_selection_count,
            "turnCount": self.turn_count,
            "utteranceCounts": dict(sorted(self.utterance_counts.items())),
            "totalUtterances": sum(self.utterance_counts.values()),
            "backtracks": self.backtracks,
            "deadEndsRecorded": self.dead_ends_recorded,
            "submitted": self.submitted,
            "protocolError": self.protocol_error,
        }


@dataclass
class TrialResult:
    metrics: TrialMetrics
    transcript: list[dict]
    agent: Agent

    def transcript_bytes(self) -> bytes:
        lines = [json.dumps(line, sort_keys=True) for line in self.transcript]
        return ("\n".join(lines) + "\n").encode()


def persona_from_dict(doc: dict) -> Persona:
    steps = []
    for step in doc["steps"]:
        if "say" in step:
            steps.append(PersonaStep(say=step["say"]))
        else:
            steps.append(PersonaStep(click=step["click"]))
    return Persona(
        id=doc["id"],
        scenario_id=doc["scenarioId"],
        steps=tuple(steps),
        accept_proposals=doc.get("acceptProposals", "backtracksOnly"),
        turn_limit=doc.get("turnLimit", 80),
    )


def load_bundled_scenarios() -> dict[str, Scenario]:
    out: dict[str, Scenario] = {}
    root = resources.files("usher").joinpath("scenarios")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            scenario = load_scenario(entry.read_text(),
                                     scenario_id=entry.name.removesuffix(".json"))
            out[scenario.id] = scenario
    return out


def load_bundled_personas() -> dict[str, Persona]:
    out: dict[str, Persona] = {}
    root = resources.files("usher").joinpath("personas")
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            persona = persona_from_dict(json.loads(entry.read_text()))
            out[persona.id] = persona
    return out


# --- metrics ------------------------------------------------------------------


def _hard_misses(scenario: Scenario, stage_id: str, option_id: str) -> int:
    stage = scenario.workflow.stage(stage_id)
    orders = stage.ordinal_orders()
    option = scenario.item(stage_id, option_id)
    misses = 0
    for pref in scenario.hard_scripted():
        if pref.stage != stage_id or pref.constraint is None:
            continue
        if not satisfies(pref.constraint, option.attributes, ordinal_orders=orders):
            misses += 1
    return misses


def compute_violations(final_path: Iterable[tuple[str, str]], scenario: Scenario) -> int:
    """Hard scripted preferences unmet by a full submitted path; two unmet
    preferences on the same stage count twice."""
    selections = dict(final_path)
    count = 0
    for pref in scenario.hard_scripted():
        option_id = selections.get(pref.stage)
        if option_id is None:
            count += 1
            continue
        if pref.constraint is None:
            continue
        stage = scenario.workflow.stage(pref.stage)
        option = scenario.item(pref.stage, option_id)
        if not satisfies(pref.constraint, option.attributes,
                         ordinal_orders=stage.ordinal_orders()):
            count += 1
    return count


def compute_unpreferred(selection_log: Iterable[PathSelection], scenario: Scenario) -> int:
    """Selection events that violate at least one hard scripted preference,
    counting repeats across the whole log."""
    count = 0
    for selection in selection_log:
        if _hard_misses(scenario, selection.stage_id, selection.option_id) > 0:
            count += 1
    return count


# --- brute-force oracle ---------------------------------------------------------


@dataclass
class OracleReport:
    feasible_paths: list[Prefix]
    per_prefix_alternative_counts: dict[str, int]
    per_prefix_satisfying: dict[str, tuple[str, ...]]
    optimal_path: Prefix | None


def brute_force_oracle(scenario: Scenario, memory: PreferenceMemory) -> OracleReport:
    """Exhaustive enumeration under the memory's hard records.

    Satisfying sets are computed directly from the availability table and
    constraint evaluator, bypassing adaptation and navigation entirely.
    Soft records rank feasible paths lexicographically in stage order.
    """
    paths = full_paths(scenario)
    if len(paths) > ORACLE_PATH_LIMIT:
        raise OracleScaleExceeded(f"{len(paths)} paths exceed {ORACLE_PATH_LIMIT}")

    stage_records = {
        stage.id: memory.records_for_stage(stage.id)
        for stage in scenario.workflow.stages
    }

    def option_ok(stage_id: str, option_id: str) -> bool:
        stage = scenario.workflow.stage(stage_id)
        option = scenario.item(stage_id, option_id)
        orders = stage.ordinal_orders()
        declared = {s.name for s in stage.attribute_specs}
        for record in stage_records[stage_id]:
            if record.strength != "hard":
                continue
            # Records reading attributes the stage does not declare are
            # skipped, mirroring the adaptation planner.
            if not record.constraint.attributes_read() <= declared:
                continue
            if not satisfies(record.constraint, option.attributes, ordinal_orders=orders):
                return False
        return True

    satisfying: dict[str, tuple[str, ...]] = {}
    counts: dict[str, int] = {}
    for prefix in reachable_prefixes(scenario):
        stage = scenario.stage_after(prefix)
        ids = tuple(oid for oid in scenario.availability[prefix]
                    if option_ok(stage.id, oid))
        key = prefix_key(prefix)
        satisfying[key] = ids
        counts[key] = len(ids)

    feasible = [p for p in paths
                if all(option_ok(stage_id, oid) for stage_id, oid in p)]

    def soft_key(path: Prefix) -> tuple:
        parts: list[float] = []
        for stage_id, option_id in path:
            stage = scenario.workflow.stage(stage_id)
            option = scenario.item(stage_id, option_id)
            orders = stage.ordinal_orders()
            for record in stage_records[stage_id]:
                if record.strength != "soft":
                    continue
                objective = record.objective
                if objective is not None and objective.direction is not None:
                    value = option.attributes.get(objective.attribute, 0)
                    spec = stage.spec_for(objective.attribute)
                    if spec is not None and spec.kind == "ordinal":
                        value = (spec.order or ()).index(value)
                    parts.append(value if objective.direction == "minimize" else -value)
                elif objective is not None:
                    parts.append(0 if option.attributes.get(objective.attribute)
                                 in objective.prefer_set else 1)
                else:
                    parts.append(0 if satisfies(record.constraint, option.attributes,
                                                ordinal_orders=orders) else 1)
        return tuple(parts)

    optimal = min(feasible, key=soft_key) if feasible else None
    return OracleReport(
        feasible_paths=feasible,
        per_prefix_alternative_counts=counts,
        per_prefix_satisfying=satisfying,
        optimal_path=optimal,
    )


def expected_ledger_counts(scenario: Scenario, agent: Agent) -> dict[str, int]:
    """What the ledger should read right now per the oracle: satisfying
    options at each visited stage's prefix, minus its selection when that
    selection is itself satisfying."""
    report = brute_force_oracle(scenario, agent.session.memory)
    session = agent.session
    expected: dict[str, int] = {}
    selections: list[tuple[str, str, Prefix]] = []
    prefix: Prefix = ()
    for p in session.path:
        selections.append((p.stage_id, p.option_id, prefix))
        prefix = prefix + ((p.stage_id, p.option_id),)
    if session.current_stage not in [s for s, _, _ in selections]:
        if session.ledger.entries.get(session.current_stage) is not None:
            selections.append((session.current_stage, session.current_selection, prefix))
    for stage_id, option_id, stage_prefix in selections:
        ids = report.per_prefix_satisfying.get(prefix_key(stage_prefix), ())
        count = len(ids) - (1 if option_id in ids else 0)
        expected[stage_id] = count
    return expected


# --- trial runner ----------------------------------------------------------------


def _policy_reply(policy: str, proposal_kind: str) -> str | None:
    if policy == "always":
        return "yes"
    if policy == "never":
        return "no"
    if policy == "backtracksOnly" and proposal_kind == "backtrack":
        return "yes"
    return None


def run_trial(scenario: Scenario, persona: Persona, mode: str = "maestro",
              provider: ProviderConfig | None = None,
              step_hook: Callable[[Agent], None] | None = None) -> TrialResult:
    """Drive a fresh session with the persona script to submission or the
    turn limit; returns metrics and the full event transcript."""
    counter = itertools.count()
    agent = Agent.create(scenario, session_id=f"{scenario.id}:{persona.id}",
                         mode=mode, provider=provider,
                         clock=lambda: float(next(counter)))
    session = agent.session
    steps = list(persona.steps)
    cursor = 0
    protocol_error: str | None = None
    chat_texts: list[str] = []

    def turns_taken() -> int:
        return len(session.history) - 1  # session start is not a user turn

    while not session.submitted and turns_taken() < persona.turn_limit:
        pending = session.pending_proposal
        if pending is not None:
            reply = _policy_reply(persona.accept_proposals, pending.kind)
            if reply is not None:
                chat_texts.append(reply)
                agent.handle_user_message(reply)
                if step_hook:
                    step_hook(agent)
                continue
        if cursor >= len(steps):
            break
        step = steps[cursor]
        cursor += 1
        try:
            if step.say is not None:
                chat_texts.append(step.say)
                agent.handle_user_message(step.say)
            else:
                click = step.click
                events = agent.handle_gui_action(click["kind"],
                                                 option_id=click.get("optionId"),
                                                 target_stage=click.get("targetStage"))
                rejected = [e for e in events if e.payload.get("error")]
                if rejected:
                    protocol_error = (f"step {cursor}: illegal action "
                                      f"{rejected[0].payload['error']}")
                    break
        except SessionClosed:
            protocol_error = f"step {cursor}: input after submission"
            break
        except Exception as exc:
            protocol_error = f"step {cursor}: {exc}"
            break
        if step_hook:
            step_hook(agent)

    rules = ProviderConfig(kind="rules")
    utterance_counts: dict[str, int] = {}
    for i, text in enumerate(chat_texts):
        label = classify_only(Utterance(text=text, turn_index=i), rules)
        utterance_counts[label] = utterance_counts.get(label, 0) + 1

    final_path = session.prefix()
    submitted = session.submitted
    task_success = int(submitted and final_path == scenario.solution)
    violation_count = compute_violations(final_path, scenario) if submitted else None
    metrics = TrialMetrics(
        task_success=task_success,
        violation_count=violation_count,
        unpreferred_selection_count=compute_unpreferred(session.selection_log, scenario),
        turn_count=turns_taken(),
        utterance_counts=utterance_counts,
        backtracks=session.backtrack_count,
        dead_ends_recorded=len(session.dead_ends),
        submitted=submitted,
        protocol_error=protocol_error,
    )

    transcript: list[dict] = [{
        "type": "header",
        "schema": TRANSCRIPT_SCHEMA,
        "scenario": scenario.id,
        "mode": mode,
        "persona": {
            "id": persona.id,
            "scenarioId": persona.scenario_id,
            "acceptProposals": persona.accept_proposals,
            "turnLimit": persona.turn_limit,
            "steps": [({"say": s.say} if s.say is not None else {"click": s.click})
                      for s in persona.steps],
        },
    }]
    for event in session.event_log:
        transcript.append({"type": "event", **event.to_dict()})
    transcript.append({"type": "metrics", **metrics.to_dict()})
    return TrialResult(metrics=metrics, transcript=transcript, agent=agent)

def resume_trial(agent: Agent, persona: Persona, steps_done: int) -> list[dict]:
    """Continue a (possibly restored) session from a script position and
    return the full event transcript; used to check snapshot/restore
    reproduces the uninterrupted run."""
    session = agent.session
    steps = list(persona.steps[steps_done:])
    cursor = 0
    while not session.submitted and len(session.history) - 1 < persona.turn_limit:
        pending = session.pending_proposal
        if pending is not None:
            reply = _policy_reply(persona.accept_proposals, pending.kind)
            if reply is not None:
                agent.handle_user_message(reply)
                continue
        if cursor >= len(steps):
            break
        step = steps[cursor]
        cursor += 1
        if step.say is not None:
            agent.handle_user_message(step.say)
        else:
            click = step.click
            agent.handle_gui_action(click["kind"], option_id=click.get("optionId"),
                                    target_stage=click.get("targetStage"))
    return [{"type": "event", **e.to_dict()} for e in session.event_log]
