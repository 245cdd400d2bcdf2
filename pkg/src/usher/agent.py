"""Per-session orchestration: the turn loop.

Each user turn runs one pipeline: extract preferences, update memory,
re-plan and apply adaptations for the current stage, refresh alternative
counts, detect conflicts, and emit ordered agent events (messages,
adaptations, snapshots, proposals). GUI actions (select, continue, back,
show all, submit) go through the same event stream.
"""

from __future__ import annotations

import json
import logging
import re
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable

from . import navigation
from .adaptation import (
    AdaptationAction,
    AdaptedView,
    action_to_dict,
    apply as apply_plan,
    plan_adaptations,
    render_label,
    render_value,
    show_all,
    view_to_dict,
)
from .catalog import OptionItem, Scenario, StageDef, options_at
from .constraints import constraint_from_dict, satisfies
from .navigation import (
    AlternativeLedger,
    BacktrackProposal,
    DeadEndRecord,
    LedgerEntry,
    PathSelection,
    detect_conflict,
    record_alternatives,
    record_dead_end,
    suggest_backtrack,
)
from .nlu import (
    ExtractionContext,
    ProviderConfig,
    Utterance,
    extract,
    is_affirmative,
    is_negative,
    question_attribute,
)
from .preferences import PreferenceMemory, PreferenceRecord

logger = logging.getLogger(__name__)

_MESSAGES: dict[str, Any] = json.loads(
    resources.files("usher").joinpath("templates/messages.json").read_text()
)

SNAPSHOT_SCHEMA = "usher-session/1"
DEFAULT_CONTEXT_TURNS = 10


class SessionClosed(RuntimeError):
    """Input posted to an already submitted session."""


@dataclass(frozen=True)
class AgentEvent:
    index: int
    kind: str      # message | adaptation | guiSnapshot | confirmationAsk |
                   # backtrackProposal | stageTransition | submission
    payload: dict[str, Any]

    def to_dict(self) -> dict:
        return {"index": self.index, "kind": self.kind, "payload": self.payload}


@dataclass
class Turn:
    index: int
    user_input: dict[str, Any]
    agent_events: list[AgentEvent]
    timestamp: float


@dataclass
class PendingProposal:
    kind: str      # confirmSelection | backtrack
    payload: dict[str, Any]


@dataclass
class SessionState:
    session_id: str
    scenario: Scenario
    mode: str = "maestro"          # "maestro" | "baseline"
    path: list[PathSelection] = field(default_factory=list)
    current_stage: str = ""
    current_selection: str | None = None
    memory: PreferenceMemory = field(default_factory=PreferenceMemory)
    ledger: AlternativeLedger = field(default_factory=AlternativeLedger)
    dead_ends: list[DeadEndRecord] = field(default_factory=list)
    history: list[Turn] = field(default_factory=list)
    current_view: AdaptedView | None = None
    pending_proposal: PendingProposal | None = None
    submitted: bool = False
    event_log: list[AgentEvent] = field(default_factory=list)
    selection_log: list[PathSelection] = field(default_factory=list)
    backtrack_count: int = 0
    context_turns: int = DEFAULT_CONTEXT_TURNS

    def prefix(self) -> tuple[tuple[str, str], ...]:
        return tuple(p.as_pair() for p in self.path)

    def stage(self) -> StageDef:
        return self.scenario.workflow.stage(self.current_stage)


class Agent:
    """Drives one session. Turns are serialized by the caller; every
    handle_* call appends a Turn and returns the events it produced."""

    def __init__(self, session: SessionState, provider: ProviderConfig | None = None,
                 clock: Callable[[], float] | None = None) -> None:
        self.session = session
        self.provider = provider or ProviderConfig(kind="rules")
        self.clock = clock or time.time

    # --- session lifecycle ---------------------------------------------------

    @classmethod
    def create(cls, scenario: Scenario, session_id: str, mode: str = "maestro",
               provider: ProviderConfig | None = None,
               clock: Callable[[], float] | None = None) -> "Agent":
        if mode not in ("maestro", "baseline"):
            raise ValueError(f"bad mode {mode!r}")
        session = SessionState(session_id=session_id, scenario=scenario, mode=mode,
                               current_stage=scenario.workflow.stages[0].id)
        agent = cls(session, provider=provider, clock=clock)
        events = agent._enter_stage(initial=True)
        agent._record_turn({"type": "sessionStart"}, events)
        return agent

    # --- public turn handlers ------------------------------------------------

    def handle_user_message(self, text: str) -> list[AgentEvent]:
        self._ensure_open()
        events: list[AgentEvent] = []
        session = self.session
        turn_index = len(session.history) + 1
        utterance = Utterance(text=text, turn_index=turn_index, channel="chat")

        pending = session.pending_proposal
        if pending is not None and is_affirmative(text):
            session.pending_proposal = None
            events += self._accept_proposal(pending)
            self._record_turn({"type": "utterance", "text": text}, events)
            return events
        if pending is not None and is_negative(text):
            session.pending_proposal = None
            events.append(self._message(_MESSAGES["declined"]))
            self._record_turn({"type": "utterance", "text": text}, events)
            return events
        if pending is not None:
            session.pending_proposal = None  # any other input clears the ask

        result = extract(utterance, self._context(), self.provider)
        if result.provider_trace.get("degraded"):
            events.append(self._message(_MESSAGES["degraded"], degraded=True))

        if result.utterance_class == "actionRequest":
            events += self._execute_text_action(text)
        elif result.utterance_class == "informationSeeking":
            events += self._answer_question(text)
        else:
            if session.mode == "maestro" and result.records:
                self._ingest_records(result.records)
            events += self._replan_current_stage()

        self._record_turn({"type": "utterance", "text": text,
                           "class": result.utterance_class}, events)
        return events

    def handle_gui_action(self, kind: str, option_id: str | None = None,
                          target_stage: str | None = None) -> list[AgentEvent]:
        self._ensure_open()
        events = self._execute_action(kind, option_id=option_id, target_stage=target_stage)
        self._record_turn({"type": "guiAction", "kind": kind,
                           "optionId": option_id, "targetStage": target_stage}, events)
        return events

    # --- context -------------------------------------------------------------

    def build_context(self, k: int | None = None) -> dict[str, Any]:
        """Condensed agent context: the last k turns verbatim plus the full
        preference memory, current view snapshot, alternative counts, and
        dead-end records."""
        session = self.session
        k = session.context_turns if k is None else k
        recent = session.history[-k:] if k > 0 else []
        return {
            "recentTurns": [
                {"index": t.index, "userInput": t.user_input,
                 "agentEvents": [e.to_dict() for e in t.agent_events]}
                for t in recent
            ],
            "preferenceMemory": session.memory.to_dicts(),
            "guiSnapshot": view_to_dict(session.current_view) if session.current_view else None,
            "alternativeCounts": dict(sorted(session.ledger.counts.items())),
            "deadEnds": [dead_end_to_dict(d) for d in session.dead_ends],
            "path": [{"stage": p.stage_id, "option": p.option_id} for p in session.path],
            "currentStage": session.current_stage,
        }

    def elicit_on_stage_entry(self) -> list[AgentEvent]:
        """One stage-appropriate elicitation question; callers skip it when
        stored records already produced a plan."""
        stage = self.session.stage()
        text = _MESSAGES["elicitations"].get(stage.id) or _MESSAGES["elicitations"].get(
            stage.ui_kind, _MESSAGES["elicitations"]["default"])
        return [self._message(text, elicitation=True)]

    # --- internals: turn plumbing ---------------------------------------------

    def _ensure_open(self) -> None:
        if self.session.submitted:
            raise SessionClosed(f"session {self.session.session_id} is submitted")

    def _record_turn(self, user_input: dict, events: list[AgentEvent]) -> None:
        self._refresh_stale_counts()
        session = self.session
        session.history.append(Turn(
            index=len(session.history) + 1,
            user_input=user_input,
            agent_events=list(events),
            timestamp=self.clock(),
        ))

    def _emit(self, kind: str, payload: dict) -> AgentEvent:
        event = AgentEvent(index=len(self.session.event_log), kind=kind, payload=payload)
        self.session.event_log.append(event)
        return event

    def _message(self, text: str, **extra: Any) -> AgentEvent:
        payload: dict[str, Any] = {"text": text}
        payload.update(extra)
        return self._emit("message", payload)

    def _snapshot_event(self) -> AgentEvent:
        session = self.session
        view = session.current_view
        payload = {
            "stage": session.current_stage,
            "uiKind": session.stage().ui_kind,
            "stageTitle": session.stage().title,
            "view": view_to_dict(view) if view else None,
            "breadcrumb": [{"stage": p.stage_id,
                            "label": self._label_of(p.stage_id, p.option_id)}
                           for p in session.path],
        }
        grid = session.scenario.seat_grids.get(session.prefix())
        if session.stage().ui_kind == "seatMap" and grid is not None:
            payload["seatGrid"] = [
                {"id": c.id, "row": c.row, "column": c.column, "tier": c.tier,
                 "taken": c.taken, "back": c.back}
                for c in grid.cells
            ]
        return self._emit("guiSnapshot", payload)

    def _label_of(self, stage_id: str, option_id: str) -> str:
        try:
            return self.session.scenario.item(stage_id, option_id).label
        except KeyError:
            return option_id

    def _context(self) -> ExtractionContext:
        return ExtractionContext(scenario=self.session.scenario,
                                 stage=self.session.stage(),
                                 memory=self.session.memory)

    # --- internals: preference flow -------------------------------------------

    def _ingest_records(self, records: tuple[PreferenceRecord, ...] | list[PreferenceRecord]) -> None:
        session = self.session
        stage_ids = session.scenario.workflow.stage_ids()
        for record in records:
            notice = session.memory.upsert(record, workflow_stages=stage_ids)
            for replaced in notice.replaced_ids:
                navigation.invalidate_on_preference_change(
                    session.dead_ends, session.ledger, replaced)
            # New knowledge can change previously computed counts.
            for stage_id in record.relevant_stages:
                entry = session.ledger.entries.get(stage_id)
                if entry is not None:
                    entry.stale = True

    def _stage_records(self, stage_id: str) -> list[PreferenceRecord]:
        if self.session.mode == "baseline":
            return []
        return self.session.memory.records_for_stage(stage_id)

    def _build_view(self, stage: StageDef, options: list[OptionItem]
                    ) -> tuple[AdaptedView, list[AdaptationAction]]:
        plan = plan_adaptations(stage, options, self._stage_records(stage.id))
        view = apply_plan(options, plan, stage.attribute_specs)
        return view, plan

    def _replan_current_stage(self) -> list[AgentEvent]:
        """Re-plan adaptations for the current stage, emit adaptation events
        when the view changed, then either a conflict proposal or a
        follow-up message inviting the next decision."""
        session = self.session
        stage = session.stage()
        events: list[AgentEvent] = []

        if stage.ui_kind == "confirmation":
            events.append(self._message(self._confirmation_summary()))
            return events

        options = options_at(session.scenario, session.prefix())
        if session.mode == "baseline":
            events.append(self._message(self._baseline_facts(options)))
            return events

        old = view_to_dict(session.current_view) if session.current_view else None
        view, plan = self._build_view(stage, options)
        changed = view_to_dict(view) != old
        session.current_view = view
        if changed and plan:
            for action in plan:
                events.append(self._emit("adaptation", action_to_dict(action)))
            events.append(self._snapshot_event())
        record_alternatives(session.ledger, stage, view, session.current_selection)

        conflict = detect_conflict(stage, view, session.path, session.dead_ends)
        if conflict is not None:
            events += self._handle_conflict(conflict)
            return events

        events.extend(self._follow_up_message(view, plan))
        return events

    def _follow_up_message(self, view: AdaptedView,
                           plan: list[AdaptationAction]) -> list[AgentEvent]:
        """Propose the adaptation outcome and invite accept/reject/revise.
        Options leading into recorded dead ends are never proposed."""
        session = self.session
        prefix = session.prefix()
        candidates = [
            o for o in view.visible
            if o.id in set(navigation.candidate_ids(view))
            and not navigation.is_blocked(prefix, o.id, session.current_stage,
                                          session.dead_ends)
        ]
        sorted_plan = any(a.kind == "sort" for a in plan)
        if candidates and (len(candidates) == 1 or sorted_plan):
            best = candidates[0]
            session.pending_proposal = PendingProposal(
                kind="confirmSelection", payload={"optionId": best.id})
            if len(candidates) == 1:
                text = _MESSAGES["proposeOnly"].format(best=best.label)
            else:
                text = _MESSAGES["proposeOptimal"].format(
                    best=best.label, runnerUp=candidates[1].label)
            message = self._message(text)
            ask = self._emit("confirmationAsk", {"optionId": best.id, "label": best.label})
            return [message, ask]
        labels = ", ".join(view.labels.get(o.id, o.label) for o in candidates)
        if plan:
            return [self._message(_MESSAGES["narrowed"].format(
                count=len(candidates), labels=labels))]
        return [self._message(_MESSAGES["noted"].format(labels=labels))]

    def _handle_conflict(self, conflict) -> list[AgentEvent]:
        session = self.session
        events: list[AgentEvent] = []
        proposal = suggest_backtrack(session.ledger, session.path)
        descriptions = self._descriptions(conflict.blocking_preference_ids)
        if isinstance(proposal, BacktrackProposal):
            target = proposal.target_stage_id
            repeat = any(
                e.kind == "backtrackProposal" and e.payload.get("targetStageId") == target
                for e in session.event_log)
            session.pending_proposal = PendingProposal(kind="backtrack", payload={
                "targetStageId": target,
                "blockingPreferenceIds": list(conflict.blocking_preference_ids),
            })
            events.append(self._emit("backtrackProposal", {
                "targetStageId": target,
                "reason": conflict.reason,
                "blockingPreferenceIds": list(conflict.blocking_preference_ids),
            }))
            count = session.ledger.counts.get(target, 0)
            text = _MESSAGES["backtrackAsk"].format(
                reason=conflict.reason, target=target, count=count)
            if repeat:
                text = _MESSAGES["backtrackRepeat"] + text
            events.append(self._message(text))
        else:
            stages = ", ".join(proposal.exhausted_stages) or "none visited"
            events.append(self._message(_MESSAGES["infeasible"].format(
                stages=stages, descriptions="; ".join(descriptions) or "your requirements")))
        return events

    def _descriptions(self, preference_ids) -> list[str]:
        out = []
        for pid in preference_ids:
            record = self.session.memory.get(pid)
            if record is not None:
                out.append(record.description)
        return out

    # --- internals: proposals --------------------------------------------------

    def _accept_proposal(self, pending: PendingProposal) -> list[AgentEvent]:
        if pending.kind == "confirmSelection":
            option_id = pending.payload["optionId"]
            events = [self._message(_MESSAGES["accepted"].format(
                label=self._label_of(self.session.current_stage, option_id)))]
            events += self._execute_action("select", option_id=option_id)
            events += self._execute_action("continue")
            return events
        # backtrack acceptance records the dead end, then navigates
        target = pending.payload["targetStageId"]
        blocking = pending.payload.get("blockingPreferenceIds", [])
        return self._accept_backtrack(target, blocking)

    def _accept_backtrack(self, target: str, blocking: list[str]) -> list[AgentEvent]:
        session = self.session
        record_dead_end(session.path, session.current_stage, blocking,
                        session.dead_ends,
                        reason=f"no viable option at {session.current_stage}")
        events = [self._message(_MESSAGES["backtracked"].format(target=target))]
        navigation.navigate_back(session, target)
        session.backtrack_count += 1
        events.append(self._emit("stageTransition", {
            "to": target, "direction": "back",
            "path": [{"stage": p.stage_id, "option": p.option_id} for p in session.path],
        }))
        events += self._enter_stage()
        return events

    # --- internals: GUI actions -------------------------------------------------

    def _execute_text_action(self, text: str) -> list[AgentEvent]:
        lowered = text.strip().lower().rstrip(".!")
        session = self.session
        if "show all" in lowered or "show everything" in lowered:
            return self._execute_action("showAll")
        if "submit" in lowered:
            return self._execute_action("submit")
        if re.search(r"\b(go back|take me back|going back)\b|^back\b|\bundo\b", lowered):
            if not session.path:
                return [self._message(_MESSAGES["illegalAction"], error="nothingToUndo")]
            target = session.path[-1].stage_id
            for selection in session.path:
                stage = session.scenario.workflow.stage(selection.stage_id)
                if selection.stage_id in lowered or stage.title.lower() in lowered:
                    target = selection.stage_id
                    break
            return self._execute_action("back", target_stage=target)
        if lowered in ("continue", "next", "proceed", "go on"):
            return self._execute_action("continue")
        option = self._match_option(text)
        if option is not None:
            return self._execute_action("select", option_id=option.id)
        if is_affirmative(text) or is_negative(text):
            return [self._message(_MESSAGES["declined"])]
        return [self._message(_MESSAGES["illegalAction"], error="unrecognizedAction")]

    def _match_option(self, text: str) -> OptionItem | None:
        from .nlu import DATE_RE, date_code

        view = self.session.current_view
        if view is None:
            return None
        lowered = text.strip().lower().rstrip(".!")
        pool = view.all_ordered if view.show_all_engaged else view.visible
        for option in pool:
            if lowered == option.label.lower() or lowered == option.id.lower():
                return option
        for option in pool:
            if option.label.lower() in lowered:
                return option
        mention = DATE_RE.search(text)
        if mention is not None:
            code = date_code(mention.group(1), int(mention.group(2)))
            for option in pool:
                if option.attributes.get("date") == code:
                    return option
        return None

    def _answer_question(self, text: str) -> list[AgentEvent]:
        session = self.session
        stage = session.stage()
        view = session.current_view
        options = list(view.visible) if view is not None else []
        attr = question_attribute(text, stage)
        if attr is None or not options:
            return [self._message(_MESSAGES["infoUnknown"])]
        spec = stage.spec_for(attr)
        facts = ", ".join(
            f"{o.label}: {render_value(o.attributes.get(attr), spec) or 'n/a'}"
            for o in options if attr in o.attributes)
        return [self._message(_MESSAGES["infoAnswer"].format(facts=facts))]

    def _baseline_facts(self, options: list[OptionItem]) -> str:
        stage = self.session.stage()
        attrs = [s.name for s in stage.attribute_specs]
        facts = "; ".join(render_label(o, attrs, list(stage.attribute_specs)) for o in options)
        return _MESSAGES["baselineInfo"].format(facts=facts)

    def _execute_action(self, kind: str, option_id: str | None = None,
                        target_stage: str | None = None) -> list[AgentEvent]:
        session = self.session
        if kind == "select":
            return self._do_select(option_id)
        if kind == "continue":
            return self._do_continue()
        if kind == "back":
            return self._do_back(target_stage)
        if kind == "showAll":
            if session.current_view is None:
                return [self._message(_MESSAGES["illegalAction"], error="noView")]
            session.current_view = show_all(session.current_view)
            event = self._snapshot_event()
            return [self._message(_MESSAGES["showAll"]), event]
        if kind == "submit":
            return self._do_submit()
        return [self._message(_MESSAGES["illegalAction"], error="unknownAction")]

    def _do_select(self, option_id: str | None) -> list[AgentEvent]:
        session = self.session
        stage = session.stage()
        if option_id is None or stage.ui_kind == "confirmation":
            return [self._message(_MESSAGES["illegalAction"], error="badSelect")]
        view = session.current_view
        visible_ids = {o.id for o in view.visible} if view else set()
        if option_id not in visible_ids:
            all_ids = {o.id for o in view.all_ordered} if view else set()
            if option_id in all_ids:
                label = self._label_of(stage.id, option_id)
                return [self._message(_MESSAGES["cannotSeeOption"].format(label=label),
                                      error="hiddenOption")]
            return [self._message(_MESSAGES["illegalAction"], error="unknownOption")]
        if session.pending_proposal is not None:
            session.pending_proposal = None
        session.current_selection = option_id
        session.selection_log.append(PathSelection(stage.id, option_id))
        if view is not None and session.mode == "maestro":
            record_alternatives(session.ledger, stage, view, option_id)
        events = [self._message(_MESSAGES["selected"].format(
            label=self._label_of(stage.id, option_id)))]
        events += self._selection_warnings(stage, option_id)
        return events

    def _selection_warnings(self, stage: StageDef, option_id: str) -> list[AgentEvent]:
        """Selections violating a hard preference are permitted but flagged."""
        if self.session.mode == "baseline":
            return []
        option = self.session.scenario.item(stage.id, option_id)
        orders = stage.ordinal_orders()
        events = []
        for record in self._stage_records(stage.id):
            if record.strength != "hard" or record.constraint is None:
                continue
            if not satisfies(record.constraint, option.attributes, ordinal_orders=orders):
                events.append(self._message(_MESSAGES["selectionWarning"].format(
                    label=option.label, description=record.description), warning=True))
        return events

    def _do_continue(self) -> list[AgentEvent]:
        session = self.session
        stage = session.stage()
        if stage.ui_kind == "confirmation":
            return [self._message(_MESSAGES["illegalAction"], error="confirmationStage")]
        if session.current_selection is None:
            return [self._message(_MESSAGES["noSelection"], error="noSelection")]
        if session.current_view is not None and session.mode == "maestro":
            record_alternatives(session.ledger, stage, session.current_view,
                                session.current_selection)
        selection = PathSelection(stage.id, session.current_selection)
        session.path.append(selection)
        session.current_selection = None
        next_stage = session.scenario.workflow.stages[len(session.path)]
        session.current_stage = next_stage.id
        if session.pending_proposal is not None:
            session.pending_proposal = None
        events = [self._emit("stageTransition", {
            "to": next_stage.id, "direction": "forward",
            "path": [{"stage": p.stage_id, "option": p.option_id} for p in session.path],
        })]
        events += self._enter_stage()
        return events

    def _do_back(self, target_stage: str | None) -> list[AgentEvent]:
        session = self.session
        if target_stage is None:
            return [self._message(_MESSAGES["illegalAction"], error="noTarget")]
        pending = session.pending_proposal
        if (pending is not None and pending.kind == "backtrack"
                and pending.payload.get("targetStageId") == target_stage):
            session.pending_proposal = None
            return self._accept_backtrack(
                target_stage, pending.payload.get("blockingPreferenceIds", []))
        try:
            navigation.navigate_back(session, target_stage)
        except ValueError:
            return [self._message(_MESSAGES["illegalAction"], error="badBackTarget")]
        session.backtrack_count += 1
        if pending is not None:
            session.pending_proposal = None
        events = [self._emit("stageTransition", {
            "to": target_stage, "direction": "back",
            "path": [{"stage": p.stage_id, "option": p.option_id} for p in session.path],
        })]
        events += self._enter_stage()
        return events

    def _do_submit(self) -> list[AgentEvent]:
        session = self.session
        if session.stage().ui_kind != "confirmation":
            return [self._message(_MESSAGES["illegalAction"], error="notAtConfirmation")]
        session.submitted = True
        final = [{"stage": p.stage_id, "option": p.option_id} for p in session.path]
        event = self._emit("submission", {"finalPath": final})
        return [self._message(_MESSAGES["submitted"]), event]

    # --- internals: stage entry ---------------------------------------------------

    def _enter_stage(self, initial: bool = False) -> list[AgentEvent]:
        """Build the entry view for the current stage (re-applying stored
        preferences), emit adaptations and a snapshot, then either a
        conflict proposal, an elicitation, or a follow-up proposal."""
        session = self.session
        stage = session.stage()
        events: list[AgentEvent] = []

        if stage.ui_kind == "confirmation":
            session.current_view = apply_plan([], [], ())
            events.append(self._snapshot_event())
            events.append(self._message(self._confirmation_summary()))
            return events

        options = options_at(session.scenario, session.prefix())
        if session.mode == "baseline":
            session.current_view = apply_plan(options, [], stage.attribute_specs)
            events.append(self._snapshot_event())
            events += self.elicit_on_stage_entry()
            return events

        view, plan = self._build_view(stage, options)
        session.current_view = view
        for action in plan:
            events.append(self._emit("adaptation", action_to_dict(action)))
        events.append(self._snapshot_event())
        record_alternatives(session.ledger, stage, view, None)

        conflict = detect_conflict(stage, view, session.path, session.dead_ends)
        if conflict is not None:
            events += self._handle_conflict(conflict)
            return events

        blocked = self._blocked_labels(view)
        if blocked:
            events.append(self._message(
                _MESSAGES["deadEndNote"].format(labels=", ".join(blocked)), warning=True))

        if not plan:
            events += self.elicit_on_stage_entry()
        else:
            events.extend(self._follow_up_message(view, plan))
        return events

    def _blocked_labels(self, view: AdaptedView) -> list[str]:
        session = self.session
        prefix = session.prefix()
        out = []
        for option in view.visible:
            if navigation.is_blocked(prefix, option.id, session.current_stage,
                                     session.dead_ends):
                out.append(option.label)
        return out

    def _confirmation_summary(self) -> str:
        parts = ", ".join(
            f"{p.stage_id}: {self._label_of(p.stage_id, p.option_id)}"
            for p in self.session.path)
        return _MESSAGES["confirmationSummary"].format(summary=parts)

    # --- internals: ledger freshness ----------------------------------------------

    def _refresh_stale_counts(self) -> None:
        """Recompute alternative counts whose provenance view no longer
        matches the active preference set."""
        session = self.session
        if session.mode == "baseline":
            return
        for stage_id in list(session.ledger.stale_stages()):
            entry = session.ledger.entries.get(stage_id)
            if entry is None:
                continue
            if stage_id == session.current_stage:
                prefix_pairs = session.path
                selection = session.current_selection
            else:
                on_path = [p.stage_id for p in session.path]
                if stage_id not in on_path:
                    session.ledger.drop([stage_id])
                    continue
                idx = on_path.index(stage_id)
                prefix_pairs = session.path[:idx]
                selection = session.path[idx].option_id
            stage = session.scenario.workflow.stage(stage_id)
            options = options_at(session.scenario,
                                 tuple(p.as_pair() for p in prefix_pairs))
            view, _ = self._build_view(stage, options)
            record_alternatives(session.ledger, stage, view, selection)


# --- serialization ----------------------------------------------------------------


def dead_end_to_dict(record: DeadEndRecord) -> dict:
    return {
        "prefix": [{"stage": s, "option": o} for s, o in record.prefix],
        "failedStage": record.failed_stage,
        "linkedPreferenceIds": list(record.linked_preference_ids),
        "reason": record.reason,
    }


def dead_end_from_dict(doc: dict) -> DeadEndRecord:
    return DeadEndRecord(
        prefix=tuple((p["stage"], p["option"]) for p in doc["prefix"]),
        failed_stage=doc["failedStage"],
        linked_preference_ids=tuple(doc["linkedPreferenceIds"]),
        reason=doc.get("reason", ""),
    )


def _view_from_dict(doc: dict | None, scenario: Scenario, stage_id: str) -> AdaptedView | None:
    if doc is None:
        return None
    lookup = {it.id: it for it in scenario.items.get(stage_id, ())}
    actions = []
    for action_doc in doc.get("appliedActions", []):
        params = dict(action_doc["params"])
        if "constraint" in params:
            params["constraint"] = constraint_from_dict(params["constraint"])
        if "optionIds" in params:
            params["optionIds"] = tuple(params["optionIds"])
        if "attributes" in params:
            params["attributes"] = tuple(params["attributes"])
        actions.append(AdaptationAction(
            kind=action_doc["kind"], params=params,
            linked_preference_ids=tuple(action_doc.get("linkedPreferenceIds", [])),
            banner=action_doc.get("banner", "")))
    return AdaptedView(
        visible=tuple(lookup[i] for i in doc["visible"]),
        labels=dict(doc["labels"]),
        highlighted=frozenset(doc["highlighted"]),
        hidden_count=doc["hiddenCount"],
        show_all_engaged=doc["showAllEngaged"],
        applied_actions=tuple(actions),
        all_ordered=tuple(lookup[i] for i in doc["allOrdered"]),
        non_matching=frozenset(doc["nonMatching"]),
    )


def snapshot_session(session: SessionState) -> dict:
    """Full lossless snapshot; restore + identical inputs reproduce
    identical events under the rules provider."""
    return {
        "schema": SNAPSHOT_SCHEMA,
        "sessionId": session.session_id,
        "scenarioId": session.scenario.id,
        "mode": session.mode,
        "path": [{"stage": p.stage_id, "option": p.option_id} for p in session.path],
        "currentStage": session.current_stage,
        "currentSelection": session.current_selection,
        "memory": session.memory.to_dicts(),
        "ledger": {
            stage: {"count": e.count, "viewHash": e.view_hash,
                    "linkedPreferenceIds": sorted(e.linked_preference_ids),
                    "stale": e.stale}
            for stage, e in sorted(session.ledger.entries.items())
        },
        "deadEnds": [dead_end_to_dict(d) for d in session.dead_ends],
        "history": [
            {"index": t.index, "userInput": t.user_input,
             "agentEvents": [e.index for e in t.agent_events],
             "timestamp": t.timestamp}
            for t in session.history
        ],
        "currentView": view_to_dict(session.current_view) if session.current_view else None,
        "pendingProposal": (
            {"kind": session.pending_proposal.kind,
             "payload": session.pending_proposal.payload}
            if session.pending_proposal else None),
        "submitted": session.submitted,
        "eventLog": [e.to_dict() for e in session.event_log],
        "selectionLog": [{"stage": p.stage_id, "option": p.option_id}
                         for p in session.selection_log],
        "backtrackCount": session.backtrack_count,
        "contextTurns": session.context_turns,
    }


def restore_session(doc: dict, scenario: Scenario) -> SessionState:
    if doc.get("schema") != SNAPSHOT_SCHEMA:
        raise ValueError(f"unsupported snapshot schema {doc.get('schema')!r}")
    if doc.get("scenarioId") != scenario.id:
        raise ValueError("snapshot belongs to a different scenario")
    events = [AgentEvent(index=e["index"], kind=e["kind"], payload=e["payload"])
              for e in doc["eventLog"]]
    by_index = {e.index: e for e in events}
    history = [
        Turn(index=t["index"], user_input=t["userInput"],
             agent_events=[by_index[i] for i in t["agentEvents"]],
             timestamp=t["timestamp"])
        for t in doc["history"]
    ]
    ledger = AlternativeLedger(entries={
        stage: LedgerEntry(count=e["count"], view_hash=e["viewHash"],
                           linked_preference_ids=frozenset(e["linkedPreferenceIds"]),
                           stale=e["stale"])
        for stage, e in doc["ledger"].items()
    })
    session = SessionState(
        session_id=doc["sessionId"],
        scenario=scenario,
        mode=doc["mode"],
        path=[PathSelection(p["stage"], p["option"]) for p in doc["path"]],
        current_stage=doc["currentStage"],
        current_selection=doc.get("currentSelection"),
        memory=PreferenceMemory.from_dicts(doc["memory"]),
        ledger=ledger,
        dead_ends=[dead_end_from_dict(d) for d in doc["deadEnds"]],
        history=history,
        current_view=_view_from_dict(doc.get("currentView"), scenario, doc["currentStage"]),
        pending_proposal=(
            PendingProposal(kind=doc["pendingProposal"]["kind"],
                            payload=doc["pendingProposal"]["payload"])
            if doc.get("pendingProposal") else None),
        submitted=doc["submitted"],
        event_log=events,
        selection_log=[PathSelection(p["stage"], p["option"])
                       for p in doc.get("selectionLog", [])],
        backtrack_count=doc.get("backtrackCount", 0),
        context_turns=doc.get("contextTurns", DEFAULT_CONTEXT_TURNS),
    )
    return session
