"""Session preference memory.

Stores structured preference records extracted from dialogue. Records carry
a natural-language description, a hard/soft strength, the workflow stages
they apply to, and a compiled constraint or objective so downstream
adaptation and navigation can act on them deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

from .constraints import (
    Constraint,
    Objective,
    compare_scope,
    constraint_from_dict,
    constraint_to_dict,
    objective_from_dict,
    objective_to_dict,
)


class PreferenceError(ValueError):
    """Candidate record violates a memory invariant."""


@dataclass(frozen=True)
class PreferenceRecord:
    id: str
    description: str
    strength: str                      # "hard" | "soft"
    relevant_stages: tuple[str, ...]
    compiled: Constraint | Objective
    origin_turn: int = 0
    active: bool = True

    def __post_init__(self) -> None:
        if self.strength not in ("hard", "soft"):
            raise PreferenceError(f"bad strength {self.strength!r}")
        if not self.relevant_stages:
            raise PreferenceError("relevantStages must be non-empty")
        if self.strength == "hard" and not isinstance(self.compiled, Constraint):
            raise PreferenceError("hard records compile to constraints only")

    @property
    def attribute(self) -> str:
        return self.compiled.attribute

    @property
    def constraint(self) -> Constraint | None:
        return self.compiled if isinstance(self.compiled, Constraint) else None

    @property
    def objective(self) -> Objective | None:
        return self.compiled if isinstance(self.compiled, Objective) else None


@dataclass(frozen=True)
class ChangeNotice:
    kind: str                          # "new" | "replaced" | "strengthened" | "relaxed"
    record_id: str
    replaced_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class InvalidationNotice:
    """Tells navigation that dead ends and counts tied to a record are stale."""
    preference_id: str


@dataclass
class PreferenceMemory:
    records: list[PreferenceRecord] = field(default_factory=list)

    def active_records(self) -> list[PreferenceRecord]:
        return [r for r in self.records if r.active]

    def get(self, record_id: str) -> PreferenceRecord | None:
        for r in self.records:
            if r.id == record_id:
                return r
        return None

    def upsert(self, candidate: PreferenceRecord, *, workflow_stages: Iterable[str] | None = None
               ) -> ChangeNotice:
        """Insert the candidate, deactivating any active record that shares
        its attribute and overlaps its relevant stages.

        The notice kind is `relaxed` when a hard record gives way to a soft
        one or the constraint strictly widens, `strengthened` for the
        reverse, `replaced` otherwise, and `new` when nothing overlapped.
        """
        if workflow_stages is not None:
            known = set(workflow_stages)
            missing = [s for s in candidate.relevant_stages if s not in known]
            if missing:
                raise PreferenceError(f"relevantStages reference unknown stages {missing}")

        overlapping = [
            r for r in self.active_records()
            if r.attribute == candidate.attribute
            and set(r.relevant_stages) & set(candidate.relevant_stages)
        ]

        # Re-stating an identical preference only refreshes its origin turn;
        # the record id stays stable so linked dead ends survive.
        if len(overlapping) == 1:
            old = overlapping[0]
            if (old.strength == candidate.strength
                    and old.compiled == candidate.compiled
                    and old.relevant_stages == candidate.relevant_stages):
                idx = self.records.index(old)
                self.records[idx] = replace(old, origin_turn=candidate.origin_turn,
                                            description=candidate.description)
                return ChangeNotice(kind="replaced", record_id=old.id)

        if any(r.id == candidate.id for r in self.records):
            raise PreferenceError(f"record id {candidate.id!r} already in memory")

        for old in overlapping:
            idx = self.records.index(old)
            self.records[idx] = replace(old, active=False)

        self.records.append(candidate)

        if not overlapping:
            return ChangeNotice(kind="new", record_id=candidate.id)

        kind = "replaced"
        old = overlapping[-1]
        if old.strength == "hard" and candidate.strength == "soft":
            kind = "relaxed"
        elif old.strength == "soft" and candidate.strength == "hard":
            kind = "strengthened"
        elif old.constraint is not None and candidate.constraint is not None:
            scope = compare_scope(old.constraint, candidate.constraint)
            if scope == "wider":
                kind = "relaxed"
            elif scope == "narrower":
                kind = "strengthened"
        return ChangeNotice(kind=kind, record_id=candidate.id,
                            replaced_ids=tuple(r.id for r in overlapping))

    def records_for_stage(self, stage_id: str, *, workflow_stages: Iterable[str] | None = None
                          ) -> list[PreferenceRecord]:
        """Active records applying to the stage, hard before soft, then by
        origin turn ascending (insertion order breaks remaining ties)."""
        if workflow_stages is not None and stage_id not in set(workflow_stages):
            raise KeyError(f"unknown stage {stage_id!r}")
        matches = [r for r in self.active_records() if stage_id in r.relevant_stages]
        order = {id(r): i for i, r in enumerate(matches)}
        return sorted(matches, key=lambda r: (r.strength != "hard", r.origin_turn, order[id(r)]))

    def relax(self, record_id: str) -> InvalidationNotice:
        record = self.get(record_id)
        if record is None or not record.active:
            raise PreferenceError(f"no active record {record_id!r}")
        idx = self.records.index(record)
        self.records[idx] = replace(record, active=False)
        return InvalidationNotice(preference_id=record_id)

    # --- serialization -----------------------------------------------------

    def to_dicts(self) -> list[dict]:
        return [record_to_dict(r) for r in self.records]

    @classmethod
    def from_dicts(cls, docs: list[dict]) -> "PreferenceMemory":
        return cls(records=[record_from_dict(d) for d in docs])


def record_to_dict(r: PreferenceRecord) -> dict:
    doc = {
        "id": r.id,
        "description": r.description,
        "strength": r.strength,
        "relevantStages": list(r.relevant_stages),
        "originTurn": r.origin_turn,
        "active": r.active,
    }
    if isinstance(r.compiled, Constraint):
        doc["compiled"] = {"constraint": constraint_to_dict(r.compiled)}
    else:
        doc["compiled"] = {"objective": objective_to_dict(r.compiled)}
    return doc


def record_from_dict(doc: dict) -> PreferenceRecord:
    compiled_doc = doc["compiled"]
    if "constraint" in compiled_doc:
        compiled: Constraint | Objective = constraint_from_dict(compiled_doc["constraint"])
    else:
        compiled = objective_from_dict(compiled_doc["objective"])
    return PreferenceRecord(
        id=doc["id"],
        description=doc["description"],
        strength=doc["strength"],
        relevant_stages=tuple(doc["relevantStages"]),
        compiled=compiled,
        origin_turn=doc.get("originTurn", 0),
        active=doc.get("active", True),
    )
