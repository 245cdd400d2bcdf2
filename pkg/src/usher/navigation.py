"""Selection-path tracking, alternative counts, conflicts, and dead ends.

The ledger stores, per visited stage, how many sibling options remain
viable besides the user's selection, derived from the stage's adapted
view. Conflicts arise when a stage's viable set is empty; the backtrack
target is the nearest preceding stage that still has alternatives. Dead
ends are scoped to the exact selection prefix that failed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

from .adaptation import AdaptedView, view_hash
from .catalog import StageDef

if TYPE_CHECKING:  # pragma: no cover
    from .agent import SessionState


@dataclass(frozen=True)
class PathSelection:
    stage_id: str
    option_id: str

    def as_pair(self) -> tuple[str, str]:
        return (self.stage_id, self.option_id)


@dataclass(frozen=True)
class DeadEndRecord:
    prefix: tuple[tuple[str, str], ...]   # strictly precedes failed_stage
    failed_stage: str
    linked_preference_ids: tuple[str, ...]
    reason: str = ""


@dataclass
class LedgerEntry:
    count: int
    view_hash: str
    linked_preference_ids: frozenset[str]
    stale: bool = False


@dataclass
class AlternativeLedger:
    entries: dict[str, LedgerEntry] = field(default_factory=dict)

    @property
    def counts(self) -> dict[str, int]:
        return {stage: e.count for stage, e in self.entries.items()}

    def stale_stages(self) -> list[str]:
        return [stage for stage, e in self.entries.items() if e.stale]

    def drop(self, stage_ids: Iterable[str]) -> None:
        for sid in stage_ids:
            self.entries.pop(sid, None)


@dataclass(frozen=True)
class Conflict:
    reason: str
    blocking_preference_ids: tuple[str, ...]


@dataclass(frozen=True)
class BacktrackProposal:
    target_stage_id: str


@dataclass(frozen=True)
class Infeasible:
    exhausted_stages: tuple[str, ...]


def candidate_ids(view: AdaptedView) -> list[str]:
    """Viable option ids for a stage: the post-filter visible set, further
    restricted by any reduce-intent highlight. Emphasize-intent highlights
    never restrict, and Show All reveals filtered-out options without
    making them viable."""
    ids = [o.id for o in view.visible if o.id not in view.non_matching]
    for restriction in view.reduce_sets():
        ids = [i for i in ids if i in restriction]
    return ids


def record_alternatives(ledger: AlternativeLedger, stage: StageDef, view: AdaptedView,
                        current_selection: str | None = None) -> AlternativeLedger:
    """Store the stage's remaining-alternative count, excluding the user's
    current selection when it is itself viable."""
    candidates = candidate_ids(view)
    count = len(candidates) - (1 if current_selection in candidates else 0)
    ledger.entries[stage.id] = LedgerEntry(
        count=count,
        view_hash=view_hash(view),
        linked_preference_ids=view.linked_filter_highlight_ids(),
    )
    return ledger


def is_blocked(prefix: Sequence[tuple[str, str]], candidate: str, stage: str,
               dead_ends: Sequence[DeadEndRecord]) -> bool:
    """True when choosing `candidate` at `stage` after `prefix` re-enters a
    recorded failed subtree: some dead end's prefix equals the extended
    path truncated to that record's length, so every continuation from
    there is known to fail."""
    extended = tuple(prefix) + ((stage, candidate),)
    for record in dead_ends:
        k = len(record.prefix)
        if k <= len(extended) and extended[:k] == record.prefix:
            return True
    return False


def detect_conflict(stage: StageDef, view: AdaptedView, path: Sequence[PathSelection],
                    dead_ends: Sequence[DeadEndRecord]) -> Conflict | None:
    """Conflict iff no viable, unblocked option remains at the stage."""
    prefix = tuple(p.as_pair() for p in path)
    candidates = candidate_ids(view)
    open_ids = [c for c in candidates if not is_blocked(prefix, c, stage.id, dead_ends)]
    if open_ids:
        return None

    blocking: list[str] = list(view.linked_filter_highlight_ids())
    for record in dead_ends:
        k = len(record.prefix)
        for c in candidates:
            extended = prefix + ((stage.id, c),)
            if k <= len(extended) and extended[:k] == record.prefix:
                blocking.extend(record.linked_preference_ids)
    if candidates:
        reason = f"every remaining option at {stage.id} leads to a recorded dead end"
    elif blocking:
        reason = f"no option at {stage.id} satisfies the active hard preferences"
    else:
        reason = f"no options available at {stage.id}"
    return Conflict(reason=reason, blocking_preference_ids=tuple(dict.fromkeys(blocking)))


def suggest_backtrack(ledger: AlternativeLedger, path: Sequence[PathSelection]
                      ) -> BacktrackProposal | Infeasible:
    """Nearest preceding stage on the path with alternatives remaining, or
    Infeasible carrying the exhausted stages."""
    for selection in reversed(list(path)):
        entry = ledger.entries.get(selection.stage_id)
        if entry is not None and entry.count > 0:
            return BacktrackProposal(target_stage_id=selection.stage_id)
    return Infeasible(exhausted_stages=tuple(p.stage_id for p in path))


def record_dead_end(path: Sequence[PathSelection], failed_stage: str,
                    blocking_preference_ids: Sequence[str],
                    dead_ends: list[DeadEndRecord], reason: str = "") -> list[DeadEndRecord]:
    """Add a dead-end record for the prefix preceding the failed stage;
    identical (prefix, failedStage) records are not double-stored."""
    prefix = tuple(p.as_pair() for p in path)
    for existing in dead_ends:
        if existing.prefix == prefix and existing.failed_stage == failed_stage:
            return dead_ends
    dead_ends.append(DeadEndRecord(
        prefix=prefix,
        failed_stage=failed_stage,
        linked_preference_ids=tuple(blocking_preference_ids),
        reason=reason,
    ))
    return dead_ends


def invalidate_on_preference_change(dead_ends: list[DeadEndRecord], ledger: AlternativeLedger,
                                    preference_id: str) -> tuple[list[DeadEndRecord], list[str]]:
    """Drop dead ends linked to the changed preference and mark ledger
    entries derived from views that applied it as stale for lazy
    recomputation."""
    kept = [r for r in dead_ends if preference_id not in r.linked_preference_ids]
    dead_ends[:] = kept
    stale: list[str] = []
    for stage_id, entry in ledger.entries.items():
        if preference_id in entry.linked_preference_ids:
            entry.stale = True
            stale.append(stage_id)
    return dead_ends, stale


def navigate_back(session: "SessionState", target_stage: str) -> "SessionState":
    """Truncate the path to before the target stage's selection. Preference
    memory is untouched; ledger entries for truncated stages are dropped
    and recomputed on re-entry."""
    on_path = [p.stage_id for p in session.path]
    if target_stage not in on_path:
        raise ValueError(f"stage {target_stage!r} is not on the current path")
    idx = on_path.index(target_stage)
    dropped = on_path[idx:] + [session.current_stage]
    session.path = session.path[:idx]
    session.current_stage = target_stage
    session.current_selection = None
    session.ledger.drop(dropped)
    return session
