"""Workflow, option catalog, and scenario loading.

A scenario bundles a strictly linear workflow, per-stage option universes,
a prefix-keyed availability table (which options the next stage offers
given every selection so far), optional per-prefix seat grids, scripted
preferences with declared strengths, and the declared solution path.

Scenario documents are JSON with top-level keys: workflow, options,
seatGrids, brief, scriptedPreferences, solution (plus optional id/title).
Unknown keys are rejected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .constraints import (
    Constraint,
    Objective,
    constraint_from_dict,
    constraint_to_dict,
    objective_from_dict,
    objective_to_dict,
)

ATTRIBUTE_KINDS = {"categorical", "ordinal", "numeric", "boolean"}
UI_KINDS = {"buttonGroup", "calendar", "seatMap", "confirmation"}
NON_FILTERABLE_UI = {"calendar", "seatMap"}

_ALLOWED_TOP_KEYS = {"id", "title", "workflow", "options", "seatGrids", "brief",
                     "scriptedPreferences", "solution"}


class ScenarioParseError(ValueError):
    """Document is not well-formed scenario JSON."""


class ScenarioValidationError(ValueError):
    """Document parsed but violates a catalog invariant."""


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: str
    unit: str | None = None
    higher_is_better: bool | None = None
    order: tuple[Any, ...] | None = None  # required for ordinal kind

    def __post_init__(self) -> None:
        if self.kind not in ATTRIBUTE_KINDS:
            raise ScenarioValidationError(f"attribute {self.name!r}: bad kind {self.kind!r}")
        if self.kind == "ordinal" and not self.order:
            raise ScenarioValidationError(f"ordinal attribute {self.name!r} needs an explicit order")


@dataclass(frozen=True)
class OptionItem:
    id: str
    label: str
    attributes: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class StageDef:
    id: str
    title: str
    ui_kind: str
    filterable: bool
    attribute_specs: tuple[AttributeSpec, ...] = ()

    def __post_init__(self) -> None:
        if self.ui_kind not in UI_KINDS:
            raise ScenarioValidationError(f"stage {self.id!r}: bad uiKind {self.ui_kind!r}")
        if self.filterable == (self.ui_kind in NON_FILTERABLE_UI):
            raise ScenarioValidationError(
                f"stage {self.id!r}: filterable must be {self.ui_kind not in NON_FILTERABLE_UI} "
                f"for uiKind {self.ui_kind!r}")
        names = [s.name for s in self.attribute_specs]
        if len(names) != len(set(names)):
            raise ScenarioValidationError(f"stage {self.id!r}: duplicate attribute names")

    def spec_for(self, attribute: str) -> AttributeSpec | None:
        for spec in self.attribute_specs:
            if spec.name == attribute:
                return spec
        return None

    def ordinal_orders(self) -> dict[str, list]:
        return {s.name: list(s.order) for s in self.attribute_specs if s.kind == "ordinal"}


@dataclass(frozen=True)
class WorkflowDef:
    stages: tuple[StageDef, ...]

    def __post_init__(self) -> None:
        if not self.stages:
            raise ScenarioValidationError("workflow has no stages")
        ids = [s.id for s in self.stages]
        if len(ids) != len(set(ids)):
            raise ScenarioValidationError("duplicate stage ids")
        if self.stages[-1].ui_kind != "confirmation":
            raise ScenarioValidationError("last stage must be the confirmation stage")
        for stage in self.stages[:-1]:
            if stage.ui_kind == "confirmation":
                raise ScenarioValidationError("confirmation stage must be last")

    def stage_ids(self) -> list[str]:
        return [s.id for s in self.stages]

    def stage(self, stage_id: str) -> StageDef:
        for s in self.stages:
            if s.id == stage_id:
                return s
        raise KeyError(stage_id)

    def index_of(self, stage_id: str) -> int:
        return self.stage_ids().index(stage_id)


@dataclass(frozen=True)
class SeatCell:
    row: str
    column: int
    tier: str
    taken: bool
    back: bool

    @property
    def id(self) -> str:
        return f"{self.row}{self.column}"


@dataclass(frozen=True)
class SeatGrid:
    cells: tuple[SeatCell, ...]

    def cell(self, seat_id: str) -> SeatCell | None:
        for c in self.cells:
            if c.id == seat_id:
                return c
        return None

    def adjacent_free_pairs(self) -> list[tuple[SeatCell, SeatCell]]:
        """Same row, consecutive columns, both free."""
        by_row: dict[str, dict[int, SeatCell]] = {}
        for c in self.cells:
            by_row.setdefault(c.row, {})[c.column] = c
        pairs = []
        for row in sorted(by_row):
            cols = by_row[row]
            for col in sorted(cols):
                left, right = cols.get(col), cols.get(col + 1)
                if left and right and not left.taken and not right.taken:
                    pairs.append((left, right))
        return pairs


@dataclass(frozen=True)
class ScriptedPreference:
    stage: str
    description: str
    strength: str  # "hard" | "soft"
    constraint: Constraint | None = None
    objective: Objective | None = None


Prefix = tuple[tuple[str, str], ...]  # ((stageId, optionId), ...)


def prefix_key(prefix: Iterable[tuple[str, str]]) -> str:
    return "/".join(f"{s}:{o}" for s, o in prefix)


def parse_prefix_key(key: str) -> Prefix:
    if not key:
        return ()
    out = []
    for part in key.split("/"):
        stage, sep, option = part.partition(":")
        if not sep or not stage or not option:
            raise ScenarioParseError(f"bad prefix key segment {part!r}")
        out.append((stage, option))
    return tuple(out)


@dataclass(frozen=True)
class Scenario:
    id: str
    title: str
    brief: str
    workflow: WorkflowDef
    items: dict[str, tuple[OptionItem, ...]]            # stageId -> universe
    availability: dict[Prefix, tuple[str, ...]]         # prefix -> next-stage option ids
    seat_grids: dict[Prefix, SeatGrid]
    scripted_preferences: tuple[ScriptedPreference, ...]
    solution: Prefix

    def item(self, stage_id: str, option_id: str) -> OptionItem:
        for it in self.items.get(stage_id, ()):
            if it.id == option_id:
                return it
        raise KeyError(f"{stage_id}:{option_id}")

    def stage_after(self, prefix: Prefix) -> StageDef:
        """The stage whose options follow the given prefix."""
        ids = self.workflow.stage_ids()
        if len(prefix) >= len(ids):
            raise KeyError(f"prefix longer than workflow: {prefix_key(prefix)}")
        for i, (stage_id, _) in enumerate(prefix):
            if stage_id != ids[i]:
                raise KeyError(f"prefix out of stage order: {prefix_key(prefix)}")
        return self.workflow.stages[len(prefix)]

    def hard_scripted(self) -> list[ScriptedPreference]:
        return [p for p in self.scripted_preferences if p.strength == "hard"]


def options_at(scenario: Scenario, prefix: Iterable[tuple[str, str]]) -> list[OptionItem]:
    """Catalog-order options of the stage following `prefix`.

    The confirmation stage has an empty option list. Unknown prefixes
    raise KeyError.
    """
    p: Prefix = tuple(prefix)
    stage = scenario.stage_after(p)
    if stage.ui_kind == "confirmation":
        return []
    if p not in scenario.availability:
        raise KeyError(f"unknown prefix {prefix_key(p)!r}")
    return [scenario.item(stage.id, oid) for oid in scenario.availability[p]]


def reachable_prefixes(scenario: Scenario) -> list[Prefix]:
    """Every reachable selection prefix, in depth-first stage order,
    excluding full paths (prefixes that already cover all pre-confirmation
    stages)."""
    selectable = len(scenario.workflow.stages) - 1
    out: list[Prefix] = []

    def walk(prefix: Prefix) -> None:
        if len(prefix) >= selectable:
            return
        out.append(prefix)
        stage_id = scenario.workflow.stages[len(prefix)].id
        for oid in scenario.availability.get(prefix, ()):
            walk(prefix + ((stage_id, oid),))

    walk(())
    return out


def full_paths(scenario: Scenario) -> list[Prefix]:
    """Every full selection path over the pre-confirmation stages."""
    selectable = len(scenario.workflow.stages) - 1
    paths: list[Prefix] = []

    def walk(prefix: Prefix) -> None:
        if len(prefix) == selectable:
            paths.append(prefix)
            return
        stage_id = scenario.workflow.stages[len(prefix)].id
        for oid in scenario.availability.get(prefix, ()):
            walk(prefix + ((stage_id, oid),))

    walk(())
    return paths


def path_satisfies_hard(scenario: Scenario, path: Prefix) -> bool:
    selections = dict(path)
    for pref in scenario.hard_scripted():
        option_id = selections.get(pref.stage)
        if option_id is None:
            return False
        option = scenario.item(pref.stage, option_id)
        orders = scenario.workflow.stage(pref.stage).ordinal_orders()
        if pref.constraint is not None and not _safe_satisfies(pref.constraint, option, orders):
            return False
    return True


def _safe_satisfies(constraint: Constraint, option: OptionItem, orders: dict[str, list]) -> bool:
    from .constraints import satisfies
    return satisfies(constraint, option.attributes, ordinal_orders=orders)


def validate_unique_solution(scenario: Scenario) -> dict:
    """Exhaustively count full paths satisfying every hard scripted
    preference. Passes when exactly one exists and it equals the declared
    solution."""
    witnesses = [p for p in full_paths(scenario) if path_satisfies_hard(scenario, p)]
    return {
        "solutionCount": len(witnesses),
        "witnessPaths": witnesses,
        "passes": len(witnesses) == 1 and witnesses[0] == scenario.solution,
    }


# --- loading ---------------------------------------------------------------

def _parse_attribute_spec(doc: dict, stage_id: str) -> AttributeSpec:
    extra = set(doc) - {"name", "kind", "unit", "higherIsBetter", "order"}
    if extra:
        raise ScenarioParseError(f"stage {stage_id!r} attribute spec: unknown keys {sorted(extra)}")
    return AttributeSpec(
        name=doc["name"],
        kind=doc["kind"],
        unit=doc.get("unit"),
        higher_is_better=doc.get("higherIsBetter"),
        order=tuple(doc["order"]) if "order" in doc else None,
    )


def _parse_stage(doc: dict) -> StageDef:
    extra = set(doc) - {"id", "title", "uiKind", "filterable", "attributeSpecs"}
    if extra:
        raise ScenarioParseError(f"stage {doc.get('id')!r}: unknown keys {sorted(extra)}")
    return StageDef(
        id=doc["id"],
        title=doc["title"],
        ui_kind=doc["uiKind"],
        filterable=doc["filterable"],
        attribute_specs=tuple(_parse_attribute_spec(a, doc["id"]) for a in doc.get("attributeSpecs", [])),
    )


def _check_attribute_value(spec: AttributeSpec, value: Any, where: str) -> None:
    ok = True
    if spec.kind == "numeric":
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
    elif spec.kind == "boolean":
        ok = isinstance(value, bool)
    elif spec.kind == "ordinal":
        ok = value in (spec.order or ())
    elif spec.kind == "categorical":
        ok = isinstance(value, str)
    if not ok:
        raise ScenarioValidationError(
            f"{where}: value {value!r} does not conform to {spec.kind} attribute {spec.name!r}")


def _parse_items(stage: StageDef, docs: list[dict]) -> tuple[OptionItem, ...]:
    items = []
    seen: set[str] = set()
    specs = {s.name: s for s in stage.attribute_specs}
    for doc in docs:
        extra = set(doc) - {"id", "label", "attributes"}
        if extra:
            raise ScenarioParseError(f"option {doc.get('id')!r}: unknown keys {sorted(extra)}")
        oid = doc["id"]
        if oid in seen:
            raise ScenarioValidationError(f"stage {stage.id!r}: duplicate option id {oid!r}")
        seen.add(oid)
        attrs = dict(doc.get("attributes", {}))
        for name, value in attrs.items():
            if name not in specs:
                raise ScenarioValidationError(
                    f"stage {stage.id!r} option {oid!r}: undeclared attribute {name!r}")
            _check_attribute_value(specs[name], value, f"stage {stage.id!r} option {oid!r}")
        items.append(OptionItem(id=oid, label=doc["label"], attributes=attrs))
    return tuple(items)


def _parse_seat_grid(doc: dict, key: str) -> SeatGrid:
    extra = set(doc) - {"rows"}
    if extra:
        raise ScenarioParseError(f"seat grid {key!r}: unknown keys {sorted(extra)}")
    cells: list[SeatCell] = []
    for row in doc["rows"]:
        extra = set(row) - {"id", "tier", "back", "seats"}
        if extra:
            raise ScenarioParseError(f"seat grid {key!r} row: unknown keys {sorted(extra)}")
        tier = row.get("tier", "standard")
        back = bool(row.get("back", False))
        for i, ch in enumerate(row["seats"], start=1):
            if ch not in ".X":
                raise ScenarioParseError(f"seat grid {key!r}: bad seat flag {ch!r}")
            cells.append(SeatCell(row=row["id"], column=i, tier=tier, taken=(ch == "X"), back=back))
    return SeatGrid(cells=tuple(cells))


def _parse_scripted(doc: dict, workflow: WorkflowDef) -> ScriptedPreference:
    extra = set(doc) - {"stage", "description", "strength", "constraint", "objective"}
    if extra:
        raise ScenarioParseError(f"scripted preference: unknown keys {sorted(extra)}")
    stage = doc["stage"]
    if stage not in workflow.stage_ids():
        raise ScenarioValidationError(f"scripted preference references unknown stage {stage!r}")
    strength = doc["strength"]
    if strength not in ("hard", "soft"):
        raise ScenarioValidationError(f"scripted preference: bad strength {strength!r}")
    constraint = constraint_from_dict(doc["constraint"]) if "constraint" in doc else None
    objective = objective_from_dict(doc["objective"]) if "objective" in doc else None
    if strength == "hard" and constraint is None:
        raise ScenarioValidationError("hard scripted preference needs a constraint")
    if strength == "hard" and objective is not None:
        raise ScenarioValidationError("hard scripted preference cannot carry an objective")
    if constraint is None and objective is None:
        raise ScenarioValidationError("scripted preference needs a constraint or objective")
    return ScriptedPreference(stage=stage, description=doc["description"],
                              strength=strength, constraint=constraint, objective=objective)


def _validate_seat_options(scenario_id: str, stage: StageDef, prefix: Prefix,
                           option_ids: tuple[str, ...], grid: SeatGrid,
                           items: dict[str, OptionItem]) -> None:
    for oid in option_ids:
        option = items[oid]
        seat_ids = oid.split("+")
        cells = []
        for sid in seat_ids:
            cell = grid.cell(sid)
            if cell is None:
                raise ScenarioValidationError(
                    f"seat option {oid!r} at {prefix_key(prefix)!r} references unknown seat {sid!r}")
            if cell.taken:
                raise ScenarioValidationError(
                    f"seat option {oid!r} at {prefix_key(prefix)!r} uses taken seat {sid!r}")
            cells.append(cell)
        rows = {c.row for c in cells}
        columns = sorted(c.column for c in cells)
        adjacent = len(rows) == 1 and columns == list(range(columns[0], columns[0] + len(columns)))
        attrs = option.attributes
        if attrs.get("count") != len(cells):
            raise ScenarioValidationError(f"seat option {oid!r}: count attribute mismatch")
        if bool(attrs.get("adjacent")) != adjacent:
            raise ScenarioValidationError(f"seat option {oid!r}: adjacency attribute mismatch")
        tiers = {c.tier for c in cells}
        expected_tier = tiers.pop() if len(tiers) == 1 else "mixed"
        if attrs.get("tier") != expected_tier:
            raise ScenarioValidationError(f"seat option {oid!r}: tier attribute mismatch")
        if bool(attrs.get("backRow")) != any(c.back for c in cells):
            raise ScenarioValidationError(f"seat option {oid!r}: backRow attribute mismatch")


def load_scenario(data: bytes | str, *, scenario_id: str | None = None) -> Scenario:
    """Parse and validate one scenario document.

    Raises ScenarioParseError for malformed documents and
    ScenarioValidationError for structural violations (dangling ids,
    unreachable or missing availability, attribute kind mismatches).
    """
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario document must be a JSON object")
    extra = set(doc) - _ALLOWED_TOP_KEYS
    if extra:
        raise ScenarioParseError(f"unknown top-level keys {sorted(extra)}")
    for key in ("workflow", "options", "brief", "scriptedPreferences", "solution"):
        if key not in doc:
            raise ScenarioParseError(f"missing top-level key {key!r}")

    wf_doc = doc["workflow"]
    if not isinstance(wf_doc, dict) or "stages" not in wf_doc:
        raise ScenarioParseError("workflow must be an object with a stages list")
    workflow = WorkflowDef(stages=tuple(_parse_stage(s) for s in wf_doc["stages"]))
    stage_ids = workflow.stage_ids()

    items: dict[str, tuple[OptionItem, ...]] = {}
    availability: dict[Prefix, tuple[str, ...]] = {}
    options_doc = doc["options"]
    for stage_id, stage_options in options_doc.items():
        if stage_id not in stage_ids:
            raise ScenarioValidationError(f"options reference unknown stage {stage_id!r}")
        stage = workflow.stage(stage_id)
        extra = set(stage_options) - {"items", "byPrefix"}
        if extra:
            raise ScenarioParseError(f"options for {stage_id!r}: unknown keys {sorted(extra)}")
        items[stage_id] = _parse_items(stage, stage_options.get("items", []))
        universe = {it.id for it in items[stage_id]}
        stage_index = workflow.index_of(stage_id)
        for key, ids in stage_options.get("byPrefix", {}).items():
            prefix = parse_prefix_key(key)
            if len(prefix) != stage_index:
                raise ScenarioValidationError(
                    f"availability key {key!r} has wrong length for stage {stage_id!r}")
            for i, (sid, oid) in enumerate(prefix):
                if sid != stage_ids[i]:
                    raise ScenarioValidationError(f"availability key {key!r} out of stage order")
            for oid in ids:
                if oid not in universe:
                    raise ScenarioValidationError(
                        f"availability for stage {stage_id!r} at {key!r} references "
                        f"unknown option {oid!r}")
            availability[prefix] = tuple(ids)

    for stage in workflow.stages:
        if stage.ui_kind == "confirmation" and items.get(stage.id):
            raise ScenarioValidationError("confirmation stage must have an empty option set")
        items.setdefault(stage.id, ())

    seat_grids: dict[Prefix, SeatGrid] = {}
    for key, grid_doc in (doc.get("seatGrids") or {}).items():
        seat_grids[parse_prefix_key(key)] = _parse_seat_grid(grid_doc, key)

    scripted = tuple(_parse_scripted(p, workflow) for p in doc["scriptedPreferences"])

    solution_doc = doc["solution"]
    solution: Prefix = tuple((s["stage"], s["option"]) for s in solution_doc)

    sid = doc.get("id") or scenario_id or "scenario"
    scenario = Scenario(
        id=sid,
        title=doc.get("title") or sid,
        brief=doc["brief"],
        workflow=workflow,
        items=items,
        availability=availability,
        seat_grids=seat_grids,
        scripted_preferences=scripted,
        solution=solution,
    )

    _validate_reachability(scenario)
    _validate_solution_shape(scenario)
    return scenario


def _validate_reachability(scenario: Scenario) -> None:
    """Availability must be total over every reachable prefix, with at least
    one option per non-confirmation stage; prefixes referencing options not
    actually offered upstream are unreachable and rejected."""
    reached: set[Prefix] = set()
    selectable = len(scenario.workflow.stages) - 1

    def walk(prefix: Prefix) -> None:
        if len(prefix) >= selectable:
            return
        reached.add(prefix)
        stage = scenario.workflow.stages[len(prefix)]
        if prefix not in scenario.availability:
            raise ScenarioValidationError(
                f"availability missing for reachable prefix {prefix_key(prefix)!r} "
                f"(stage {stage.id!r})")
        ids = scenario.availability[prefix]
        if not ids:
            raise ScenarioValidationError(
                f"stage {stage.id!r} has no options at {prefix_key(prefix)!r}")
        if stage.ui_kind == "seatMap":
            grid = scenario.seat_grids.get(prefix)
            if grid is None:
                raise ScenarioValidationError(
                    f"seat stage {stage.id!r} missing grid at {prefix_key(prefix)!r}")
            lookup = {it.id: it for it in scenario.items[stage.id]}
            _validate_seat_options(scenario.id, stage, prefix, ids, grid, lookup)
        for oid in ids:
            walk(prefix + ((stage.id, oid),))

    walk(())
    unreachable = set(scenario.availability) - reached
    if unreachable:
        key = prefix_key(sorted(unreachable)[0])
        raise ScenarioValidationError(f"availability entry for unreachable prefix {key!r}")


def _validate_solution_shape(scenario: Scenario) -> None:
    ids = scenario.workflow.stage_ids()
    selectable = len(ids) - 1
    if len(scenario.solution) != selectable:
        raise ScenarioValidationError("solution must select one option per pre-confirmation stage")
    prefix: Prefix = ()
    for i, (stage_id, option_id) in enumerate(scenario.solution):
        if stage_id != ids[i]:
            raise ScenarioValidationError(f"solution out of stage order at {stage_id!r}")
        if option_id not in scenario.availability.get(prefix, ()):
            raise ScenarioValidationError(
                f"solution selects unavailable option {option_id!r} at stage {stage_id!r}")
        prefix = prefix + ((stage_id, option_id),)


def load_scenario_file(path: str) -> Scenario:
    from pathlib import Path
    p = Path(path)
    return load_scenario(p.read_bytes(), scenario_id=p.stem)


def scripted_preference_to_dict(p: ScriptedPreference) -> dict:
    out: dict[str, Any] = {"stage": p.stage, "description": p.description, "strength": p.strength}
    if p.constraint is not None:
        out["constraint"] = constraint_to_dict(p.constraint)
    if p.objective is not None:
        out["objective"] = objective_to_dict(p.objective)
    return out
