"""In-place GUI adaptation operators.

plan_adaptations turns a stage's preference records into an ordered
operator plan (augment, then filters, then sorts, then highlights);
apply executes a plan over the stage's catalog-order option list and
yields the adapted view. Operators never change GUI structure: filter
hides, sort reorders, augment relabels, highlight emphasizes.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, replace
from importlib import resources
from typing import Any

from .catalog import AttributeSpec, OptionItem, StageDef
from .constraints import Constraint, PredicateCall, constraint_to_dict, satisfies
from .preferences import PreferenceRecord

logger = logging.getLogger(__name__)

_BANNERS: dict[str, str] = json.loads(
    resources.files("usher").joinpath("templates/banners.json").read_text()
)


@dataclass(frozen=True)
class AdaptationAction:
    kind: str                                   # augment | filter | sort | highlight
    params: dict[str, Any]
    linked_preference_ids: tuple[str, ...] = ()
    banner: str = ""


@dataclass(frozen=True)
class AdaptedView:
    visible: tuple[OptionItem, ...]
    labels: dict[str, str]
    highlighted: frozenset[str]
    hidden_count: int
    show_all_engaged: bool
    applied_actions: tuple[AdaptationAction, ...]
    all_ordered: tuple[OptionItem, ...]         # post-sort order over the full universe
    non_matching: frozenset[str]                # ids removed by filters

    def reduce_sets(self) -> list[frozenset[str]]:
        """Option-id sets of reduce-intent highlights (used as viability
        restrictions by navigation)."""
        return [frozenset(a.params["optionIds"]) for a in self.applied_actions
                if a.kind == "highlight" and a.params.get("intent") == "reduce"]

    def linked_filter_highlight_ids(self) -> frozenset[str]:
        out: set[str] = set()
        for a in self.applied_actions:
            if a.kind in ("filter", "highlight"):
                out |= set(a.linked_preference_ids)
        return frozenset(out)


def view_hash(view: AdaptedView) -> str:
    return hashlib.sha256(
        json.dumps(view_to_dict(view), sort_keys=True).encode()
    ).hexdigest()[:16]


# --- label rendering ---------------------------------------------------------


def _clock(minutes: float) -> str:
    minutes = int(minutes) % (24 * 60)
    hour, minute = divmod(minutes, 60)
    suffix = "AM" if hour < 12 else "PM"
    hour12 = hour % 12 or 12
    return f"{hour12}:{minute:02d} {suffix}"


def _duration(minutes: float) -> str:
    minutes = int(minutes)
    hours, mins = divmod(minutes, 60)
    if hours and mins:
        return f"{hours}h {mins}m"
    if hours:
        return f"{hours}h"
    return f"{mins}m"


def render_value(value: Any, spec: AttributeSpec | None) -> str | None:
    """One attribute value as display text; None means omit the part."""
    if spec is not None and spec.kind == "boolean":
        if not value:
            return None
        return spec.unit or f"{spec.name.title()} Available"
    if spec is not None and spec.kind == "numeric":
        if spec.unit == "min":
            return _duration(value)
        if spec.unit == "clock":
            return _clock(value)
        if spec.unit:
            return f"{value:g} {spec.unit}"
        return f"{value:g}"
    return str(value)


def render_label(item: OptionItem, attributes: list[str],
                 specs: list[AttributeSpec] | tuple[AttributeSpec, ...]) -> str:
    """Base label plus rendered attribute values, joined with commas.

    Attributes missing from the item are skipped with a warning; an empty
    attribute list leaves the base label unchanged.
    """
    spec_map = {s.name: s for s in specs}
    parts: list[str] = []
    for name in attributes:
        if name not in item.attributes:
            logger.warning("option %s has no attribute %r; skipping in label", item.id, name)
            continue
        rendered = render_value(item.attributes[name], spec_map.get(name))
        if rendered is not None:
            parts.append(rendered)
    if not parts:
        return item.label
    return f"{item.label} — {', '.join(parts)}"


# --- constraint description (for banners) ------------------------------------


def describe_constraint(c: Constraint) -> str:
    if c.comparator == "and":
        return " and ".join(describe_constraint(p) for p in c.parts)
    if c.comparator == "or":
        return " or ".join(describe_constraint(p) for p in c.parts)
    if c.comparator == "predicate":
        call: PredicateCall = c.value
        if call.name == "adjacentSeats":
            return f"{call.args[0]} adjacent seats"
        if call.name == "startsAfter":
            return f"starts after {_clock(call.args[0])}"
        if call.name == "endsBy":
            return f"ends by {_clock(call.args[0])}"
        if call.name == "tierIs":
            return f"{call.args[0]} tier"
        if call.name == "countIs":
            return f"{call.args[0]} seats"
    if c.comparator == "eq":
        if c.value is True:
            return f"{c.attribute} available"
        return f"{c.attribute} is {c.value}"
    if c.comparator == "neq":
        return f"{c.attribute} is not {c.value}"
    if c.comparator == "inSet":
        return f"{c.attribute} is one of {', '.join(str(v) for v in sorted(c.value, key=str))}"
    if c.comparator == "le":
        return f"{c.attribute} at most {c.value}"
    if c.comparator == "ge":
        return f"{c.attribute} at least {c.value}"
    if c.comparator == "between":
        low, high = c.value
        return f"{c.attribute} between {low} and {high}"
    return c.attribute


# --- planning -----------------------------------------------------------------


def _referenced_attributes(record: PreferenceRecord) -> set[str]:
    if record.constraint is not None:
        return record.constraint.attributes_read()
    return {record.objective.attribute}


def _sort_key_fn(sorts: list[tuple[str, str, AttributeSpec | None]]):
    def key(option: OptionItem):
        parts = []
        for attr, direction, spec in sorts:
            if attr not in option.attributes:
                parts.append((1, 0))
                continue
            value = option.attributes[attr]
            if spec is not None and spec.kind == "ordinal":
                value = (spec.order or ()).index(value)
            if direction == "desc":
                value = -value
            parts.append((0, value))
        return tuple(parts)
    return key


def plan_adaptations(stage: StageDef, options: list[OptionItem],
                     records: list[PreferenceRecord]) -> list[AdaptationAction]:
    """Deterministic operator plan for a stage.

    Policy: one augment covering every attribute any record reads; per hard
    record a filter (or a reduce-intent highlight on non-filterable
    stages); per soft record a sort on numeric/ordinal attributes or an
    emphasize-intent highlight on categorical ones; and, when any sort ran,
    a final emphasize highlight of the optimal option(s). Records that
    reference attributes the stage does not declare are skipped with a
    warning.
    """
    if not records:
        return []
    spec_names = [s.name for s in stage.attribute_specs]
    orders = stage.ordinal_orders()

    usable: list[PreferenceRecord] = []
    for record in records:
        missing = _referenced_attributes(record) - set(spec_names)
        if missing:
            logger.warning("stage %s: skipping record %s; unknown attributes %s",
                           stage.id, record.id, sorted(missing))
            continue
        usable.append(record)
    if not usable:
        return []

    referenced: list[str] = []
    for record in usable:
        for attr in spec_names:
            if attr in _referenced_attributes(record) and attr not in referenced:
                referenced.append(attr)
    # The stage's identity attribute (named after the stage) is already what
    # the widget displays; augmenting it adds nothing.
    augment_attrs = [a for a in spec_names if a in referenced and a != stage.id]
    if not augment_attrs:
        augment_attrs = [a for a in spec_names if a != stage.id]

    filters: list[AdaptationAction] = []
    reduce_highlights: list[AdaptationAction] = []
    sorts: list[AdaptationAction] = []
    emphasize: list[AdaptationAction] = []

    hard = [r for r in usable if r.strength == "hard"]
    soft = [r for r in usable if r.strength == "soft"]

    for record in hard:
        constraint = record.constraint
        if stage.filterable:
            filters.append(AdaptationAction(
                kind="filter",
                params={"constraint": constraint},
                linked_preference_ids=(record.id,),
                banner=_BANNERS["filter"].format(desc=describe_constraint(constraint)),
            ))
        else:
            matching = [o.id for o in options
                        if satisfies(constraint, o.attributes, ordinal_orders=orders)]
            reduce_highlights.append(AdaptationAction(
                kind="highlight",
                params={"optionIds": tuple(matching), "intent": "reduce"},
                linked_preference_ids=(record.id,),
                banner=_BANNERS["highlightReduce"].format(desc=describe_constraint(constraint)),
            ))

    visible = list(options)
    for action in filters:
        constraint = action.params["constraint"]
        visible = [o for o in visible if satisfies(constraint, o.attributes, ordinal_orders=orders)]

    spec_map = {s.name: s for s in stage.attribute_specs}
    sort_keys: list[tuple[str, str, AttributeSpec | None]] = []
    sort_record_ids: list[str] = []
    for record in soft:
        objective = record.objective
        if objective is not None and objective.direction is not None:
            attr = objective.attribute
            spec = spec_map.get(attr)
            if spec is None or spec.kind not in ("numeric", "ordinal"):
                logger.warning("stage %s: record %s sorts non-orderable attribute %r",
                               stage.id, record.id, attr)
                continue
            direction = "asc" if objective.direction == "minimize" else "desc"
            end = "lowest" if direction == "asc" else "highest"
            sorts.append(AdaptationAction(
                kind="sort",
                params={"attribute": attr, "direction": direction},
                linked_preference_ids=(record.id,),
                banner=_BANNERS["sort"].format(attr=attr, end=end),
            ))
            sort_keys.append((attr, direction, spec_map.get(attr)))
            sort_record_ids.append(record.id)
            continue
        if objective is not None:
            matching = [o.id for o in visible
                        if o.attributes.get(objective.attribute) in objective.prefer_set]
            desc = (f"{objective.attribute} is one of "
                    f"{', '.join(str(v) for v in sorted(objective.prefer_set, key=str))}")
        else:
            constraint = record.constraint
            matching = [o.id for o in visible
                        if satisfies(constraint, o.attributes, ordinal_orders=orders)]
            desc = describe_constraint(constraint)
        emphasize.append(AdaptationAction(
            kind="highlight",
            params={"optionIds": tuple(matching), "intent": "emphasize"},
            linked_preference_ids=(record.id,),
            banner=_BANNERS["highlightMatches"].format(desc=desc),
        ))

    final_highlight: list[AdaptationAction] = []
    if sort_keys and visible:
        key = _sort_key_fn(sort_keys)
        ranked = sorted(visible, key=key)
        best = key(ranked[0])
        optimal = [o.id for o in ranked if key(o) == best]
        final_highlight.append(AdaptationAction(
            kind="highlight",
            params={"optionIds": tuple(optimal), "intent": "emphasize"},
            linked_preference_ids=tuple(sort_record_ids),
            banner=_BANNERS["highlightEmphasize"],
        ))

    plan = filters + sorts + reduce_highlights + emphasize + final_highlight
    if not plan:
        return []
    augment = AdaptationAction(
        kind="augment",
        params={"attributes": tuple(augment_attrs)},
        linked_preference_ids=tuple(r.id for r in usable),
        banner=_BANNERS["augment"].format(attrs=", ".join(augment_attrs)),
    )
    return [augment] + plan


def apply(options: list[OptionItem], plan: list[AdaptationAction],
          specs: list[AttributeSpec] | tuple[AttributeSpec, ...] = ()) -> AdaptedView:
    """Execute a plan: augment relabels, filters hide (conjunction), sorts
    reorder stably from catalog order, highlights mark. An empty plan
    yields the identity view."""
    spec_map = {s.name: s for s in specs}
    orders = {s.name: list(s.order) for s in specs if s.kind == "ordinal"}

    augment_attrs: list[str] = []
    filter_constraints: list[Constraint] = []
    sort_keys: list[tuple[str, str, AttributeSpec | None]] = []
    highlighted: set[str] = set()
    for action in plan:
        if action.kind == "augment":
            augment_attrs.extend(action.params["attributes"])
        elif action.kind == "filter":
            filter_constraints.append(action.params["constraint"])
        elif action.kind == "sort":
            sort_keys.append((action.params["attribute"], action.params["direction"],
                              spec_map.get(action.params["attribute"])))
        elif action.kind == "highlight":
            highlighted.update(action.params["optionIds"])

    all_ordered = list(options)
    if sort_keys:
        all_ordered = sorted(all_ordered, key=_sort_key_fn(sort_keys))

    def passes(option: OptionItem) -> bool:
        return all(satisfies(c, option.attributes, ordinal_orders=orders)
                   for c in filter_constraints)

    visible = [o for o in all_ordered if passes(o)]
    non_matching = frozenset(o.id for o in options if not passes(o))

    labels = {o.id: render_label(o, augment_attrs, list(specs)) for o in options}

    return AdaptedView(
        visible=tuple(visible),
        labels=labels,
        highlighted=frozenset(highlighted),
        hidden_count=len(options) - len(visible),
        show_all_engaged=False,
        applied_actions=tuple(plan),
        all_ordered=tuple(all_ordered),
        non_matching=non_matching,
    )


def show_all(view: AdaptedView) -> AdaptedView:
    """Reveal filtered-out options at their sorted positions, marked
    non-matching; highlights and the underlying records are untouched."""
    return replace(view, visible=view.all_ordered, hidden_count=0, show_all_engaged=True)


# --- serialization ------------------------------------------------------------


def action_to_dict(action: AdaptationAction) -> dict:
    params = dict(action.params)
    if "constraint" in params:
        params["constraint"] = constraint_to_dict(params["constraint"])
    if "optionIds" in params:
        params["optionIds"] = list(params["optionIds"])
    if "attributes" in params:
        params["attributes"] = list(params["attributes"])
    return {
        "kind": action.kind,
        "params": params,
        "linkedPreferenceIds": list(action.linked_preference_ids),
        "banner": action.banner,
    }


def view_to_dict(view: AdaptedView) -> dict:
    return {
        "visible": [o.id for o in view.visible],
        "labels": dict(sorted(view.labels.items())),
        "highlighted": sorted(view.highlighted),
        "hiddenCount": view.hidden_count,
        "showAllEngaged": view.show_all_engaged,
        "nonMatching": sorted(view.non_matching),
        "allOrdered": [o.id for o in view.all_ordered],
        "appliedActions": [action_to_dict(a) for a in view.applied_actions],
    }
