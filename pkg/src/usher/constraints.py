"""Machine-evaluable constraints and objectives attached to preference records.

A Constraint is a predicate over a single option's attribute map. Hard
preferences compile to constraints; soft preferences compile to either a
constraint (satisfy-if-possible) or an Objective (rank by an attribute).
Named predicates cover requirements that read more than one attribute
(seat adjacency, show windows) and are drawn from a fixed registry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

COMPARATORS = {"eq", "neq", "le", "ge", "between", "inSet", "predicate", "and", "or"}

# Attribute each named predicate reads. "time" is the start of a show in
# minutes from midnight; "endTime" its end.
PREDICATES = {
    "adjacentSeats": ("adjacent", "count"),
    "startsAfter": ("time",),
    "endsBy": ("endTime",),
    "tierIs": ("tier",),
    "countIs": ("count",),
}


class ConstraintError(ValueError):
    """Malformed constraint or objective."""


@dataclass(frozen=True)
class PredicateCall:
    name: str
    args: tuple[Any, ...] = ()

    def __post_init__(self) -> None:
        if self.name not in PREDICATES:
            raise ConstraintError(f"unknown predicate {self.name!r}")


@dataclass(frozen=True)
class Constraint:
    """One condition on an option. `attribute` anchors the constraint for
    overlap bookkeeping; compound (and/or) constraints keep the anchor of
    their first part."""

    attribute: str
    comparator: str
    value: Any = None
    parts: tuple["Constraint", ...] = field(default=())

    def __post_init__(self) -> None:
        if self.comparator not in COMPARATORS:
            raise ConstraintError(f"unknown comparator {self.comparator!r}")
        if self.comparator in ("and", "or"):
            if len(self.parts) < 2:
                raise ConstraintError(f"{self.comparator} needs at least two parts")
        elif self.parts:
            raise ConstraintError("parts only allowed on and/or constraints")
        elif self.comparator == "predicate" and not isinstance(self.value, PredicateCall):
            raise ConstraintError("predicate comparator needs a PredicateCall value")
        elif self.comparator == "between" and (
            not isinstance(self.value, (tuple, list)) or len(self.value) != 2
        ):
            raise ConstraintError("between needs a (low, high) pair")

    def attributes_read(self) -> set[str]:
        """Every attribute this constraint inspects on an option."""
        if self.comparator in ("and", "or"):
            out: set[str] = set()
            for part in self.parts:
                out |= part.attributes_read()
            return out
        if self.comparator == "predicate":
            return set(PREDICATES[self.value.name])
        return {self.attribute}

    @staticmethod
    def all_of(parts: list["Constraint"]) -> "Constraint":
        if len(parts) == 1:
            return parts[0]
        return Constraint(parts[0].attribute, "and", parts=tuple(parts))

    @staticmethod
    def any_of(parts: list["Constraint"]) -> "Constraint":
        if len(parts) == 1:
            return parts[0]
        return Constraint(parts[0].attribute, "or", parts=tuple(parts))


@dataclass(frozen=True)
class Objective:
    """Soft ranking target: minimize/maximize a numeric or ordinal attribute,
    or prefer a value set on a categorical/boolean one."""

    attribute: str
    direction: str | None = None  # "minimize" | "maximize"
    prefer_set: frozenset | None = None

    def __post_init__(self) -> None:
        if (self.direction is None) == (self.prefer_set is None):
            raise ConstraintError("objective needs exactly one of direction/preferSet")
        if self.direction is not None and self.direction not in ("minimize", "maximize"):
            raise ConstraintError(f"bad direction {self.direction!r}")


def _eval_predicate(call: PredicateCall, attrs: dict[str, Any]) -> bool:
    name, args = call.name, call.args
    if name == "adjacentSeats":
        return bool(attrs.get("adjacent")) and attrs.get("count") == args[0]
    if name == "startsAfter":
        t = attrs.get("time")
        return t is not None and t > args[0]
    if name == "endsBy":
        t = attrs.get("endTime")
        return t is not None and t <= args[0]
    if name == "tierIs":
        return attrs.get("tier") == args[0]
    if name == "countIs":
        return attrs.get("count") == args[0]
    raise ConstraintError(f"unknown predicate {name!r}")


def satisfies(constraint: Constraint, attrs: dict[str, Any], *, ordinal_orders: dict[str, list] | None = None) -> bool:
    """True when the option with attribute map `attrs` meets the constraint.

    `ordinal_orders` maps attribute name to its declared value order so
    le/ge work on ordinal attributes; missing attributes fail the check.
    """
    c = constraint
    if c.comparator == "and":
        return all(satisfies(p, attrs, ordinal_orders=ordinal_orders) for p in c.parts)
    if c.comparator == "or":
        return any(satisfies(p, attrs, ordinal_orders=ordinal_orders) for p in c.parts)
    if c.comparator == "predicate":
        return _eval_predicate(c.value, attrs)

    if c.attribute not in attrs:
        return False
    actual = attrs[c.attribute]
    if c.comparator == "eq":
        return actual == c.value
    if c.comparator == "neq":
        return actual != c.value
    if c.comparator == "inSet":
        return actual in set(c.value)
    if c.comparator in ("le", "ge"):
        order = (ordinal_orders or {}).get(c.attribute)
        if order is not None:
            if actual not in order or c.value not in order:
                return False
            a, b = order.index(actual), order.index(c.value)
        else:
            a, b = actual, c.value
        return a <= b if c.comparator == "le" else a >= b
    if c.comparator == "between":
        low, high = c.value
        return low <= actual <= high
    raise ConstraintError(f"unknown comparator {c.comparator!r}")


def compare_scope(old: Constraint, new: Constraint) -> str:
    """Best-effort scope comparison between two constraints on the same
    attribute: 'wider', 'narrower', 'same', or 'incomparable'.

    Used to label replacements as relaxed/strengthened. Only same-shape
    pairs are compared; anything else is incomparable.
    """
    if old == new:
        return "same"
    if old.attribute != new.attribute:
        return "incomparable"
    if old.comparator == new.comparator == "inSet":
        o, n = set(old.value), set(new.value)
        if o == n:
            return "same"
        if o < n:
            return "wider"
        if n < o:
            return "narrower"
        return "incomparable"
    if old.comparator == "eq" and new.comparator == "inSet" and old.value in set(new.value):
        return "wider"
    if old.comparator == "inSet" and new.comparator == "eq" and new.value in set(old.value):
        return "narrower"
    if old.comparator == new.comparator == "le":
        return "wider" if new.value > old.value else "narrower"
    if old.comparator == new.comparator == "ge":
        return "wider" if new.value < old.value else "narrower"
    if old.comparator == new.comparator == "between":
        ol, oh = old.value
        nl, nh = new.value
        if nl <= ol and nh >= oh:
            return "wider"
        if nl >= ol and nh <= oh:
            return "narrower"
        return "incomparable"
    return "incomparable"


# --- serialization ---------------------------------------------------------

def constraint_to_dict(c: Constraint) -> dict:
    if c.comparator in ("and", "or"):
        return {"attribute": c.attribute, "comparator": c.comparator,
                "parts": [constraint_to_dict(p) for p in c.parts]}
    if c.comparator == "predicate":
        return {"attribute": c.attribute, "comparator": "predicate",
                "predicate": c.value.name, "args": list(c.value.args)}
    value = c.value
    if isinstance(value, frozenset):
        value = sorted(value)
    elif isinstance(value, tuple):
        value = list(value)
    return {"attribute": c.attribute, "comparator": c.comparator, "value": value}


def constraint_from_dict(doc: dict) -> Constraint:
    try:
        comparator = doc["comparator"]
        attribute = doc["attribute"]
    except KeyError as exc:
        raise ConstraintError(f"constraint missing key {exc}") from exc
    if comparator in ("and", "or"):
        parts = tuple(constraint_from_dict(p) for p in doc.get("parts", []))
        return Constraint(attribute, comparator, parts=parts)
    if comparator == "predicate":
        return Constraint(attribute, "predicate",
                          PredicateCall(doc["predicate"], tuple(doc.get("args", []))))
    value = doc.get("value")
    if comparator == "inSet":
        value = frozenset(value)
    elif comparator == "between":
        value = tuple(value)
    return Constraint(attribute, comparator, value)


def objective_to_dict(o: Objective) -> dict:
    if o.direction is not None:
        return {"attribute": o.attribute, "direction": o.direction}
    return {"attribute": o.attribute, "preferSet": sorted(o.prefer_set)}


def objective_from_dict(doc: dict) -> Objective:
    if "direction" in doc:
        return Objective(doc["attribute"], direction=doc["direction"])
    if "preferSet" in doc:
        return Objective(doc["attribute"], prefer_set=frozenset(doc["preferSet"]))
    raise ConstraintError("objective needs direction or preferSet")
