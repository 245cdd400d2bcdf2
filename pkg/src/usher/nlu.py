"""Utterance understanding: preference extraction and classification.

Two providers share one contract. The rules provider is a deterministic
pattern grammar over the scenario's attribute vocabulary, built so headless
runs need no network; the remote provider speaks a chat-completion wire
format with tool schemas and degrades to the rules provider on failure.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

import httpx

from .catalog import Scenario, StageDef
from .constraints import Constraint, Objective, PredicateCall
from .preferences import PreferenceMemory, PreferenceRecord

logger = logging.getLogger(__name__)

CLASSES = ("preferenceStatement", "informationSeeking", "actionRequest", "other")


@dataclass(frozen=True)
class Utterance:
    text: str
    turn_index: int
    channel: str = "chat"  # "chat" | "guiAction"


@dataclass(frozen=True)
class ExtractionResult:
    records: tuple[PreferenceRecord, ...]
    utterance_class: str
    provider_trace: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ProviderConfig:
    kind: str = "rules"                # "rules" | "remote"
    endpoint: str | None = None
    model: str | None = None
    timeout: float = 10.0
    retry_limit: int = 2

    def __post_init__(self) -> None:
        if self.kind not in ("rules", "remote"):
            raise ValueError(f"bad provider kind {self.kind!r}")
        if self.kind == "remote" and not self.endpoint:
            raise ValueError("remote provider requires an endpoint")


@dataclass(frozen=True)
class ExtractionContext:
    scenario: Scenario
    stage: StageDef
    memory: PreferenceMemory


# --- shared vocabulary -------------------------------------------------------

HARD_CUES = re.compile(r"\b(must|only|need|needs|needed|require|requires|have to|has to)\b", re.I)
SOFT_CUES = re.compile(
    r"\b(prefer|preferably|preferring|preferred|ideally|want|wants|would like|"
    r"wish|hope|rather|better|if possible)\b", re.I)
NEGATIVE_CUES = re.compile(r"\b(too|not|no|never|avoid|cannot|can't|won't|don't)\b", re.I)
NAV_PHRASES = re.compile(
    r"\b(go back|take me back|going back|show all|show everything|submit|"
    r"undo|start over|continue|next stage|proceed)\b|^back\b", re.I)
AFFIRMATIVES = {"yes", "yes please", "yeah", "yep", "sure", "ok", "okay", "sounds good",
                "go ahead", "do it", "please do", "that works", "perfect"}
NEGATIVES = {"no", "nope", "no thanks", "not now", "no thank you", "negative",
             "don't", "do not", "stop"}

MONTHS = {m: i + 1 for i, m in enumerate(
    ["january", "february", "march", "april", "may", "june", "july",
     "august", "september", "october", "november", "december"])}
_MONTH3 = {m[:3]: m for m in MONTHS}

DATE_RE = re.compile(
    r"\b(january|february|march|april|may|june|july|august|september|october|"
    r"november|december|jan|feb|mar|apr|jun|jul|aug|sep|oct|nov|dec)\.?\s+"
    r"(\d{1,2})(?:st|nd|rd|th)?\b", re.I)
WEEKDAY_RE = re.compile(r"\b(monday|tuesday|wednesday|thursday|friday|saturday|sunday)\b", re.I)
CLOCK_RE = re.compile(r"\b(\d{1,2})(?::(\d{2}))?\s*(am|pm)\b", re.I)
RATING_RE = re.compile(r"\b(PG-13|PG|G|R|NC-17)\b")

STATIC_GENRES = ("cult comedy", "romantic comedy", "blockbuster", "romance", "comedy",
                 "horror", "drama", "thriller", "documentary", "animation", "action")

QUESTION_START = re.compile(
    r"^(how|what|when|where|which|who|why|is|are|does|do|can you tell|tell me)\b", re.I)


def parse_clock(text: str) -> int | None:
    m = CLOCK_RE.search(text)
    if not m:
        return None
    hour = int(m.group(1)) % 12
    minute = int(m.group(2) or 0)
    if m.group(3).lower() == "pm":
        hour += 12
    return hour * 60 + minute


def date_code(month_word: str, day: int) -> str:
    month = _MONTH3.get(month_word.lower()[:3], month_word.lower())
    return f"{month[:3]}{day}"


def is_affirmative(text: str) -> bool:
    return text.strip().lower().rstrip(".!") in AFFIRMATIVES


def is_negative(text: str) -> bool:
    return text.strip().lower().rstrip(".!") in NEGATIVES


def classify_text(text: str) -> str:
    """Deterministic utterance class; usable without interface context."""
    stripped = text.strip()
    if not stripped:
        return "other"
    if is_affirmative(stripped) or is_negative(stripped):
        return "actionRequest"
    if NAV_PHRASES.search(stripped):
        return "actionRequest"
    if HARD_CUES.search(stripped) or SOFT_CUES.search(stripped) or re.search(
            r"\b(closer|closest|shorter|shortest|earlier|earliest)\b", stripped, re.I):
        return "preferenceStatement"
    if stripped.endswith("?") or QUESTION_START.search(stripped):
        return "informationSeeking"
    if DATE_RE.search(stripped) or CLOCK_RE.search(stripped):
        return "actionRequest"
    if len(stripped.split()) <= 4:
        # Terse non-sentences are treated as selection attempts.
        return "actionRequest"
    return "other"


# --- rules extraction --------------------------------------------------------


class _RecordBuilder:
    def __init__(self, utterance: Utterance, context: ExtractionContext) -> None:
        self.utterance = utterance
        self.context = context
        self.seq = 0
        self.records: list[tuple[int, PreferenceRecord]] = []

    def _stages_for(self, attrs: set[str], anchor: str) -> tuple[str, ...]:
        workflow = self.context.scenario.workflow
        full = [s.id for s in workflow.stages
                if attrs <= {a.name for a in s.attribute_specs}]
        if full:
            return tuple(full)
        partial = [s.id for s in workflow.stages
                   if anchor in {a.name for a in s.attribute_specs}]
        if partial:
            return tuple(partial)
        return (self.context.stage.id,)

    def add_constraint(self, position: int, description: str, strength: str,
                       constraint: Constraint) -> None:
        self.seq += 1
        stages = self._stages_for(constraint.attributes_read(), constraint.attribute)
        record = PreferenceRecord(
            id=f"p{self.utterance.turn_index}.{self.seq}",
            description=description.strip(" ,."),
            strength=strength,
            relevant_stages=stages,
            compiled=constraint,
            origin_turn=self.utterance.turn_index,
        )
        self.records.append((position, record))

    def add_objective(self, position: int, description: str, objective: Objective) -> None:
        # Objectives are satisfy-if-possible by definition; always soft.
        self.seq += 1
        stages = self._stages_for({objective.attribute}, objective.attribute)
        record = PreferenceRecord(
            id=f"p{self.utterance.turn_index}.{self.seq}",
            description=description.strip(" ,."),
            strength="soft",
            relevant_stages=stages,
            compiled=objective,
            origin_turn=self.utterance.turn_index,
        )
        self.records.append((position, record))

    def ordered(self) -> tuple[PreferenceRecord, ...]:
        ranked = sorted(self.records, key=lambda pr: pr[0])
        out: list[PreferenceRecord] = []
        renumbered = 0
        for _, record in ranked:
            renumbered += 1
            out.append(PreferenceRecord(
                id=f"p{self.utterance.turn_index}.{renumbered}",
                description=record.description,
                strength=record.strength,
                relevant_stages=record.relevant_stages,
                compiled=record.compiled,
                origin_turn=record.origin_turn,
            ))
        return tuple(out)


def _clause_strength(clause: str, default: str) -> str:
    if HARD_CUES.search(clause):
        return "hard"
    if SOFT_CUES.search(clause):
        return "soft"
    return default


def _split_clauses(text: str) -> list[str]:
    parts = re.split(r"(?:---|—|;|\.|!|\?)|,\s*(?=(?:and\s+)?(?:i\s|but\s|preferably|"
                     r"preferring|ideally|not\s))|\bbut\b", text, flags=re.I)
    return [p.strip() for p in parts if p and p.strip()]


def _categorical_lexicon(scenario: Scenario) -> list[tuple[str, str, str]]:
    """(term, attribute, value) for every categorical value in the catalog,
    longest terms first, plus a static genre vocabulary."""
    entries: list[tuple[str, str, str]] = []
    seen: set[tuple[str, str, str]] = set()
    for stage in scenario.workflow.stages:
        categorical = {s.name for s in stage.attribute_specs if s.kind == "categorical"}
        skip = {"date", "weekday", "day"}  # handled by the date/time grammar
        for item in scenario.items.get(stage.id, ()):
            for name, value in item.attributes.items():
                # Very short values (seat rows, codes) collide with ordinary
                # words and never read as spoken preferences.
                if (name in categorical and name not in skip
                        and isinstance(value, str) and len(value) >= 3):
                    entry = (value.lower(), name, value)
                    if entry not in seen:
                        seen.add(entry)
                        entries.append(entry)
    for genre in STATIC_GENRES:
        entry = (genre, "genre", genre)
        if entry not in seen:
            seen.add(entry)
            entries.append(entry)
    entries.sort(key=lambda e: (-len(e[0]), e[0]))
    return entries


def _boolean_attributes(scenario: Scenario) -> set[str]:
    out = set()
    for stage in scenario.workflow.stages:
        for spec in stage.attribute_specs:
            if spec.kind == "boolean":
                out.add(spec.name)
    return out


def _extract_time_window(text: str, builder: _RecordBuilder, default_strength: str) -> bool:
    """Show-window requirements, optionally scoped per weekday:
    'start after T', 'end by T', 'home by T', 'morning show'. Returns True
    when a window record was produced (its day names are scoping, not date
    restrictions)."""
    segments = re.split(r",\s*and\s+(?=on\s+(?:monday|tuesday|wednesday|thursday|friday|"
                        r"saturday|sunday)\b)", text, flags=re.I)
    groups: list[tuple[str | None, list[Constraint]]] = []
    position = len(text)
    strength = default_strength
    for segment in segments:
        parts: list[Constraint] = []
        after = re.search(r"\b(?:start\w*|begin\w*)\s+(?:\w+\s+)?after\s+"
                          r"(\d{1,2}(?::\d{2})?\s*(?:am|pm))", segment, re.I)
        if after:
            minutes = parse_clock(after.group(1))
            parts.append(Constraint("time", "predicate", PredicateCall("startsAfter", (minutes,))))
            position = min(position, text.find(after.group(0)))
        by = re.search(r"\b(?:end\w*|home|done|back|finish\w*)\s+by\s+"
                       r"(\d{1,2}(?::\d{2})?\s*(?:am|pm))", segment, re.I)
        if by:
            minutes = parse_clock(by.group(1))
            parts.append(Constraint("endTime", "predicate", PredicateCall("endsBy", (minutes,))))
            position = min(position, text.find(by.group(0)))
        if re.search(r"\bmorning\b", segment, re.I):
            parts.append(Constraint("time", "le", 690))
            position = min(position, text.lower().find("morning"))
        if not parts:
            continue
        day = WEEKDAY_RE.search(segment)
        groups.append((day.group(1).lower()[:3] if day else None, parts))
        if HARD_CUES.search(segment):
            strength = "hard"
    if not groups:
        return False
    anchor = "endTime" if any(
        "endTime" in p.attributes_read() for _, parts in groups for p in parts
    ) else "time"
    alternatives: list[Constraint] = []
    for day, parts in groups:
        if day is not None:
            parts = [Constraint("day", "eq", day)] + parts
        if len(parts) == 1:
            alternatives.append(parts[0])
        else:
            alternatives.append(Constraint(anchor, "and", parts=tuple(parts)))
    if len(alternatives) == 1:
        constraint = alternatives[0]
    else:
        constraint = Constraint(anchor, "or", parts=tuple(alternatives))
    builder.add_constraint(position, text, strength, constraint)
    return True


def _extract_seats(text: str, builder: _RecordBuilder, default_strength: str,
                   tier_values: set[str]) -> None:
    lowered = text.lower()
    if not re.search(r"\bseat", lowered):
        return
    parts: list[Constraint] = []
    counts = {"two": 2, "2": 2, "three": 3, "3": 3, "four": 4, "4": 4, "a pair of": 2}
    count = None
    for word, n in counts.items():
        if re.search(rf"\b{word}\b", lowered):
            count = n
            break
    adjacent = bool(re.search(r"\b(adjacent|together|next to each other|side by side)\b", lowered))
    if adjacent:
        parts.append(Constraint("adjacent", "predicate",
                                PredicateCall("adjacentSeats", (count or 2,))))
    elif count:
        parts.append(Constraint("count", "predicate", PredicateCall("countIs", (count,))))

    back = re.search(r"\b(not in the back|away from the back|no back rows?)\b", lowered)
    if back:
        parts.append(Constraint("backRow", "eq", False))
    elif re.search(r"\bin the back\b", lowered):
        parts.append(Constraint("backRow", "eq", True))

    for fragment in re.split(r"---|—|–|;|,|\s-\s", text):
        if NEGATIVE_CUES.search(fragment):
            continue
        for tier in sorted(tier_values):
            if re.search(rf"\b{re.escape(tier)}\b", fragment, re.I):
                parts.append(Constraint("tier", "predicate", PredicateCall("tierIs", (tier,))))
                break
        else:
            continue
        break

    if not parts:
        return
    position = lowered.find("seat")
    builder.add_constraint(position, text, _clause_strength(text, default_strength),
                           Constraint.all_of(parts))


def _extract_dates(text: str, builder: _RecordBuilder, default_strength: str,
                   skip_weekday_only: bool = False) -> None:
    mentions: list[tuple[int, str]] = []
    for m in DATE_RE.finditer(text):
        mentions.append((m.start(), date_code(m.group(1), int(m.group(2)))))
    if mentions:
        codes = list(dict.fromkeys(code for _, code in mentions))
        feasible_phrasing = re.search(r"\b(also works|works|can go|could go|available)\b",
                                      text, re.I) or len(codes) > 1
        strength = _clause_strength(text, default_strength)
        if feasible_phrasing or strength == "hard":
            builder.add_constraint(mentions[0][0], text, "hard",
                                   Constraint("date", "inSet", frozenset(codes)))
        else:
            builder.add_objective(mentions[0][0], text,
                                  Objective("date", prefer_set=frozenset(codes)))
        preferred = re.search(r"\bprefer(?:red|ably)?\s+((?:\w+,?\s+){0,3}?)"
                              r"(monday|tuesday|wednesday|thursday|friday|saturday|sunday)",
                              text, re.I)
        if preferred:
            day = preferred.group(2).title()[:3]
            builder.add_objective(preferred.start(), preferred.group(0),
                                  Objective("weekday", prefer_set=frozenset({day})))
        return

    # Weekday-only phrasing ("I prefer Friday").
    if skip_weekday_only:
        return
    days = [(m.start(), m.group(1).title()[:3]) for m in WEEKDAY_RE.finditer(text)]
    if not days:
        return
    codes = list(dict.fromkeys(d for _, d in days))
    strength = _clause_strength(text, default_strength)
    if strength == "hard":
        builder.add_constraint(days[0][0], text, "hard",
                               Constraint("weekday", "inSet", frozenset(codes)))
    else:
        builder.add_objective(days[0][0], text, Objective("weekday", prefer_set=frozenset(codes)))


def _extract_rating(clause: str, offset: int, builder: _RecordBuilder, strength: str) -> None:
    values = [m.group(1) for m in RATING_RE.finditer(clause)]
    if not values:
        return
    lowered = clause.lower()
    position = offset + clause.find(values[0])
    if re.search(r"\bor (below|lower|less)\b", lowered) or "at most" in lowered:
        builder.add_constraint(position, clause, strength, Constraint("rating", "le", values[-1]))
    else:
        builder.add_constraint(position, clause, strength,
                               Constraint("rating", "inSet", frozenset(values)))


def extract_rules(utterance: Utterance, context: ExtractionContext) -> ExtractionResult:
    """Deterministic extraction: same input, same output, across runs."""
    text = utterance.text
    utterance_class = classify_text(text)
    if utterance.channel != "chat" or utterance_class != "preferenceStatement":
        return ExtractionResult(records=(), utterance_class=utterance_class,
                                provider_trace={"provider": "rules"})

    builder = _RecordBuilder(utterance, context)
    scenario = context.scenario
    lexicon = _categorical_lexicon(scenario)
    booleans = _boolean_attributes(scenario)
    tier_values = {value for _, attr, value in lexicon if attr == "tier"}
    tier_values |= {"premium", "standard"}

    window_found = _extract_time_window(text, builder, "soft")
    _extract_seats(text, builder, "soft", tier_values)
    _extract_dates(text, builder, "soft", skip_weekday_only=window_found)

    consumed: list[tuple[int, int]] = []

    def overlaps(start: int, end: int) -> bool:
        return any(not (end <= s or start >= e) for s, e in consumed)

    clauses = _split_clauses(text)
    default = "soft"
    for clause in clauses:
        offset = text.find(clause)
        strength = _clause_strength(clause, default)
        default = strength
        _extract_rating(clause, offset, builder, strength)

        if NEGATIVE_CUES.search(clause):
            continue

        lowered_clause = clause.lower()
        for term, attr, value in lexicon:
            if attr == "tier":
                continue  # seat grammar owns tiers
            m = re.search(rf"\b{re.escape(term)}\b", lowered_clause)
            if not m:
                continue
            start, end = offset + m.start(), offset + m.end()
            if overlaps(start, end):
                continue
            consumed.append((start, end))
            if strength == "hard":
                builder.add_constraint(start, clause, "hard", Constraint(attr, "eq", value))
            else:
                builder.add_objective(start, clause, Objective(attr, prefer_set=frozenset({value})))

        for name in sorted(booleans - {"adjacent", "backRow"}):
            m = re.search(rf"\b{re.escape(name)}\b", lowered_clause)
            if m:
                # Amenity mentions read as requirements regardless of hedging.
                builder.add_constraint(offset + m.start(), clause, "hard",
                                       Constraint(name, "eq", True))

        if re.search(r"\bsingle[- ]screen\b", lowered_clause):
            builder.add_constraint(offset + lowered_clause.find("single"), clause,
                                   _clause_strength(clause, "hard"),
                                   Constraint("screens", "eq", 1))

        m = re.search(r"\b(closer|closest|nearby|near|close by)\b", lowered_clause)
        if m:
            builder.add_objective(offset + m.start(), clause,
                                  Objective("distance", direction="minimize"))
        m = re.search(r"\b(shorter|shortest)\b", lowered_clause)
        if m:
            builder.add_objective(offset + m.start(), clause,
                                  Objective("runtime", direction="minimize"))
        m = re.search(r"\b(longer|longest)\b", lowered_clause)
        if m:
            builder.add_objective(offset + m.start(), clause,
                                  Objective("runtime", direction="maximize"))
        lower = re.search(r"\b(lower|lowest)[- ]rated\b", lowered_clause)
        higher = re.search(r"\b(higher|highest)[- ]rated\b", lowered_clause)
        if lower and higher:
            # "prefer the lower-rated one over the higher-rated one": the
            # earlier mention is the preference, the later the baseline.
            if lower.start() < higher.start():
                higher = None
            else:
                lower = None
        if lower:
            builder.add_objective(offset + lower.start(), clause,
                                  Objective("audienceScore", direction="minimize"))
        if higher:
            builder.add_objective(offset + higher.start(), clause,
                                  Objective("audienceScore", direction="maximize"))
        m = re.search(r"\b(earlier|earliest)\b", lowered_clause)
        if m and re.search(r"\b(show|showtime|time|start)\b", lowered_clause):
            builder.add_objective(offset + m.start(), clause,
                                  Objective("time", direction="minimize"))

    records = builder.ordered()
    return ExtractionResult(records=records, utterance_class=utterance_class,
                            provider_trace={"provider": "rules"})


# --- remote provider ---------------------------------------------------------


def _tool_schemas() -> list[dict]:
    return [
        {
            "type": "function",
            "function": {
                "name": "extract_preferences",
                "description": "Record the preferences expressed in the user's message.",
                "parameters": {
                    "type": "object",
                    "properties": {
                        "records": {
                            "type": "array",
                            "items": {
                                "type": "object",
                                "properties": {
                                    "description": {"type": "string"},
                                    "strength": {"type": "string", "enum": ["hard", "soft"]},
                                    "relevantStages": {"type": "array", "items": {"type": "string"}},
                                    "compiled": {"type": "object"},
                                },
                                "required": ["description", "strength", "relevantStages", "compiled"],
                            },
                        }
                    },
                    "required": ["records"],
                },
            },
        },
        {
            "type": "function",
            "function": {
                "name": "classify_utterance",
                "description": "Label the user's message with its functional class.",
                "parameters": {
                    "type": "object",
                    "properties": {"utteranceClass": {"type": "string", "enum": list(CLASSES)}},
                    "required": ["utteranceClass"],
                },
            },
        },
    ]


def _context_block(context: ExtractionContext) -> str:
    stage = context.stage
    lines = [
        f"workflow stages: {', '.join(context.scenario.workflow.stage_ids())}",
        f"current stage: {stage.id}",
        "stage attributes: " + ", ".join(
            f"{s.name} ({s.kind})" for s in stage.attribute_specs),
        "active preferences: " + json.dumps(
            [r.description for r in context.memory.active_records()]),
    ]
    return "\n".join(lines)


def _remote_call(utterance: Utterance, context: ExtractionContext,
                 config: ProviderConfig) -> ExtractionResult:
    from .preferences import record_from_dict

    system = resources.files("usher").joinpath("templates/extract_system.txt").read_text()
    payload = {
        "model": config.model or "default",
        "messages": [
            {"role": "system", "content": system.format(context=_context_block(context))},
            {"role": "user", "content": utterance.text},
        ],
        "tools": _tool_schemas(),
    }
    response = httpx.post(f"{config.endpoint}/chat/completions", json=payload,
                          timeout=config.timeout)
    response.raise_for_status()
    body = response.json()
    records: list[PreferenceRecord] = []
    utterance_class = "other"
    for call in body["choices"][0]["message"].get("tool_calls", []):
        name = call["function"]["name"]
        args = json.loads(call["function"]["arguments"])
        if name == "extract_preferences":
            for i, doc in enumerate(args.get("records", []), start=1):
                doc = dict(doc)
                doc.setdefault("id", f"p{utterance.turn_index}.{i}")
                doc.setdefault("originTurn", utterance.turn_index)
                records.append(record_from_dict(doc))
        elif name == "classify_utterance":
            utterance_class = args.get("utteranceClass", "other")
            if utterance_class not in CLASSES:
                raise ValueError(f"bad class {utterance_class!r}")
    return ExtractionResult(records=tuple(records), utterance_class=utterance_class,
                            provider_trace={"provider": "remote", "model": config.model})


def extract(utterance: Utterance, context: ExtractionContext,
            config: ProviderConfig) -> ExtractionResult:
    """Extract preference records and the utterance class.

    GUI-action channel input never yields records. Remote failures retry up
    to the configured limit and then degrade to the rules provider; a turn
    always yields a result.
    """
    if utterance.channel != "chat":
        return ExtractionResult(records=(), utterance_class="actionRequest",
                                provider_trace={"provider": "none"})
    if config.kind == "rules":
        return extract_rules(utterance, context)

    last_error: Exception | None = None
    for _ in range(max(1, config.retry_limit)):
        try:
            return _remote_call(utterance, context, config)
        except Exception as exc:  # transport, schema, or parse failure
            last_error = exc
            logger.warning("remote provider failed: %s", exc)
    fallback = extract_rules(utterance, context)
    trace = dict(fallback.provider_trace)
    trace.update({"provider": "rules", "degraded": True, "error": str(last_error)})
    return ExtractionResult(records=fallback.records,
                            utterance_class=fallback.utterance_class,
                            provider_trace=trace)


def classify_only(utterance: Utterance, config: ProviderConfig) -> str:
    """Label an utterance without synthesizing records."""
    if config.kind == "rules":
        return classify_text(utterance.text)
    try:
        system = resources.files("usher").joinpath("templates/classify_system.txt").read_text()
        payload = {
            "model": config.model or "default",
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": utterance.text},
            ],
            "tools": _tool_schemas()[1:],
        }
        response = httpx.post(f"{config.endpoint}/chat/completions", json=payload,
                              timeout=config.timeout)
        response.raise_for_status()
        body = response.json()
        for call in body["choices"][0]["message"].get("tool_calls", []):
            if call["function"]["name"] == "classify_utterance":
                label = json.loads(call["function"]["arguments"])["utteranceClass"]
                if label in CLASSES:
                    return label
        raise ValueError("no classification tool call in response")
    except Exception as exc:
        logger.warning("remote classify failed, using rules: %s", exc)
        return classify_text(utterance.text)


QUESTION_ATTR_HINTS = [
    (re.compile(r"\b(long|runtime|duration)\b", re.I), "runtime"),
    (re.compile(r"\b(far|distance|close|miles?)\b", re.I), "distance"),
    (re.compile(r"\b(rated|rating)\b", re.I), "rating"),
    (re.compile(r"\b(genre|kind of movie)\b", re.I), "genre"),
    (re.compile(r"\b(end|ends|over)\b", re.I), "endTime"),
    (re.compile(r"\b(screens?)\b", re.I), "screens"),
    (re.compile(r"\b(imax)\b", re.I), "imax"),
]


def question_attribute(text: str, stage: StageDef) -> str | None:
    """Attribute a factual question is asking about, if the stage carries it."""
    names = {s.name for s in stage.attribute_specs}
    for pattern, attr in QUESTION_ATTR_HINTS:
        if pattern.search(text) and attr in names:
            return attr
    return None
