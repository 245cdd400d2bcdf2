#!/usr/bin/env python3
"""Regenerate the bundled scenario files in src/usher/scenarios/.

Seat-stage options are derived from the grids (adjacent free pairs, same
row, consecutive columns) so option attributes always match the grid.
Output is deterministic; run from the repository root:

    python tools/build_scenarios.py
"""

from __future__ import annotations

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "src" / "usher" / "scenarios"


def seat_stage(stage_id: str = "seat") -> dict:
    return {
        "id": stage_id,
        "title": "Select Seats",
        "uiKind": "seatMap",
        "filterable": False,
        "attributeSpecs": [
            {"name": "row", "kind": "categorical"},
            {"name": "tier", "kind": "categorical"},
            {"name": "count", "kind": "numeric"},
            {"name": "adjacent", "kind": "boolean", "unit": "Adjacent"},
            {"name": "backRow", "kind": "boolean", "unit": "Back Row"},
        ],
    }


def confirmation_stage() -> dict:
    return {"id": "confirm", "title": "Confirmation", "uiKind": "confirmation",
            "filterable": True, "attributeSpecs": []}


def grid(rows: list[tuple[str, str, bool, str]]) -> dict:
    """rows: (row id, tier, back, seat string with . free / X taken)."""
    return {"rows": [{"id": rid, "tier": tier, "back": back, "seats": seats}
                     for rid, tier, back, seats in rows]}


def pair_options(grid_doc: dict) -> list[dict]:
    """All adjacent free pairs in a grid, as seat-stage option items."""
    options = []
    for row in grid_doc["rows"]:
        seats = row["seats"]
        for i in range(len(seats) - 1):
            if seats[i] == "." and seats[i + 1] == ".":
                a, b = f"{row['id']}{i + 1}", f"{row['id']}{i + 2}"
                options.append({
                    "id": f"{a}+{b}",
                    "label": f"{a} & {b}",
                    "attributes": {
                        "row": row["id"],
                        "tier": row["tier"],
                        "count": 2,
                        "adjacent": True,
                        "backRow": bool(row["back"]),
                    },
                })
    return options


def build_seat_data(stage_grids: dict[str, dict]) -> dict:
    """Seat-stage options block (items + byPrefix) from per-prefix grids."""
    items: dict[str, dict] = {}
    by_prefix: dict[str, list[str]] = {}
    for prefix, grid_doc in stage_grids.items():
        ids = []
        for option in pair_options(grid_doc):
            existing = items.get(option["id"])
            if existing is not None and existing != option:
                raise SystemExit(f"seat option conflict for {option['id']}")
            items[option["id"]] = option
            ids.append(option["id"])
        if not ids:
            raise SystemExit(f"grid at {prefix!r} has no adjacent free pairs")
        by_prefix[prefix] = ids
    ordered = [items[k] for k in sorted(items)]
    return {"items": ordered, "byPrefix": by_prefix}


def write(name: str, doc: dict) -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    path = OUT_DIR / f"{name}.json"
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


# --- grids shared by the anniversary scenario --------------------------------

G_SOL = grid([
    ("A", "standard", False, "X..X.."),
    ("B", "standard", False, "..X..X"),
    ("C", "standard", False, ".X.X.X"),
    ("D", "premium", False, "XXX..X"),
    ("E", "premium", True, ".X.X.X"),
])
G_DEAD = grid([
    ("A", "standard", False, "..X.X."),
    ("B", "standard", False, "X..X.."),
    ("C", "standard", False, "XX..XX"),
    ("D", "premium", False, ".X.X.X"),
    ("E", "premium", True, "X.X.X."),
])
G_MIX = grid([
    ("A", "standard", False, "...X.."),
    ("B", "standard", False, "X..X.."),
    ("C", "standard", False, ".X..X."),
    ("D", "premium", False, "..X.X."),
    ("E", "premium", True, "X...X."),
])


def parents_anniversary() -> dict:
    movies = [
        {"id": "m_velvet", "label": "Velvet Waltz",
         "attributes": {"rating": "PG", "genre": "romance", "runtime": 118, "tone": "warm"}},
        {"id": "m_paper", "label": "Paper Lanterns",
         "attributes": {"rating": "PG-13", "genre": "romance", "runtime": 109, "tone": "warm"}},
        {"id": "m_glass", "label": "Glass Harbor",
         "attributes": {"rating": "R", "genre": "romance", "runtime": 126, "tone": "somber"}},
        {"id": "m_comet", "label": "Comet Diner",
         "attributes": {"rating": "PG-13", "genre": "comedy", "runtime": 101, "tone": "quirky"}},
        {"id": "m_iron", "label": "Iron Orchard",
         "attributes": {"rating": "PG-13", "genre": "drama", "runtime": 134, "tone": "somber"}},
    ]
    theaters = [
        {"id": "t_yorkville", "label": "Yorkville Cinema",
         "attributes": {"distance": 2.9, "screens": 7}},
        {"id": "t_empress", "label": "Empress 9",
         "attributes": {"distance": 6.4, "screens": 9}},
    ]
    dates = [
        {"id": "d_mar13", "label": "Mar 13", "attributes": {"date": "mar13", "weekday": "Fri"}},
        {"id": "d_mar14", "label": "Mar 14", "attributes": {"date": "mar14", "weekday": "Sat"}},
        {"id": "d_mar15", "label": "Mar 15", "attributes": {"date": "mar15", "weekday": "Sun"}},
    ]

    def show(tid, label, start, end, day):
        return {"id": tid, "label": label,
                "attributes": {"time": start, "endTime": end, "day": day}}

    times = [
        show("ts_fri_1800", "6:00 PM", 1080, 1210, "fri"),
        show("ts_sat_y1", "1:00 PM", 780, 910, "sat"),
        show("ts_sat_y2", "5:15 PM", 1035, 1165, "sat"),
        show("ts_sat_e1", "2:30 PM", 870, 1000, "sat"),
        show("ts_sat_e2", "8:30 PM", 1230, 1360, "sat"),
        show("ts_sun_e1", "10:30 AM", 630, 760, "sun"),
        show("ts_sun_e2", "7:00 PM", 1140, 1270, "sun"),
        show("ts_sat_y3", "4:45 PM", 1005, 1125, "sat"),
        show("ts_sun_y1", "1:30 PM", 810, 930, "sun"),
        show("ts_fri_1900", "7:00 PM", 1140, 1276, "fri"),
        show("ts_sat_y4", "6:00 PM", 1080, 1216, "sat"),
        show("ts_sat_e3", "5:00 PM", 1020, 1156, "sat"),
        show("ts_fri_e1", "5:30 PM", 1050, 1161, "fri"),
        show("ts_sun_e3", "11:00 AM", 660, 771, "sun"),
        show("ts_sat_y5", "4:30 PM", 990, 1134, "sat"),
        show("ts_sun_e4", "10:00 AM", 600, 744, "sun"),
    ]

    time_availability = {
        "movie:m_velvet/theater:t_yorkville/date:d_mar13": ["ts_fri_1800"],
        "movie:m_velvet/theater:t_yorkville/date:d_mar14": ["ts_sat_y1", "ts_sat_y2"],
        "movie:m_velvet/theater:t_empress/date:d_mar14": ["ts_sat_e1", "ts_sat_e2"],
        "movie:m_velvet/theater:t_empress/date:d_mar15": ["ts_sun_e1", "ts_sun_e2"],
        "movie:m_paper/theater:t_yorkville/date:d_mar14": ["ts_sat_y3"],
        "movie:m_paper/theater:t_yorkville/date:d_mar15": ["ts_sun_y1"],
        "movie:m_glass/theater:t_yorkville/date:d_mar13": ["ts_fri_1900"],
        "movie:m_glass/theater:t_yorkville/date:d_mar14": ["ts_sat_y4"],
        "movie:m_glass/theater:t_empress/date:d_mar14": ["ts_sat_e3"],
        "movie:m_comet/theater:t_empress/date:d_mar13": ["ts_fri_e1"],
        "movie:m_comet/theater:t_empress/date:d_mar15": ["ts_sun_e3"],
        "movie:m_iron/theater:t_yorkville/date:d_mar14": ["ts_sat_y5"],
        "movie:m_iron/theater:t_empress/date:d_mar15": ["ts_sun_e4"],
    }
    seat_grids: dict[str, dict] = {}
    for prefix, ids in time_availability.items():
        for tid in ids:
            key = f"{prefix}/time:{tid}"
            if tid == "ts_sun_e1":
                seat_grids[key] = G_SOL
            elif tid in ("ts_sat_y2", "ts_sat_y3"):
                seat_grids[key] = G_DEAD
            else:
                seat_grids[key] = G_MIX

    seat_options = build_seat_data(seat_grids)

    return {
        "id": "parents_anniversary",
        "title": "Parents Anniversary Gift",
        "brief": ("Set up a weekend movie outing for your parents' anniversary. "
                  "It should feel warm and a little special: a gentle romance at a "
                  "comfortable hour, with good seats."),
        "workflow": {"stages": [
            {"id": "movie", "title": "Select Movie", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "rating", "kind": "ordinal", "order": ["G", "PG", "PG-13", "R"]},
                 {"name": "genre", "kind": "categorical"},
                 {"name": "runtime", "kind": "numeric", "unit": "min", "higherIsBetter": False},
                 {"name": "tone", "kind": "categorical"},
             ]},
            {"id": "theater", "title": "Select Theater", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "screens", "kind": "numeric"},
                 {"name": "distance", "kind": "numeric", "unit": "mi", "higherIsBetter": False},
             ]},
            {"id": "date", "title": "Select Date", "uiKind": "calendar",
             "filterable": False, "attributeSpecs": [
                 {"name": "date", "kind": "categorical"},
                 {"name": "weekday", "kind": "categorical"},
             ]},
            {"id": "time", "title": "Select Showtime", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "time", "kind": "numeric", "unit": "clock"},
                 {"name": "endTime", "kind": "numeric", "unit": "clock"},
                 {"name": "day", "kind": "categorical"},
             ]},
            seat_stage(),
            confirmation_stage(),
        ]},
        "options": {
            "movie": {"items": movies, "byPrefix": {
                "": ["m_velvet", "m_paper", "m_glass", "m_comet", "m_iron"]}},
            "theater": {"items": theaters, "byPrefix": {
                "movie:m_velvet": ["t_yorkville", "t_empress"],
                "movie:m_paper": ["t_yorkville"],
                "movie:m_glass": ["t_yorkville", "t_empress"],
                "movie:m_comet": ["t_empress"],
                "movie:m_iron": ["t_yorkville", "t_empress"],
            }},
            "date": {"items": dates, "byPrefix": {
                "movie:m_velvet/theater:t_yorkville": ["d_mar13", "d_mar14"],
                "movie:m_velvet/theater:t_empress": ["d_mar14", "d_mar15"],
                "movie:m_paper/theater:t_yorkville": ["d_mar14", "d_mar15"],
                "movie:m_glass/theater:t_yorkville": ["d_mar13", "d_mar14"],
                "movie:m_glass/theater:t_empress": ["d_mar14"],
                "movie:m_comet/theater:t_empress": ["d_mar13", "d_mar15"],
                "movie:m_iron/theater:t_yorkville": ["d_mar14"],
                "movie:m_iron/theater:t_empress": ["d_mar15"],
            }},
            "time": {"items": times, "byPrefix": time_availability},
            "seat": seat_options,
            "confirm": {"items": [], "byPrefix": {}},
        },
        "seatGrids": seat_grids,
        "scriptedPreferences": [
            {"stage": "movie", "description": "a movie rated PG-13 or below",
             "strength": "hard",
             "constraint": {"attribute": "rating", "comparator": "le", "value": "PG-13"}},
            {"stage": "movie", "description": "a romance movie", "strength": "hard",
             "constraint": {"attribute": "genre", "comparator": "eq", "value": "romance"}},
            {"stage": "movie", "description": "preferably warm in tone", "strength": "soft",
             "objective": {"attribute": "tone", "preferSet": ["warm"]}},
            {"stage": "theater", "description": "start with the closer theater",
             "strength": "soft",
             "objective": {"attribute": "distance", "direction": "minimize"}},
            {"stage": "date", "description": "Saturday March 14 or Sunday March 15",
             "strength": "hard",
             "constraint": {"attribute": "date", "comparator": "inSet",
                            "value": ["mar14", "mar15"]}},
            {"stage": "date", "description": "prefer Saturday", "strength": "soft",
             "objective": {"attribute": "weekday", "preferSet": ["Sat"]}},
            {"stage": "time",
             "description": "Saturday: start after 4:00 PM and end by 9:00 PM; "
                            "Sunday: a true morning show",
             "strength": "hard",
             "constraint": {"attribute": "time", "comparator": "or", "parts": [
                 {"attribute": "day", "comparator": "and", "parts": [
                     {"attribute": "day", "comparator": "eq", "value": "sat"},
                     {"attribute": "time", "comparator": "predicate",
                      "predicate": "startsAfter", "args": [960]},
                     {"attribute": "endTime", "comparator": "predicate",
                      "predicate": "endsBy", "args": [1260]},
                 ]},
                 {"attribute": "day", "comparator": "and", "parts": [
                     {"attribute": "day", "comparator": "eq", "value": "sun"},
                     {"attribute": "time", "comparator": "le", "value": 690},
                 ]},
             ]}},
            {"stage": "seat", "description": "two adjacent premium seats", "strength": "hard",
             "constraint": {"attribute": "adjacent", "comparator": "and", "parts": [
                 {"attribute": "adjacent", "comparator": "predicate",
                  "predicate": "adjacentSeats", "args": [2]},
                 {"attribute": "tier", "comparator": "predicate",
                  "predicate": "tierIs", "args": ["premium"]},
             ]}},
        ],
        "solution": [
            {"stage": "movie", "option": "m_velvet"},
            {"stage": "theater", "option": "t_empress"},
            {"stage": "date", "option": "d_mar15"},
            {"stage": "time", "option": "ts_sun_e1"},
            {"stage": "seat", "option": "D4+D5"},
        ],
    }


# --- sibling scenario ---------------------------------------------------------

G2_BACKONLY = grid([
    ("A", "standard", False, ".X.X.X"),
    ("B", "standard", False, "X.X.X."),
    ("C", "standard", False, ".XX.X."),
    ("D", "standard", True, "..X..."),
    ("E", "standard", True, "X....."),
])
G2_SOL = grid([
    ("A", "standard", False, "X.X.X."),
    ("B", "standard", False, "XX..XX"),
    ("C", "standard", False, "X.X.X."),
    ("D", "standard", True, "...X.."),
    ("E", "standard", True, "......"),
])
G2_MIX = grid([
    ("A", "standard", False, "..X..."),
    ("B", "standard", False, "X....X"),
    ("C", "standard", False, ".X.X.."),
    ("D", "standard", True, "......"),
    ("E", "standard", True, "X.X.X."),
])


def sibling_bmovie() -> dict:
    movies = [
        {"id": "m_rubber", "label": "Rubber Bandits",
         "attributes": {"genre": "cult comedy", "audienceScore": 4.8, "runtime": 96}},
        {"id": "m_moon", "label": "Moonbase Lounge",
         "attributes": {"genre": "cult comedy", "audienceScore": 6.9, "runtime": 110}},
        {"id": "m_static", "label": "Static Prophets",
         "attributes": {"genre": "horror", "audienceScore": 5.5, "runtime": 104}},
        {"id": "m_velour", "label": "Velour Nights",
         "attributes": {"genre": "drama", "audienceScore": 7.8, "runtime": 128}},
    ]
    theaters = [
        {"id": "t_starlight", "label": "Starlight Single",
         "attributes": {"distance": 4.2, "screens": 1}},
        {"id": "t_cinedrome", "label": "Cinedrome 12",
         "attributes": {"distance": 1.8, "screens": 12}},
    ]
    dates = [
        {"id": "d_mar13", "label": "Mar 13", "attributes": {"date": "mar13", "weekday": "Fri"}},
        {"id": "d_mar14", "label": "Mar 14", "attributes": {"date": "mar14", "weekday": "Sat"}},
        {"id": "d_mar15", "label": "Mar 15", "attributes": {"date": "mar15", "weekday": "Sun"}},
    ]

    def show(tid, label, start, end, day):
        return {"id": tid, "label": label,
                "attributes": {"time": start, "endTime": end, "day": day}}

    times = [
        show("tb_fri_1700", "5:00 PM", 1020, 1125, "fri"),
        show("tb_fri_1930", "7:30 PM", 1170, 1275, "fri"),
        show("tb_sat_1600", "4:00 PM", 960, 1065, "sat"),
        show("tb_sat_1830", "6:30 PM", 1110, 1215, "sat"),
        show("tb_fri_2100", "9:00 PM", 1260, 1370, "fri"),
        show("tb_sat_1945", "7:45 PM", 1185, 1295, "sat"),
        show("tb_fri_1815", "6:15 PM", 1095, 1199, "fri"),
        show("tb_sun_1400", "2:00 PM", 840, 968, "sun"),
        show("tb_sat_2000", "8:00 PM", 1200, 1296, "sat"),
        show("tb_fri_1845", "6:45 PM", 1125, 1253, "fri"),
    ]

    time_availability = {
        "movie:m_rubber/theater:t_starlight/date:d_mar13": ["tb_fri_1700", "tb_fri_1930"],
        "movie:m_rubber/theater:t_starlight/date:d_mar14": ["tb_sat_1600", "tb_sat_1830"],
        "movie:m_rubber/theater:t_cinedrome/date:d_mar14": ["tb_sat_2000"],
        "movie:m_moon/theater:t_starlight/date:d_mar13": ["tb_fri_2100"],
        "movie:m_moon/theater:t_cinedrome/date:d_mar14": ["tb_sat_1945"],
        "movie:m_static/theater:t_cinedrome/date:d_mar13": ["tb_fri_1815"],
        "movie:m_velour/theater:t_starlight/date:d_mar13": ["tb_fri_1845"],
        "movie:m_velour/theater:t_cinedrome/date:d_mar15": ["tb_sun_1400"],
    }
    seat_grids: dict[str, dict] = {}
    for prefix, ids in time_availability.items():
        for tid in ids:
            key = f"{prefix}/time:{tid}"
            if tid == "tb_fri_1930":
                seat_grids[key] = G2_BACKONLY
            elif tid == "tb_sat_1830":
                seat_grids[key] = G2_SOL
            else:
                seat_grids[key] = G2_MIX

    seat_options = build_seat_data(seat_grids)

    return {
        "id": "sibling_bmovie",
        "title": "Sibling B-Movie Comedy Night",
        "brief": ("Plan a movie night with your sibling. The goal is something weird "
                  "and fun in a low-budget way, at the little single-screen house, "
                  "sitting together but not in the back."),
        "workflow": {"stages": [
            {"id": "movie", "title": "Select Movie", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "genre", "kind": "categorical"},
                 {"name": "audienceScore", "kind": "numeric", "higherIsBetter": True},
                 {"name": "runtime", "kind": "numeric", "unit": "min", "higherIsBetter": False},
             ]},
            {"id": "theater", "title": "Select Theater", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "screens", "kind": "numeric"},
                 {"name": "distance", "kind": "numeric", "unit": "mi", "higherIsBetter": False},
             ]},
            {"id": "date", "title": "Select Date", "uiKind": "calendar",
             "filterable": False, "attributeSpecs": [
                 {"name": "date", "kind": "categorical"},
                 {"name": "weekday", "kind": "categorical"},
             ]},
            {"id": "time", "title": "Select Showtime", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "time", "kind": "numeric", "unit": "clock"},
                 {"name": "endTime", "kind": "numeric", "unit": "clock"},
                 {"name": "day", "kind": "categorical"},
             ]},
            seat_stage(),
            confirmation_stage(),
        ]},
        "options": {
            "movie": {"items": movies, "byPrefix": {
                "": ["m_rubber", "m_moon", "m_static", "m_velour"]}},
            "theater": {"items": theaters, "byPrefix": {
                "movie:m_rubber": ["t_starlight", "t_cinedrome"],
                "movie:m_moon": ["t_starlight", "t_cinedrome"],
                "movie:m_static": ["t_cinedrome"],
                "movie:m_velour": ["t_starlight", "t_cinedrome"],
            }},
            "date": {"items": dates, "byPrefix": {
                "movie:m_rubber/theater:t_starlight": ["d_mar13", "d_mar14"],
                "movie:m_rubber/theater:t_cinedrome": ["d_mar14"],
                "movie:m_moon/theater:t_starlight": ["d_mar13"],
                "movie:m_moon/theater:t_cinedrome": ["d_mar14"],
                "movie:m_static/theater:t_cinedrome": ["d_mar13"],
                "movie:m_velour/theater:t_starlight": ["d_mar13"],
                "movie:m_velour/theater:t_cinedrome": ["d_mar15"],
            }},
            "time": {"items": times, "byPrefix": time_availability},
            "seat": seat_options,
            "confirm": {"items": [], "byPrefix": {}},
        },
        "seatGrids": seat_grids,
        "scriptedPreferences": [
            {"stage": "movie", "description": "a cult comedy", "strength": "hard",
             "constraint": {"attribute": "genre", "comparator": "eq", "value": "cult comedy"}},
            {"stage": "movie", "description": "prefer the lower-rated one", "strength": "soft",
             "objective": {"attribute": "audienceScore", "direction": "minimize"}},
            {"stage": "theater", "description": "the single-screen theater", "strength": "hard",
             "constraint": {"attribute": "screens", "comparator": "eq", "value": 1}},
            {"stage": "date", "description": "Friday March 13 or Saturday March 14",
             "strength": "hard",
             "constraint": {"attribute": "date", "comparator": "inSet",
                            "value": ["mar13", "mar14"]}},
            {"stage": "date", "description": "prefer Friday", "strength": "soft",
             "objective": {"attribute": "weekday", "preferSet": ["Fri"]}},
            {"stage": "time", "description": "starting after 6:00 PM and ending by 10:00 PM",
             "strength": "hard",
             "constraint": {"attribute": "time", "comparator": "and", "parts": [
                 {"attribute": "time", "comparator": "predicate",
                  "predicate": "startsAfter", "args": [1080]},
                 {"attribute": "endTime", "comparator": "predicate",
                  "predicate": "endsBy", "args": [1320]},
             ]}},
            {"stage": "time", "description": "prefer the earlier showtime", "strength": "soft",
             "objective": {"attribute": "time", "direction": "minimize"}},
            {"stage": "seat", "description": "two adjacent seats, not in the back rows",
             "strength": "hard",
             "constraint": {"attribute": "adjacent", "comparator": "and", "parts": [
                 {"attribute": "adjacent", "comparator": "predicate",
                  "predicate": "adjacentSeats", "args": [2]},
                 {"attribute": "backRow", "comparator": "eq", "value": False},
             ]}},
        ],
        "solution": [
            {"stage": "movie", "option": "m_rubber"},
            {"stage": "theater", "option": "t_starlight"},
            {"stage": "date", "option": "d_mar14"},
            {"stage": "time", "option": "tb_sat_1830"},
            {"stage": "seat", "option": "B3+B4"},
        ],
    }


# --- figure-derived catalogs ----------------------------------------------------

GF_SOL = grid([
    ("A", "standard", False, "X.X.X."),
    ("B", "standard", False, "..X.X."),
    ("C", "standard", False, "X.XX.X"),
    ("D", "standard", True, ".X.X.X"),
])
GF_MIX = grid([
    ("A", "standard", False, "..X..."),
    ("B", "standard", False, "X.X.X."),
    ("C", "standard", False, ".X...X"),
    ("D", "standard", True, "X.X..."),
])


def family_matinee() -> dict:
    movies = [
        {"id": "m_lantern", "label": "Lantern Bakery",
         "attributes": {"rating": "PG", "runtime": 124}},
        {"id": "m_maple", "label": "Maple Detectives",
         "attributes": {"rating": "PG-13", "runtime": 118}},
        {"id": "m_sky", "label": "Sky Circus Express",
         "attributes": {"rating": "PG-13", "runtime": 109}},
        {"id": "m_pocket", "label": "Pocket Parade",
         "attributes": {"rating": "PG", "runtime": 92}},
    ]

    def show(tid, label, start, end):
        return {"id": tid, "label": label,
                "attributes": {"time": start, "endTime": end, "day": "sat"}}

    times = [
        show("tf_lantern", "7:00 PM", 1140, 1274),
        show("tf_maple", "3:00 PM", 900, 1028),
        show("tf_sky", "4:00 PM", 960, 1079),
        show("tf_pocket", "2:00 PM", 840, 942),
    ]
    time_availability = {
        "movie:m_lantern/theater:t_palace/date:d_sat": ["tf_lantern"],
        "movie:m_maple/theater:t_palace/date:d_sat": ["tf_maple"],
        "movie:m_sky/theater:t_palace/date:d_sat": ["tf_sky"],
        "movie:m_pocket/theater:t_palace/date:d_sat": ["tf_pocket"],
    }
    seat_grids = {}
    for prefix, ids in time_availability.items():
        for tid in ids:
            seat_grids[f"{prefix}/time:{tid}"] = GF_SOL if tid == "tf_pocket" else GF_MIX
    seat_options = build_seat_data(seat_grids)

    return {
        "id": "family_matinee",
        "title": "Family Matinee",
        "brief": ("Take the kids to an afternoon movie: something age-appropriate "
                  "and on the shorter side, done well before dinner, sitting together."),
        "workflow": {"stages": [
            {"id": "movie", "title": "Select Movie", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "rating", "kind": "ordinal", "order": ["G", "PG", "PG-13", "R"]},
                 {"name": "runtime", "kind": "numeric", "unit": "min", "higherIsBetter": False},
             ]},
            {"id": "theater", "title": "Select Theater", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "distance", "kind": "numeric", "unit": "mi", "higherIsBetter": False},
                 {"name": "screens", "kind": "numeric"},
             ]},
            {"id": "date", "title": "Select Date", "uiKind": "calendar",
             "filterable": False, "attributeSpecs": [
                 {"name": "date", "kind": "categorical"},
                 {"name": "weekday", "kind": "categorical"},
             ]},
            {"id": "time", "title": "Select Showtime", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "time", "kind": "numeric", "unit": "clock"},
                 {"name": "endTime", "kind": "numeric", "unit": "clock"},
                 {"name": "day", "kind": "categorical"},
             ]},
            seat_stage(),
            confirmation_stage(),
        ]},
        "options": {
            "movie": {"items": movies, "byPrefix": {
                "": ["m_lantern", "m_maple", "m_sky", "m_pocket"]}},
            "theater": {"items": [
                {"id": "t_palace", "label": "Palace Theatre",
                 "attributes": {"distance": 1.2, "screens": 5}}],
                "byPrefix": {f"movie:{m['id']}": ["t_palace"] for m in movies}},
            "date": {"items": [
                {"id": "d_sat", "label": "Mar 14",
                 "attributes": {"date": "mar14", "weekday": "Sat"}}],
                "byPrefix": {f"movie:{m['id']}/theater:t_palace": ["d_sat"] for m in movies}},
            "time": {"items": times, "byPrefix": time_availability},
            "seat": seat_options,
            "confirm": {"items": [], "byPrefix": {}},
        },
        "seatGrids": seat_grids,
        "scriptedPreferences": [
            {"stage": "movie", "description": "a G or PG rated movie", "strength": "hard",
             "constraint": {"attribute": "rating", "comparator": "inSet", "value": ["G", "PG"]}},
            {"stage": "movie", "description": "preferably the shorter one", "strength": "soft",
             "objective": {"attribute": "runtime", "direction": "minimize"}},
            {"stage": "time", "description": "done by 5:00 PM", "strength": "hard",
             "constraint": {"attribute": "endTime", "comparator": "predicate",
                            "predicate": "endsBy", "args": [1020]}},
            {"stage": "seat", "description": "two seats together", "strength": "hard",
             "constraint": {"attribute": "adjacent", "comparator": "predicate",
                            "predicate": "adjacentSeats", "args": [2]}},
        ],
        "solution": [
            {"stage": "movie", "option": "m_pocket"},
            {"stage": "theater", "option": "t_palace"},
            {"stage": "date", "option": "d_sat"},
            {"stage": "time", "option": "tf_pocket"},
            {"stage": "seat", "option": "B1+B2"},
        ],
    }


GS_SOL = grid([
    ("A", "standard", False, ".X.X.."),
    ("B", "standard", False, "X..X.X"),
    ("C", "standard", False, ".X.X.X"),
    ("D", "premium", True, "XX..XX"),
    ("E", "premium", True, ".X.X.X"),
])
GS_NOPREM = grid([
    ("A", "standard", False, "..X..."),
    ("B", "standard", False, "X.X.X."),
    ("C", "standard", False, "X....X"),
    ("D", "premium", True, ".X.X.X"),
    ("E", "premium", True, "X.X.X."),
])
GS_MIX = grid([
    ("A", "standard", False, "...X.."),
    ("B", "standard", False, ".X.X.X"),
    ("C", "standard", False, "X..X.."),
    ("D", "premium", True, "..X..."),
    ("E", "premium", True, "X...X."),
])


def starfall_circuit() -> dict:
    theaters = [
        {"id": "t_closeup", "label": "CloseUp 12",
         "attributes": {"screens": 12, "distance": 3.1, "imax": False}},
        {"id": "t_riverview", "label": "Riverview 8",
         "attributes": {"screens": 8, "distance": 6.3, "imax": True}},
        {"id": "t_cedar", "label": "Cedar Commons 6",
         "attributes": {"screens": 6, "distance": 4.6, "imax": True}},
    ]

    def show(tid, label, start, end):
        return {"id": tid, "label": label,
                "attributes": {"time": start, "endTime": end, "day": "fri"}}

    times = [
        show("tt_closeup", "7:10 PM", 1150, 1282),
        show("tt_riverview", "7:30 PM", 1170, 1302),
        show("tt_cedar", "6:50 PM", 1130, 1262),
    ]
    time_availability = {
        "theater:t_closeup/date:d_fri": ["tt_closeup"],
        "theater:t_riverview/date:d_fri": ["tt_riverview"],
        "theater:t_cedar/date:d_fri": ["tt_cedar"],
    }
    seat_grids = {}
    for prefix, ids in time_availability.items():
        for tid in ids:
            key = f"{prefix}/time:{tid}"
            if tid == "tt_cedar":
                seat_grids[key] = GS_SOL
            elif tid == "tt_riverview":
                seat_grids[key] = GS_NOPREM
            else:
                seat_grids[key] = GS_MIX
    seat_options = build_seat_data(seat_grids)

    return {
        "id": "starfall_circuit",
        "title": "Starfall Circuit Night Out",
        "brief": ("The movie is settled: the big-screen spectacle Starfall Circuit. "
                  "Pick where to see it the way it deserves, then lock in a showtime "
                  "and a great pair of seats."),
        "workflow": {"stages": [
            {"id": "theater", "title": "Select Theater", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "screens", "kind": "numeric"},
                 {"name": "distance", "kind": "numeric", "unit": "mi", "higherIsBetter": False},
                 {"name": "imax", "kind": "boolean", "unit": "IMAX Available"},
             ]},
            {"id": "date", "title": "Select Date", "uiKind": "calendar",
             "filterable": False, "attributeSpecs": [
                 {"name": "date", "kind": "categorical"},
                 {"name": "weekday", "kind": "categorical"},
             ]},
            {"id": "time", "title": "Select Showtime", "uiKind": "buttonGroup",
             "filterable": True, "attributeSpecs": [
                 {"name": "time", "kind": "numeric", "unit": "clock"},
                 {"name": "endTime", "kind": "numeric", "unit": "clock"},
                 {"name": "day", "kind": "categorical"},
             ]},
            seat_stage(),
            confirmation_stage(),
        ]},
        "options": {
            "theater": {"items": theaters, "byPrefix": {
                "": ["t_closeup", "t_riverview", "t_cedar"]}},
            "date": {"items": [
                {"id": "d_fri", "label": "Mar 13",
                 "attributes": {"date": "mar13", "weekday": "Fri"}}],
                "byPrefix": {f"theater:{t['id']}": ["d_fri"] for t in theaters}},
            "time": {"items": times, "byPrefix": time_availability},
            "seat": seat_options,
            "confirm": {"items": [], "byPrefix": {}},
        },
        "seatGrids": seat_grids,
        "scriptedPreferences": [
            {"stage": "theater", "description": "a theater with an IMAX screen",
             "strength": "hard",
             "constraint": {"attribute": "imax", "comparator": "eq", "value": True}},
            {"stage": "theater", "description": "the closer the better", "strength": "soft",
             "objective": {"attribute": "distance", "direction": "minimize"}},
            {"stage": "seat", "description": "two adjacent premium seats", "strength": "hard",
             "constraint": {"attribute": "adjacent", "comparator": "and", "parts": [
                 {"attribute": "adjacent", "comparator": "predicate",
                  "predicate": "adjacentSeats", "args": [2]},
                 {"attribute": "tier", "comparator": "predicate",
                  "predicate": "tierIs", "args": ["premium"]},
             ]}},
        ],
        "solution": [
            {"stage": "theater", "option": "t_cedar"},
            {"stage": "date", "option": "d_fri"},
            {"stage": "time", "option": "tt_cedar"},
            {"stage": "seat", "option": "D3+D4"},
        ],
    }


def main() -> None:
    write("parents_anniversary", parents_anniversary())
    write("sibling_bmovie", sibling_bmovie())
    write("family_matinee", family_matinee())
    write("starfall_circuit", starfall_circuit())


if __name__ == "__main__":
    main()
