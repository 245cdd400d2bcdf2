"""Operator entry point: serve the API, validate scenarios, run headless
trials, and replay transcripts.

Exit codes: 0 success, 1 validation or diff failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .catalog import (
    ScenarioParseError,
    ScenarioValidationError,
    load_scenario_file,
    prefix_key,
    validate_unique_solution,
)
from .harness import (
    Persona,
    load_bundled_personas,
    load_bundled_scenarios,
    persona_from_dict,
    run_trial,
)
from .nlu import ProviderConfig

METRIC_COLUMNS = ["scenario", "persona", "mode", "taskSuccess", "violationCount",
                  "unpreferredSelectionCount", "turnCount", "backtracks",
                  "deadEndsRecorded", "totalUtterances", "submitted"]


def _provider_from_args(args: argparse.Namespace) -> ProviderConfig:
    endpoint = os.environ.get("USHER_ENDPOINT") or getattr(args, "endpoint", None)
    if getattr(args, "provider", "rules") == "remote":
        return ProviderConfig(kind="remote", endpoint=endpoint,
                              model=os.environ.get("USHER_MODEL"))
    return ProviderConfig(kind="rules")


def _load_scenarios(scenario_dir: str | None) -> dict:
    if scenario_dir is None:
        return load_bundled_scenarios()
    scenarios = {}
    for path in sorted(Path(scenario_dir).glob("*.json")):
        scenario = load_scenario_file(str(path))
        scenarios[scenario.id] = scenario
    if not scenarios:
        logging.warning("no scenarios found in %s", scenario_dir)
    return scenarios


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    try:
        scenarios = _load_scenarios(args.scenario_dir)
    except (ScenarioParseError, ScenarioValidationError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    app = create_app(scenarios, provider=_provider_from_args(args),
                     persist_dir=args.persist_dir, ui_dir=args.ui_dir)
    host, _, port = args.listen.rpartition(":")
    host = host or "127.0.0.1"
    print(f"listening on http://{host}:{port} with {len(scenarios)} scenario(s)")
    try:
        uvicorn.run(app, host=host, port=int(port), log_level="warning")
    except (OSError, ValueError) as exc:
        print(f"bind failure: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    worst = 0
    for path in args.paths:
        try:
            scenario = load_scenario_file(path)
        except (ScenarioParseError, FileNotFoundError) as exc:
            print(f"{path}: parse error: {exc}")
            worst = max(worst, 2)
            continue
        except ScenarioValidationError as exc:
            print(f"{path}: validation error: {exc}")
            worst = max(worst, 2)
            continue
        report = validate_unique_solution(scenario)
        if report["passes"]:
            print(f"{path}: unique solution: yes ({prefix_key(scenario.solution)})")
        else:
            worst = max(worst, 1)
            print(f"{path}: unique solution: no (solutionCount={report['solutionCount']})")
            for witness in report["witnessPaths"]:
                print(f"  witness: {prefix_key(witness)}")
    return worst


def _resolve_persona(ref: str) -> Persona:
    if ref.endswith(".json") and Path(ref).exists():
        return persona_from_dict(json.loads(Path(ref).read_text()))
    personas = load_bundled_personas()
    if ref not in personas:
        raise SystemExit(f"unknown persona {ref!r}; bundled: {', '.join(sorted(personas))}")
    return personas[ref]


def cmd_run(args: argparse.Namespace) -> int:
    try:
        scenarios = _load_scenarios(args.scenario_dir)
    except (ScenarioParseError, ScenarioValidationError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    persona = _resolve_persona(args.persona)
    scenario_id = args.scenario or persona.scenario_id
    scenario = scenarios.get(scenario_id)
    if scenario is None:
        print(f"unknown scenario {scenario_id!r}", file=sys.stderr)
        return 2
    if args.turn_limit:
        persona = Persona(id=persona.id, scenario_id=persona.scenario_id,
                          steps=persona.steps, accept_proposals=persona.accept_proposals,
                          turn_limit=args.turn_limit)
    result = run_trial(scenario, persona, mode=args.mode,
                       provider=_provider_from_args(args))
    row = result.metrics.to_dict()
    row.update({"scenario": scenario.id, "persona": persona.id, "mode": args.mode})
    print("\t".join(METRIC_COLUMNS))
    print("\t".join(str(row.get(c)) for c in METRIC_COLUMNS))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        transcript_path = out_dir / f"{scenario.id}__{persona.id}__{args.mode}.jsonl"
        transcript_path.write_bytes(result.transcript_bytes())
        metrics_path = out_dir / f"{scenario.id}__{persona.id}__{args.mode}.metrics.json"
        metrics_path.write_text(json.dumps(row, sort_keys=True, indent=1) + "\n")
        print(f"transcript: {transcript_path}")
    if result.metrics.protocol_error:
        print(f"protocol error: {result.metrics.protocol_error}", file=sys.stderr)
        return 1
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    path = Path(args.transcript)
    if not path.exists():
        print(f"no such transcript: {path}", file=sys.stderr)
        return 2
    lines = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
    if not lines or lines[0].get("type") != "header":
        print("malformed transcript: missing header", file=sys.stderr)
        return 2
    header = lines[0]
    recorded = [line for line in lines if line.get("type") == "event"]

    try:
        scenarios = _load_scenarios(args.scenario_dir)
    except (ScenarioParseError, ScenarioValidationError) as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    scenario = scenarios.get(header["scenario"])
    if scenario is None:
        print(f"unknown scenario {header['scenario']!r}", file=sys.stderr)
        return 2
    persona = persona_from_dict(header["persona"])
    result = run_trial(scenario, persona, mode=header.get("mode", "maestro"))
    fresh = [line for line in result.transcript if line.get("type") == "event"]

    for i, (old, new) in enumerate(zip(recorded, fresh)):
        if old != new:
            print(f"diff at event {i}:")
            print(f"  recorded: {json.dumps(old, sort_keys=True)[:200]}")
            print(f"  replayed: {json.dumps(new, sort_keys=True)[:200]}")
            return 1
    if len(recorded) < len(fresh):
        print(f"prefix of {len(recorded)} event(s) verified; "
              f"{len(fresh) - len(recorded)} recorded event(s) absent from transcript")
        return 1
    if len(recorded) > len(fresh):
        print(f"replay produced only {len(fresh)} of {len(recorded)} recorded events")
        return 1
    print(f"replay matches: {len(fresh)} events identical")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="usher",
        description="Preference-aware conversational workflow engine")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="serve the session API")
    serve.add_argument("--scenario-dir", default=None,
                       help="directory of scenario JSON files (default: bundled)")
    serve.add_argument("--listen", default="127.0.0.1:8765", help="host:port")
    serve.add_argument("--provider", choices=["rules", "remote"], default="rules")
    serve.add_argument("--endpoint", default=None, help="remote provider endpoint")
    serve.add_argument("--persist-dir", default=None, help="session snapshot directory")
    serve.add_argument("--ui-dir", default=None, help="static web client directory")
    serve.set_defaults(fn=cmd_serve)

    validate = sub.add_parser("validate", help="check scenario files")
    validate.add_argument("paths", nargs="+", help="scenario JSON files")
    validate.set_defaults(fn=cmd_validate)

    run = sub.add_parser("run", help="run a headless persona trial")
    run.add_argument("--scenario", default=None, help="scenario id (default: persona's)")
    run.add_argument("--scenario-dir", default=None)
    run.add_argument("--persona", required=True, help="bundled persona id or JSON path")
    run.add_argument("--mode", choices=["maestro", "baseline"], default="maestro")
    run.add_argument("--provider", choices=["rules", "remote"], default="rules")
    run.add_argument("--endpoint", default=None)
    run.add_argument("--turn-limit", type=int, default=None)
    run.add_argument("--out", default=None, help="directory for transcript output")
    run.set_defaults(fn=cmd_run)

    replay = sub.add_parser("replay", help="re-execute a transcript and diff")
    replay.add_argument("transcript", help="transcript JSONL file")
    replay.add_argument("--scenario-dir", default=None)
    replay.set_defaults(fn=cmd_replay)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
