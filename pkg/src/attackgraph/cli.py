"""Command-line entry points: generate, replay, serve, validate.

Exit codes: 0 success, 1 input error, 2 goal underivable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import DeploymentConfig, load_config
from .engine import Engine
from .errors import EngineError, GoalNotDerivableError
from .graph import to_document, to_dot

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_GOAL_UNDERIVABLE = 2


def _load(args: argparse.Namespace) -> DeploymentConfig:
    config = load_config(args.config)
    if getattr(args, "goal", None):
        config.goal_text = args.goal
    if getattr(args, "audit_log", None):
        config.audit_log_path = Path(args.audit_log).resolve()
    return config


def _write_exports(engine: Engine, out_dir: str) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    graph_path = out / "graph.json"
    dot_path = out / "graph.dot"
    graph_path.write_text(
        json.dumps(engine.export_current(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    dot_path.write_text(to_dot(engine.current_graph), encoding="utf-8")
    return graph_path, dot_path


def cmd_generate(args: argparse.Namespace) -> int:
    engine = Engine(_load(args))
    info = engine.generate()
    graph = engine.current_graph
    doc = to_document(graph)
    print(f"goal reachable: true (node {graph.goal})")
    print(f"nodes: {len(doc['nodes'])}  arcs: {len(doc['arcs'])}")
    print(f"digest: {info.digest}")
    if args.out:
        graph_path, dot_path = _write_exports(engine, args.out)
        print(f"wrote {graph_path}")
        print(f"wrote {dot_path}")
    return EXIT_OK


def cmd_replay(args: argparse.Namespace) -> int:
    engine = Engine(_load(args))
    engine.generate()
    lines = Path(args.alerts).read_text(encoding="utf-8").splitlines()
    summary = engine.replay_alerts(lines)
    for index, alert_summary in enumerate(summary["alerts"], start=1):
        if "error" in alert_summary:
            print(f"alert {index}: skipped ({alert_summary['error']})")
            continue
        for result in alert_summary["results"]:
            delta = result.get("delta") or {}
            print(
                f"alert {index} hypothesis {result['hypothesis_id']}: {result['status']}"
                f" (+{len(delta.get('added_nodes', []))} nodes,"
                f" +{len(delta.get('added_arcs', []))} arcs,"
                f" {delta.get('classification', 'n/a')})"
            )
        if not alert_summary["results"]:
            print(f"alert {index}: no matching vulnerability leaf")
    print(f"final version: {summary['final_version']}")
    print(f"final digest: {summary['final_digest']}")
    print(f"final path classification: {summary['final_classification']}")
    if args.out:
        _write_exports(engine, args.out)
    return EXIT_INPUT_ERROR if summary["skipped"] else EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = _load(args)
    engine = Engine(config)
    engine.generate()
    host = args.host or config.listen_host
    port = args.port or config.listen_port
    print(f"serving on http://{host}:{port}")
    uvicorn.run(create_app(engine), host=host, port=port, log_level="warning")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    config = _load(args)
    engine = Engine(config)
    print(f"rules: {len(engine.kb.rules)}")
    print(f"facts: {len(engine.kb.facts)}")
    print(f"ontology records: {len(engine.store)}")
    print(f"host bindings: {len(engine.bindings)}")
    print(f"impact rules: {len(engine.policy.impact_rules)}")
    print(f"goal: {engine.goal}")
    print("configuration valid")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attack-graph",
        description="Logical attack-graph engine with ontology-driven enrichment",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="deployment config JSON")
        p.add_argument("--goal", help="override the goal atom")
        p.add_argument("--audit-log", dest="audit_log", help="override the audit log path")

    p_generate = sub.add_parser("generate", help="build graph version 1 from rules and facts")
    common(p_generate)
    p_generate.add_argument("--out", help="directory for graph.json and graph.dot")
    p_generate.set_defaults(func=cmd_generate)

    p_replay = sub.add_parser("replay", help="replay an alert file or audit log")
    common(p_replay)
    p_replay.add_argument("--alerts", required=True, help="newline-delimited alert documents")
    p_replay.add_argument("--out", help="directory for final graph exports")
    p_replay.set_defaults(func=cmd_replay)

    p_serve = sub.add_parser("serve", help="run the long-lived HTTP service")
    common(p_serve)
    p_serve.add_argument("--host", help="bind address (default from config)")
    p_serve.add_argument("--port", type=int, help="bind port (default from config)")
    p_serve.set_defaults(func=cmd_serve)

    p_validate = sub.add_parser("validate", help="check all configured inputs")
    common(p_validate)
    p_validate.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GoalNotDerivableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GOAL_UNDERIVABLE
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
