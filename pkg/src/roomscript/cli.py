"""Command-line entry points: run scenarios, emit the bundled pack, serve HTTP.

Exit codes: 0 all assertions pass, 1 assertion failure, 2 error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import EngineConfig
from .errors import EngineError


def _cmd_run(args) -> int:
    from .replay import load_scenario, run_scenario

    config = EngineConfig.load(args.config) if args.config else None
    try:
        scenario = load_scenario(args.scenario)
        report = run_scenario(scenario, config=config, service_url=args.service)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    doc = report.to_doc()
    for step in doc["steps"]:
        for a in step["assertions"]:
            mark = "PASS" if a["ok"] else "FAIL"
            print(f"[{mark}] {report.scenario} step {step['index']} "
                  f"{a['kind']}: {a['detail']}")
    if doc["error"]:
        print(f"[ERROR] {doc['error']}")
    print(f"{report.scenario}: {'ok' if report.ok else 'FAILED'} "
          f"({doc['totalMs']:.1f} ms)")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    if doc["error"]:
        return 2
    return 0 if report.ok else 1


def _cmd_emit_pack(args) -> int:
    from .pack import emit_pack

    for path in emit_pack(args.dir):
        print(path)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    from .session import SessionManager

    config = EngineConfig.load(args.config) if args.config else EngineConfig()
    manager = SessionManager(config, journal_path=args.journal or config.journal_path)
    uvicorn.run(create_app(manager), host=args.host, port=args.port, log_level="info")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="roomscript",
                                     description="Embodied scene-authoring engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("scenario")
    p_run.add_argument("--service", help="drive a running service instead of in-process")
    p_run.add_argument("--report", help="write the JSON report here")
    p_run.add_argument("--config", help="engine config file (JSON)")
    p_run.set_defaults(fn=_cmd_run)

    p_pack = sub.add_parser("emit-pack", help="write the bundled scenario pack")
    p_pack.add_argument("dir")
    p_pack.set_defaults(fn=_cmd_emit_pack)

    p_serve = sub.add_parser("serve", help="start the HTTP/websocket service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8700)
    p_serve.add_argument("--config", help="engine config file (JSON)")
    p_serve.add_argument("--journal", help="append-only journal path")
    p_serve.set_defaults(fn=_cmd_serve)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
