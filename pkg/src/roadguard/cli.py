"""Command-line front end.

The CLI is a thin client of the HTTP service: every subcommand issues
requests against either a remote server (--server URL) or an in-process
instance of the same app, so the two paths exercise identical code.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_COLLISION = 3

_TRACE_FIELDS = (
    "step state u_nom u_certified was_active infeasible "
    "solve_time distance_time min_h collided rows"
)


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    from .service.app import create_app

    transport = httpx.ASGITransport(app=create_app())
    return httpx.Client(transport=transport, base_url="http://roadguard", timeout=600.0)


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_ERROR)
    except json.JSONDecodeError as exc:
        print(f"error: {path} is not valid JSON: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def _fail_on_http(resp: httpx.Response) -> None:
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        print(f"error: {detail}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID if resp.status_code == 422 else EXIT_ERROR)


def cmd_validate(args) -> int:
    doc = _read_json(args.scenario)
    with _client(args.server) as client:
        resp = client.post("/scenarios/validate", json={"scenario": doc})
        _fail_on_http(resp)
        body = resp.json()
    if body["valid"]:
        print(f"{args.scenario}: valid")
        return EXIT_OK
    for err in body["errors"]:
        print(f"{args.scenario}: {err}", file=sys.stderr)
    return EXIT_INVALID


def cmd_gen(args) -> int:
    payload = {
        "kind": args.kind,
        "seed": args.seed,
        "lane_width": args.lane_width,
        "lanes": args.lanes,
        "curvature": args.curvature,
        "name": args.name,
    }
    with _client(args.server) as client:
        resp = client.post("/maps/generate", json=payload)
        _fail_on_http(resp)
        doc = resp.json()["scenario"]
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_run(args) -> int:
    doc = _read_json(args.scenario)
    payload = {
        "scenario": doc,
        "planner": args.planner,
        "filter_on": not args.no_filter,
        "seed": args.seed,
        "steps": args.steps,
        "include_rows": not args.no_rows,
    }
    with _client(args.server) as client:
        resp = client.post("/runs", json=payload)
        _fail_on_http(resp)
        body = resp.json()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / "trace.jsonl"
    with trace_path.open("w") as fh:
        for record in body["records"]:
            fh.write(json.dumps(record) + "\n")
    summary = body["summary"]
    summary_doc = {
        "summary": summary,
        "scenario": body["scenario"],  # normalized config, for provenance
        "args": {
            "scenario_file": args.scenario,
            "planner": args.planner,
            "filter_on": not args.no_filter,
            "seed": args.seed,
            "steps": args.steps,
        },
        "trace_fields": _TRACE_FIELDS.split(),
    }
    (out / "summary.json").write_text(json.dumps(summary_doc, indent=2) + "\n")

    print(
        f"steps={summary['steps']} collisions={summary['collisions']} "
        f"activity_rate={summary['activity_rate']:.3f} min_h={summary['min_h']:.4f}"
    )
    print(f"trace: {trace_path}")
    if summary["collisions"] > 0 and not args.no_filter and not args.allow_collisions:
        print("error: collisions occurred with the filter enabled", file=sys.stderr)
        return EXIT_COLLISION
    return EXIT_OK


def cmd_bench(args) -> int:
    payload = {
        "kind": args.kind,
        "seed": args.seed,
        "steps": args.steps,
        "n_circles": list(range(args.min_circles, args.max_circles + 1)),
    }
    with _client(args.server) as client:
        resp = client.post("/bench", json=payload)
        _fail_on_http(resp)
        rows = resp.json()["rows"]

    from .bench import BenchRow, format_table

    table = format_table([BenchRow(**r) for r in rows])
    print(table)
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(table + "\n")
        print(f"wrote {out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("roadguard.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roadguard",
        description="Safety-filtered vehicle simulation against polyline road boundaries.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_server(p):
        p.add_argument(
            "--server",
            default=None,
            help="base URL of a running service; default runs in-process",
        )

    p_run = sub.add_parser("run", help="run a closed-loop scenario and write traces")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument(
        "--planner",
        choices=["pure_pursuit", "adversarial"],
        default=None,
        help="override the scenario's planner",
    )
    p_run.add_argument("--no-filter", action="store_true", help="disable the filter")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--steps", type=int, default=None, help="override duration")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument(
        "--allow-collisions",
        action="store_true",
        help="exit 0 even if a filtered run records collisions",
    )
    p_run.add_argument(
        "--no-rows", action="store_true", help="drop per-row diagnostics from traces"
    )
    add_server(p_run)
    p_run.set_defaults(func=cmd_run)

    p_bench = sub.add_parser("bench", help="sweep circle counts and report timings")
    p_bench.add_argument(
        "--kind",
        choices=["loop", "interchange", "intersection", "scurve"],
        default="interchange",
    )
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--steps", type=int, default=300)
    p_bench.add_argument("--min-circles", type=int, default=1)
    p_bench.add_argument("--max-circles", type=int, default=5)
    p_bench.add_argument("--out", default=None, help="write the table to this file")
    add_server(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    p_val = sub.add_parser("validate", help="schema-check a scenario file")
    p_val.add_argument("--scenario", required=True)
    add_server(p_val)
    p_val.set_defaults(func=cmd_validate)

    p_gen = sub.add_parser("gen", help="generate a procedural map")
    p_gen.add_argument(
        "--kind",
        choices=["loop", "interchange", "intersection", "scurve"],
        required=True,
    )
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", required=True, help="output scenario JSON file")
    p_gen.add_argument("--lane-width", type=float, default=0.15)
    p_gen.add_argument("--lanes", type=int, default=2)
    p_gen.add_argument("--curvature", type=float, default=1.0)
    p_gen.add_argument("--name", default=None)
    add_server(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_serve = sub.add_parser("serve", help="host the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
