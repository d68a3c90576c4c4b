"""Command line front door.

Four subcommands: ``experiment`` runs one registered study and writes its
table, ``verify`` reruns every study named in a reference file and checks
the tables against it, ``simulate`` rolls a single trace, and ``serve``
starts the HTTP session service. Exit codes: 0 on success, 1 when verify
finds a breach, 2 on bad usage or bad input.
"""

import argparse
import json
import sys
import textwrap
from pathlib import Path

from causalprobe.agents import AgentSpec, UnknownAgentError
from causalprobe.experiments import UnknownExperimentError, experiment_names, run_named
from causalprobe.gridworld import EnvSpec, UnknownEnvError
from causalprobe.seeds import Seed
from causalprobe.simulator import rollout
from causalprobe.tables import QueryTable, TableMismatchError, diff_tables

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
DEFAULT_SEED = 2026


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_experiment(args: argparse.Namespace) -> int:
    table = run_named(args.name, args.seed, args.rollouts)
    _emit(table.to_json(), args.out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    reference = json.loads(Path(args.reference).read_text(encoding="utf-8"))
    tolerances = json.loads(Path(args.tolerances).read_text(encoding="utf-8"))
    breached = False
    for entry in reference["tables"]:
        name = entry["name"]
        want = QueryTable.from_json(entry)
        got = run_named(name, args.seed, args.rollouts)
        report = diff_tables(got, want, tolerances.get(name, {"default": 0.05}))
        print(f"{name}:")
        print(textwrap.indent(report.render(), "  "))
        breached = breached or not report.passed
    return EXIT_VERIFY if breached else EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    trace = rollout(EnvSpec.of(args.env), AgentSpec.of(args.agent), Seed(args.seed), args.steps)
    _emit(trace.to_json(), args.out)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from causalprobe.service import build_app

    static = args.static
    if static is None and Path("frontend/dist").is_dir():
        static = "frontend/dist"
    app = build_app(args.data_dir, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="causalprobe",
        description="Run packaged studies, verify their tables, roll traces, serve HTTP.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="run one registered study and write its table")
    p.add_argument("name", choices=experiment_names())
    p.add_argument("--rollouts", type=int, default=None, help="per-regime budget (default: the study's own)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.set_defaults(run=cmd_experiment)

    p = sub.add_parser("verify", help="rerun each study in a reference file and diff the tables")
    p.add_argument("--reference", required=True, help="JSON file with a 'tables' list")
    p.add_argument("--tolerances", required=True, help="JSON file keyed by study name")
    p.add_argument("--rollouts", type=int, default=None)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("simulate", help="roll one trace and write it")
    p.add_argument("--env", required=True)
    p.add_argument("--agent", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(run=cmd_simulate)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None, help="request-log directory (default: env or ./causalprobe-data)")
    p.add_argument("--static", default=None, help="static asset directory to serve at /")
    p.set_defaults(run=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except (
        UnknownExperimentError,
        UnknownAgentError,
        UnknownEnvError,
        TableMismatchError,
        OSError,
        ValueError,
        KeyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
