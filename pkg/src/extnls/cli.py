"""Command-line interface for the exterior-domain NLS lab.

Subcommands:
    run         execute one manifest, write diagnostics.csv + report.json
    sweep       re-run a template manifest over values of one field
    compat      compatibility check for an initial-data descriptor
    strichartz  shorthand for a LinearStrichartz manifest run
    report      print the verdict summary of a finished run directory
    serve       start the HTTP service (requires uvicorn)
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .domain import ModelParams, build_domain
from .compat import nonlinear_compat_sequence, linear_compat_sequence
from .profiles import make_initial_state
from .experiments import RunManifest, ManifestError, run_scenario


def _cmd_run(args) -> int:
    man = RunManifest.load(args.manifest)
    out = args.out or man.output_dir or None
    result = run_scenario(man, output_dir=out)
    for name, ok in sorted(result.report["verdicts"].items()):
        print(f"{name}: {'PASS' if ok else 'FAIL'}")
    if result.report["anomaly"]:
        print(f"anomaly: {result.report['anomaly']['message']}")
    if result.csv_path:
        print(f"wrote {result.csv_path}")
        print(f"wrote {result.report_path}")
    return result.exit_code


def _set_field(data: dict, dotted: str, value):
    keys = dotted.split(".")
    target = data
    for key in keys[:-1]:
        target = target.setdefault(key, {})
    target[keys[-1]] = value


def _cmd_sweep(args) -> int:
    with open(args.template) as fh:
        template = json.load(fh)
    values = json.loads(args.values)
    if not isinstance(values, list):
        raise SystemExit("--values must be a JSON list")
    base = Path(args.out)
    worst = 0
    for i, value in enumerate(values):
        data = json.loads(json.dumps(template))
        _set_field(data, args.field, value)
        man = RunManifest.from_dict(data)
        out_dir = base / f"{args.field.replace('.', '_')}_{i}"
        result = run_scenario(man, output_dir=out_dir)
        status = "PASS" if result.exit_code == 0 else f"exit {result.exit_code}"
        print(f"{args.field}={value}: {status}  ({out_dir})")
        worst = max(worst, result.exit_code)
    return worst


def _cmd_compat(args) -> int:
    with open(args.data_spec) as fh:
        spec = json.load(fh)
    params = ModelParams(n=spec["n"], p=spec["p"], r_max=spec["r_max"])
    domain = build_domain(params, spec["num_radial"],
                          spec.get("num_angular", 1))
    state = make_initial_state(domain, spec["initial_data"])
    order = args.order if args.order is not None else params.m_smooth
    if args.kind == "nonlinear":
        rep = nonlinear_compat_sequence(params, state, order)
    else:
        rep = linear_compat_sequence(state, None, order)
    print(json.dumps(rep.to_dict(), indent=2, sort_keys=True))
    return 0 if rep.passed else 2


def _cmd_strichartz(args) -> int:
    man = RunManifest.load(args.manifest)
    if man.scenario != "LinearStrichartz":
        raise SystemExit("manifest scenario must be LinearStrichartz")
    result = run_scenario(man, output_dir=args.out)
    print(json.dumps(result.report["extras"]["table"], indent=2,
                     sort_keys=True))
    return result.exit_code


def _cmd_report(args) -> int:
    path = Path(args.run_dir) / "report.json"
    if not path.exists():
        raise SystemExit(f"no report.json in {args.run_dir}")
    report = json.loads(path.read_text())
    print(f"scenario: {report['manifest']['scenario']}")
    for name, ok in sorted(report["verdicts"].items()):
        print(f"{name}: {'PASS' if ok else 'FAIL'}")
    if report.get("anomaly"):
        print(f"anomaly: {report['anomaly']['message']}")
    return report.get("exit_code", 0)


def _cmd_serve(args) -> int:
    import uvicorn
    from .service import app
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="extnls",
        description="Exterior-domain defocusing NLS laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute one manifest")
    p.add_argument("manifest", help="path to a manifest JSON file")
    p.add_argument("--out", default=None, help="output directory override")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="re-run a template over field values")
    p.add_argument("template", help="template manifest JSON file")
    p.add_argument("field", help="dotted manifest field, e.g. dt or options.epsilon")
    p.add_argument("--values", required=True,
                   help="JSON list of values, e.g. '[0.01, 0.005]'")
    p.add_argument("--out", required=True, help="base output directory")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("compat", help="compatibility check for initial data")
    p.add_argument("data_spec",
                   help="JSON file: {n, p, r_max, num_radial, initial_data}")
    p.add_argument("--order", type=int, default=None)
    p.add_argument("--kind", choices=["nonlinear", "linear"],
                   default="nonlinear")
    p.set_defaults(func=_cmd_compat)

    p = sub.add_parser("strichartz", help="run a LinearStrichartz manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_strichartz)

    p = sub.add_parser("report", help="summarize a finished run directory")
    p.add_argument("run_dir")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ManifestError as exc:
        print(f"manifest error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
