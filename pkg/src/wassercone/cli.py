"""Command-line interface.

    wassercone validate SPACE.json [--samples N] [--seed S]
    wassercone dist A.json B.json [-p P] [--plan]
    wassercone experiment NAME [--trials N] [--seed S] [--theta-grid SPEC] [--out DIR]

Exit codes: 0 pass, 1 verification failure, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import experiments
from .measure import DiscreteMeasure
from .metric import FiniteSpace, SpaceMismatchError, space_from_json, validate_metric
from .transport import optimal_plan

OUT_DIR_ENV = "WASSERCONE_OUT_DIR"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class InputError(Exception):
    pass


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


def rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(row[c]) for c in columns])
    return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


# -- subcommands --------------------------------------------------------------


def cmd_validate(args) -> int:
    obj = _load_json(args.space)
    try:
        space = space_from_json(obj, check=False)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad space description: {exc}") from exc
    if isinstance(space, FiniteSpace):
        sample = space.points()
    else:
        sample = space.sample(np.random.default_rng(args.seed), args.samples)
    report = validate_metric(space, sample, tol=args.tol)
    print(_dump(report.to_json(space)))
    return EXIT_OK if report.ok else EXIT_FAIL


def _load_measure(path) -> DiscreteMeasure:
    try:
        return DiscreteMeasure.from_json(_load_json(path))
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad measure in {path}: {exc}") from exc


def cmd_dist(args) -> int:
    mu, nu = _load_measure(args.a), _load_measure(args.b)
    if mu.space != nu.space:
        raise InputError("the two measures live on different spaces")
    if args.p < 1:
        raise InputError("p must be >= 1")
    plan = optimal_plan(mu, nu, args.p)
    out = {"p": args.p, "distance": plan.distance, "cost": plan.cost}
    if args.plan:
        out["coupling"] = plan.coupling.tolist()
    print(_dump(out))
    return EXIT_OK


def _parse_grid(spec: str):
    spec = spec.strip()
    if "," in spec:
        return [float(v) for v in spec.split(",") if v.strip()]
    try:
        return int(spec)
    except ValueError:
        return [float(spec)]


def cmd_experiment(args) -> int:
    if args.trials is not None and args.trials < 1:
        raise InputError("--trials must be >= 1")
    try:
        grid = _parse_grid(args.theta_grid)
        report = experiments.run(args.name, trials=args.trials, seed=args.seed,
                                 theta_grid=grid, size=args.size)
    except ValueError as exc:
        raise InputError(str(exc)) from exc

    out_dir = Path(args.out or os.environ.get(OUT_DIR_ENV) or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = _plain({**report.summary, "seed": args.seed})
    (out_dir / f"{report.name}.csv").write_text(rows_to_csv(report.columns, report.rows))
    (out_dir / f"{report.name}.json").write_text(_dump(summary) + "\n")
    text = summary_text(report, summary)
    (out_dir / f"{report.name}.txt").write_text(text)
    print(text, end="")
    return EXIT_OK if report.passed else EXIT_FAIL


def summary_text(report, summary) -> str:
    lines = [f"experiment {report.name}: {'PASS' if report.passed else 'FAIL'}"]
    for key in sorted(summary):
        if key not in ("experiment", "pass"):
            lines.append(f"  {key}: {summary[key]}")
    failed = [r for r in report.rows if not r["pass"]]
    if failed:
        lines.append(f"  failing rows: {len(failed)}")
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wassercone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check the metric axioms of a space description")
    p.add_argument("space", help="Space JSON file")
    p.add_argument("--samples", type=int, default=100, help="sample size for infinite spaces")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("dist", help="Wasserstein distance between two measure files")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("-p", type=float, default=2.0, help="exponent (default 2)")
    p.add_argument("--plan", action="store_true", help="also print the optimal coupling")
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("experiment", help="run a seeded verification experiment")
    p.add_argument("name", choices=experiments.EXPERIMENTS)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--theta-grid", default="19",
                   help="grid size N (angles k*pi/(3(N+1))) or comma-separated angles")
    p.add_argument("--size", type=int, default=1000, help="quantisation size for 'normal'")
    p.add_argument("--out", default=None, help=f"output directory (default ${OUT_DIR_ENV} or .)")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SpaceMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
