"""Command-line entry points.

    selfdual-ricci certify --config CFG --rmax 4 --eps 1e-3 --grid 12 \\
        --checks positivity,strong --seed 0 --out report.json --format json
    selfdual-ricci oracle --config CFG --samples 20 --step 1e-3
    selfdual-ricci eval --config CFG --point 0.3,0.2,1.1

``CFG`` is inline JSON (``{"centers": [[0,0,1]], "gauge": "mean_distance"}``)
or a path to a JSON file. Exit codes: 0 pass, 1 failed certification,
2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .ansatz import Configuration
from .certify import SpecError, SweepSpec, evaluate_point, run_sweep

EXIT_OK, EXIT_FAIL, EXIT_SPEC = 0, 1, 2


def load_config(source: str) -> Configuration:
    text = source.strip()
    if not text.startswith("{"):
        text = Path(source).read_text()
    return Configuration.from_json(json.loads(text))


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_certify(args) -> int:
    spec = SweepSpec(
        config=load_config(args.config),
        rmax=args.rmax,
        eps=args.eps,
        grid=args.grid,
        checks=tuple(c.strip() for c in args.checks.split(",") if c.strip()),
        seed=args.seed,
        cluster_eps=args.cluster_eps,
        cluster_samples=args.cluster_samples,
        oracle_samples=args.oracle_samples,
    )
    report = run_sweep(spec)
    _emit(report.to_csv() if args.format == "csv" else report.dumps(), args.out)
    if not report.passed:
        for name, c in sorted(report.checks.items()):
            if not c.passed:
                print(f"FAILED {name}: min={c.minimum!r} failures={c.failures[:3]}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_oracle(args) -> int:
    from .oracle import compare_with_pipeline, fd_curvature, flat_metric

    if args.flat:
        rng = np.random.default_rng(args.seed)
        worst = 0.0
        for _ in range(args.samples):
            c = fd_curvature(flat_metric(), rng.uniform(-1, 1, 4), args.step)
            worst = max(worst, float(np.abs(c.riemann).max()))
        payload = {"mode": "flat", "samples": args.samples, "step": args.step, "max_curvature": worst}
        passed = worst < 1e-10
    else:
        cfg = load_config(args.config)
        if any(c.x != 0 or c.y != 0 for c in cfg.centers):
            raise SpecError("oracle needs every center on the z-axis")
        rep = compare_with_pipeline(cfg, args.samples, args.step, seed=args.seed)
        payload = rep.to_json()
        passed = rep.max_ricci_rel < 1e-3 and rep.max_selfduality < 1e-3
    payload["passed"] = bool(passed)
    _emit(json.dumps(payload, indent=2, sort_keys=True), args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_eval(args) -> int:
    cfg = load_config(args.config)
    try:
        point = [float(v) for v in args.point.split(",")]
    except ValueError as exc:
        raise SpecError(f"bad point {args.point!r}") from exc
    if len(point) != 3:
        raise SpecError("point needs three coordinates x,y,z")
    _emit(json.dumps(evaluate_point(cfg, point), indent=2, sort_keys=True), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="selfdual-ricci", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="grid certification sweep")
    c.add_argument("--config", required=True)
    c.add_argument("--rmax", type=float, default=4.0)
    c.add_argument("--eps", type=float, default=1e-3)
    c.add_argument("--grid", type=int, default=12)
    c.add_argument("--checks", default="positivity")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out")
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("--cluster-eps", type=float, default=0.05)
    c.add_argument("--cluster-samples", type=int, default=10_000)
    c.add_argument("--oracle-samples", type=int, default=20)
    c.set_defaults(func=cmd_certify)

    o = sub.add_parser("oracle", help="finite-difference cross-check")
    o.add_argument("--config", default='{"centers": [[0, 0, 1]], "gauge": "mean_distance"}')
    o.add_argument("--samples", type=int, default=20)
    o.add_argument("--step", type=float, default=1e-3)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--flat", action="store_true", help="sanity run on the flat metric")
    o.add_argument("--out")
    o.set_defaults(func=cmd_oracle)

    e = sub.add_parser("eval", help="curvature report at one point")
    e.add_argument("--config", required=True)
    e.add_argument("--point", required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_SPEC if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (SpecError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
