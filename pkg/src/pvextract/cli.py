"""Command-line front end: ``pvextract {fit,certify,bench,curve,info}``.

Exit status is 0 on success, 1 on a runtime failure (unreadable data,
numerical failure, unwritable output) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .benchmarks import CASES, DE_SETTINGS, REFERENCE_RMSE, default_bounds
from .certify import BnbConfig, run_bnb
from .data import BENCHMARKS, DatasetError, benchmark_path, dataset_summary, load_csv
from .de import DEConfig, run_de
from .harness import (bench_case, certificate_report, emit_report, reconstruct_curve,
                      run_batch, summarize)
from .model import EvaluationOverflowError
from .objective import ModelKind, ParamBounds, format_rmse_5sig


class UsageError(Exception):
    """Bad combination of flags; reported with exit status 2."""


def _positive_int(text: str) -> int:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return value


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=["sdm", "ddm"])
    p.add_argument("--data", required=True,
                   help="I-V CSV file, or the name of a bundled dataset "
                        f"({', '.join(sorted(BENCHMARKS))})")
    p.add_argument("--temp-c", type=_float,
                   help="cell temperature in degrees Celsius (default for bundled datasets)")
    p.add_argument("--bounds", help="CSV with rows name,lower,upper overriding the built-in ranges")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pvextract", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, metavar="{fit,certify,bench,curve,info}")

    fit = sub.add_parser("fit", help="fit a model with differential evolution")
    _add_problem_flags(fit)
    fit.add_argument("--np", type=_positive_int, help="population size")
    fit.add_argument("--cr", type=_float, help="crossover rate")
    fit.add_argument("--f", type=_float, help="scaling factor")
    fit.add_argument("--gens", type=_positive_int, help="number of generations")
    fit.add_argument("--seed", type=_nonneg_int, default=0, help="seed of the first run")
    fit.add_argument("--runs", type=_positive_int, default=1, help="independent runs (seeds seed..seed+runs-1)")
    fit.add_argument("--out", default="results", help="output directory")

    cert = sub.add_parser("certify", help="enclose the global minimum with interval branch-and-bound")
    _add_problem_flags(cert)
    defaults = BnbConfig()
    cert.add_argument("--eps-f", type=_float, default=defaults.eps_f)
    cert.add_argument("--eps-rel", type=_float, default=defaults.eps_rel)
    cert.add_argument("--eps-x", type=_float, default=defaults.eps_x)
    cert.add_argument("--timeout-s", type=_float, default=defaults.timeout)
    cert.add_argument("--max-boxes", type=_positive_int, default=defaults.max_boxes)
    cert.add_argument("--batch-size", type=_positive_int, default=defaults.batch_size)
    cert.add_argument("--bisect", choices=["relative", "absolute"], default=defaults.bisect)
    cert.add_argument("--local-descent", action="store_true")
    cert.add_argument("--gradient-contractor", action="store_true")
    cert.add_argument("--out", help="write the enclosure report to this JSON file")

    bench = sub.add_parser("bench", help="standard 30-run DE protocol on the benchmark cases")
    bench.add_argument("--cases", default=",".join(CASES),
                       help=f"comma-separated subset of {', '.join(CASES)}")
    bench.add_argument("--runs", type=_positive_int, default=30)
    bench.add_argument("--seed", type=_nonneg_int, default=0)
    bench.add_argument("--out", help="write the consolidated table to this JSON file")

    curve = sub.add_parser("curve", help="reconstruct the I-V curve for a parameter vector")
    _add_problem_flags(curve)
    curve.add_argument("--theta", required=True,
                       help="comma-separated parameters (saturation currents in uA)")
    curve.add_argument("--out", help="write CSV here instead of standard output")

    sub.add_parser("info", help="print default DE settings, search ranges and datasets")
    return parser


# ---------------------------------------------------------------------------


def _load_data(args):
    path = Path(args.data)
    name = None
    if not path.exists() and args.data in BENCHMARKS:
        path = benchmark_path(args.data)
        name = args.data
    temp = args.temp_c
    if temp is None:
        builtin = name or (path.stem if path.stem in BENCHMARKS else None)
        if builtin is None:
            raise UsageError("--temp-c is required for data files that are not bundled datasets")
        temp = BENCHMARKS[builtin][1]
    return load_csv(path, temp, name=name)


def read_bounds_file(path, model: ModelKind) -> ParamBounds:
    """Bounds from a CSV with rows ``name,lower,upper`` (an optional header is skipped)."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"bounds file not found: {path}")
    table = {}
    with path.open(newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or not any(c.strip() for c in row):
                continue
            if lineno == 1 and row[0].strip().lower() == "name":
                continue
            if len(row) != 3:
                raise DatasetError(f"{path}: row {lineno}: expected name,lower,upper")
            try:
                table[row[0].strip().lower()] = (float(row[1]), float(row[2]))
            except ValueError:
                raise DatasetError(f"{path}: row {lineno}: non-numeric bound") from None
    missing = [n for n in model.param_names if n not in table]
    if missing:
        raise DatasetError(f"{path}: missing bounds for {', '.join(missing)}")
    unknown = sorted(set(table) - set(model.param_names))
    if unknown:
        raise DatasetError(f"{path}: unknown parameter names {', '.join(unknown)}")
    try:
        return ParamBounds([table[n][0] for n in model.param_names],
                           [table[n][1] for n in model.param_names])
    except ValueError as exc:
        raise DatasetError(f"{path}: {exc}") from None


def _bounds(args, model: ModelKind, dataset_name: str) -> ParamBounds:
    if args.bounds:
        return read_bounds_file(args.bounds, model)
    try:
        return default_bounds(model, dataset_name)
    except KeyError:
        raise UsageError(
            f"no built-in search range for dataset {dataset_name!r}; pass --bounds"
        ) from None


def cmd_fit(args) -> int:
    model = ModelKind.parse(args.model)
    d = _load_data(args)
    bounds = _bounds(args, model, d.name)
    overrides = {k: v for k, v in dict(np=args.np, cr=args.cr, f=args.f, g=args.gens).items()
                 if v is not None}
    try:
        cfg = DEConfig.for_model(model, seed=args.seed, **overrides)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.runs == 1:
        best = run_de(model, d, bounds, cfg)
        stats = summarize([best])
    else:
        stats = run_batch(model, d, bounds, cfg, args.runs)
        best = stats.best
    report = emit_report(stats, best, dict(model=model, dataset=d.name, config=cfg,
                                           seed_base=cfg.seed), args.out, d=d)
    s = report["stats"]
    print(f"{model.value} on {d.name}: {s['n_runs']} run(s)  min {s['min_5sig']}  "
          f"mean {s['mean_5sig']}  max {s['max_5sig']}  std {s['std']:.3e}")
    print("best theta:", " ".join(f"{x:.10g}" for x in best.best_theta))
    print(f"report written to {Path(args.out) / 'report.json'}")
    return 0


def cmd_certify(args) -> int:
    model = ModelKind.parse(args.model)
    d = _load_data(args)
    bounds = _bounds(args, model, d.name)
    try:
        cfg = BnbConfig(eps_f=args.eps_f, eps_rel=args.eps_rel, eps_x=args.eps_x,
                        timeout=args.timeout_s, max_boxes=args.max_boxes,
                        batch_size=args.batch_size, bisect=args.bisect,
                        gradient_contractor=args.gradient_contractor,
                        local_descent=args.local_descent)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = run_bnb(model, d, bounds, cfg)
    report = certificate_report(result, {"model": model.value, "dataset": d.name})
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text)
    print(text)
    return 0


def cmd_bench(args) -> int:
    cases = [c.strip() for c in args.cases.split(",") if c.strip()]
    unknown = [c for c in cases if c not in CASES]
    if unknown or not cases:
        raise UsageError(f"--cases: unknown case(s) {', '.join(unknown) or '(none)'}; "
                         f"choose from {', '.join(CASES)}")
    rows = []
    print(f"{'case':8s} {'min':>10s} {'mean':>10s} {'max':>10s} {'std':>10s}  expected-min  result")
    for case in cases:
        row = bench_case(case, n_runs=args.runs, seed_base=args.seed)
        rows.append(row.as_dict())
        r = rows[-1]
        print(f"{case:8s} {r['min_5sig']:>10s} {r['mean_5sig']:>10s} {r['max_5sig']:>10s} "
              f"{r['std']:10.3e}  {r['expected_min']:>12s}  {'PASS' if r['pass'] else 'FAIL'}")
    if args.out:
        Path(args.out).write_text(json.dumps({"runs": args.runs, "seed_base": args.seed,
                                              "cases": rows}, indent=2))
    return 0


def cmd_curve(args) -> int:
    model = ModelKind.parse(args.model)
    d = _load_data(args)
    try:
        theta = np.array([float(x) for x in args.theta.split(",")])
    except ValueError:
        raise UsageError(f"--theta: not a comma-separated list of numbers: {args.theta!r}") from None
    if theta.size != model.dimension:
        raise UsageError(f"--theta: {model.name} needs {model.dimension} values, got {theta.size}")
    curve = reconstruct_curve(theta, model, d)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(["v", "i_measured", "i_calculated", "abs_error"])
        for p in curve:
            w.writerow([repr(p.v), repr(p.i_measured), repr(p.i_calculated), repr(p.abs_error)])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_info(args) -> int:
    print("DE settings (Np, Cr, F, G):")
    for model, s in DE_SETTINGS.items():
        print(f"  {model.value}: np={s['np']} cr={s['cr']} f={s['f']} g={s['g']}")
    print("Search ranges (saturation currents in uA):")
    for name in BENCHMARKS:
        for model in ModelKind:
            b = default_bounds(model, name)
            ranges = ", ".join(f"{p}=[{lo:g}, {hi:g}]"
                               for p, lo, hi in zip(model.param_names, b.lower, b.upper))
            print(f"  {model.value}/{name}: {ranges}")
    print("Bundled datasets:")
    for name, (_, t_c) in BENCHMARKS.items():
        s = dataset_summary(load_csv(benchmark_path(name), t_c, name=name))
        print(f"  {name}: {s.count} points, V in [{s.v_min:g}, {s.v_max:g}] V, "
              f"I in [{s.i_min:g}, {s.i_max:g}] A, T = {s.temperature:g} K")
    print("Reference best RMSE over 30 runs (min / mean / max):")
    for (model, name), ref in REFERENCE_RMSE.items():
        print(f"  {model}/{name}: {' / '.join(ref)}")
    return 0


COMMANDS = {"fit": cmd_fit, "certify": cmd_certify, "bench": cmd_bench,
            "curve": cmd_curve, "info": cmd_info}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed the message
        return int(exc.code or 0)
    try:
        return COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"pvextract {args.verb}: error: {exc}", file=sys.stderr)
        return 2
    except (OSError, DatasetError, EvaluationOverflowError, ValueError) as exc:
        print(f"pvextract {args.verb}: error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())
