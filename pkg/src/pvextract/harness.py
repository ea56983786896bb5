"""Repeated DE runs, RMSE statistics, I-V curve reconstruction and reports."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field, replace
from decimal import Decimal
from pathlib import Path

import numpy as np

from .benchmarks import CASES, DE_SETTINGS, REFERENCE_RMSE, default_bounds
from .certify import BnbResult
from .data import IVDataset, load_benchmark
from .de import DEConfig, FitResult, run_de
from .objective import ModelKind, ParamBounds, format_rmse_5sig, predict, rmse_from_sse


@dataclass(frozen=True)
class RunSummary:
    """Outcome of one DE run inside a batch."""

    seed: int
    rmse: float
    sse: float
    theta: tuple
    n_evals: int
    n_overflow: int
    runtime: float = field(compare=False)


@dataclass
class RunStats:
    """RMSE statistics over a batch of runs.

    ``std`` is the population standard deviation (divides by ``n_runs``).
    """

    min: float
    mean: float
    max: float
    std: float
    n_runs: int
    per_run: list
    best: FitResult | None = field(default=None, repr=False, compare=False)

    @property
    def rmses(self) -> np.ndarray:
        return np.array([r.rmse for r in self.per_run])

    def formatted(self, rounding: str = "truncate") -> dict:
        return {k: format_rmse_5sig(getattr(self, k), rounding) for k in ("min", "mean", "max")}


def summarize(results: list[FitResult]) -> RunStats:
    if not results:
        raise ValueError("no runs to summarise")
    per_run = [
        RunSummary(r.seed, r.best_rmse, r.best_sse, tuple(r.best_theta.tolist()),
                   r.n_evals, r.n_overflow, r.runtime)
        for r in results
    ]
    rm = np.array([r.best_rmse for r in results])
    mean = math.fsum(rm.tolist()) / rm.size
    # clamp against last-bit rounding so that min <= mean <= max holds exactly
    mean = min(max(mean, float(rm.min())), float(rm.max()))
    std = math.sqrt(math.fsum(((rm - mean) ** 2).tolist()) / rm.size)
    best = min(results, key=lambda r: (r.best_sse, r.seed))
    return RunStats(float(rm.min()), mean, float(rm.max()), std, rm.size, per_run, best)


def run_batch(model, d: IVDataset, bounds: ParamBounds, cfg: DEConfig, n_runs: int,
              progress=None) -> RunStats:
    """Run DE ``n_runs`` times with seeds ``cfg.seed + k`` and aggregate the RMSEs.

    ``progress``, if given, is called with each finished :class:`FitResult`.
    """
    if int(n_runs) != n_runs or n_runs < 1:
        raise ValueError(f"n_runs must be an integer >= 1, got {n_runs!r}")
    results = []
    for k in range(n_runs):
        r = run_de(model, d, bounds, replace(cfg, seed=cfg.seed + k))
        r.final_population = None  # keep batches light
        results.append(r)
        if progress is not None:
            progress(r)
    return summarize(results)


@dataclass(frozen=True)
class CurvePoint:
    v: float
    i_measured: float
    i_calculated: float
    abs_error: float


def reconstruct_curve(theta, model, d: IVDataset) -> list[CurvePoint]:
    """Model current at every measured point, with the absolute error."""
    i_calc = predict(np.asarray(theta, dtype=float), model, d)
    err = np.abs(d.current - i_calc)
    return [
        CurvePoint(float(v), float(im), float(ic), float(e))
        for v, im, ic, e in zip(d.voltage, d.current, i_calc, err)
    ]


def curve_rmse(curve: list[CurvePoint]) -> float:
    """RMS of the absolute errors, summed left to right like the objective."""
    acc = 0.0
    for p in curve:
        acc += p.abs_error * p.abs_error
    return rmse_from_sse(acc, len(curve))


def _write_rows(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


def _config_dict(cfg) -> dict:
    return {k: v for k, v in asdict(cfg).items()}


def emit_report(stats: RunStats, best: FitResult, meta: dict, out_dir, d: IVDataset | None = None,
                stem: str = "report") -> dict:
    """Write ``<stem>.json`` plus curve and history CSV files into ``out_dir``.

    ``meta`` carries ``model``, ``dataset``, ``config`` (a :class:`DEConfig`
    or dict) and ``seed_base``. The curve table needs the dataset; pass it as
    ``d`` or let it be looked up by name among the bundled benchmarks.
    Floats are written with full round-trip precision.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if d is None:
        d = load_benchmark(meta["dataset"])
    curve_name = f"{stem}_curve.csv"
    hist_name = f"{stem}_history.csv"

    curve = reconstruct_curve(best.best_theta, best.model, d)
    _write_rows(out / curve_name, ["v", "i_measured", "i_calculated", "abs_error"],
                [[repr(p.v), repr(p.i_measured), repr(p.i_calculated), repr(p.abs_error)] for p in curve])
    _write_rows(out / hist_name, ["generation", "best_rmse"],
                [[g, repr(float(r))] for g, r in enumerate(best.history)])

    cfg = meta.get("config")
    report = {
        "meta": {
            "model": ModelKind.parse(meta["model"]).value,
            "dataset": meta["dataset"],
            "config": _config_dict(cfg) if hasattr(cfg, "__dataclass_fields__") else cfg,
            "seed_base": meta.get("seed_base"),
        },
        "stats": {
            "min": stats.min,
            "mean": stats.mean,
            "max": stats.max,
            "std": stats.std,
            "n_runs": stats.n_runs,
            **{f"{k}_5sig": s for k, s in stats.formatted().items()},
            "per_run_rmse": stats.rmses.tolist(),
        },
        "best": {
            "theta": best.best_theta.tolist(),
            "sse": best.best_sse,
            "rmse": best.best_rmse,
            "rmse_5sig": format_rmse_5sig(best.best_rmse),
            "runtime_s": best.runtime,
            "seed": best.seed,
        },
        "files": {"curve_csv": curve_name, "history_csv": hist_name},
    }
    (out / f"{stem}.json").write_text(json.dumps(report, indent=2))
    return report


def certificate_report(result: BnbResult, meta: dict) -> dict:
    """JSON-ready description of an enclosure."""
    return {
        "meta": meta,
        "f_lower": result.f_lower,
        "f_upper": result.f_upper,
        "rmse_lower": result.rmse_lower,
        "rmse_upper": result.rmse_upper,
        "rmse_upper_5sig": format_rmse_5sig(result.rmse_upper),
        "gap": result.rmse_gap,
        "gap_sse": result.gap,
        "certified": result.certified,
        "incumbent": result.incumbent.tolist(),
        "n_solution_boxes": len(result.solution_boxes),
        "boxes_processed": result.boxes_processed,
        "elapsed_s": result.elapsed,
        "terminated_by": result.terminated_by,
    }


# ---------------------------------------------------------------------------
# benchmark protocol
# ---------------------------------------------------------------------------


@dataclass
class BenchRow:
    case: str
    model: str
    dataset: str
    stats: RunStats
    expected: tuple  # (min, mean, max) strings
    passed: bool

    def as_dict(self) -> dict:
        got = self.stats.formatted()
        return {
            "case": self.case,
            "model": self.model,
            "dataset": self.dataset,
            "min": self.stats.min, "mean": self.stats.mean, "max": self.stats.max,
            "std": self.stats.std, "n_runs": self.stats.n_runs,
            "min_5sig": got["min"], "mean_5sig": got["mean"], "max_5sig": got["max"],
            "expected_min": self.expected[0], "expected_mean": self.expected[1],
            "expected_max": self.expected[2],
            "pass": self.passed,
        }


def reference_check(stats: RunStats, expected: tuple) -> bool:
    """Best run matches the reference minimum at 5 significant digits and no
    run is worse than the reference maximum."""
    got = stats.formatted()
    return got["min"] == expected[0] and Decimal(got["max"]) <= Decimal(expected[2])


def bench_case(case: str, n_runs: int = 30, seed_base: int = 0, progress=None) -> BenchRow:
    if case not in CASES:
        raise KeyError(f"unknown case {case!r}; choose from {sorted(CASES)}")
    model, dataset = CASES[case]
    d = load_benchmark(dataset)
    cfg = DEConfig(**DE_SETTINGS[ModelKind.parse(model)], seed=seed_base)
    stats = run_batch(model, d, default_bounds(model, dataset), cfg, n_runs, progress)
    expected = REFERENCE_RMSE[(model, dataset)]
    return BenchRow(case, model, dataset, stats, expected, reference_check(stats, expected))
