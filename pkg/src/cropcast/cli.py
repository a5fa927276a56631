"""Command-line front end.

Subcommands: ``synth`` (generate seeded series), ``ingest`` (CSV -> aligned
series files), ``quality`` / ``stats`` / ``features`` (per-series reports),
and ``backtest`` (full strategy evaluation from a JSON config).  Flags
override config-file values; the ``CROPCAST_OUT_DIR`` environment variable
overrides the output directory everywhere.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import os
import sys
from pathlib import Path

from .data import SUNDAY, TradingCalendar, align, read_aligned_csv, write_aligned_csv
from .errors import CropcastError
from .features import FeatureConfig, PRESET_PAPER13, build_feature_frame
from .ingest import load_market_csv, load_weather_csv
from .pipeline import ENV_OUT_DIR, load_run_config, run
from .quality import impute_spline, quality_report
from .seeding import derive_seed
from .stats import residual_stats, seasonal_decompose, stationarity_result
from .synthetic import SyntheticSpec, generate_synthetic


def _out_dir(value: str) -> Path:
    path = Path(os.environ.get(ENV_OUT_DIR, value))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _data_files(data: str) -> list:
    path = Path(data)
    if path.is_dir():
        files = sorted(path.glob("*.csv"))
        if not files:
            raise CropcastError(f"no .csv files under {path}")
        return files
    if path.is_file():
        return [path]
    raise CropcastError(f"no such file or directory: {path}")


def _cmd_synth(args) -> int:
    out = _out_dir(args.out)
    for i in range(1, args.markets + 1):
        market_id = f"M{i}"
        spec = SyntheticSpec(
            n_days=args.n_days, base_price=args.base_price,
            trend_slope=args.trend_slope, seasonal_amplitude=args.seasonal_amplitude,
            seasonal_period=args.seasonal_period, noise_std=args.noise_std,
            ar1_coeff=args.ar1_coeff, missing_rate=args.missing_rate,
            outlier_rate=args.outlier_rate, outlier_scale=args.outlier_scale,
            weather_coupling=args.weather_coupling, regime_length=args.regime_length,
            seed=derive_seed(args.seed, "synthetic", args.crop, market_id),
            market_id=market_id, crop_id=args.crop)
        series = generate_synthetic(spec)
        write_aligned_csv(series, out / f"{market_id}__{args.crop}.csv")
    print(f"wrote {args.markets} series to {out}")
    return 0


def _cmd_ingest(args) -> int:
    out = _out_dir(args.out)
    calendar = TradingCalendar(dt.date.fromisoformat(args.start),
                               dt.date.fromisoformat(args.end), args.closed_weekday)
    markets = load_market_csv(args.market_csv, calendar)
    weather = load_weather_csv(args.weather_csv, calendar) if args.weather_csv else {}
    count = 0
    for (market_id, crop_id), series in sorted(markets.items()):
        if market_id in weather:
            series = align(series, weather[market_id])
        write_aligned_csv(series, out / f"{market_id}__{crop_id}.csv")
        count += 1
    print(f"wrote {count} aligned series to {out}")
    return 0


def _cmd_quality(args) -> int:
    rows = []
    for path in _data_files(args.data):
        series = read_aligned_csv(path)
        report = quality_report(series, multiplier=args.multiplier)
        rows.append([series.market_id, series.crop_id,
                     f"{report.missing_fraction:.6f}", f"{report.outlier_fraction:.6f}",
                     str(report.max_consecutive_missing)])
    _write_rows(args.out, ["market_id", "crop_id", "missing_fraction",
                           "outlier_fraction", "max_consecutive_missing"], rows)
    return 0


def _cmd_stats(args) -> int:
    rows = []
    for path in _data_files(args.data):
        series = read_aligned_csv(path)
        prices = impute_spline(series).price
        result = stationarity_result(prices)
        mean, std = residual_stats(seasonal_decompose(prices, args.period))
        rows.append([series.market_id, f"{result.adf_stat:.6f}",
                     f"{result.kpss_stat:.6f}", result.classification.value,
                     f"{mean:.6f}", f"{std:.6f}"])
    _write_rows(args.out, ["market_id", "adf_stat", "kpss_stat", "classification",
                           "residual_mean", "residual_std"], rows)
    return 0


def _cmd_features(args) -> int:
    series = read_aligned_csv(Path(args.data))
    cfg = (FeatureConfig.preset(PRESET_PAPER13, standardize=args.standardized)
           if args.preset == PRESET_PAPER13
           else FeatureConfig(standardize=args.standardized))
    report = quality_report(series)
    frame = build_feature_frame(impute_spline(series), report, cfg)
    matrix = frame.values if args.standardized else frame.raw
    rows = [[frame.calendar.date_of(i).isoformat()] + [repr(v) for v in matrix[i]]
            for i in range(len(frame))]
    _write_rows(args.out, ["date"] + list(frame.columns), rows)
    return 0


def _cmd_backtest(args) -> int:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.strategies:
        overrides["strategies"] = tuple(args.strategies.split(","))
    if args.out:
        overrides["out_dir"] = args.out
    if args.train_days is not None:
        overrides["train_days"] = args.train_days
    if args.test_days is not None:
        overrides["test_days"] = args.test_days
    if args.model:
        overrides["model_kind"] = args.model
    preset = PRESET_PAPER13 if args.preset == PRESET_PAPER13 else None
    config = load_run_config(args.config, feature_preset=preset, **overrides)
    status = run(config)
    print(f"backtest finished with status {status}; artifacts in {config.out_dir}")
    return status


def _write_rows(out_path: str, header: list, rows) -> None:
    path = Path(out_path)
    if path.parent != Path("."):
        path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"wrote {path}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cropcast",
        description="Crop price forecasting with data-quality-aware features "
                    "and catalog-based model selection")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate seeded synthetic series files")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--markets", type=int, default=1)
    p.add_argument("--crop", default="SYN")
    p.add_argument("--n-days", type=int, default=1125)
    p.add_argument("--base-price", type=float, default=2000.0)
    p.add_argument("--trend-slope", type=float, default=0.0)
    p.add_argument("--seasonal-amplitude", type=float, default=0.0)
    p.add_argument("--seasonal-period", type=int, default=120)
    p.add_argument("--noise-std", type=float, default=0.0)
    p.add_argument("--ar1-coeff", type=float, default=0.0)
    p.add_argument("--missing-rate", type=float, default=0.0)
    p.add_argument("--outlier-rate", type=float, default=0.0)
    p.add_argument("--outlier-scale", type=float, default=3.0)
    p.add_argument("--weather-coupling", type=float, default=0.0)
    p.add_argument("--regime-length", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="load market/weather CSVs into aligned series")
    p.add_argument("--market-csv", required=True)
    p.add_argument("--weather-csv")
    p.add_argument("--start", required=True, help="calendar start date (ISO)")
    p.add_argument("--end", required=True, help="calendar end date (ISO)")
    p.add_argument("--closed-weekday", type=int, default=SUNDAY)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("quality", help="missing/outlier profile per series")
    p.add_argument("--data", required=True, help="aligned series file or directory")
    p.add_argument("--out", default="quality.csv")
    p.add_argument("--multiplier", type=float, default=1.0)
    p.set_defaults(func=_cmd_quality)

    p = sub.add_parser("stats", help="stationarity and decomposition report")
    p.add_argument("--data", required=True)
    p.add_argument("--out", default="stats.csv")
    p.add_argument("--period", type=int, default=6)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("features", help="dump the per-day feature matrix")
    p.add_argument("--data", required=True, help="one aligned series file")
    p.add_argument("--out", default="features.csv")
    p.add_argument("--preset", choices=["default", PRESET_PAPER13], default="default")
    p.add_argument("--standardized", action="store_true")
    p.set_defaults(func=_cmd_features)

    p = sub.add_parser("backtest", help="walk-forward strategy evaluation")
    p.add_argument("--config", required=True, help="JSON run configuration")
    p.add_argument("--seed", type=int)
    p.add_argument("--strategies", help="comma-separated strategy names")
    p.add_argument("--preset", choices=["default", PRESET_PAPER13], default="default")
    p.add_argument("--out")
    p.add_argument("--train-days", type=int)
    p.add_argument("--test-days", type=int)
    p.add_argument("--model", choices=["mlp", "lstm"])
    p.set_defaults(func=_cmd_backtest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CropcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
