"""Declarative run configuration and the batch pipeline behind the CLI.

A run executes ingestion (or synthesis) -> quality -> features -> strategy
evaluation for every requested (market, crop, strategy) combination and
writes CSV artifacts plus a machine-readable manifest.  Identical configs
produce byte-identical summary CSVs.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime as dt
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .data import SUNDAY, TradingCalendar, align
from .errors import ConfigError, CropcastError
from .evaluation import EvalConfig, rolling_evaluate_many
from .features import FeatureConfig, PRESET_PAPER13
from .ingest import load_market_csv, load_weather_csv
from .models import TrainConfig
from .seeding import derive_seed
from .strategies import STRATEGY_NAMES, make_strategy
from .synthetic import SyntheticSpec, generate_synthetic

ENV_OUT_DIR = "CROPCAST_OUT_DIR"
SUMMARY_NAME = "summary.csv"
DECISIONS_NAME = "decisions.csv"
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class RunConfig:
    """Everything a batch run needs; mirrors the JSON config schema."""

    out_dir: str
    seed: int = 0
    strategies: tuple = ("continuous",)
    model_kind: str = "mlp"
    train_days: int = 997
    test_days: int = 128
    feature: FeatureConfig = field(default_factory=FeatureConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    synthetic: tuple = ()            # SyntheticSpec per market
    market_csv: str | None = None
    weather_csv: str | None = None
    start_date: str | None = None
    end_date: str | None = None
    closed_weekday: int = SUNDAY
    markets: tuple = ()              # selectors; empty = all
    crops: tuple = ()
    outlier_multiplier: float = 1.0
    catalog_capacity: int = 30
    plots: bool = False
    ced_metric: str = "mape"
    mlp_hidden: int = 10
    lstm_units: tuple = (100, 100)

    def __post_init__(self):
        if not self.strategies:
            raise ConfigError("at least one strategy is required")
        for name in self.strategies:
            if name not in STRATEGY_NAMES:
                raise ConfigError(f"unknown strategy {name!r}")
        if self.test_days < 1:
            raise ConfigError("test_days must be >= 1")
        if self.train_days < self.feature.k + self.feature.horizon:
            raise ConfigError("train_days too small for one supervised row")
        if not self.synthetic and not self.market_csv:
            raise ConfigError("config needs either synthetic specs or a market CSV")
        if self.market_csv and (not self.start_date or not self.end_date):
            raise ConfigError("CSV ingestion needs start_date and end_date")

    def eval_config(self) -> EvalConfig:
        return EvalConfig(
            train_days=self.train_days, test_days=self.test_days,
            feature=self.feature, train=self.train, model_kind=self.model_kind,
            seed=self.seed, outlier_multiplier=self.outlier_multiplier,
            ced_metric=self.ced_metric, lstm_units=self.lstm_units,
            mlp_hidden=self.mlp_hidden)


def _feature_from_dict(raw: dict) -> FeatureConfig:
    raw = dict(raw)
    preset = raw.pop("preset", None)
    for key in ("fft_retained", "sma_windows", "ema_coms", "macd_spans", "include_time"):
        if key in raw:
            raw[key] = tuple(raw[key])
    if preset == PRESET_PAPER13:
        return FeatureConfig.preset(preset, **raw)
    if preset not in (None, "default"):
        raise ConfigError(f"unknown feature preset {preset!r}")
    return FeatureConfig(**raw)


def _synthetic_specs(raw: dict, seed: int) -> tuple:
    """Expand {"markets": N, "crop_id": ..., "base": {...}} into per-market
    specs; each market's generator seed derives from the run seed."""
    n_markets = int(raw.get("markets", 1))
    crop_id = raw.get("crop_id", "SYN")
    base = dict(raw.get("base", {}))
    specs = []
    for i in range(1, n_markets + 1):
        market_id = f"M{i}"
        fields = dict(base)
        fields["market_id"] = market_id
        fields["crop_id"] = crop_id
        fields.setdefault("seed", derive_seed(seed, "synthetic", crop_id, market_id))
        specs.append(SyntheticSpec(**fields))
    return tuple(specs)


def load_run_config(path, feature_preset: str | None = None, **overrides) -> RunConfig:
    """Parse the JSON config file; keyword overrides win over file values.

    ``feature_preset`` merges a preset into the file's feature section
    (keeping its other fields) rather than replacing it.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if feature_preset:
        raw["feature"] = dict(raw.get("feature", {}), preset=feature_preset)
    seed = int(overrides.get("seed", raw.get("seed", 0)))
    kwargs = {
        "out_dir": raw.get("out_dir", "cropcast-out"),
        "seed": seed,
        "strategies": tuple(raw.get("strategies", ["continuous"])),
        "model_kind": raw.get("model", "mlp"),
        "train_days": int(raw.get("train_days", 997)),
        "test_days": int(raw.get("test_days", 128)),
        "outlier_multiplier": float(raw.get("outlier_multiplier", 1.0)),
        "catalog_capacity": int(raw.get("catalog_capacity", 30)),
        "plots": bool(raw.get("plots", False)),
        "ced_metric": raw.get("ced_metric", "mape"),
        "markets": tuple(raw.get("markets", [])),
        "crops": tuple(raw.get("crops", [])),
        "mlp_hidden": int(raw.get("mlp_hidden", 10)),
        "lstm_units": tuple(raw.get("lstm_units", [100, 100])),
    }
    if "feature" in raw:
        kwargs["feature"] = _feature_from_dict(raw["feature"])
    if "train" in raw:
        kwargs["train"] = TrainConfig(**raw["train"])
    if "synthetic" in raw:
        kwargs["synthetic"] = _synthetic_specs(raw["synthetic"], seed)
    if "data" in raw:
        data = raw["data"]
        kwargs["market_csv"] = data.get("market_csv")
        kwargs["weather_csv"] = data.get("weather_csv")
        kwargs["start_date"] = data.get("start")
        kwargs["end_date"] = data.get("end")
        kwargs["closed_weekday"] = int(data.get("closed_weekday", SUNDAY))
    for key, value in overrides.items():
        if value is not None:
            kwargs[key] = value
    if ENV_OUT_DIR in os.environ:
        kwargs["out_dir"] = os.environ[ENV_OUT_DIR]
    return RunConfig(**kwargs)


def collect_series(config: RunConfig) -> list:
    """Materialize the (market, crop) series the run will evaluate."""
    series = []
    if config.synthetic:
        for spec in config.synthetic:
            series.append(generate_synthetic(spec))
    else:
        calendar = TradingCalendar(
            dt.date.fromisoformat(config.start_date),
            dt.date.fromisoformat(config.end_date), config.closed_weekday)
        markets = load_market_csv(config.market_csv, calendar)
        weather = (load_weather_csv(config.weather_csv, calendar)
                   if config.weather_csv else {})
        for (market_id, crop_id), ms in sorted(markets.items()):
            if market_id in weather:
                series.append(align(ms, weather[market_id]))
            else:
                series.append(ms)
    if config.markets:
        series = [s for s in series if s.market_id in config.markets]
    if config.crops:
        series = [s for s in series if s.crop_id in config.crops]
    if not series:
        raise ConfigError("selectors matched no series")
    return series


def _write_csv(path: Path, header: list, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _plot_report(report, directory: Path) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    evaluable = [r for r in report.records if r.evaluable]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot([r.issue_date for r in evaluable], [r.mape for r in evaluable])
    ax.set_xlabel("issue date")
    ax.set_ylabel("MAPE (%)")
    ax.set_title(f"{report.market_id} / {report.strategy}: error variation")
    ax.tick_params(axis="x", labelrotation=90, labelsize=6)
    fig.tight_layout()
    fig.savefig(directory / "errors.svg")
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(report.ced_points[:, 0], report.ced_points[:, 1])
    ax.set_xlabel("error threshold")
    ax.set_ylabel("fraction within threshold")
    ax.set_title(f"{report.market_id} / {report.strategy}: CED")
    fig.tight_layout()
    fig.savefig(directory / "ced.svg")
    plt.close(fig)


def run(config: RunConfig) -> int:
    """Execute the full pipeline; returns 0 iff every series completed."""
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    series = collect_series(config)
    crops = sorted({s.crop_id for s in series})
    eval_cfg = config.eval_config()

    summary_rows = []
    decision_rows = []
    errors: list[str] = []
    for strategy_name in config.strategies:
        for crop in crops:
            group = [s for s in series if s.crop_id == crop]
            strategy = make_strategy(strategy_name, capacity=config.catalog_capacity)
            try:
                reports = rolling_evaluate_many(group, strategy, eval_cfg)
            except CropcastError as exc:
                for s in group:
                    errors.append(f"{strategy_name}/{s.market_id}/{crop}: {exc}")
                continue
            for decision in strategy.decisions:
                decision_rows.append(
                    [decision.date, decision.strategy, decision.action, decision.reason])
            for market_id in sorted(reports):
                report = reports[market_id]
                label = market_id if len(crops) == 1 else f"{market_id}:{crop}"
                if report.p == 0:
                    errors.append(f"{strategy_name}/{label}: no evaluable forecasts")
                summary_rows.append([
                    strategy_name, label, f"{report.ar:.6f}", f"{report.am:.6f}",
                    f"{report.aoc:.6f}"])
                sub = out_dir / f"{strategy_name}__{label.replace(':', '_')}"
                sub.mkdir(parents=True, exist_ok=True)
                _write_csv(sub / "errors.csv", ["issue_date", "rmse", "mape"],
                           [[r.issue_date, f"{r.rmse:.6f}", f"{r.mape:.6f}"]
                            for r in report.records if r.evaluable])
                _write_csv(sub / "ced.csv", ["threshold", "fraction"],
                           [[f"{t:.6f}", f"{f:.6f}"] for t, f in report.ced_points])
                if config.plots and report.p:
                    _plot_report(report, sub)

    summary_rows.sort(key=lambda row: (row[0], row[1]))
    _write_csv(out_dir / SUMMARY_NAME, ["strategy", "market", "ar", "am", "aoc"],
               summary_rows)
    _write_csv(out_dir / DECISIONS_NAME, ["date", "strategy", "action", "reason"],
               decision_rows)

    manifest = {
        "package_version": __version__,
        "numpy_version": np.__version__,
        "seed": config.seed,
        "config": _config_dict(config),
        "series": [{"market_id": s.market_id, "crop_id": s.crop_id, "days": len(s)}
                   for s in series],
        "errors": errors,
    }
    (out_dir / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return 0 if not errors else 1


def _config_dict(config: RunConfig) -> dict:
    def convert(value):
        if dataclasses.is_dataclass(value) and not isinstance(value, type):
            return {k: convert(v) for k, v in dataclasses.asdict(value).items()}
        if isinstance(value, (tuple, list)):
            return [convert(v) for v in value]
        return value

    return {f.name: convert(getattr(config, f.name))
            for f in dataclasses.fields(config)}
