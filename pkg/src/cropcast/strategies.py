"""Context-based model selection strategies over versioned catalogs.

Five strategies share one interface: given the per-market day contexts,
return the model each market should forecast with.  ``continuous``
retrains daily; ``stability`` retrains on a span that excludes the last
30 days, scores on them, and serves the catalog's best; ``quality_gated``
skips retraining when the recent window contains outliers or a missing
run; the two trend strategies route between a positive and a negative
catalog by the sign of the recent relative-increment sum, at market or
crop level.

Model seeds derive from (global seed, scope, day) only, never the
strategy name, so strategies that happen to train on the same rows train
identical models.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .catalog import DEFAULT_CAPACITY, CatalogEntry, ModelCatalog
from .errors import CropcastError, InsufficientDataError, ValidationError
from .evaluation import DayContext, forecast_metrics, forecast_with
from .features import SupervisedSet
from .models import ar_fit, lstm_train, mlp_train
from .quality import max_run_length
from .seeding import derive_seed
from .stats import TrendPolarity, trend_score

GATING_WINDOW = 7
MISSING_RUN_THRESHOLD = 2
TREND_WINDOW = 7

STRATEGY_NAMES = ("continuous", "stability", "quality_gated",
                  "trend_market", "trend_crop", "ar")


@dataclass(frozen=True)
class Decision:
    date: str
    strategy: str
    action: str
    reason: str


@dataclass(frozen=True)
class RescaledModel:
    """Crop-level shared model plus the market's own target scaling."""

    base: object
    target_mean: float
    target_scale: float
    trained_through: int


def window_trend_scores(prices: np.ndarray, window: int) -> np.ndarray:
    """Trend score of every ``window``-long price window (same arithmetic
    as :func:`cropcast.stats.trend_score`); entry i scores the window
    ending at index i + window - 1."""
    windows = sliding_window_view(np.asarray(prices, dtype=float), window)
    increments = np.diff(windows, axis=1) / windows[:, :-1]
    return increments.sum(axis=1)


def _fit(ctx: DayContext, sup: SupervisedSet, seed: int):
    cfg = ctx.cfg
    if cfg.model_kind == "lstm":
        return lstm_train(sup, cfg.train, units=cfg.lstm_units, seed=seed,
                          trained_through=ctx.day_index)
    return mlp_train(sup, cfg.train, hidden=cfg.mlp_hidden, seed=seed,
                     trained_through=ctx.day_index)


def _validation(ctx: DayContext, model) -> tuple[float, float]:
    """Score a model on the last-horizon span of the training data.

    The forecast is issued from the day just before that span; days with
    no observed truth are ignored.  Returns (inf, inf) when unscorable.
    """
    issue = ctx.day_index - ctx.horizon
    if issue < ctx.k - 1:
        return float("inf"), float("inf")
    try:
        pred = forecast_with(model, ctx, issue)
        truth = ctx.raw_price[issue + 1:issue + 1 + ctx.horizon]
        return forecast_metrics(pred, truth)
    except CropcastError:
        return float("inf"), float("inf")


def pooled_supervised(sups) -> SupervisedSet:
    """Concatenate per-market supervised sets; targets stay in z-space."""
    sups = list(sups)
    if not sups:
        raise InsufficientDataError("nothing to pool")
    first = sups[0]
    if any(s.k != first.k or s.day_width != first.day_width for s in sups):
        raise ValidationError("pooled sets must share k and day width")
    return SupervisedSet(
        inputs=np.vstack([s.inputs for s in sups]),
        targets=np.vstack([s.targets for s in sups]),
        issue_indices=np.concatenate([s.issue_indices for s in sups]),
        k=first.k, day_width=first.day_width, target_mean=0.0, target_scale=1.0)


class Strategy:
    """Base: independent per-market selection plus shared bookkeeping."""

    name = "base"

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        self.capacity = capacity
        self.catalogs: dict = {}
        self.decisions: list[Decision] = []
        self.retrain_count = 0

    @property
    def catalog_count(self) -> int:
        return len(self.catalogs)

    def _log(self, date: str, action: str, reason: str) -> None:
        self.decisions.append(Decision(date, self.name, action, reason))

    def _catalog(self, key) -> ModelCatalog:
        return self.catalogs.setdefault(key, ModelCatalog(capacity=self.capacity))

    def _seed(self, ctx: DayContext, *extra) -> int:
        return derive_seed(ctx.cfg.seed, "train", ctx.market_id, ctx.day_index, *extra)

    def _train_entry(self, ctx: DayContext, sup: SupervisedSet, catalog: ModelCatalog,
                     seed: int, polarity: str = "none") -> CatalogEntry:
        model = _fit(ctx, sup, seed)
        self.retrain_count += 1
        val_ar, val_am = _validation(ctx, model)
        entry = CatalogEntry(model=model, trained_through=ctx.day_index,
                             validation_ar=val_ar, validation_am=val_am,
                             version=catalog.next_version, trend_polarity=polarity)
        catalog.put(entry)
        return entry

    def select(self, ctx: DayContext):
        raise NotImplementedError

    def select_day(self, contexts: dict) -> dict:
        out = {}
        for market_id in sorted(contexts):
            ctx = contexts[market_id]
            try:
                out[market_id] = self.select(ctx)
            except CropcastError as exc:
                self._log(ctx.date, "fail", f"{market_id}: {exc}")
        return out


class ContinuousStrategy(Strategy):
    """Retrain on everything through the issue day, every day."""

    name = "continuous"

    def select(self, ctx: DayContext):
        catalog = self._catalog(ctx.market_id)
        try:
            entry = self._train_entry(ctx, ctx.sup, catalog, self._seed(ctx))
            self._log(ctx.date, "retrain", "daily refresh")
            return entry.model
        except CropcastError as exc:
            if catalog.entries:
                self._log(ctx.date, "fallback", f"training failed: {exc}")
                return catalog.newest().model
            raise


class StabilityStrategy(Strategy):
    """Retrain daily on a held-out-validated span; serve the catalog's best."""

    name = "stability"

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        super().__init__(capacity)
        self.selection_log: list = []

    def select(self, ctx: DayContext):
        catalog = self._catalog(ctx.market_id)
        try:
            cutoff = ctx.day_index - 2 * ctx.horizon
            rows = ctx.sup.issue_indices <= cutoff
            if not rows.any():
                raise InsufficientDataError(
                    "no training rows clear of the validation span")
            self._train_entry(ctx, ctx.sup.subset(rows), catalog, self._seed(ctx))
            self._log(ctx.date, "retrain", "daily refresh with held-out scoring")
        except CropcastError as exc:
            if not catalog.entries:
                raise
            self._log(ctx.date, "fallback", f"training failed: {exc}")
        best = catalog.best("ar")
        self.selection_log.append((ctx.market_id, ctx.day_index, best.validation_ar,
                                   min(e.validation_ar for e in catalog.entries)))
        return best.model


class QualityGatedStrategy(Strategy):
    """Retrain only when the recent window is clean; otherwise serve the best."""

    name = "quality_gated"

    def __init__(self, capacity: int = DEFAULT_CAPACITY,
                 gating_window: int = GATING_WINDOW,
                 missing_run_threshold: int = MISSING_RUN_THRESHOLD):
        super().__init__(capacity)
        self.gating_window = gating_window
        self.missing_run_threshold = missing_run_threshold

    def _gate_reason(self, ctx: DayContext) -> str | None:
        d = ctx.day_index
        lo = max(0, d + 1 - self.gating_window)
        if ctx.report.outlier_mask[lo:d + 1].any():
            return "outlier in recent window"
        if max_run_length(ctx.report.missing_mask[lo:d + 1]) >= self.missing_run_threshold:
            return f"missing run >= {self.missing_run_threshold} in recent window"
        return None

    def select(self, ctx: DayContext):
        catalog = self._catalog(ctx.market_id)
        reason = self._gate_reason(ctx)
        if reason is not None and catalog.entries:
            self._log(ctx.date, "skip", reason)
            return catalog.best("ar").model
        try:
            entry = self._train_entry(ctx, ctx.sup, catalog, self._seed(ctx))
            self._log(ctx.date, "retrain",
                      (f"bootstrap despite {reason}" if reason else "clean window"))
            return entry.model
        except CropcastError as exc:
            if catalog.entries:
                self._log(ctx.date, "fallback", f"training failed: {exc}")
                return catalog.newest().model
            raise


class _TrendBase(Strategy):
    def __init__(self, capacity: int = DEFAULT_CAPACITY, trend_window: int = TREND_WINDOW):
        super().__init__(capacity)
        self.trend_window = trend_window
        self.routing_log: list = []

    def _route(self, ctx: DayContext) -> str:
        window = ctx.prices[ctx.day_index - self.trend_window + 1:ctx.day_index + 1]
        label = trend_score(window)
        polarity = label.polarity.value
        self.routing_log.append((ctx.market_id, ctx.day_index, polarity, label.score))
        self._log(ctx.date, "route", f"{ctx.market_id}: {polarity} trend")
        return polarity

    def _polarity_rows(self, ctx: DayContext, polarity: str) -> np.ndarray:
        scores = window_trend_scores(ctx.prices, self.trend_window)
        idx = ctx.sup.issue_indices
        # rows too early for a full trend window score 0, i.e. the tie branch
        row_scores = np.zeros(idx.size)
        valid = idx >= self.trend_window - 1
        row_scores[valid] = scores[idx[valid] - (self.trend_window - 1)]
        positive = row_scores > 0
        return positive if polarity == TrendPolarity.POSITIVE.value else ~positive


class TrendMarketStrategy(_TrendBase):
    """Positive/negative catalogs per market, trained on that market's rows."""

    name = "trend_market"

    def select(self, ctx: DayContext):
        polarity = self._route(ctx)
        catalog = self._catalog((ctx.market_id, polarity))
        rows = self._polarity_rows(ctx, polarity)
        if not rows.any():
            self._log(ctx.date, "retrain", f"no {polarity}-trend rows; using all rows")
            sup = ctx.sup
        else:
            sup = ctx.sup.subset(rows)
            self._log(ctx.date, "retrain", f"{polarity} catalog refresh")
        try:
            entry = self._train_entry(ctx, sup, catalog,
                                      self._seed(ctx, polarity), polarity)
            return entry.model
        except CropcastError as exc:
            if catalog.entries:
                self._log(ctx.date, "fallback", f"training failed: {exc}")
                return catalog.newest().model
            raise


class TrendCropStrategy(_TrendBase):
    """One shared positive/negative catalog pair over all markets of a crop.

    Each routed polarity retrains once per day on the pooled
    matching-polarity rows of every market; markets then borrow the shared
    model with their own target scaling.
    """

    name = "trend_crop"

    def select_day(self, contexts: dict) -> dict:
        routed = {}
        for market_id in sorted(contexts):
            routed[market_id] = self._route(contexts[market_id])
        any_ctx = contexts[sorted(contexts)[0]]
        for polarity in sorted(set(routed.values())):
            pooled = []
            for market_id in sorted(contexts):
                ctx = contexts[market_id]
                rows = self._polarity_rows(ctx, polarity)
                if rows.any():
                    pooled.append(ctx.sup.subset(rows))
            catalog = self._catalog(polarity)
            try:
                sup = (pooled_supervised(pooled) if pooled
                       else pooled_supervised([c.sup for c in contexts.values()]))
                if not pooled:
                    self._log(any_ctx.date, "retrain",
                              f"no {polarity}-trend rows anywhere; pooling all rows")
                seed = derive_seed(any_ctx.cfg.seed, "train",
                                   f"crop:{any_ctx.crop_id}", any_ctx.day_index, polarity)
                model = _fit(any_ctx, sup, seed)
                self.retrain_count += 1
                scores = [_validation(contexts[m], RescaledModel(
                    base=model, target_mean=contexts[m].frame.target_mean,
                    target_scale=contexts[m].frame.target_scale,
                    trained_through=any_ctx.day_index)) for m in sorted(contexts)]
                val_ar = float(np.mean([s[0] for s in scores]))
                val_am = float(np.mean([s[1] for s in scores]))
                catalog.put(CatalogEntry(
                    model=model, trained_through=any_ctx.day_index,
                    validation_ar=val_ar, validation_am=val_am,
                    version=catalog.next_version, trend_polarity=polarity))
                self._log(any_ctx.date, "retrain", f"{polarity} crop catalog refresh")
            except CropcastError as exc:
                self._log(any_ctx.date, "fail" if not catalog.entries else "fallback",
                          f"{polarity}: {exc}")
        out = {}
        for market_id in sorted(contexts):
            ctx = contexts[market_id]
            catalog = self.catalogs.get(routed[market_id])
            if catalog is None or not catalog.entries:
                self._log(ctx.date, "fail", f"{market_id}: empty {routed[market_id]} catalog")
                continue
            entry = catalog.newest()
            out[market_id] = RescaledModel(
                base=entry.model, target_mean=ctx.frame.target_mean,
                target_scale=ctx.frame.target_scale,
                trained_through=entry.trained_through)
        return out


class ArBaselineStrategy(Strategy):
    """Differenced-AR baseline refit daily on the imputed price history."""

    name = "ar"

    def select(self, ctx: DayContext):
        model = ar_fit(ctx.prices)
        self.retrain_count += 1
        self._log(ctx.date, "retrain", "baseline refit")
        return replace(model, trained_through=ctx.day_index)


def make_strategy(name: str, capacity: int = DEFAULT_CAPACITY, **kwargs) -> Strategy:
    table = {
        "continuous": ContinuousStrategy,
        "stability": StabilityStrategy,
        "quality_gated": QualityGatedStrategy,
        "trend_market": TrendMarketStrategy,
        "trend_crop": TrendCropStrategy,
        "ar": ArBaselineStrategy,
    }
    if name not in table:
        raise ValidationError(f"unknown strategy {name!r}; choose from {STRATEGY_NAMES}")
    if name == "ar":
        return table[name]()
    return table[name](capacity=capacity, **kwargs)
