"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line.  Criteria 7 and 8 run full-scale walk-forward protocols
(997 train / 128 test days over 7 markets) and dominate the runtime.
"""

import time

import numpy as np
from cropcast.evaluation import (EvalConfig, aoc, ced_curve, forecast_metrics,
                                 rolling_evaluate, rolling_evaluate_many)
from cropcast.features import FeatureConfig, SupervisedSet, fft_smooth
from cropcast.models import TrainConfig, gradient_check, lstm_train, mlp_train
from cropcast.models.common import flatten_params
from cropcast.models.lstm import _init_arrays
from cropcast.models.mlp import _init_vector
from cropcast.quality import detect_outliers_iqr, impute_spline
from cropcast.seeding import derive_seed
from cropcast.stats import adf_test, kpss_test, seasonal_decompose, trend_score
from cropcast.strategies import make_strategy
from cropcast.synthetic import SyntheticSpec, generate_synthetic

from test_quality import oracle_iqr_mask


def report(capsys, number, name, ok, detail=""):
    with capsys.disabled():
        status = "PASS" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"\nACCEPTANCE {number} {name}: {status}{suffix}")
    assert ok, f"criterion {number} {name} failed: {detail}"


def test_c1_oracle_equivalence(capsys):
    """IQR masks match a brute-force quartile oracle on 1000 seeded sequences."""
    start = time.time()
    mismatches = 0
    for seed in range(1000):
        rng = np.random.default_rng(derive_seed(1, "c1", seed))
        n = int(rng.integers(5, 120))
        values = rng.normal(100.0, rng.uniform(0.5, 20.0), size=n)
        if seed % 4 == 0:
            values[rng.integers(n)] *= rng.choice([0.2, 5.0])
        if not np.array_equal(detect_outliers_iqr(values), oracle_iqr_mask(values)):
            mismatches += 1
    elapsed = time.time() - start
    report(capsys, 1, "oracle-equivalence",
           mismatches == 0 and elapsed < 5.0,
           f"{mismatches} mismatches in 1000 runs, {elapsed:.1f}s < 5s")


def test_c2_numerical_checks(capsys):
    """Analytic gradients vs central differences; monotone solver history."""
    start = time.time()
    rng = np.random.default_rng(7)

    x = rng.normal(size=(6, 20))
    y = rng.normal(size=(6, 8))
    sup = SupervisedSet(inputs=x, targets=y, issue_indices=np.arange(6), k=4,
                        day_width=5, target_mean=0.0, target_scale=1.0)
    mlp = mlp_train(sup, TrainConfig(max_iter=1), seed=1)
    mlp_errors = [gradient_check(mlp.with_params(_init_vector(20, 10, 8, s)),
                                 x, y, seed=s) for s in range(3)]

    xs = rng.normal(size=(4, 6, 7))
    ys = rng.normal(size=(4, 5))
    sup_l = SupervisedSet(inputs=xs.reshape(4, 42), targets=ys,
                          issue_indices=np.arange(4), k=6, day_width=7,
                          target_mean=0.0, target_scale=1.0)
    lstm = lstm_train(sup_l, TrainConfig(max_iter=1), units=(9, 9), seed=2)
    lstm_errors = [
        gradient_check(lstm.with_params(flatten_params(_init_arrays(7, (9, 9), 5, s))),
                       xs, ys, seed=s) for s in range(3)]

    xt = rng.uniform(0.5, 1.5, size=(80, 12))
    yt = xt @ rng.normal(size=(12, 6)) + rng.normal(size=6) \
        + 0.3 * rng.normal(size=(80, 6))
    sup_t = SupervisedSet(inputs=xt, targets=yt, issue_indices=np.arange(80), k=4,
                          day_width=3, target_mean=0.0, target_scale=1.0)
    trained = mlp_train(sup_t, TrainConfig(max_iter=300, tolerance=1e-10), seed=3)
    history = trained.loss_history
    monotone = all(b <= a + 1e-12 for a, b in zip(history, history[1:]))

    elapsed = time.time() - start
    report(capsys, 2, "numerical-checks",
           max(mlp_errors) < 1e-4 and max(lstm_errors) < 1e-3
           and monotone and len(history) > 10 and elapsed < 30.0,
           f"mlp grad {max(mlp_errors):.2e} < 1e-4, lstm grad {max(lstm_errors):.2e}"
           f" < 1e-3, {len(history)} monotone steps, {elapsed:.1f}s < 30s")


def test_c3_transform_identities(capsys):
    """FFT full-retention identity, decomposition identity, imputation laws."""
    start = time.time()
    ok = True
    for seed in range(100):
        rng = np.random.default_rng(derive_seed(3, "fft", seed))
        values = rng.normal(size=int(rng.integers(8, 150)))
        ok &= np.abs(fft_smooth(values, values.size + 1) - values).max() < 1e-9

    for seed in range(100):
        rng = np.random.default_rng(derive_seed(3, "decomp", seed))
        values = np.cumsum(rng.normal(size=80)) + rng.uniform(50, 150)
        d = seasonal_decompose(values, int(rng.integers(2, 12)))
        defined = ~np.isnan(d.trend)
        recon = d.trend[defined] + d.seasonal[defined] + d.residual[defined]
        scale = np.maximum(np.abs(values[defined]), 1.0)
        ok &= (np.abs(recon - values[defined]) / scale).max() < 1e-9

    for seed in range(100):
        spec = SyntheticSpec(n_days=120, noise_std=30.0, ar1_coeff=0.4,
                             seasonal_amplitude=50.0, missing_rate=0.08,
                             seed=derive_seed(3, "impute", seed))
        series = generate_synthetic(spec)
        observed = ~np.isnan(series.price)
        once = impute_spline(series)
        twice = impute_spline(once)
        ok &= np.array_equal(once.price, twice.price)
        ok &= np.array_equal(once.price[observed], series.price[observed])

    elapsed = time.time() - start
    report(capsys, 3, "transform-identities", ok and elapsed < 10.0,
           f"300 seeded series, {elapsed:.1f}s < 10s")


def test_c4_statistical_test_behavior(capsys):
    """ADF/KPSS rejection rates on white noise and random walks."""
    start = time.time()
    n_trials = 200
    adf_wn = kpss_wn = adf_rw = kpss_rw = 0
    for trial in range(n_trials):
        wn = np.random.default_rng(derive_seed(4, "wn", trial)).normal(size=500)
        rw = np.cumsum(np.random.default_rng(derive_seed(4, "rw", trial))
                       .normal(size=500))
        adf_wn += adf_test(wn).reject_unit_root
        kpss_wn += kpss_test(wn).reject_stationarity
        adf_rw += adf_test(rw).reject_unit_root
        kpss_rw += kpss_test(rw).reject_stationarity
    elapsed = time.time() - start
    ok = (adf_wn >= 0.9 * n_trials and kpss_wn <= 0.1 * n_trials
          and adf_rw <= 0.1 * n_trials and kpss_rw >= 0.9 * n_trials
          and elapsed < 60.0)
    report(capsys, 4, "statistical-test-behavior", ok,
           f"wn: ADF {adf_wn}/200 >= 180, KPSS {kpss_wn}/200 <= 20; "
           f"rw: ADF {adf_rw}/200 <= 20, KPSS {kpss_rw}/200 >= 180; "
           f"{elapsed:.1f}s < 60s")


def test_c5_metric_correctness(capsys):
    """Hand-computed metric values, missing-truth exclusion, AOC-mean law."""
    rmse, mape = forecast_metrics(np.full(30, 110.0), np.full(30, 100.0))
    exact = rmse == 10.0 and mape == 10.0

    rng = np.random.default_rng(5)
    truth = rng.uniform(90, 110, size=30)
    truth[[2, 9, 17, 25]] = np.nan
    pred = rng.uniform(90, 110, size=30)
    base = forecast_metrics(pred, truth)
    perturbed = pred.copy()
    perturbed[[2, 9, 17, 25]] = 1e9
    ignored = forecast_metrics(perturbed, truth) == base

    aoc_ok = True
    for seed in range(50):
        rng = np.random.default_rng(derive_seed(5, "aoc", seed))
        errors = rng.exponential(rng.uniform(2, 20), size=int(rng.integers(10, 100)))
        area = aoc(ced_curve(errors))
        aoc_ok &= abs(area - errors.mean()) <= 0.01 * errors.mean()

    report(capsys, 5, "metric-correctness", exact and ignored and aoc_ok,
           f"constant offset exact ({rmse}, {mape}); missing-truth ignored: "
           f"{ignored}; AOC within 1% of mean on 50 sets: {aoc_ok}")


def _small_cfg(seed=6):
    return EvalConfig(train_days=120, test_days=10,
                      feature=FeatureConfig(k=5, horizon=10),
                      train=TrainConfig(max_iter=25), seed=seed)


def _contract_series(seed, n=140, **kw):
    fields = dict(n_days=n, noise_std=25.0, ar1_coeff=0.4, seasonal_amplitude=50.0,
                  trend_slope=0.8, seed=seed, market_id=f"M{seed}", crop_id="TOM")
    fields.update(kw)
    return generate_synthetic(SyntheticSpec(**fields))


def test_c6_framework_contracts(capsys):
    """No-lookahead mutations, stability argmin, gate equivalence, routing."""
    cfg = _small_cfg()

    base = _contract_series(61)
    reference = rolling_evaluate(base, make_strategy("continuous"), cfg)
    lookahead_ok = True
    mutation_rng = np.random.default_rng(derive_seed(6, "mutations"))
    for _ in range(20):
        j = int(mutation_rng.integers(cfg.train_days, len(base)))
        column = str(mutation_rng.choice(["price", "temp", "arrival"]))
        values = getattr(base, column).copy()
        values[j] = (values[j] if np.isfinite(values[j]) else 100.0) * 3.0 + 7.0
        mutated = base.with_columns(**{column: values})
        run = rolling_evaluate(mutated, make_strategy("continuous"), cfg)
        for ref, got in zip(reference.records, run.records):
            if ref.issue_index < j:
                lookahead_ok &= bool(np.array_equal(ref.prediction, got.prediction))

    stability = make_strategy("stability")
    rolling_evaluate(_contract_series(62), stability, cfg)
    argmin_ok = (len(stability.selection_log) == cfg.test_days
                 and all(chosen == best for _, _, chosen, best
                         in stability.selection_log))

    clean = _contract_series(63, noise_std=4.0, ar1_coeff=0.0,
                             seasonal_amplitude=60.0, trend_slope=0.0)
    cont = rolling_evaluate(clean, make_strategy("continuous"), cfg)
    gated = rolling_evaluate(clean, make_strategy("quality_gated"), cfg)
    gate_ok = all(np.array_equal(a.prediction, b.prediction)
                  and a.rmse == b.rmse and a.mape == b.mape
                  for a, b in zip(cont.records, gated.records))

    trend = make_strategy("trend_market")
    routed_series = _contract_series(64, regime_length=40, trend_slope=4.0)
    rolling_evaluate(routed_series, trend, cfg)
    prices = impute_spline(routed_series).price
    routing_ok = len(trend.routing_log) == cfg.test_days
    for _, day, polarity, score in trend.routing_log:
        label = trend_score(prices[day - 6:day + 1])
        routing_ok &= polarity == label.polarity.value and score == label.score

    flat = _contract_series(65, noise_std=0.0, ar1_coeff=0.0,
                            seasonal_amplitude=0.0, trend_slope=0.0)
    tie_strategy = make_strategy("trend_market")
    rolling_evaluate(flat, tie_strategy, cfg)
    tie_ok = all(polarity == "negative" and score == 0.0
                 for _, _, polarity, score in tie_strategy.routing_log)

    report(capsys, 6, "framework-contracts",
           lookahead_ok and argmin_ok and gate_ok and routing_ok and tie_ok,
           f"no-lookahead x20: {lookahead_ok}; stability argmin: {argmin_ok}; "
           f"gated==continuous: {gate_ok}; routing: {routing_ok}; "
           f"score-0 tie negative: {tie_ok}")


def _weather_scenario(market):
    return SyntheticSpec(
        n_days=1125, base_price=2000.0, trend_slope=0.1, seasonal_amplitude=120.0,
        seasonal_period=120, noise_std=40.0, ar1_coeff=0.5, missing_rate=0.05,
        outlier_rate=0.02, weather_coupling=300.0, weather_lag=20,
        seed=derive_seed(2024, "synthetic", "TOM", market),
        market_id=market, crop_id="TOM")


FULL_SCALE = EvalConfig(train_days=997, test_days=128, feature=FeatureConfig(),
                        train=TrainConfig(max_iter=60, tolerance=1e-5), seed=2024)


def test_c7_multivariate_beats_baseline(capsys):
    """AG+WD+DQ perceptron with continuous retraining vs the AR baseline."""
    start = time.time()
    wins = 0
    margins = []
    for i in range(1, 8):
        series = generate_synthetic(_weather_scenario(f"M{i}"))
        mlp = rolling_evaluate(series, make_strategy("continuous"), FULL_SCALE)
        ar = rolling_evaluate(series, make_strategy("ar"), FULL_SCALE)
        wins += mlp.am < ar.am
        margins.append(f"M{i}: {mlp.am:.2f} vs {ar.am:.2f}")
    elapsed = time.time() - start
    report(capsys, 7, "multivariate-beats-baseline",
           wins >= 5 and elapsed < 600.0,
           f"{wins}/7 markets, {elapsed:.0f}s < 600s; " + "; ".join(margins))


def _regime_scenario(market):
    return SyntheticSpec(
        n_days=1125, base_price=3000.0, trend_slope=8.0, regime_length=90,
        noise_std=50.0, ar1_coeff=0.4,
        seed=derive_seed(4040, "synthetic", "TOM", market),
        market_id=market, crop_id="TOM")


def test_c8_trend_selection_beats_continuous(capsys):
    """Crop-level trend routing vs continuous retraining on regime switches."""
    start = time.time()
    cfg = EvalConfig(train_days=997, test_days=128, feature=FeatureConfig(),
                     train=TrainConfig(max_iter=60, tolerance=1e-5), seed=4040)
    group = [generate_synthetic(_regime_scenario(f"M{i}")) for i in range(1, 8)]
    continuous = make_strategy("continuous")
    cont_reports = rolling_evaluate_many(group, continuous, cfg)
    crop = make_strategy("trend_crop")
    crop_reports = rolling_evaluate_many(group, crop, cfg)
    market = make_strategy("trend_market")
    rolling_evaluate_many(group, market, cfg)

    wins = 0
    margins = []
    for i in range(1, 8):
        mid = f"M{i}"
        c, t = cont_reports[mid].am, crop_reports[mid].am
        wins += t <= c
        margins.append(f"{mid}: {t:.2f} vs {c:.2f}")
    census_ok = crop.catalog_count == 2 and market.catalog_count == 14
    elapsed = time.time() - start
    report(capsys, 8, "trend-selection-beats-continuous",
           wins >= 5 and census_ok and elapsed < 900.0,
           f"{wins}/7 markets, catalogs {crop.catalog_count} vs "
           f"{market.catalog_count}, {elapsed:.0f}s < 900s; " + "; ".join(margins))


def test_c9_end_to_end_determinism(capsys, tmp_path):
    """Two identical runs produce byte-identical summary CSVs."""
    import json
    from cropcast.pipeline import load_run_config, run

    config = {
        "seed": 31,
        "strategies": ["continuous", "stability", "ar"],
        "train_days": 110, "test_days": 6,
        "feature": {"k": 4, "horizon": 8},
        "train": {"max_iter": 20},
        "synthetic": {"markets": 2, "crop_id": "TOM",
                      "base": {"n_days": 130, "noise_std": 25.0, "ar1_coeff": 0.4,
                               "seasonal_amplitude": 50.0, "trend_slope": 0.5}},
    }
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config))
    assert run(load_run_config(path, out_dir=str(tmp_path / "a"))) == 0
    assert run(load_run_config(path, out_dir=str(tmp_path / "b"))) == 0
    first = (tmp_path / "a" / "summary.csv").read_bytes()
    second = (tmp_path / "b" / "summary.csv").read_bytes()
    report(capsys, 9, "end-to-end-determinism", first == second,
           f"{len(first)} bytes compared equal: {first == second}")
