import numpy as np
import sys
sys.path.insert(0, "src")
sys.path.insert(0, "tests")
from helpers import monthly_series, seasonal_values
from autocast.pipeline import PipelineConfig, run_validation, finalize_and_forecast, run_pipeline
from autocast.ingest import Validity

pattern = seasonal_values(48, m=12, level=100, amplitude=30, noise=0, seed=0)
prod = monthly_series(pattern, product_id="p1")
cfg = PipelineConfig(enabled_models=("naive", "ses", "hwes", "gam"), ensemble_members=())
report = run_validation([prod], cfg)
entry = report.products[0]
print("recommended:", entry.recommended)
for s in entry.scores:
    print(" ", s.model_id, "rmse", s.metrics.rmse)
print("skipped:", entry.skipped)
print("holdout:", entry.holdout, "validity:", entry.validity)

# short history holdouts
for n in (18, 14, 13):
    p = monthly_series(seasonal_values(n, noise=0), product_id="x")
    r = run_validation([p], PipelineConfig(enabled_models=("naive", "sarima"), ensemble_members=()))
    e = r.products[0]
    print(f"n={n}: validity {e.validity.value} holdout {e.holdout} skipped {e.skipped}")

# excluded
p11 = monthly_series(np.full(11, 5.0), product_id="tiny")
r = run_validation([p11], cfg)
e = r.products[0]
print("11-point:", e.validity, "flags:", e.flags, "holdout:", e.holdout, "recommended:", e.recommended)

# no_model: CNN only on 25-point product
p25 = monthly_series(seasonal_values(25, noise=0.5, seed=1), product_id="c")
r = run_validation([p25], PipelineConfig(enabled_models=("cnn",), ensemble_members=()))
e = r.products[0]
print("no_model:", e.flags, "recommended:", e.recommended, "skipped:", e.skipped, "scores:", e.scores)
b = finalize_and_forecast([p25], r, PipelineConfig(enabled_models=("cnn",), ensemble_members=()))
pf = b.products[0]
print("finalize no_model:", pf.recommended, [f.model_id for f in pf.forecasts], pf.flags)

# finalize on periodic
bundle = finalize_and_forecast([prod], report, cfg)
pf = bundle.products[0]
print("finalize:", pf.recommended, [f.model_id for f in pf.forecasts])
f = pf.forecasts[0]
print("horizon:", f.horizon, "start == end+1:", f.start == prod.end + 1)
print("decomposition:", None if pf.decomposition is None else "present")

# ensemble equality check
cfg2 = PipelineConfig(
    enabled_models=("naive", "ses", "hwes", "gam", "ensemble_median"),
    ensemble_members=("hwes", "gam"),
)
rep2, bun2 = run_pipeline([prod], cfg2)
pf2 = bun2.products[0]
ens = pf2.forecast_for("ensemble_median")
hw = pf2.forecast_for("hwes")
ga = pf2.forecast_for("gam")
print("ensemble == median(members):", np.allclose(ens.values, np.median(np.vstack([hw.values, ga.values]), axis=0)))
print("validation scores for ensemble:", rep2.products[0].score_for("ensemble_median") is not None)
