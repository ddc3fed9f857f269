import time
import numpy as np
import sys
sys.path.insert(0, "src"); sys.path.insert(0, "tests")
from autocast.evaluation import summarize
from autocast.metrics import compute_nrmse
from autocast.pipeline import PipelineConfig, run_pipeline
from autocast.series import Frequency
from autocast.synth import ArchetypeSpec, generate_corpus

# ---- criterion 5: archetype accuracy ----
t0 = time.perf_counter()
specs = [
    ArchetypeSpec.from_kind("season", "seasonality", length=66),
    ArchetypeSpec.from_kind("trend", "seasonality_trend", length=66),
]
full = generate_corpus(specs, seed=0, frequency=Frequency.MONTHLY)
train = [s.prefix(48) for s in full]
report, bundle = run_pipeline(train, PipelineConfig())
for series in full:
    product = bundle.product(series.product_id)
    fc = product.forecast_for(product.recommended)
    actual = series.values[48:66]
    n = compute_nrmse(actual, fc.values)
    print(f"c5 {series.product_id}: recommended {product.recommended} nRMSE {n:.4f}")
print("c5 time:", time.perf_counter() - t0)

# ---- criterion 6: 50-product corpus, validate Y-1, score Y ----
t0 = time.perf_counter()
specs = []
for i in range(20):
    specs.append(ArchetypeSpec.from_kind(f"se{i:02d}", "seasonality", length=108))
for i in range(20):
    specs.append(ArchetypeSpec.from_kind(f"tr{i:02d}", "seasonality_trend", length=108))
for i in range(10):
    specs.append(ArchetypeSpec.from_kind(f"hv{i:02d}", "high_variance", length=108))
full = generate_corpus(specs, seed=0, frequency=Frequency.MONTHLY)
train = [s.prefix(90) for s in full]
config = PipelineConfig(horizon=12)
report, bundle = run_pipeline(train, config)
summary = summarize(report, bundle, full)
ratios = [r.ratio for r in summary.recommended_ratios if r.ratio is not None]
print("c6 n ratios:", len(ratios), "median:", np.median(ratios))
print("c6 wilcoxon:", summary.wilcoxon_recommended)
print("c6 undefined:", summary.undefined_ratio, "missing:", summary.missing_actuals)
print("c6 rec hist:", summary.recommended_histogram)
print("c6 best hist:", summary.best_histogram)
# criterion 7 on same corpus
best = {r.product_id: r for r in summary.best_ratios}
violations = 0
for rec in summary.recommended_ratios:
    b = best[rec.product_id]
    if rec.model_nrmse is not None and b.model_nrmse is not None:
        if b.model_nrmse > rec.model_nrmse + 0.0:
            violations += 1
print("c7 violations:", violations)
print("c6 time:", time.perf_counter() - t0)
