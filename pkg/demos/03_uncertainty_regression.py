"""Uncertainty-aware image regression under covariate shift.

Small end-to-end run of the full recipe: synthesize a blob-counting task
whose test images come from a shifted distribution, extract global
scattering features, fit an exact GP by marginal-likelihood optimization,
and compare against the trivial predict-the-mean baseline.  Running both
a mild and a strong shift preset shows where the fixed-feature approach
shines and where calibration starts to pay for distribution mismatch.

Run:  python demos/03_uncertainty_regression.py      (about two minutes)
"""

import numpy as np

from scatgp import (FilterBankConfig, OptimizerConfig, ScatteringConfig,
                    build_filterbank, compute_metrics, fit, fit_standardizer,
                    from_preset, make_spec, predict, scatter_batch,
                    stack_features, synth_generate, trivial_baseline)

N = 32
N_TRAIN, N_TEST = 300, 150

bank_cfg = FilterBankConfig(N, 4, 8)
bank = build_filterbank(bank_cfg)
cfg = ScatteringConfig(bank_cfg, max_order=2, variant="global")


def run(preset):
    spec = from_preset("blob_count", preset, image_size=N, seed=7)
    train = synth_generate(spec, N_TRAIN, "train")
    test = synth_generate(spec, N_TEST, "test")
    y_train = np.array([t for _, t in train])
    y_test = np.array([t for _, t in test])
    x_train = stack_features(scatter_batch([im for im, _ in train], bank, cfg))
    x_test = stack_features(scatter_batch([im for im, _ in test], bank, cfg))
    standardizer = fit_standardizer(x_train)
    state = fit(standardizer.transform(x_train), y_train, make_spec("rbf"),
                OptimizerConfig(iterations=300))
    gp_report = compute_metrics(
        predict(state, standardizer.transform(x_test)), y_test)
    return gp_report, trivial_baseline(y_train, y_test)


for preset in ("mild", "strong"):
    print(f"=== shift preset: {preset} ===")
    gp_report, trivial_report = run(preset)
    print(f"{'metric':<20}{'scattering GP':>16}{'trivial':>12}")
    for key in ("rmse_standardized", "nll", "qce", "pi_mu", "pi_sigma"):
        print(f"{key:<20}{getattr(gp_report, key):>16.4f}"
              f"{getattr(trivial_report, key):>12.4f}")
    print()

print("Under the mild shift the GP dominates on every axis: a fraction of")
print("the error, far sharper intervals (pi_mu), and input-dependent widths")
print("(pi_sigma > 0) instead of one blanket interval.  Under the strong")
print("shift the point predictions stay much better than the baseline, but")
print("the intervals fitted on the training distribution become too narrow")
print("for the shifted test set, so NLL and QCE deteriorate; the trivial")
print("baseline 'wins' on calibration only by being vague everywhere.")
print("That trade-off is exactly what the metrics are designed to surface.")
