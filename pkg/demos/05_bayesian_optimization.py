"""Sequential candidate selection with expected improvement.

Builds a pool of synthetic charge configurations, scatters them into
features, and lets the GP-driven loop hunt for the minimum-energy
configuration against a random-search baseline.  Regret curves land in
demos/output/ as CSV (and PNG when matplotlib is importable).

Run:  python demos/05_bayesian_optimization.py      (about two minutes)
"""

from pathlib import Path

import numpy as np

from scatgp import (BOConfig, FilterBankConfig, OptimizerConfig,
                    ScatteringConfig, build_filterbank, fit_standardizer,
                    from_preset, make_spec, random_search, run_bo,
                    scatter_batch, stack_features, synth_generate)

N = 32
POOL = 300
OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

print(f"building a pool of {POOL} charge configurations ...")
spec = from_preset("charge_energy", "none", image_size=N, seed=100)
samples = synth_generate(spec, POOL, "train")
values = np.array([t for _, t in samples])
print(f"  pairwise Coulomb energies: min {values.min():.3f}, "
      f"median {np.median(values):.3f}, max {values.max():.3f}")

print("scattering the pool (global, J=3, L=8, 3 channels) ...")
bank_cfg = FilterBankConfig(N, 3, 8)
bank = build_filterbank(bank_cfg)
cfg = ScatteringConfig(bank_cfg, max_order=2, variant="global")
features = stack_features(scatter_batch([im for im, _ in samples], bank, cfg))
features = fit_standardizer(features).transform(features)

print("running expected improvement vs random search (3 seeds) ...")
curves = {"bo": [], "rs": []}
for seed in range(3):
    bo_cfg = BOConfig(n_init=20, n_iters=30, pool_size=POOL,
                      kernel=make_spec("matern52"), seed=seed,
                      gp_opt=OptimizerConfig(iterations=200))
    trace = run_bo(features, lambda i: values[i], bo_cfg)
    curves["bo"].append([r.regret for r in trace.records])
    baseline = random_search(features, lambda i: values[i], bo_cfg)
    curves["rs"].append([r.regret for r in baseline.records])
    print(f"  seed {seed}: BO final regret {trace.final_regret:.4f}   "
          f"RS final regret {baseline.final_regret:.4f}")

for label, runs in curves.items():
    arr = np.array(runs)
    mean = arr.mean(axis=0)
    sem = arr.std(axis=0) / np.sqrt(arr.shape[0])
    lines = ["iteration,mean,ci_lo,ci_hi"]
    for i, m in enumerate(mean):
        lines.append(f"{i + 1},{m!r},{m - 1.96 * sem[i]!r},{m + 1.96 * sem[i]!r}")
    (OUT / f"regret_{label}.csv").write_text("\n".join(lines) + "\n")
print(f"regret curves written to {OUT}/regret_bo.csv and regret_rs.csv")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6, 4))
    for label, color in (("bo", "C0"), ("rs", "C1")):
        arr = np.array(curves[label])
        mean = arr.mean(axis=0)
        sem = arr.std(axis=0) / np.sqrt(arr.shape[0])
        steps = np.arange(1, mean.size + 1)
        ax.plot(steps, mean, color=color,
                label="expected improvement" if label == "bo" else "random search")
        ax.fill_between(steps, mean - 1.96 * sem, mean + 1.96 * sem,
                        color=color, alpha=0.25)
    ax.set_xlabel("iteration")
    ax.set_ylabel("simple regret")
    ax.legend()
    fig.tight_layout()
    fig.savefig(OUT / "regret.png", dpi=120)
    print(f"plot saved to {OUT}/regret.png")
except ImportError:
    print("matplotlib not available; skipping the plot")
