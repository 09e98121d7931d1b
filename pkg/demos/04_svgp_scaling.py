"""Variational inference as a drop-in for the exact GP.

Shows the two guarantees that make SVGP trustworthy here: the ELBO never
exceeds the exact log marginal likelihood, becomes tight when the
inducing set equals the data, and the per-step training cost depends on
the batch and inducing sizes, not on the dataset size.

Run:  python demos/04_svgp_scaling.py
"""

import time

import numpy as np

from scatgp import OptimizerConfig, fit, log_marginal_likelihood, make_spec
from scatgp.gp import TargetStats
from scatgp.svgp import SVGPState, elbo, optimal_variational, svgp_fit, svgp_predict

rng = np.random.default_rng(0)


def toy_problem(n):
    x = rng.standard_normal((n, 4))
    y = np.sin(x @ np.array([1.0, 0.6, 0.0, -0.4])) + 0.1 * rng.standard_normal(n)
    return x, y


print("=== The bound: ELBO <= exact LML, tight at Z = X ===")
x, y = toy_problem(60)
exact = fit(x, y, make_spec("rbf"), OptimizerConfig(iterations=200))
y_std = exact.target_stats.standardize(y)
for m in (5, 15, 30, 60):
    z = x[:m]
    m_u, l_u = optimal_variational(z, x, y_std, exact.spec,
                                   exact.log_noise_variance)
    state = SVGPState(z=z, m_u=m_u, l_u=l_u, spec=exact.spec,
                      log_noise_variance=exact.log_noise_variance,
                      target_stats=exact.target_stats)
    value, _ = elbo(state, x, y_std, len(y))
    print(f"  m={m:3d}: ELBO = {value:9.3f}   "
          f"exact LML = {exact.log_marginal_likelihood:9.3f}   "
          f"gap = {exact.log_marginal_likelihood - value:.5f}")
print("More inducing points close the gap; at m = n it vanishes.")
print()

print("=== Mini-batch training and prediction ===")
x, y = toy_problem(400)
state = svgp_fit(x, y, make_spec("rbf"), num_inducing=40, batch_size=64,
                 steps=400, lr=0.02, seed=1)
pred = svgp_predict(state, x[:5])
exact = fit(x, y, make_spec("rbf"), OptimizerConfig(iterations=200))
from scatgp import predict

pred_exact = predict(exact, x[:5])
print("  first five predictive means, SVGP vs exact:")
for a, b in zip(pred.mean, pred_exact.mean):
    print(f"    {a:8.4f}   {b:8.4f}")
print()

print("=== Per-step cost is independent of n ===")
for n in (500, 1000, 2000):
    x, y = toy_problem(n)
    start = time.perf_counter()
    svgp_fit(x, y, make_spec("rbf"), num_inducing=48, batch_size=64,
             steps=60, lr=0.02, seed=0)
    per_step = (time.perf_counter() - start) / 60
    print(f"  n={n:5d}: {per_step * 1000:6.2f} ms per step "
          f"(fixed batch 64, 48 inducing points)")
