"""Stochastic variational GP regression with inducing points.

The evidence lower bound for the Gaussian likelihood is computed in
closed form (expected log-likelihood plus a KL term between the
variational and prior inducing distributions), with the data term scaled
by n_total / batch_size so mini-batch estimates are unbiased.  Training
optimizes a whitened parameterization (variational parameters expressed
in the Cholesky basis of K_ZZ), which keeps joint optimization of Z and
kernel hyperparameters stable; the stored state is unwhitened.

Forward passes are written in torch (float64) and gradients come from
autograd; the exact-GP module keeps fully analytic numpy gradients, so
the two inference routes stay independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import torch
from scipy.linalg import solve_triangular

from .errors import CholeskyError, InvalidConfigError, SizeMismatchError
from .gp import NOISE_FLOOR, PredictiveDistribution, TargetStats, mean_pairwise_distance
from .kernels import KernelSpec, kernel_matrix

_JITTER = 1e-8


@dataclass(frozen=True)
class SVGPState:
    """Inducing inputs plus an unwhitened Gaussian q(u) = N(m_u, L_u L_u')."""

    z: np.ndarray                 # (m, D) inducing inputs
    m_u: np.ndarray               # (m,) variational mean
    l_u: np.ndarray               # (m, m) lower-triangular factor, positive diag
    spec: KernelSpec
    log_noise_variance: float
    target_stats: TargetStats

    @property
    def num_inducing(self) -> int:
        return self.z.shape[0]

    @property
    def noise_variance(self) -> float:
        return float(np.exp(self.log_noise_variance))


def _t(arr):
    return torch.from_numpy(np.array(arr, dtype=np.float64, copy=True))


def _kernel_torch(spec_family, log_ls, log_sf2, a, b):
    """Torch twin of kernels.kernel_matrix (differentiable)."""
    ls = torch.exp(log_ls)
    sf2 = torch.exp(log_sf2)
    if spec_family == "linear":
        return sf2 * ((a / ls) @ (b / ls).T)
    diff = (a / ls)[:, None, :] - (b / ls)[None, :, :]
    r2 = (diff ** 2).sum(-1)
    if spec_family == "rbf":
        return sf2 * torch.exp(-0.5 * r2)
    r = torch.sqrt(torch.clamp(r2, min=1e-30))
    s5 = math.sqrt(5.0)
    return sf2 * (1.0 + s5 * r + (5.0 / 3.0) * r2) * torch.exp(-s5 * r)


def _kernel_diag_torch(spec_family, log_ls, log_sf2, a):
    sf2 = torch.exp(log_sf2)
    if spec_family == "linear":
        ls = torch.exp(log_ls)
        return sf2 * ((a / ls) ** 2).sum(-1)
    return sf2 * torch.ones(a.shape[0], dtype=a.dtype)


def _chol_torch(matrix):
    eye = torch.eye(matrix.shape[0], dtype=matrix.dtype)
    scale = float(matrix.diagonal().mean().detach())
    jitter = _JITTER * max(scale, 1.0)
    while jitter <= 1e-2 * max(scale, 1.0):
        try:
            return torch.linalg.cholesky(matrix + jitter * eye)
        except torch.linalg.LinAlgError:
            jitter *= 2.0
    raise CholeskyError("K_ZZ Cholesky failed after jitter escalation")


def _elbo_torch(family, log_ls, log_sf2, log_noise, z, m_u, l_u,
                batch_x, batch_y, n_total):
    """Closed-form Gaussian ELBO of a batch, unwhitened parameters."""
    kzz = _kernel_torch(family, log_ls, log_sf2, z, z)
    lz = _chol_torch(kzz)
    kzx = _kernel_torch(family, log_ls, log_sf2, z, batch_x)
    a = torch.linalg.solve_triangular(lz, kzx, upper=False)        # (m, b)
    proj_mean = torch.linalg.solve_triangular(lz, m_u[:, None], upper=False)
    mean = a.T @ proj_mean[:, 0]
    # var_i = k_ii - ||a_i||^2 + ||L_u' Lz^-T a_i||^2
    kdiag = _kernel_diag_torch(family, log_ls, log_sf2, batch_x)
    b_mat = torch.linalg.solve_triangular(lz.T, a, upper=True)     # Kzz^-1 Kzx
    su_proj = l_u.T @ b_mat
    var = kdiag - (a ** 2).sum(0) + (su_proj ** 2).sum(0)
    var = torch.clamp(var, min=0.0)

    noise = torch.exp(log_noise)
    batch = batch_x.shape[0]
    log_lik = (-0.5 * math.log(2.0 * math.pi) - 0.5 * log_noise
               - 0.5 * ((batch_y - mean) ** 2 + var) / noise).sum()
    data_term = log_lik * (n_total / batch)

    # KL[q(u) || N(0, Kzz)] in closed form
    m = z.shape[0]
    lz_inv_lu = torch.linalg.solve_triangular(lz, l_u, upper=False)
    trace = (lz_inv_lu ** 2).sum()
    maha = (proj_mean ** 2).sum()
    logdet_s = 2.0 * torch.log(torch.abs(l_u.diagonal())).sum()
    logdet_k = 2.0 * torch.log(lz.diagonal()).sum()
    kl = 0.5 * (trace + maha - m - logdet_s + logdet_k)
    return data_term - kl


def elbo(state: SVGPState, batch_x, batch_y, n_total, with_grads=False):
    """Evidence lower bound of a batch under the given state.

    ``batch_y`` must be on the state's standardized target scale.  With
    ``with_grads=True`` also returns a dict of gradients with respect to
    the unwhitened state fields (m_u, l_u, z, log-kernel-hyperparameters,
    log-noise).
    """
    batch_x = np.atleast_2d(np.asarray(batch_x, dtype=np.float64))
    batch_y = np.asarray(batch_y, dtype=np.float64).ravel()
    if batch_x.shape[0] == 0:
        raise InvalidConfigError("elbo needs a nonempty batch")
    if batch_x.shape[0] != batch_y.shape[0]:
        raise SizeMismatchError(f"{batch_x.shape[0]} rows vs {batch_y.shape[0]} targets")
    if batch_x.shape[1] != state.z.shape[1]:
        raise SizeMismatchError(
            f"batch dim {batch_x.shape[1]} != inducing dim {state.z.shape[1]}")

    needs = with_grads
    log_ls = _t(state.spec.log_lengthscales).requires_grad_(needs)
    log_sf2 = _t(state.spec.log_signal_variance).requires_grad_(needs)
    log_noise = _t(state.log_noise_variance).requires_grad_(needs)
    z = _t(state.z).requires_grad_(needs)
    m_u = _t(state.m_u).requires_grad_(needs)
    l_u = _t(state.l_u).requires_grad_(needs)

    value = _elbo_torch(state.spec.family, log_ls, log_sf2, log_noise,
                        z, m_u, l_u, _t(batch_x), _t(batch_y), float(n_total))
    if not with_grads:
        return float(value.detach()), None
    value.backward()
    value = value.detach()
    tril = np.tril(np.ones_like(state.l_u))
    grads = {
        "log_lengthscales": log_ls.grad.numpy().reshape(-1).copy(),
        "log_signal_variance": float(log_sf2.grad),
        "log_noise_variance": float(log_noise.grad),
        "z": z.grad.numpy().copy(),
        "m_u": m_u.grad.numpy().copy(),
        "l_u": l_u.grad.numpy().copy() * tril,  # only the triangle is a parameter
    }
    return float(value), grads


def kmeanspp_indices(x, count, rng):
    """k-means++ seeding: greedy D^2-weighted sampling without replacement."""
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = ((x - x[chosen[0]]) ** 2).sum(axis=1)
    while len(chosen) < count:
        total = d2.sum()
        if total <= 0.0:
            remaining = np.setdiff1d(np.arange(n), chosen)
            chosen.extend(remaining[:count - len(chosen)].tolist())
            break
        nxt = int(rng.choice(n, p=d2 / total))
        chosen.append(nxt)
        d2 = np.minimum(d2, ((x - x[nxt]) ** 2).sum(axis=1))
    return np.array(chosen[:count])


def optimal_variational(z, x, y_std, spec: KernelSpec, log_noise_variance):
    """Closed-form optimal q(u) for fixed hyperparameters (full batch)."""
    noise = float(np.exp(log_noise_variance))
    kzz = kernel_matrix(spec, z) + _JITTER * np.eye(z.shape[0])
    kzx = kernel_matrix(spec, z, x)
    lam = kzz + kzx @ kzx.T / noise
    lam_inv_kzz = np.linalg.solve(lam, kzz)
    s_u = kzz @ lam_inv_kzz
    m_u = kzz @ np.linalg.solve(lam, kzx @ y_std) / noise
    s_u = 0.5 * (s_u + s_u.T) + _JITTER * np.eye(z.shape[0])
    return m_u, np.linalg.cholesky(s_u)


def svgp_fit(x, y_raw, spec: KernelSpec, num_inducing, batch_size=256,
             steps=2000, lr=0.01, seed=0, train_inducing=True) -> SVGPState:
    """Fit an SVGP by Adam on the mini-batch ELBO.

    Inducing inputs are seeded from the training features by k-means++
    (deterministic under ``seed``); variational parameters start at the
    whitened prior (zero mean, identity factor), kernel hyperparameters at
    the exact-GP initialization rule.  ``steps=0`` returns the
    initialization unchanged.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y_raw = np.asarray(y_raw, dtype=np.float64).ravel()
    n = x.shape[0]
    if not 1 <= num_inducing <= n:
        raise InvalidConfigError(f"num_inducing must be in [1, {n}], got {num_inducing}")
    spec.validate_dim(x.shape[1])

    stats = TargetStats(mean=float(y_raw.mean()), std=max(float(y_raw.std()), 1e-12))
    y = stats.standardize(y_raw)

    rng = np.random.default_rng(seed)
    z0 = x[kmeanspp_indices(x, num_inducing, rng)].copy()

    init_ls = np.log(mean_pairwise_distance(x))
    count = x.shape[1] if spec.ard else 1

    torch.manual_seed(seed)
    log_ls = torch.full((count,), init_ls, dtype=torch.float64, requires_grad=True)
    log_sf2 = torch.zeros((), dtype=torch.float64, requires_grad=True)
    log_noise = torch.tensor(np.log(0.01), dtype=torch.float64, requires_grad=True)
    z = torch.tensor(z0, requires_grad=train_inducing)
    m_w = torch.zeros(num_inducing, dtype=torch.float64, requires_grad=True)
    # whitened factor: unit diagonal stored in log scale for positivity
    w_diag = torch.zeros(num_inducing, dtype=torch.float64, requires_grad=True)
    w_low = torch.zeros((num_inducing, num_inducing), dtype=torch.float64,
                        requires_grad=True)

    params = [log_ls, log_sf2, log_noise, m_w, w_diag, w_low]
    if train_inducing:
        params.append(z)
    optimizer = torch.optim.Adam(params, lr=lr)
    x_t, y_t = _t(x), _t(y)
    tril_mask = torch.tril(torch.ones(num_inducing, num_inducing,
                                      dtype=torch.float64), diagonal=-1)

    def whitened_to_unwhitened():
        kzz = _kernel_torch(spec.family, log_ls, log_sf2, z, z)
        lz = _chol_torch(kzz)
        l_w = w_low * tril_mask + torch.diag(torch.exp(w_diag))
        return lz @ m_w, lz @ l_w

    for step in range(steps):
        if batch_size >= n:
            idx = np.arange(n)
        else:
            idx = rng.choice(n, size=batch_size, replace=False)
        optimizer.zero_grad()
        m_u, l_u = whitened_to_unwhitened()
        loss = -_elbo_torch(spec.family, log_ls, log_sf2, log_noise, z,
                            m_u, l_u, x_t[idx], y_t[idx], float(n))
        loss.backward()
        optimizer.step()
        with torch.no_grad():
            log_noise.clamp_(min=math.log(NOISE_FLOOR))

    with torch.no_grad():
        m_u, l_u = whitened_to_unwhitened()
    final_spec = spec.with_params(log_ls.detach().numpy().copy(),
                                  float(log_sf2.detach()))
    return SVGPState(z=z.detach().numpy().copy(),
                     m_u=m_u.numpy().copy(), l_u=l_u.numpy().copy(),
                     spec=final_spec,
                     log_noise_variance=float(log_noise.detach()),
                     target_stats=stats)


def svgp_predict(state: SVGPState, x_test) -> PredictiveDistribution:
    """Variational predictive marginals (with observation noise)."""
    x_test = np.atleast_2d(np.asarray(x_test, dtype=np.float64))
    if x_test.shape[1] != state.z.shape[1]:
        raise SizeMismatchError(
            f"test dim {x_test.shape[1]} != inducing dim {state.z.shape[1]}")
    kzz = kernel_matrix(state.spec, state.z) + _JITTER * np.eye(state.num_inducing)
    lz = np.linalg.cholesky(kzz)
    kzt = kernel_matrix(state.spec, state.z, x_test)
    a = solve_triangular(lz, kzt, lower=True)
    proj_mean = solve_triangular(lz, state.m_u, lower=True)
    mean_std = a.T @ proj_mean
    su_proj = state.l_u.T @ solve_triangular(lz.T, a, lower=False)
    if state.spec.family == "linear":
        ls = state.spec.lengthscales
        kdiag = state.spec.signal_variance * ((x_test / ls) ** 2).sum(axis=1)
    else:
        kdiag = np.full(x_test.shape[0], state.spec.signal_variance)
    latent = np.maximum(kdiag - (a ** 2).sum(axis=0) + (su_proj ** 2).sum(axis=0), 0.0)
    var_std = latent + state.noise_variance
    stats = state.target_stats
    return PredictiveDistribution(
        mean=stats.destandardize_mean(mean_std),
        variance=stats.destandardize_variance(var_std),
        standardized_mean=mean_std,
        standardized_variance=var_std,
        target_stats=stats,
    )
