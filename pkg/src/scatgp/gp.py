"""Exact Gaussian-process regression with Cholesky-based inference.

Targets are standardized internally (training mean/std); hyperparameters
are optimized by full-batch Adam on the negative log marginal likelihood
with analytic gradients (kernel trace contractions).  Lengthscales are
initialized to the mean pairwise distance of the training features, the
signal variance to 1 and the noise variance to 0.01, all on the
standardized scale.  The reported predictive variance includes the
observation noise, which is what the downstream metrics consume.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve, cholesky, solve_triangular
from scipy.spatial.distance import pdist

from .errors import CholeskyError, InvalidConfigError, NonFiniteInputError, SizeMismatchError
from .kernels import (KernelSpec, kernel_from_scaled_sq, kernel_matrix,
                      kernel_trace_gradients, raw_sqdist)

NOISE_FLOOR = 1e-6      # variance floor, standardized scale
TARGET_STD_FLOOR = 1e-12
JITTER_START = 1e-8
JITTER_LIMIT = 1e-2
PAIR_BUDGET = 1_000_000  # pairwise-distance sample cap for large n


@dataclass(frozen=True)
class OptimizerConfig:
    """Adam settings for marginal-likelihood optimization.

    ``initial_noise_variance`` seeds the noise hyperparameter (and is the
    final value when ``iterations=0``); it is clamped at the noise floor.
    """

    learning_rate: float = 0.05
    iterations: int = 500
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    initial_noise_variance: float = 0.01


@dataclass(frozen=True)
class TargetStats:
    mean: float
    std: float

    def standardize(self, y):
        return (np.asarray(y, dtype=np.float64) - self.mean) / self.std

    def destandardize_mean(self, mean_std):
        return mean_std * self.std + self.mean

    def destandardize_variance(self, var_std):
        return var_std * self.std ** 2


@dataclass(frozen=True)
class PredictiveDistribution:
    """Gaussian predictive marginals in raw and standardized target units.

    Variances include the observation noise.
    """

    mean: np.ndarray
    variance: np.ndarray
    standardized_mean: np.ndarray
    standardized_variance: np.ndarray
    target_stats: TargetStats


@dataclass(frozen=True)
class GPState:
    """Trained posterior: data, kernel, noise, Cholesky factor and alpha."""

    x_train: np.ndarray
    y_train: np.ndarray            # standardized targets
    spec: KernelSpec
    log_noise_variance: float
    chol: np.ndarray               # lower factor of K + sigma_n^2 I
    alpha: np.ndarray
    target_stats: TargetStats
    log_marginal_likelihood: float
    nll_trace: tuple = field(default=(), repr=False)

    @property
    def noise_variance(self) -> float:
        return float(np.exp(self.log_noise_variance))


def chol_with_jitter(matrix):
    """Lower Cholesky factor with escalating diagonal jitter.

    Starts at 1e-8 * mean(diag) and doubles until 1e-2 * mean(diag);
    raises CholeskyError beyond that.
    """
    scale = float(np.mean(np.diag(matrix)))
    if not np.isfinite(scale) or scale <= 0.0:
        scale = 1.0
    try:
        return cholesky(matrix, lower=True)
    except np.linalg.LinAlgError:
        pass
    jitter = JITTER_START * scale
    while jitter <= JITTER_LIMIT * scale:
        try:
            return cholesky(matrix + jitter * np.eye(matrix.shape[0]), lower=True)
        except np.linalg.LinAlgError:
            jitter *= 2.0
    raise CholeskyError(
        f"Cholesky failed after jitter escalation up to {JITTER_LIMIT:g} * mean diag")


def mean_pairwise_distance(x, rng_seed=0):
    """Mean Euclidean distance over training pairs.

    All pairs for n <= 2000; above that, a seeded sample of 10^6 pairs.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        return 1.0
    if n <= 2000:
        d = float(pdist(x).mean())
    else:
        rng = np.random.default_rng(rng_seed)
        i = rng.integers(0, n, size=PAIR_BUDGET)
        j = rng.integers(0, n, size=PAIR_BUDGET)
        keep = i != j
        d = float(np.sqrt(((x[i[keep]] - x[j[keep]]) ** 2).sum(axis=1)).mean())
    return d if d > 0.0 else 1.0


def log_marginal_likelihood(x, y, spec: KernelSpec, log_noise_variance,
                            with_grad=True):
    """Exact LML of the given (already scaled) data and its gradients.

    Returns
    -------
    (value, grads) where grads maps "log_lengthscales" to a vector,
    "log_signal_variance" and "log_noise_variance" to scalars; grads is
    None when ``with_grad`` is false.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape[0] != y.shape[0]:
        raise SizeMismatchError(f"{x.shape[0]} rows vs {y.shape[0]} targets")
    n = x.shape[0]
    noise = float(np.exp(log_noise_variance))
    k = kernel_matrix(spec, x) + noise * np.eye(n)
    chol = chol_with_jitter(k)
    alpha = cho_solve((chol, True), y)
    value = float(-0.5 * y @ alpha - np.log(np.diag(chol)).sum()
                  - 0.5 * n * np.log(2.0 * np.pi))
    if not with_grad:
        return value, None
    kinv = cho_solve((chol, True), np.eye(n))
    weight = np.outer(alpha, alpha) - kinv
    g_ls, g_sig = kernel_trace_gradients(spec, x, weight)
    g_noise = 0.5 * float(np.trace(weight)) * noise
    return value, {
        "log_lengthscales": g_ls,
        "log_signal_variance": g_sig,
        "log_noise_variance": g_noise,
    }


def _adam_minimize(objective, theta0, opt: OptimizerConfig, lower_bounds=None):
    """Plain Adam; returns the best iterate seen (including the start)."""
    theta = theta0.copy()
    m = np.zeros_like(theta)
    v = np.zeros_like(theta)
    best_theta, best_val = theta.copy(), np.inf
    for step in range(opt.iterations + 1):
        val, grad = objective(theta)
        if val < best_val:
            best_val, best_theta = val, theta.copy()
        if step == opt.iterations:
            break
        m = opt.beta1 * m + (1.0 - opt.beta1) * grad
        v = opt.beta2 * v + (1.0 - opt.beta2) * grad ** 2
        mhat = m / (1.0 - opt.beta1 ** (step + 1))
        vhat = v / (1.0 - opt.beta2 ** (step + 1))
        theta = theta - opt.learning_rate * mhat / (np.sqrt(vhat) + opt.eps)
        if lower_bounds is not None:
            theta = np.maximum(theta, lower_bounds)
    return best_theta, best_val


def _initial_spec(spec: KernelSpec, x):
    """Spec with lengthscales set to the mean pairwise training distance."""
    init = np.log(mean_pairwise_distance(x))
    count = x.shape[1] if spec.ard else 1
    return spec.with_params(np.full(count, init), 0.0)


def _make_objective(x, y, template, n_ls, nll_trace):
    """Negative LML and gradient, caching what the lengthscales don't change.

    Isotropic stationary kernels reuse the raw squared-distance matrix and
    isotropic linear kernels the raw Gram matrix across Adam iterations;
    only ARD kernels pay the O(n^2 D) distance cost per step.  Numerically
    identical to calling ``log_marginal_likelihood`` at each iterate.
    """
    n = x.shape[0]
    stationary = template.family in ("rbf", "matern52")
    base_sq = raw_sqdist(x) if (stationary and not template.ard) else None
    base_gram = ((x @ x.T) if (template.family == "linear" and not template.ard)
                 else None)
    eye = np.eye(n)

    def objective(theta):
        spec = template.with_params(theta[:n_ls], theta[n_ls])
        noise = float(np.exp(theta[-1]))
        r2 = None
        if base_sq is not None:
            r2 = base_sq * np.exp(-2.0 * theta[0])
            k = kernel_from_scaled_sq(spec, r2)
        elif base_gram is not None:
            k = np.exp(theta[n_ls] - 2.0 * theta[0]) * base_gram
        else:
            k = kernel_matrix(spec, x)
        chol = chol_with_jitter(k + noise * eye)
        alpha = cho_solve((chol, True), y)
        value = float(-0.5 * y @ alpha - np.log(np.diag(chol)).sum()
                      - 0.5 * n * np.log(2.0 * np.pi))
        kinv = cho_solve((chol, True), eye)
        weight = np.outer(alpha, alpha) - kinv
        g_ls, g_sig = kernel_trace_gradients(spec, x, weight, k=k, r2=r2)
        g_noise = 0.5 * float(np.trace(weight)) * noise
        nll_trace.append(-value)
        grad = np.concatenate([g_ls, [g_sig, g_noise]])
        return -value, -grad

    return objective


def fit(x, y_raw, spec: KernelSpec, opt: OptimizerConfig | None = None) -> GPState:
    """Standardize targets, optimize hyperparameters, return the posterior.

    Parameters
    ----------
    x : (n, D) feature matrix (standardize upstream if desired)
    y_raw : (n,) raw targets
    spec : kernel family/ARD template; its hyperparameter values are
        replaced by the initialization rule before optimization
    opt : OptimizerConfig, default Adam(lr=0.05, 500 iterations);
        ``iterations=0`` keeps the provided spec's hyperparameters fixed
        (only the noise default applies)

    Raises
    ------
    NonFiniteInputError, SizeMismatchError, CholeskyError
    """
    opt = opt or OptimizerConfig()
    # copies: the returned state freezes its arrays, never the caller's
    x = np.array(np.atleast_2d(x), dtype=np.float64)
    y_raw = np.array(y_raw, dtype=np.float64).ravel()
    if x.shape[0] != y_raw.shape[0]:
        raise SizeMismatchError(f"{x.shape[0]} rows vs {y_raw.shape[0]} targets")
    if x.shape[0] < 1:
        raise InvalidConfigError("fit needs at least one observation")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y_raw))):
        raise NonFiniteInputError("training data contains non-finite values")
    spec.validate_dim(x.shape[1])

    stats = TargetStats(mean=float(y_raw.mean()),
                        std=max(float(y_raw.std()), TARGET_STD_FLOOR))
    y = stats.standardize(y_raw)

    n_ls = spec.log_lengthscales.shape[0]
    log_noise0 = np.log(max(opt.initial_noise_variance, NOISE_FLOOR))
    work = _initial_spec(spec, x) if opt.iterations > 0 else spec
    theta0 = np.concatenate([work.log_lengthscales,
                             [work.log_signal_variance, log_noise0]])
    bounds = np.full_like(theta0, -np.inf)
    bounds[-1] = np.log(NOISE_FLOOR)
    theta0 = np.maximum(theta0, bounds)

    nll_trace = []
    objective = _make_objective(x, y, work, n_ls, nll_trace)

    if opt.iterations > 0:
        theta, _ = _adam_minimize(objective, theta0, opt, lower_bounds=bounds)
    else:
        theta = theta0

    final_spec = work.with_params(theta[:n_ls], theta[n_ls])
    log_noise = float(theta[-1])
    value, _ = log_marginal_likelihood(x, y, final_spec, log_noise, with_grad=False)
    noise = float(np.exp(log_noise))
    k = kernel_matrix(final_spec, x) + noise * np.eye(x.shape[0])
    chol = chol_with_jitter(k)
    alpha = cho_solve((chol, True), y)
    for arr in (x, y, chol, alpha):
        arr.setflags(write=False)
    return GPState(x_train=x, y_train=y, spec=final_spec,
                   log_noise_variance=log_noise, chol=chol, alpha=alpha,
                   target_stats=stats, log_marginal_likelihood=value,
                   nll_trace=tuple(nll_trace))


def predict(state: GPState, x_test) -> PredictiveDistribution:
    """Predictive mean and variance (with observation noise) at new inputs."""
    x_test = np.atleast_2d(np.asarray(x_test, dtype=np.float64))
    if x_test.shape[1] != state.x_train.shape[1]:
        raise SizeMismatchError(
            f"test dim {x_test.shape[1]} != train dim {state.x_train.shape[1]}")
    k_star = kernel_matrix(state.spec, x_test, state.x_train)
    mean_std = k_star @ state.alpha
    v = solve_triangular(state.chol, k_star.T, lower=True)
    prior_var = np.full(x_test.shape[0], state.spec.signal_variance)
    if state.spec.family == "linear":
        ls = state.spec.lengthscales
        prior_var = state.spec.signal_variance * ((x_test / ls) ** 2).sum(axis=1)
    latent_var = np.maximum(prior_var - (v ** 2).sum(axis=0), 0.0)
    var_std = latent_var + state.noise_variance
    stats = state.target_stats
    return PredictiveDistribution(
        mean=stats.destandardize_mean(mean_std),
        variance=stats.destandardize_variance(var_std),
        standardized_mean=mean_std,
        standardized_variance=var_std,
        target_stats=stats,
    )
