"""Covariance functions (RBF, Matern-5/2, linear) with analytic gradients.

Hyperparameters live in the log domain so optimization is unconstrained.
``kernel_gradients`` materializes per-hyperparameter derivative matrices;
``kernel_trace_gradients`` contracts them against a weight matrix without
materialization, which is what log-marginal-likelihood gradients need
when ARD makes the hyperparameter count large.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidConfigError, SizeMismatchError

FAMILIES = ("rbf", "matern52", "linear")
_SQRT5 = np.sqrt(5.0)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus log-domain hyperparameters.

    ``log_lengthscales`` has length 1 (isotropic) or D (ARD);
    ``log_signal_variance`` is log of the amplitude sigma_f^2.
    """

    family: str
    log_lengthscales: np.ndarray
    log_signal_variance: float = 0.0
    ard: bool = False

    def __post_init__(self):
        object.__setattr__(self, "log_lengthscales",
                           np.atleast_1d(np.asarray(self.log_lengthscales, dtype=np.float64)))
        if self.family not in FAMILIES:
            raise InvalidConfigError(f"unknown kernel family {self.family!r}")
        if not self.ard and self.log_lengthscales.shape != (1,):
            raise InvalidConfigError("isotropic kernel takes a single lengthscale")

    def validate_dim(self, dim):
        if self.ard and self.log_lengthscales.shape != (dim,):
            raise SizeMismatchError(
                f"ARD kernel has {self.log_lengthscales.shape[0]} lengthscales "
                f"for {dim}-dimensional inputs")

    @property
    def lengthscales(self) -> np.ndarray:
        return np.exp(self.log_lengthscales)

    @property
    def signal_variance(self) -> float:
        return float(np.exp(self.log_signal_variance))

    @property
    def n_params(self) -> int:
        """Lengthscale count plus the signal variance."""
        return self.log_lengthscales.shape[0] + 1

    def with_params(self, log_lengthscales, log_signal_variance):
        return replace(self, log_lengthscales=np.asarray(log_lengthscales),
                       log_signal_variance=float(log_signal_variance))


def make_spec(family, dim=None, ard=False, lengthscale=1.0, signal_variance=1.0):
    """Convenience constructor from natural-domain values."""
    count = dim if ard else 1
    if ard and dim is None:
        raise InvalidConfigError("ARD kernel requires the input dimension")
    return KernelSpec(family=family,
                      log_lengthscales=np.full(count, np.log(lengthscale)),
                      log_signal_variance=float(np.log(signal_variance)),
                      ard=ard)


def _checked(spec, a, b):
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = a if b is None else np.atleast_2d(np.asarray(b, dtype=np.float64))
    if a.shape[1] != b.shape[1]:
        raise SizeMismatchError(f"column counts differ: {a.shape[1]} vs {b.shape[1]}")
    spec.validate_dim(a.shape[1])
    return a, b


def _scaled_sqdist(spec, a, b):
    ls = spec.lengthscales
    sa = a / ls
    sb = sa if b is a else b / ls
    if sa.shape[0] * sb.shape[0] * sa.shape[1] <= 2_000_000:
        return cdist(sa, sb, metric="sqeuclidean")
    # BLAS route for large problems; the expansion loses ~1e-13 absolute
    # precision to cancellation, so clamp and zero the exact diagonal
    sq = ((sa * sa).sum(axis=1)[:, None] + (sb * sb).sum(axis=1)[None, :]
          - 2.0 * (sa @ sb.T))
    np.maximum(sq, 0.0, out=sq)
    if b is a:
        np.fill_diagonal(sq, 0.0)
    return sq


def kernel_matrix(spec: KernelSpec, a, b=None):
    """Covariance matrix K(a, b); ``b=None`` means K(a, a)."""
    a, b = _checked(spec, a, b)
    if spec.family == "linear":
        sf2 = spec.signal_variance
        ls = spec.lengthscales
        return sf2 * ((a / ls) @ (b / ls).T)
    return kernel_from_scaled_sq(spec, _scaled_sqdist(spec, a, b))


def raw_sqdist(x):
    """Unscaled pairwise squared distances; cacheable across lengthscale
    updates for isotropic kernels."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[0] ** 2 * x.shape[1] <= 2_000_000:
        return cdist(x, x, metric="sqeuclidean")
    sq = ((x * x).sum(axis=1)[:, None] + (x * x).sum(axis=1)[None, :]
          - 2.0 * (x @ x.T))
    np.maximum(sq, 0.0, out=sq)
    np.fill_diagonal(sq, 0.0)
    return sq


def kernel_from_scaled_sq(spec: KernelSpec, r2):
    """Stationary kernel value given lengthscale-scaled squared distances."""
    sf2 = spec.signal_variance
    if spec.family == "rbf":
        return sf2 * np.exp(-0.5 * r2)
    if spec.family == "matern52":
        r = np.sqrt(np.maximum(r2, 0.0))
        return sf2 * (1.0 + _SQRT5 * r + (5.0 / 3.0) * r2) * np.exp(-_SQRT5 * r)
    raise InvalidConfigError(f"{spec.family} is not a stationary kernel")


def _matern_dfactor(spec, r):
    """For Matern-5/2, d K / d(r^2) * (-2) = sf2 * (5/3)(1+sqrt5 r)e^{-sqrt5 r}.

    Chain rule in terms of squared scaled distances keeps the r -> 0 limit
    finite.
    """
    return spec.signal_variance * (5.0 / 3.0) * (1.0 + _SQRT5 * r) * np.exp(-_SQRT5 * r)


def kernel_gradients(spec: KernelSpec, a, b=None):
    """Derivative matrices of K w.r.t. each log-domain hyperparameter.

    Returns
    -------
    dict with keys
        "log_signal_variance" : (n, m) array
        "log_lengthscales"    : (P, n, m) array, P = lengthscale count
    """
    a, b = _checked(spec, a, b)
    k = kernel_matrix(spec, a, b)
    grads = {"log_signal_variance": k.copy()}

    ls = spec.lengthscales
    if spec.family == "linear":
        if spec.ard:
            parts = np.stack([
                -2.0 * spec.signal_variance * np.outer(a[:, d], b[:, d]) / ls[d] ** 2
                for d in range(a.shape[1])])
        else:
            parts = (-2.0 * k)[None]
        grads["log_lengthscales"] = parts
        return grads

    r2 = _scaled_sqdist(spec, a, b)
    # dK/dlog l_d = [-2 dK/d(r^2)] * delta_d^2 / l_d^2; the bracket is K for
    # RBF and _matern_dfactor for Matern-5/2.
    if spec.family == "rbf":
        factor = k
    else:
        factor = _matern_dfactor(spec, np.sqrt(np.maximum(r2, 0.0)))
    if spec.ard:
        parts = np.stack([
            factor * (cdist(a[:, d:d + 1], b[:, d:d + 1], "sqeuclidean") / ls[d] ** 2)
            for d in range(a.shape[1])])
    else:
        parts = (factor * r2)[None]
    grads["log_lengthscales"] = parts
    return grads


def kernel_trace_gradients(spec: KernelSpec, x, weight, k=None, r2=None):
    """Contract dK/dtheta against a symmetric weight matrix.

    Computes g_theta = 1/2 * sum_ij weight_ij * dK(x, x)_ij / dtheta for
    every kernel hyperparameter without materializing the (P, n, n)
    gradient stack; O(n^2 D) via two matrix products in the ARD case.
    ``k`` and ``r2`` (the kernel and scaled squared distances at x) may be
    passed in when the caller already has them.

    Returns
    -------
    (g_log_lengthscales, g_log_signal_variance)
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    spec.validate_dim(x.shape[1])
    weight = np.asarray(weight, dtype=np.float64)
    if k is None:
        k = kernel_matrix(spec, x)
    g_signal = 0.5 * float((weight * k).sum())

    ls = spec.lengthscales
    if spec.family == "linear":
        xs = x / ls
        if spec.ard:
            g_ls = -spec.signal_variance * ((weight @ xs) * xs).sum(axis=0)
        else:
            g_ls = np.array([-float((weight * k).sum())])
        return g_ls, g_signal

    if r2 is None:
        r2 = _scaled_sqdist(spec, x, x)
    if spec.family == "rbf":
        factor = k
    else:
        factor = _matern_dfactor(spec, np.sqrt(np.maximum(r2, 0.0)))
    m = weight * factor
    if spec.ard:
        # sum_ij m_ij (x_id - x_jd)^2 = 2 [sum_i s_i x_id^2 - x_d' m x_d]
        s = m.sum(axis=1)
        quad = s @ (x ** 2) - ((m @ x) * x).sum(axis=0)
        g_ls = quad / ls ** 2
    else:
        g_ls = np.array([0.5 * float((m * r2).sum())])
    return g_ls, g_signal
