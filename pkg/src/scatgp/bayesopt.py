"""Pool-based Bayesian optimization with expected improvement.

A fixed candidate pool is scanned exhaustively at every step: fit an
exact GP on the observations (hyperparameters re-optimized every
``refit_every`` steps), score expected improvement on the unobserved
candidates, query the argmax (ties broken by lowest pool index), and
track the best value and simple regret against the pool optimum.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import cho_solve
from scipy.stats import norm

from . import gp
from .errors import InvalidConfigError, PoolExhaustedError
from .kernels import KernelSpec, kernel_matrix, make_spec

DIRECTIONS = ("minimize", "maximize")


@dataclass(frozen=True)
class BOConfig:
    """Loop sizes, direction, kernel template and seeding."""

    n_init: int = 50
    n_iters: int = 50
    pool_size: int = 1000
    direction: str = "minimize"
    kernel: KernelSpec = field(default_factory=lambda: make_spec("matern52"))
    refit_every: int = 1
    seed: int = 0
    gp_opt: gp.OptimizerConfig = field(default_factory=gp.OptimizerConfig)

    def validate(self):
        if self.n_init < 1:
            raise InvalidConfigError(f"n_init must be >= 1, got {self.n_init}")
        if self.n_iters < 0:
            raise InvalidConfigError(f"n_iters must be >= 0, got {self.n_iters}")
        if self.pool_size < self.n_iters:
            raise InvalidConfigError("pool_size must be >= n_iters")
        if self.direction not in DIRECTIONS:
            raise InvalidConfigError(f"direction must be one of {DIRECTIONS}")
        if self.refit_every < 1:
            raise InvalidConfigError("refit_every must be >= 1")


@dataclass(frozen=True)
class BORecord:
    iteration: int
    index: int          # index into the original pool matrix
    value: float
    best: float
    regret: float


@dataclass(frozen=True)
class BOTrace:
    """Initialization summary plus one record per BO iteration."""

    records: tuple
    init_indices: tuple
    init_best: float
    initial_regret: float
    pool_optimum: float
    direction: str

    @property
    def final_regret(self) -> float:
        return self.records[-1].regret if self.records else self.initial_regret

    def normalized_regret(self):
        """Regret curve divided by the post-initialization regret."""
        scale = self.initial_regret if self.initial_regret > 0 else 1.0
        return np.array([r.regret for r in self.records]) / scale

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("iteration,index,value,best,regret\n")
        for r in self.records:
            out.write(f"{r.iteration},{r.index},{r.value!r},{r.best!r},{r.regret!r}\n")
        return out.getvalue()


def expected_improvement(pred, best, direction="minimize"):
    """Closed-form EI of Gaussian marginals against the incumbent.

    EI_i = sigma_i * (z * CDF(z) + PDF(z)) with z = improvement_i/sigma_i,
    improvement = best - mu (minimize) or mu - best (maximize); degenerate
    sigma_i = 0 points fall back to max(improvement, 0).
    """
    if direction not in DIRECTIONS:
        raise InvalidConfigError(f"direction must be one of {DIRECTIONS}")
    mu = np.asarray(pred.mean, dtype=np.float64).ravel()
    sigma = np.sqrt(np.asarray(pred.variance, dtype=np.float64).ravel())
    improvement = (best - mu) if direction == "minimize" else (mu - best)
    out = np.maximum(improvement, 0.0)
    ok = sigma > 0.0
    z = improvement[ok] / sigma[ok]
    out[ok] = sigma[ok] * (z * norm.cdf(z) + norm.pdf(z))
    return out


def _is_better(a, b, direction):
    return a < b if direction == "minimize" else a > b


def _refit_posterior(state, x, y_raw):
    """Rebuild the posterior on new data keeping hyperparameters fixed."""
    stats = gp.TargetStats(mean=float(np.mean(y_raw)),
                           std=max(float(np.std(y_raw)), 1e-12))
    y = stats.standardize(y_raw)
    k = kernel_matrix(state.spec, x) + state.noise_variance * np.eye(x.shape[0])
    chol = gp.chol_with_jitter(k)
    alpha = cho_solve((chol, True), y)
    return replace(state, x_train=x, y_train=y, chol=chol, alpha=alpha,
                   target_stats=stats)


def _setup(pool_features, oracle, cfg):
    cfg.validate()
    pool_features = np.atleast_2d(np.asarray(pool_features, dtype=np.float64))
    total = pool_features.shape[0]
    if cfg.pool_size > total:
        raise InvalidConfigError(
            f"pool_size {cfg.pool_size} exceeds available candidates {total}")
    if cfg.n_init + cfg.n_iters > cfg.pool_size:
        raise PoolExhaustedError(
            f"budget {cfg.n_init}+{cfg.n_iters} exceeds pool size {cfg.pool_size}")
    rng = np.random.default_rng(cfg.seed)
    if cfg.pool_size < total:
        work = np.sort(rng.choice(total, size=cfg.pool_size, replace=False))
    else:
        work = np.arange(total)
    values = np.array([float(oracle(int(i))) for i in work])
    if not np.all(np.isfinite(values)):
        raise InvalidConfigError("oracle returned non-finite values on the pool")
    optimum = values.min() if cfg.direction == "minimize" else values.max()
    init = rng.choice(cfg.pool_size, size=cfg.n_init, replace=False)
    return pool_features[work], work, values, float(optimum), init, rng


def _trace(records, work, init, values, optimum, cfg):
    reduce = min if cfg.direction == "minimize" else max
    init_best = float(reduce(values[init]))
    return BOTrace(records=tuple(records),
                   init_indices=tuple(int(work[i]) for i in init),
                   init_best=init_best,
                   initial_regret=abs(optimum - init_best),
                   pool_optimum=optimum,
                   direction=cfg.direction)


def run_bo(pool_features, oracle, cfg: BOConfig) -> BOTrace:
    """Expected-improvement loop over a fixed pool.

    Parameters
    ----------
    pool_features : (P, D) candidate features
    oracle : callable mapping an original pool index to its value
    cfg : BOConfig

    Notes
    -----
    Simple regret is |pool optimum - best observed| and is nonincreasing
    by construction; no pool index is ever queried twice.
    """
    pool, work, values, optimum, init, _ = _setup(pool_features, oracle, cfg)
    observed = list(init)
    best = float(values[init].min() if cfg.direction == "minimize"
                 else values[init].max())

    records = []
    state = None
    for it in range(1, cfg.n_iters + 1):
        unobserved = np.setdiff1d(np.arange(cfg.pool_size), observed)
        if unobserved.size == 0:
            raise PoolExhaustedError("no unobserved candidates left")
        x_obs = pool[observed]
        y_obs = values[observed]
        if state is None or (it - 1) % cfg.refit_every == 0:
            state = gp.fit(x_obs, y_obs, cfg.kernel, cfg.gp_opt)
        else:
            state = _refit_posterior(state, x_obs, y_obs)
        pred = gp.predict(state, pool[unobserved])
        ei = expected_improvement(pred, best, cfg.direction)
        chosen = int(unobserved[int(np.argmax(ei))])  # argmax -> lowest index tie-break
        observed.append(chosen)
        value = float(values[chosen])
        if _is_better(value, best, cfg.direction):
            best = value
        records.append(BORecord(iteration=it, index=int(work[chosen]),
                                value=value, best=best,
                                regret=abs(optimum - best)))
    return _trace(records, work, init, values, optimum, cfg)


def random_search(pool_features, oracle, cfg: BOConfig) -> BOTrace:
    """Uniform without-replacement baseline with the same trace schema."""
    pool, work, values, optimum, init, rng = _setup(pool_features, oracle, cfg)
    observed = list(init)
    best = float(values[init].min() if cfg.direction == "minimize"
                 else values[init].max())
    records = []
    for it in range(1, cfg.n_iters + 1):
        unobserved = np.setdiff1d(np.arange(cfg.pool_size), observed)
        if unobserved.size == 0:
            raise PoolExhaustedError("no unobserved candidates left")
        chosen = int(rng.choice(unobserved))
        observed.append(chosen)
        value = float(values[chosen])
        if _is_better(value, best, cfg.direction):
            best = value
        records.append(BORecord(iteration=it, index=int(work[chosen]),
                                value=value, best=best,
                                regret=abs(optimum - best)))
    return _trace(records, work, init, values, optimum, cfg)
