"""Serialization of fitted models plus their feature transforms.

Models are .npz archives holding the state arrays and a JSON metadata
blob (kernel spec, noise, target stats, optional standardizer/PCA).  The
feature transform fitted at training time travels with the model so
evaluation applies the identical preprocessing.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InvalidConfigError
from .features import FeatureStandardizer, PCAProjector
from .gp import GPState, TargetStats
from .kernels import KernelSpec
from .svgp import SVGPState


def _spec_meta(spec: KernelSpec):
    return {"family": spec.family, "ard": spec.ard,
            "log_signal_variance": spec.log_signal_variance}


def _spec_from(meta, log_lengthscales):
    return KernelSpec(family=meta["family"], ard=meta["ard"],
                      log_lengthscales=log_lengthscales,
                      log_signal_variance=meta["log_signal_variance"])


def save_model(path, state, standardizer=None, pca=None):
    """Write a GPState or SVGPState with its feature transforms."""
    arrays = {}
    meta = {"spec": _spec_meta(state.spec),
            "log_noise_variance": state.log_noise_variance,
            "target_mean": state.target_stats.mean,
            "target_std": state.target_stats.std}
    if isinstance(state, GPState):
        meta["kind"] = "gp"
        meta["log_marginal_likelihood"] = state.log_marginal_likelihood
        arrays.update(x_train=state.x_train, y_train=state.y_train,
                      chol=state.chol, alpha=state.alpha)
    elif isinstance(state, SVGPState):
        meta["kind"] = "svgp"
        arrays.update(z=state.z, m_u=state.m_u, l_u=state.l_u)
    else:
        raise InvalidConfigError(f"cannot serialize {type(state).__name__}")
    arrays["log_lengthscales"] = state.spec.log_lengthscales
    if standardizer is not None:
        arrays.update(feature_mean=standardizer.mean, feature_scale=standardizer.scale)
    if pca is not None:
        arrays.update(pca_center=pca.center, pca_basis=pca.basis,
                      pca_explained=pca.explained_variance)
        meta["pca_retain"] = pca.retain
    np.savez(path, meta=np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8),
             **arrays)


def load_model(path):
    """Read a model archive; returns (state, standardizer, pca)."""
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        spec = _spec_from(meta["spec"], data["log_lengthscales"])
        stats = TargetStats(mean=meta["target_mean"], std=meta["target_std"])
        if meta["kind"] == "gp":
            state = GPState(
                x_train=data["x_train"], y_train=data["y_train"], spec=spec,
                log_noise_variance=meta["log_noise_variance"],
                chol=data["chol"], alpha=data["alpha"], target_stats=stats,
                log_marginal_likelihood=meta["log_marginal_likelihood"])
        elif meta["kind"] == "svgp":
            state = SVGPState(
                z=data["z"], m_u=data["m_u"], l_u=data["l_u"], spec=spec,
                log_noise_variance=meta["log_noise_variance"], target_stats=stats)
        else:
            raise InvalidConfigError(f"unknown model kind {meta['kind']!r}")
        standardizer = None
        if "feature_mean" in data:
            standardizer = FeatureStandardizer(mean=data["feature_mean"],
                                               scale=data["feature_scale"])
        pca = None
        if "pca_basis" in data:
            pca = PCAProjector(center=data["pca_center"], basis=data["pca_basis"],
                               explained_variance=data["pca_explained"],
                               retain=meta.get("pca_retain", 1.0))
    return state, standardizer, pca


def predictions_to_json(pred):
    """Predictions JSON consumed by `metrics report` and the bindings."""
    payload = {
        "mean": pred.mean.tolist(),
        "variance": pred.variance.tolist(),
        "standardized_mean": pred.standardized_mean.tolist(),
        "standardized_variance": pred.standardized_variance.tolist(),
        "target_stats": {"mean": pred.target_stats.mean,
                         "std": pred.target_stats.std},
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def predictions_from_json(text):
    from .gp import PredictiveDistribution

    payload = json.loads(text)
    stats = TargetStats(mean=payload["target_stats"]["mean"],
                        std=payload["target_stats"]["std"])
    return PredictiveDistribution(
        mean=np.asarray(payload["mean"], dtype=np.float64),
        variance=np.asarray(payload["variance"], dtype=np.float64),
        standardized_mean=np.asarray(payload["standardized_mean"], dtype=np.float64),
        standardized_variance=np.asarray(payload["standardized_variance"],
                                         dtype=np.float64),
        target_stats=stats)
