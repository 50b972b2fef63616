"""Per-class Gaussian mixture color models for the iterative cut loop.

Pixels are 3-vectors in 0..255 float color units (grayscale inputs are
replicated to three channels upstream). Fitting uses hard k-means-style
assignment, matching the min-cut alternation this feeds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import FewerPixelsThanComponentsError

#: Covariance regularization floor, in squared color units. Grayscale
#: replicated to 3 channels is rank-deficient without it.
EPS_COV = 1e-3

#: Mixture densities are floored here so data terms stay finite.
DENSITY_FLOOR = 1e-300

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class GmmComponent:
    """One weighted Gaussian with cached inverse/log-determinant."""

    weight: float
    mean: np.ndarray        # (3,)
    covariance: np.ndarray  # (3, 3)
    inv_cov: np.ndarray
    log_det: float


@dataclass(frozen=True)
class GmmModel:
    weights: np.ndarray   # (K,)
    means: np.ndarray     # (K, 3)
    covs: np.ndarray      # (K, 3, 3)
    inv_covs: np.ndarray  # (K, 3, 3)
    log_dets: np.ndarray  # (K,)

    @property
    def n_components(self) -> int:
        return self.weights.shape[0]

    def component(self, k: int) -> GmmComponent:
        return GmmComponent(float(self.weights[k]), self.means[k], self.covs[k],
                            self.inv_covs[k], float(self.log_dets[k]))

    def to_json(self) -> str:
        return json.dumps({
            "v": 1,
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "covariances": self.covs.tolist(),
        })

    @staticmethod
    def from_json(text: str) -> "GmmModel":
        doc = json.loads(text)
        return _model_from_params(np.asarray(doc["weights"], dtype=np.float64),
                                  np.asarray(doc["means"], dtype=np.float64),
                                  np.asarray(doc["covariances"], dtype=np.float64))


def _model_from_params(weights, means, covs) -> GmmModel:
    k = weights.shape[0]
    inv_covs = np.empty_like(covs)
    log_dets = np.empty(k, dtype=np.float64)
    for i in range(k):
        sign, log_det = np.linalg.slogdet(covs[i])
        if sign <= 0:
            raise ValueError("covariance must be positive definite")
        inv_covs[i] = np.linalg.inv(covs[i])
        log_dets[i] = log_det
    return GmmModel(weights, means, covs, inv_covs, log_dets)


def _kmeans_assign(pixels: np.ndarray, k: int, rng: np.random.Generator,
                   max_iter: int = 50) -> np.ndarray:
    """Seeded k-means++ followed by Lloyd iteration to assignment fixpoint."""
    n = pixels.shape[0]
    centers = np.empty((k, pixels.shape[1]), dtype=np.float64)
    centers[0] = pixels[rng.integers(n)]
    for i in range(1, k):
        d2 = np.min(((pixels[:, None, :] - centers[None, :i, :]) ** 2).sum(-1), axis=1)
        total = d2.sum()
        if total > 0:
            centers[i] = pixels[rng.choice(n, p=d2 / total)]
        else:
            centers[i] = pixels[rng.integers(n)]
    assign = np.zeros(n, dtype=np.int64)
    for _ in range(max_iter):
        d2 = ((pixels[:, None, :] - centers[None, :, :]) ** 2).sum(-1)
        new_assign = np.argmin(d2, axis=1)
        for i in range(k):
            sel = new_assign == i
            if sel.any():
                centers[i] = pixels[sel].mean(axis=0)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
    return assign


def _fit_components(pixels: np.ndarray, assignments: np.ndarray, k: int) -> GmmModel:
    n = pixels.shape[0]
    dim = pixels.shape[1]
    weights = np.zeros(k, dtype=np.float64)
    means = np.zeros((k, dim), dtype=np.float64)
    covs = np.tile(np.eye(dim), (k, 1, 1))
    for i in range(k):
        sel = assignments == i
        count = int(sel.sum())
        if count == 0:
            continue  # weight 0, identity covariance; skipped at assignment
        sub = pixels[sel]
        weights[i] = count / n
        means[i] = sub.mean(axis=0)
        centered = sub - means[i]
        covs[i] = (centered.T @ centered) / count + EPS_COV * np.eye(dim)
    return _model_from_params(weights, means, covs)


def init_from_pixels(pixels, k: int, seed: int) -> GmmModel:
    """Deterministic mixture fit: seeded k-means++ clusters, one component
    per cluster."""
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.ndim != 2:
        raise ValueError("pixels must be an (n, 3) array")
    if pixels.shape[0] < k:
        raise FewerPixelsThanComponentsError(
            f"{pixels.shape[0]} pixels for {k} components")
    assign = _kmeans_assign(pixels, k, np.random.default_rng(seed))
    return _fit_components(pixels, assign, k)


def refit(pixels, assignments, k: int) -> GmmModel:
    """Maximum-likelihood weight/mean/covariance per assigned component."""
    pixels = np.asarray(pixels, dtype=np.float64)
    assignments = np.asarray(assignments)
    if assignments.min(initial=0) < 0 or assignments.max(initial=0) >= k:
        raise ValueError("assignments out of range")
    return _fit_components(pixels, assignments, k)


def per_component_loglik(model: GmmModel, pixels: np.ndarray) -> np.ndarray:
    """(n, K) log of weighted component densities; -inf for empty components."""
    pixels = np.atleast_2d(np.asarray(pixels, dtype=np.float64))
    n, dim = pixels.shape
    out = np.full((n, model.n_components), -np.inf)
    for i in range(model.n_components):
        w = model.weights[i]
        if w <= 0:
            continue
        diff = pixels - model.means[i]
        maha = np.einsum("ij,jk,ik->i", diff, model.inv_covs[i], diff)
        out[:, i] = (np.log(w) - 0.5 * (dim * _LOG_2PI + model.log_dets[i])
                     - 0.5 * maha)
    return out


def component_loglik(comp: GmmComponent, z) -> float:
    """Log weighted Gaussian density of one component at color z."""
    if comp.weight <= 0:
        return -np.inf
    z = np.asarray(z, dtype=np.float64)
    diff = z - comp.mean
    maha = float(diff @ comp.inv_cov @ diff)
    dim = z.shape[0]
    return float(np.log(comp.weight) - 0.5 * (dim * _LOG_2PI + comp.log_det)
                 - 0.5 * maha)


def assign_components(model: GmmModel, pixels) -> np.ndarray:
    """Most-likely component per pixel; ties break to the lowest index."""
    return np.argmax(per_component_loglik(model, pixels), axis=1)


def mixture_nll(model: GmmModel, pixels) -> np.ndarray:
    """Per-pixel negative log mixture density, floored to stay finite."""
    ll = per_component_loglik(model, pixels)
    top = ll.max(axis=1, keepdims=True)
    safe_top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        mix = safe_top[:, 0] + np.log(np.exp(ll - safe_top).sum(axis=1))
    return -np.maximum(mix, np.log(DENSITY_FLOOR))


def data_term(fg: GmmModel, bg: GmmModel, z, side: str) -> float:
    """Color-model fit cost of labeling pixel z with `side` ("fg"/"bg")."""
    model = fg if side == "fg" else bg
    return float(mixture_nll(model, np.atleast_2d(z))[0])
