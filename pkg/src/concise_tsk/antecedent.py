"""Rule antecedents from an ESSC partition: per-rule feature subsets and
Gaussian membership parameters on those subsets."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError

WIDTH_FLOOR = 1e-8


@dataclass(frozen=True)
class RuleAntecedent:
    feature_indices: np.ndarray  # strictly increasing, int
    centers: np.ndarray
    widths: np.ndarray  # variance scale

    def __post_init__(self):
        idx = np.asarray(self.feature_indices, dtype=int)
        object.__setattr__(self, "feature_indices", idx)
        object.__setattr__(self, "centers", np.asarray(self.centers, dtype=float))
        object.__setattr__(self, "widths", np.asarray(self.widths, dtype=float))
        if idx.size < 1:
            raise DataError("a rule needs at least one feature")
        if np.any(np.diff(idx) <= 0):
            raise DataError("feature indices must be strictly increasing")
        if not (self.centers.shape == self.widths.shape == idx.shape):
            raise DataError("centers/widths must match feature_indices")
        if np.any(self.widths <= 0):
            raise DataError("widths must be positive")

    @property
    def length(self) -> int:
        return int(self.feature_indices.size)


def select_features(W, beta: float) -> list[np.ndarray]:
    """Per-cluster feature subsets ``{l : w_lk > beta}``.

    ``beta == 0`` keeps every feature (the classical full-space antecedent),
    even where a weight has underflowed to exactly zero.  An empty subset falls
    back to the single largest-weight feature.
    """
    if not 0.0 <= beta <= 1.0:
        raise ConfigError(f"beta must lie in [0, 1], got {beta}")
    W = np.asarray(W, dtype=float)
    d, K = W.shape
    subsets = []
    for k in range(K):
        if beta == 0:
            s = np.arange(d)
        else:
            s = np.flatnonzero(W[:, k] > beta)
            if s.size == 0:
                s = np.array([int(np.argmax(W[:, k]))])
        subsets.append(s)
    return subsets


def estimate_membership_params(X, U, subsets, h: float) -> list[RuleAntecedent]:
    """Membership-weighted means and ``h``-scaled variances on each subset.

    ``U`` is the raw K x N partition (not raised to the fuzzifier).
    """
    if not h > 0:
        raise ConfigError(f"h must be positive, got {h}")
    X = np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    if U.shape != (len(subsets), X.shape[0]):
        raise DataError(f"partition shape {U.shape} does not match {len(subsets)} rules x {X.shape[0]} samples")
    mass = U.sum(axis=1)
    rules = []
    for k, s in enumerate(subsets):
        if mass[k] <= 0:
            raise DataError(f"cluster {k} has zero membership mass")
        xs = X[:, s]
        c = U[k] @ xs / mass[k]
        var = U[k] @ (xs - c) ** 2 / mass[k]
        rules.append(RuleAntecedent(np.asarray(s, dtype=int), c, np.maximum(h * var, WIDTH_FLOOR)))
    return rules


def gaussian_membership(x, v, sigma):
    return np.exp(-((np.asarray(x) - v) ** 2) / (2.0 * sigma))
