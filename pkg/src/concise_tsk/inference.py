"""Zero-order TSK inference in the log domain."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .antecedent import RuleAntecedent
from .dataio import NormParams
from .errors import ConfigError, DataError


@dataclass(frozen=True)
class Rule:
    index: int  # original cluster index, 0-based
    antecedent: RuleAntecedent
    consequent: np.ndarray  # one value per output channel

    def __post_init__(self):
        object.__setattr__(self, "consequent", np.atleast_1d(np.asarray(self.consequent, dtype=float)))


@dataclass
class TskModel:
    """A trained rule base.

    ``rules`` are the retained rules ordered by cluster index; ``abandoned``
    keeps the antecedents of pruned rules so the zeroed-consequent reading of
    inference can be reproduced.
    """

    rules: list[Rule]
    outputs: int
    n_clusters: int
    class_labels: Optional[list[str]] = None
    feature_names: Optional[list[str]] = None
    norm_params: Optional[NormParams] = None
    config: dict = field(default_factory=dict)
    abandoned: list[Rule] = field(default_factory=list)

    @property
    def n_rules(self) -> int:
        return len(self.rules)

    @property
    def is_classifier(self) -> bool:
        return self.class_labels is not None

    def consequent_matrix(self) -> np.ndarray:
        return np.vstack([r.consequent for r in self.rules])


def firing_strength(x, rule: RuleAntecedent) -> float:
    """Log of the product of the rule's Gaussian memberships at ``x``."""
    x = np.asarray(x, dtype=float)
    diff = x[rule.feature_indices] - rule.centers
    return float(-np.sum(diff * diff / (2.0 * rule.widths)))


def log_firing_matrix(X, antecedents) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.empty((X.shape[0], len(antecedents)))
    for k, a in enumerate(antecedents):
        diff = X[:, a.feature_indices] - a.centers
        out[:, k] = -np.sum(diff * diff / (2.0 * a.widths), axis=1)
    return out


def _softmax_rows(L):
    m = L.max(axis=1, keepdims=True)
    bad = ~np.isfinite(m[:, 0])
    m[bad] = 0.0
    e = np.exp(L - m)
    s = e.sum(axis=1, keepdims=True)
    e[bad] = 1.0
    s[bad] = L.shape[1]
    return e / s


def normalized_firing(x, antecedents) -> np.ndarray:
    if len(antecedents) == 0:
        raise ConfigError("rule base is empty")
    return _softmax_rows(log_firing_matrix(x, antecedents))[0]


def map_to_firing_space(X, antecedents) -> np.ndarray:
    """Rows are the normalized firing strengths of each sample (sum to 1)."""
    if len(antecedents) == 0:
        raise ConfigError("rule base is empty")
    return _softmax_rows(log_firing_matrix(X, antecedents))


def _as_antecedents(rules):
    return [r.antecedent if isinstance(r, Rule) else r for r in rules]


def predict_regression(X, model: TskModel, include_abandoned: bool = False) -> np.ndarray:
    """Outputs ``N x outputs``.

    By default the normalization runs over the retained rules only.  With
    ``include_abandoned`` the pruned rules stay in the denominator with zero
    consequents.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if model.norm_params is not None and X.shape[1] != model.norm_params.d:
        raise DataError(f"expected {model.norm_params.d} features, got {X.shape[1]}")
    rules = list(model.rules)
    if include_abandoned and model.abandoned:
        rules = sorted(rules + list(model.abandoned), key=lambda r: r.index)
    Xg = map_to_firing_space(X, _as_antecedents(rules))
    P = np.vstack([r.consequent for r in rules])
    return Xg @ P


def predict_class_index(X, model: TskModel, include_abandoned: bool = False) -> np.ndarray:
    if not model.is_classifier or model.outputs < 2:
        raise ConfigError("predict_class needs a classification model with >= 2 outputs")
    # argmax returns the first maximum, i.e. ties go to the lowest class index
    return np.argmax(predict_regression(X, model, include_abandoned), axis=1)


def predict_class(X, model: TskModel, include_abandoned: bool = False) -> list[str]:
    idx = predict_class_index(X, model, include_abandoned)
    return [model.class_labels[i] for i in idx]
