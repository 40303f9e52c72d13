"""Training pipeline, k-fold cross-validation and grid search."""
from __future__ import annotations

import itertools
import logging
import time
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional

import numpy as np

from . import metrics
from .antecedent import estimate_membership_params, select_features
from .consequent import prune_rules, solve_channels
from .dataio import Dataset, apply_minmax, fit_minmax
from .errors import ConfigError
from .essc import EsscConfig, EsscState, essc_fit
from .inference import Rule, TskModel, map_to_firing_space, predict_class_index, predict_regression

log = logging.getLogger(__name__)

# grid parameters in canonical (product) order
GRID_KEYS = ("K", "h", "beta", "epsilon", "eta", "fuzzifier_m", "lam")

DEFAULT_GRIDS = {
    "h": [0.01, 0.1, 1, 10, 100],
    "beta": [0.1, 0.15, 0.2, 0.25, 0.3],
    "epsilon": [0.01, 0.1, 1, 10, 100],
    "eta": [0.01, 0.05, 0.1, 0.3, 0.5],
    "lam": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
}


@dataclass(frozen=True)
class TrainConfig:
    K: int = 30
    h: float = 1.0
    beta: float = 0.1
    epsilon: float = 1.0
    eta: float = 0.1
    fuzzifier_m: float = 2.0
    lam: float = 0.1
    seed: int = 0
    essc_tol: float = 1e-6
    essc_max_iter: int = 200
    fista_tol: float = 1e-6
    fista_max_iter: int = 20000
    zero_tol: float = 1e-8
    refit: bool = False

    def validate(self):
        self.essc_config().validate()
        if not self.h > 0:
            raise ConfigError(f"h must be positive, got {self.h}")
        if not 0 <= self.beta <= 1:
            raise ConfigError(f"beta must lie in [0, 1], got {self.beta}")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")

    def essc_config(self) -> EsscConfig:
        return EsscConfig(K=self.K, fuzzifier_m=self.fuzzifier_m, epsilon=self.epsilon,
                          eta=self.eta, max_iter=self.essc_max_iter, tol=self.essc_tol,
                          seed=self.seed)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = dict(d)
        if "lambda" in d:
            d["lam"] = d.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg


def one_hot_encode(labels, m: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.size and (labels.min() < 0 or labels.max() >= m):
        raise ConfigError(f"labels must lie in 0..{m - 1}")
    Y = np.zeros((labels.size, m))
    Y[np.arange(labels.size), labels] = 1.0
    return Y


def _targets(data: Dataset) -> np.ndarray:
    if data.is_classification:
        if data.n_classes < 2:
            raise ConfigError("classification needs at least two classes")
        return one_hot_encode(data.labels, data.n_classes)
    return np.asarray(data.labels, dtype=float)[:, None]


def build_antecedents(X, state: EsscState, cfg: TrainConfig):
    subsets = select_features(state.W, cfg.beta)
    return estimate_membership_params(X, state.U, subsets, cfg.h)


def train_pipeline(train: Dataset, cfg: TrainConfig, essc_state: Optional[EsscState] = None) -> TskModel:
    """Fit a concise TSK model on (already normalized) training data.

    ``essc_state`` may be passed in to reuse a clustering computed with the
    same data and ESSC settings.
    """
    cfg.validate()
    if train.n < cfg.K:
        raise ConfigError(f"K={cfg.K} exceeds the number of training samples ({train.n})")
    X = train.features
    Y = _targets(train)
    if essc_state is None:
        essc_state = essc_fit(X, cfg.essc_config())
    ants = build_antecedents(X, essc_state, cfg)
    Xg = map_to_firing_space(X, ants)
    P = solve_channels(Xg, Y, cfg.lam, cfg.fista_tol, cfg.fista_max_iter)
    model = TskModel(
        rules=[Rule(k, a, np.zeros(Y.shape[1])) for k, a in enumerate(ants)],
        outputs=Y.shape[1],
        n_clusters=cfg.K,
        class_labels=list(train.class_labels) if train.is_classification else None,
        feature_names=list(train.feature_names),
        norm_params=train.norm_params,
        config=cfg.to_dict(),
    )
    prune_rules(model, P, cfg.zero_tol)
    if cfg.refit and model.abandoned:
        # re-solve on the retained design and prune once more
        kept = model.rules
        Xg_r = map_to_firing_space(X, [r.antecedent for r in kept])
        P_r = solve_channels(Xg_r, Y, cfg.lam, cfg.fista_tol, cfg.fista_max_iter)
        abandoned = model.abandoned
        model.rules = kept
        prune_rules(model, P_r, cfg.zero_tol)
        model.abandoned = sorted(abandoned + model.abandoned, key=lambda r: r.index)
    return model


def kfold_split(n: int, k: int, seed: int = 0, labels=None) -> list[np.ndarray]:
    """Seeded k-fold partition of ``range(n)``.

    Without labels: shuffle then cut into contiguous folds whose sizes differ
    by at most one (the first ``n % k`` folds are larger).  With labels: each
    class is shuffled, the classes are concatenated, and positions are dealt
    round-robin so every class spreads evenly over the folds.
    """
    if k < 1 or k > n:
        raise ConfigError(f"cannot split {n} samples into {k} folds")
    rng = np.random.default_rng(seed)
    if labels is None:
        perm = rng.permutation(n)
        sizes = [n // k + (1 if f < n % k else 0) for f in range(k)]
        bounds = np.cumsum([0] + sizes)
        return [np.sort(perm[bounds[f]:bounds[f + 1]]) for f in range(k)]
    labels = np.asarray(labels)
    if labels.shape != (n,):
        raise ConfigError("labels length does not match n")
    order = np.concatenate([rng.permutation(np.flatnonzero(labels == c)) for c in np.unique(labels)])
    return [np.sort(order[f::k]) for f in range(k)]


@dataclass
class EvalReport:
    config: dict
    folds: int
    fold_metrics: dict  # metric name -> list over folds
    complexity: list
    n_rules: list
    rule_lengths: list  # per fold, list of retained rule lengths
    wall_clock: list = field(default_factory=list)

    def mean(self, name: str) -> float:
        return float(np.mean(self.fold_metrics[name]))

    def std(self, name: str) -> float:
        return float(np.std(self.fold_metrics[name], ddof=1)) if self.folds > 1 else 0.0

    @property
    def mean_complexity(self) -> float:
        return float(np.mean(self.complexity))

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "config": self.config,
            "folds": self.folds,
            "fold_metrics": self.fold_metrics,
            "mean": {m: self.mean(m) for m in self.fold_metrics},
            "std": {m: self.std(m) for m in self.fold_metrics},
            "complexity": self.complexity,
            "mean_complexity": self.mean_complexity,
            "n_rules": self.n_rules,
            "rule_lengths": self.rule_lengths,
        }
        if include_timing:
            out["wall_clock"] = self.wall_clock
        return out


def default_positive_class(labels, n_classes: int) -> int:
    """Minority class (lowest index on ties)."""
    counts = np.bincount(np.asarray(labels, dtype=int), minlength=n_classes)
    return int(np.argmin(counts))


def expand_grid(grids: dict, base: TrainConfig) -> list[TrainConfig]:
    grids = dict(grids)
    if "lambda" in grids:
        grids["lam"] = grids.pop("lambda")
    unknown = set(grids) - set(GRID_KEYS)
    if unknown:
        raise ConfigError(f"unknown grid parameters: {sorted(unknown)}")
    for key, vals in grids.items():
        if not isinstance(vals, (list, tuple)) or len(vals) == 0:
            raise ConfigError(f"grid for {key!r} must be a non-empty list")
    keys = [k for k in GRID_KEYS if k in grids]
    out = []
    for combo in itertools.product(*(grids[k] for k in keys)):
        cfg = replace(base, **dict(zip(keys, combo)))
        cfg.validate()
        out.append(cfg)
    return out


class _FoldCache:
    """Per-fold normalized views, ESSC states and firing-space designs."""

    def __init__(self, data: Dataset, folds):
        self.views = []
        all_idx = np.arange(data.n)
        for test_idx in folds:
            train_idx = np.setdiff1d(all_idx, test_idx)
            tr, te = data.subset(train_idx), data.subset(test_idx)
            params = fit_minmax(tr)
            self.views.append((apply_minmax(tr, params), apply_minmax(te, params)))
        self.essc = {}

    def essc_state(self, f: int, cfg: TrainConfig) -> EsscState:
        ec = cfg.essc_config()
        key = (f, ec)
        if key not in self.essc:
            self.essc[key] = essc_fit(self.views[f][0].features, ec)
        return self.essc[key]


def _evaluate_fold(cache: _FoldCache, f: int, cfg: TrainConfig, positive: int):
    t0 = time.perf_counter()
    train, test = cache.views[f]
    model = train_pipeline(train, cfg, cache.essc_state(f, cfg))
    elapsed = time.perf_counter() - t0
    if train.is_classification:
        pred = predict_class_index(test.features, model)
        scores = metrics.classification_report(test.labels, pred, train.n_classes, positive)
    else:
        resid = predict_regression(test.features, model)[:, 0] - test.labels
        rmse = float(np.sqrt(np.mean(resid ** 2)))
        scores = {"rmse": rmse, "neg_rmse": -rmse}
    return model, scores, elapsed


def cross_validate(data: Dataset, cfg: TrainConfig, k: int = 5, seed: int = 0,
                   positive_class: Optional[int] = None, _cache: Optional[_FoldCache] = None) -> EvalReport:
    """k-fold CV of one configuration; normalization is refit on every training fold."""
    if _cache is None:
        labels = data.labels if data.is_classification else None
        _cache = _FoldCache(data, kfold_split(data.n, k, seed, labels))
    if positive_class is None and data.is_classification:
        positive_class = default_positive_class(data.labels, data.n_classes)
    fold_metrics: dict = {}
    complexity, n_rules, lengths, clock = [], [], [], []
    for f in range(len(_cache.views)):
        model, scores, elapsed = _evaluate_fold(_cache, f, cfg, positive_class)
        for name, v in scores.items():
            fold_metrics.setdefault(name, []).append(v)
        complexity.append(metrics.model_complexity(model))
        n_rules.append(model.n_rules)
        lengths.append([r.antecedent.length for r in model.rules])
        clock.append(elapsed)
    return EvalReport(cfg.to_dict(), len(_cache.views), fold_metrics, complexity, n_rules, lengths, clock)


def grid_search_cv(data: Dataset, grids: dict, k: int = 5, seed: int = 0,
                   objective: str = "f_measure", base: Optional[TrainConfig] = None,
                   max_configs: Optional[int] = None,
                   positive_class: Optional[int] = None) -> tuple[TrainConfig, EvalReport, list]:
    """Exhaustive (or seeded-subsampled) grid search under k-fold CV.

    The winner maximizes the CV mean of ``objective``; ties go to the lower
    mean complexity, then to the earlier grid position.  Returns the winning
    config, its report, and a summary row for every evaluated config.
    """
    base = base or TrainConfig(seed=seed)
    configs = expand_grid(grids, base)
    if max_configs is not None and len(configs) > max_configs:
        rng = np.random.default_rng(seed)
        keep = np.sort(rng.choice(len(configs), size=max_configs, replace=False))
        configs = [configs[i] for i in keep]
    if objective not in metrics.METRIC_NAMES and objective not in ("neg_rmse",):
        raise ConfigError(f"unknown objective metric {objective!r}")
    labels = data.labels if data.is_classification else None
    cache = _FoldCache(data, kfold_split(data.n, k, seed, labels))
    if positive_class is None and data.is_classification:
        positive_class = default_positive_class(data.labels, data.n_classes)

    reports = []
    for pos, cfg in enumerate(configs):
        rep = cross_validate(data, cfg, k, seed, positive_class, _cache=cache)
        reports.append(rep)
        log.debug("config %d/%d %s=%.4f", pos + 1, len(configs), objective, rep.mean(objective))
    summary = [{"config": r.config, "mean": {m: r.mean(m) for m in r.fold_metrics},
                "mean_complexity": r.mean_complexity} for r in reports]
    best = select_best([(pos, r.mean(objective), r.mean_complexity) for pos, r in enumerate(reports)])
    return configs[best], reports[best], summary


def select_best(entries) -> int:
    """Grid position of the winner among ``(position, score, complexity)``
    entries: highest score, then lowest complexity, then earliest position.
    The result does not depend on the order of ``entries``."""
    return min(entries, key=lambda e: (-e[1], e[2], e[0]))[0]
