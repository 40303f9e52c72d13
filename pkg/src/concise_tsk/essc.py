"""Enhanced soft subspace clustering (ESSC).

Minimizes, over fuzzy partition ``U`` (K x N), centers ``V`` (d x K) and
per-cluster feature weights ``W`` (d x K)::

    J = sum_i sum_j u_ij^m sum_k w_ik (x_jk - v_ik)^2
        + eps * sum_i sum_k w_ik ln w_ik
        - eta * sum_i sum_j u_ij^m sum_k w_ik (v_ik - v0_k)^2

subject to columns of U and W summing to one.  Each block update below is
the exact minimizer of J with the other two blocks held fixed, so the
objective is non-increasing across iterations.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError

EMPTY_CLUSTER_MASS = 1e-12


@dataclass(frozen=True)
class EsscConfig:
    K: int = 30
    fuzzifier_m: float = 2.0
    epsilon: float = 1.0
    eta: float = 0.1
    max_iter: int = 200
    tol: float = 1e-6
    seed: int = 0

    def validate(self):
        if self.K < 1:
            raise ConfigError(f"K must be >= 1, got {self.K}")
        if not self.fuzzifier_m > 1:
            raise ConfigError(f"fuzzifier_m must be > 1, got {self.fuzzifier_m}")
        if not self.epsilon > 0:
            raise ConfigError(f"epsilon must be > 0, got {self.epsilon}")
        if not 0 <= self.eta < 1:
            raise ConfigError(f"eta must lie in [0, 1), got {self.eta}")
        if self.max_iter < 1:
            raise ConfigError("max_iter must be positive")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")


@dataclass
class EsscState:
    U: np.ndarray  # K x N
    V: np.ndarray  # d x K
    W: np.ndarray  # d x K
    v0: np.ndarray  # d
    objective_trace: list = field(default_factory=list)
    n_iter: int = 0
    n_forced: int = 0  # clusters revived by a forced assignment after the last iteration

    @property
    def K(self) -> int:
        return self.U.shape[0]


def _check_dims(X, V, W=None, U=None):
    N, d = X.shape
    if V.shape[0] != d:
        raise DataError(f"centers have {V.shape[0]} rows, data has {d} features")
    K = V.shape[1]
    if W is not None and W.shape != (d, K):
        raise DataError(f"weights shape {W.shape} != {(d, K)}")
    if U is not None and U.shape != (K, N):
        raise DataError(f"partition shape {U.shape} != {(K, N)}")


def _xlogx(W):
    out = np.zeros_like(W)
    pos = W > 0
    out[pos] = W[pos] * np.log(W[pos])
    return out


def essc_objective(X, state: EsscState, cfg: EsscConfig) -> float:
    X = np.asarray(X, dtype=float)
    U, V, W, v0 = state.U, state.V, state.W, state.v0
    _check_dims(X, V, W, U)
    if v0.shape != (X.shape[1],):
        raise DataError("v0 length does not match data dimension")
    Um = U ** cfg.fuzzifier_m  # K x N
    # sq[i, j, k] = (x_jk - v_ik)^2
    sq = (X[None, :, :] - V.T[:, None, :]) ** 2
    compact = np.einsum("ij,ik,ijk->", Um, W.T, sq)
    entropy = cfg.epsilon * _xlogx(W).sum()
    sep = ((V - v0[:, None]) ** 2 * W).sum(axis=0)  # per cluster
    separation = cfg.eta * float(Um.sum(axis=1) @ sep)
    return float(compact + entropy - separation)


def dissimilarities(X, V, W, v0, eta) -> np.ndarray:
    """D_ij = sum_k w_ik [(x_jk - v_ik)^2 - eta (v_ik - v0_k)^2], shape K x N."""
    sq = (X[None, :, :] - V.T[:, None, :]) ** 2  # K x N x d
    D = np.einsum("ijk,ik->ij", sq, W.T)
    sep = ((V - v0[:, None]) ** 2 * W).sum(axis=0)
    return D - eta * sep[:, None]


def update_memberships(X, V, W, cfg: EsscConfig, v0=None) -> np.ndarray:
    """Minimize J over U with V, W fixed.

    Positive dissimilarities give the usual ``D^(-1/(m-1))`` weighting.  When a
    point has a non-positive dissimilarity to some cluster the minimizer is
    crisp: all mass goes to the most negative cluster (lowest index on ties),
    or is split evenly over the zero-dissimilarity clusters.
    """
    X = np.asarray(X, dtype=float)
    _check_dims(X, V, W)
    if v0 is None:
        v0 = X.mean(axis=0)
    K, N = V.shape[1], X.shape[0]
    if K == 1:
        return np.ones((1, N))
    D = dissimilarities(X, V, W, v0, cfg.eta)
    U = np.empty((K, N))
    dmin = D.min(axis=0)
    soft = dmin > 0
    if soft.any():
        logs = -np.log(D[:, soft]) / (cfg.fuzzifier_m - 1.0)
        logs -= logs.max(axis=0)
        e = np.exp(logs)
        U[:, soft] = e / e.sum(axis=0)
    for j in np.flatnonzero(~soft):
        col = np.zeros(K)
        if dmin[j] < 0:
            col[np.argmin(D[:, j])] = 1.0
        else:
            zeros = D[:, j] == 0
            col[zeros] = 1.0 / zeros.sum()
        U[:, j] = col
    return U


def _farthest_points(X, V, W, live, n):
    """Indices of the ``n`` points farthest (W-weighted) from their best live center."""
    ref_V = V[:, live] if live.size else X.mean(axis=0)[:, None]
    ref_W = W[:, live] if live.size else np.full((X.shape[1], 1), 1.0 / X.shape[1])
    sq = (X[None, :, :] - ref_V.T[:, None, :]) ** 2
    dist = np.einsum("ijk,ik->ij", sq, ref_W.T).min(axis=0)
    return np.argsort(-dist, kind="stable")[:n]


def update_centers(X, U, cfg: EsscConfig, v0=None, W=None, V_prev=None) -> np.ndarray:
    """Minimize J over V with U fixed.

    A cluster whose membership mass ``sum_j u_ij^m`` has vanished does not
    affect J through its center, so it is re-seeded at the training point
    farthest (W-weighted) from its best live center.
    """
    X = np.asarray(X, dtype=float)
    if not cfg.eta < 1:
        raise ConfigError(f"eta must be < 1 for the center update, got {cfg.eta}")
    if v0 is None:
        v0 = X.mean(axis=0)
    Um = U ** cfg.fuzzifier_m
    S = Um.sum(axis=1)  # K
    num = X.T @ Um.T - cfg.eta * np.outer(v0, S)  # d x K
    empty = S < EMPTY_CLUSTER_MASS
    V = np.empty((X.shape[1], U.shape[0]))
    ok = ~empty
    V[:, ok] = num[:, ok] / ((1.0 - cfg.eta) * S[ok])
    if empty.any():
        if W is None:
            W = np.full(V.shape, 1.0 / X.shape[1])
        picks = _farthest_points(X, V, W, np.flatnonzero(ok), int(empty.sum()))
        V[:, empty] = X[picks].T
    return V


def _revive_empty(X, U, V, W, cfg, v0, max_rounds=3):
    """Re-seed empty clusters (center at a far point, uniform weights) and
    redo the membership step.  Neither move can raise J: an empty cluster
    contributes only its entropy term, which uniform weights minimize."""
    for _ in range(max_rounds):
        empty = (U ** cfg.fuzzifier_m).sum(axis=1) < EMPTY_CLUSTER_MASS
        if not empty.any():
            break
        V, W = V.copy(), W.copy()
        picks = _farthest_points(X, V, W, np.flatnonzero(~empty), int(empty.sum()))
        V[:, empty] = X[picks].T
        W[:, empty] = 1.0 / X.shape[1]
        U = update_memberships(X, V, W, cfg, v0)
    return U, V, W


def _force_nonempty(X, U, V, W, cfg):
    """Last resort: hand each still-empty cluster the point nearest its center."""
    empty = np.flatnonzero((U ** cfg.fuzzifier_m).sum(axis=1) < EMPTY_CLUSTER_MASS)
    if empty.size == 0:
        return U, 0
    U = U.copy()
    taken = set()
    for i in empty:
        dist = ((X - V[:, i]) ** 2 * W[:, i]).sum(axis=1)
        for j in np.argsort(dist, kind="stable"):
            donor = int(np.argmax(U[:, j]))
            # never empty another cluster
            if j in taken or (U[donor] > 0).sum() <= 1:
                continue
            taken.add(int(j))
            U[:, j] = 0.0
            U[i, j] = 1.0
            break
    return U, int(empty.size)


def update_weights(X, U, V, cfg: EsscConfig, v0=None) -> np.ndarray:
    """Minimize J over W with U, V fixed: a column-wise softmax of -sigma/eps."""
    X = np.asarray(X, dtype=float)
    _check_dims(X, V, U=U)
    if v0 is None:
        v0 = X.mean(axis=0)
    Um = U ** cfg.fuzzifier_m
    sq = (X[None, :, :] - V.T[:, None, :]) ** 2  # K x N x d
    sigma = np.einsum("ij,ijk->ki", Um, sq)  # d x K
    sigma -= cfg.eta * Um.sum(axis=1)[None, :] * (V - v0[:, None]) ** 2
    z = -sigma / cfg.epsilon
    z -= z.max(axis=0)
    e = np.exp(z)
    return e / e.sum(axis=0)


def _init_state(X, cfg: EsscConfig, v0) -> EsscState:
    rng = np.random.default_rng(cfg.seed)
    N, d = X.shape
    idx = rng.choice(N, size=cfg.K, replace=False)
    V = X[idx].T.copy()
    W = np.full((d, cfg.K), 1.0 / d)
    U = update_memberships(X, V, W, cfg, v0)
    return EsscState(U=U, V=V, W=W, v0=v0)


def essc_fit(X, cfg: EsscConfig) -> EsscState:
    """Alternate membership, center and weight updates until the relative
    objective change drops below ``cfg.tol`` or ``cfg.max_iter`` is hit."""
    X = np.asarray(X, dtype=float)
    cfg.validate()
    if X.ndim != 2:
        raise DataError("X must be an N x d matrix")
    N = X.shape[0]
    if N < cfg.K:
        raise ConfigError(f"need at least K={cfg.K} samples, got {N}")
    v0 = X.mean(axis=0)
    state = _init_state(X, cfg, v0)
    J = essc_objective(X, state, cfg)
    state.objective_trace.append(J)
    for it in range(1, cfg.max_iter + 1):
        U = update_memberships(X, state.V, state.W, cfg, v0)
        state.U, state.V, state.W = _revive_empty(X, U, state.V, state.W, cfg, v0)
        state.V = update_centers(X, state.U, cfg, v0, W=state.W)
        state.W = update_weights(X, state.U, state.V, cfg, v0)
        J_new = essc_objective(X, state, cfg)
        state.objective_trace.append(J_new)
        state.n_iter = it
        if abs(J - J_new) / (abs(J_new) + 1.0) < cfg.tol:
            break
        J = J_new
    U, forced = _force_nonempty(X, state.U, state.V, state.W, cfg)
    if forced:
        state.U = U
        state.V = update_centers(X, U, cfg, v0, W=state.W)
        state.W = update_weights(X, U, state.V, cfg, v0)
        state.objective_trace.append(essc_objective(X, state, cfg))
    state.n_forced = forced
    return state
