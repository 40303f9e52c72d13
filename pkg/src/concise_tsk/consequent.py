"""Sparse consequent learning: Lasso over the firing-space design matrix,
solved with accelerated proximal gradient (FISTA), and rule pruning."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, NumericalError
from .inference import Rule

SAFETY_FACTOR = 1.01


@dataclass
class LassoProblem:
    """``min 0.5 * ||Xg p - y||^2 + lam * ||p||_1``."""

    Xg: np.ndarray
    y: np.ndarray
    lam: float
    tol: float = 1e-6
    max_iter: int = 20000

    def __post_init__(self):
        self.Xg = np.asarray(self.Xg, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.Xg.ndim != 2 or self.y.shape != (self.Xg.shape[0],):
            raise DataError(f"design {self.Xg.shape} and target {self.y.shape} do not match")
        if self.lam < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lam}")

    def objective(self, p) -> float:
        r = self.Xg @ p - self.y
        return 0.5 * float(r @ r) + self.lam * float(np.abs(p).sum())


@dataclass
class LassoSolution:
    p: np.ndarray
    iterations: int
    lipschitz: float
    objective_trace: list = field(default_factory=list)
    polished: bool = False


def soft_threshold(v, gamma):
    """Proximal map of ``gamma * |.|``."""
    if np.any(np.asarray(gamma) < 0):
        raise ConfigError("threshold must be non-negative")
    v = np.asarray(v, dtype=float)
    out = np.where(v > gamma, v - gamma, np.where(v < -gamma, v + gamma, 0.0))
    return out if out.ndim else float(out)


def power_iteration(A, max_iter: int = 100, rtol: float = 1e-10, seed: int = 0) -> float:
    """Largest eigenvalue of the symmetric PSD matrix ``A``."""
    rng = np.random.default_rng(seed)
    b = rng.standard_normal(A.shape[0])
    b /= np.linalg.norm(b)
    lam = 0.0
    for _ in range(max_iter):
        Ab = A @ b
        nrm = np.linalg.norm(Ab)
        if nrm == 0:
            return 0.0
        b = Ab / nrm
        new = float(b @ A @ b)
        if lam and abs(new - lam) <= rtol * abs(new):
            lam = new
            break
        lam = new
    return lam


def lipschitz_constant(Xg) -> float:
    """Lipschitz constant of the least-squares gradient, with a 1% margin."""
    Xg = np.asarray(Xg, dtype=float)
    if not np.any(Xg):
        raise DataError("design matrix is all zeros")
    return SAFETY_FACTOR * power_iteration(Xg.T @ Xg)


def least_squares_init(Xg, y) -> np.ndarray:
    # columns of a firing-space design are typically near-collinear (rows sum to 1)
    Xg = np.asarray(Xg, dtype=float)
    G = Xg.T @ Xg
    K = G.shape[0]
    delta = 1e-8 * np.trace(G) / K
    return np.linalg.solve(G + delta * np.eye(K), Xg.T @ np.asarray(y, dtype=float))


def polish_support(problem: LassoProblem, p) -> np.ndarray | None:
    """Exact Lasso solution on the support and signs of ``p``.

    Solves ``Xs^T Xs q = Xs^T y - lam * sign(p_s)`` and returns the result only
    when it satisfies the optimality conditions (sign consistency on the
    support, ``|x_j^T r| <= lam`` off it); otherwise ``None``.
    """
    Xg, y, lam = problem.Xg, problem.y, problem.lam
    support = np.flatnonzero(p)
    if support.size == 0:
        return None
    s = np.sign(p[support])
    Xs = Xg[:, support]
    G = Xs.T @ Xs
    try:
        q = np.linalg.solve(G, Xs.T @ y - lam * s)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(q)) or np.any(np.sign(q) != s):
        return None
    out = np.zeros_like(p)
    out[support] = q
    corr = Xg.T @ (y - Xg @ out)
    off = np.ones(p.size, dtype=bool)
    off[support] = False
    if np.any(np.abs(corr[off]) > lam * (1 + 1e-9) + 1e-12):
        return None
    return out


def fista_solve(problem: LassoProblem, init=None, L=None, polish: bool = True,
                restart: bool = True) -> LassoSolution:
    """Accelerated proximal gradient with step ``1/L`` and threshold ``lam/L``.

    Stops when the gradient mapping ``L * max|p_new - p|`` falls below
    ``problem.tol``.  The raw step is 1/L times smaller, so testing it
    directly stops far from the optimum when L is large (firing-space designs
    have L on the order of N).  With ``restart`` the momentum is reset whenever
    it points uphill, which keeps badly conditioned designs from stalling.
    With ``polish`` the final iterate is replaced by the exact solution on its
    support whenever that passes the optimality check and does not raise the
    objective.
    """
    Xg, y = problem.Xg, problem.y
    if L is None:
        L = lipschitz_constant(Xg)
    p = least_squares_init(Xg, y) if init is None else np.asarray(init, dtype=float).copy()
    gamma = problem.lam / L
    z = p.copy()
    t = 1.0
    Xty = Xg.T @ y
    G = Xg.T @ Xg
    trace = [problem.objective(p)]
    it = 0
    for it in range(1, problem.max_iter + 1):
        grad = G @ z - Xty
        p_new = soft_threshold(z - grad / L, gamma)
        if not np.all(np.isfinite(p_new)):
            raise NumericalError(f"non-finite iterate at FISTA iteration {it}")
        if restart and (z - p_new) @ (p_new - p) > 0:
            t = 1.0
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        z = p_new + ((t - 1.0) / t_new) * (p_new - p)
        step = L * np.max(np.abs(p_new - p))
        p, t = p_new, t_new
        trace.append(problem.objective(p))
        if step < problem.tol:
            break
    polished = False
    if polish:
        q = polish_support(problem, p)
        if q is not None:
            fq = problem.objective(q)
            if fq <= trace[-1] + 1e-12 * max(1.0, abs(trace[-1])):
                p, polished = q, True
                trace.append(fq)
    return LassoSolution(p=p, iterations=it, lipschitz=L, objective_trace=trace, polished=polished)


def solve_channels(Xg, Y, lam, tol=1e-6, max_iter=20000) -> np.ndarray:
    """One Lasso per output column of ``Y`` against the shared design; K x outputs."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    L = lipschitz_constant(Xg)
    cols = []
    for c in range(Y.shape[1]):
        prob = LassoProblem(Xg, Y[:, c], lam, tol=tol, max_iter=max_iter)
        cols.append(fista_solve(prob, least_squares_init(Xg, Y[:, c]), L=L).p)
    return np.column_stack(cols)


def retained_mask(P, zero_tol: float = 1e-8) -> np.ndarray:
    """Rules kept after pruning: some channel has ``|p| > zero_tol``.

    At least one rule always survives (the one with the largest magnitude).
    """
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    mag = np.abs(P).max(axis=1)
    keep = mag > zero_tol
    if not keep.any():
        keep[int(np.argmax(mag))] = True
    return keep


def prune_rules(model, P, zero_tol: float = 1e-8):
    """Split a draft model's rules into retained and abandoned by consequent.

    ``model`` is a :class:`~concise_tsk.inference.TskModel` whose ``rules``
    list holds every cluster's antecedent (consequents are replaced by ``P``).
    """
    P = np.asarray(P, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    if P.shape[0] != len(model.rules):
        raise DataError(f"{P.shape[0]} consequent rows for {len(model.rules)} rules")
    keep = retained_mask(P, zero_tol)
    kept, dropped = [], []
    for k, r in enumerate(model.rules):
        new = Rule(r.index, r.antecedent, P[k].copy() if keep[k] else np.zeros(P.shape[1]))
        (kept if keep[k] else dropped).append(new)
    model.rules = kept
    model.abandoned = dropped
    return model
