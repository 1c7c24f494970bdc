"""RBF kernels and sketched Nystrom approximation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .linalg import as_matrix


@dataclass(frozen=True)
class KernelConfig:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("RBF scale sigma must be positive")


def rbf_kernel(points, cfg: KernelConfig) -> np.ndarray:
    """``exp(-||a_i - a_j||^2 / (2 sigma^2))`` over the rows of ``points``.

    Distances are formed from coordinate differences, so the result is
    exactly invariant under translating every point.
    """
    points = as_matrix(points, "points")
    if points.shape[0] < 1:
        raise ValueError("need at least one point")
    d2 = squareform(pdist(points, "sqeuclidean"))
    return np.exp(-d2 / (2.0 * cfg.sigma**2))


def _nystrom_factor(k_mat, s):
    """B with ``B B^T = K S^T (S K S^T)^+ S K``."""
    k_mat = as_matrix(k_mat, "k_mat")
    m = k_mat.shape[0]
    s = np.asarray(s, dtype=float).reshape(-1, m)
    if s.shape[0] == 0:
        return np.zeros((m, 0))
    c = s @ k_mat
    w = c @ s.T
    lam, q = np.linalg.eigh(0.5 * (w + w.T))
    # same relative cutoff convention as linalg.pseudoinverse
    top = np.max(np.abs(lam)) if lam.size else 0.0
    keep = lam > max(w.shape) * np.finfo(float).eps * top
    if not np.any(keep):
        return np.zeros((m, 0))
    return c.T @ (q[:, keep] / np.sqrt(lam[keep]))


def nystrom_approx(k_mat, s) -> np.ndarray:
    """Sketched Nystrom approximation ``C^T W^+ C`` with ``C = S K``, ``W = S K S^T``."""
    b = _nystrom_factor(k_mat, s)
    return b @ b.T


def nystrom_trace_error(k_mat, s) -> float:
    """Trace-norm error ``||K - K~||_* = tr(K - K~)`` (the difference is PSD)."""
    k_mat = as_matrix(k_mat, "k_mat")
    b = _nystrom_factor(k_mat, s)
    return float(np.trace(k_mat) - np.sum(b * b))
