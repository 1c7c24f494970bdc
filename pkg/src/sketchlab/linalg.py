"""Dense linear-algebra substrate.

Matrices are plain 2-D ``numpy`` float arrays.  Everything here is a pure
function of its inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateUpdate, NumericalFailure, SingularSurrogate, ZeroMatrix

EPS = np.finfo(float).eps

# relative floor on x'(I - P)x for rank-one updates, scaled by ||x||^2
UPDATE_FLOOR = 1e-10


def as_matrix(a, name="a") -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def default_rel_tol(shape) -> float:
    return max(shape) * EPS if len(shape) else EPS


@dataclass(frozen=True)
class SvdFactorization:
    u: np.ndarray
    singular_values: np.ndarray
    vt: np.ndarray
    rank_tolerance: float

    @property
    def rank(self) -> int:
        s = self.singular_values
        if s.size == 0 or s[0] == 0.0:
            return 0
        return int(np.count_nonzero(s > self.rank_tolerance * s[0]))

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.singular_values) @ self.vt


def svd(a, rank_tolerance: float | None = None) -> SvdFactorization:
    """Thin SVD ``a = U diag(s) V^T`` with singular values non-increasing."""
    a = as_matrix(a)
    if rank_tolerance is None:
        rank_tolerance = default_rel_tol(a.shape)
    if a.size == 0:
        m, n = a.shape
        p = min(m, n)
        return SvdFactorization(np.zeros((m, p)), np.zeros(p), np.zeros((p, n)), rank_tolerance)
    try:
        u, s, vt = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(str(exc)) from exc
    return SvdFactorization(u, s, vt, rank_tolerance)


def pseudoinverse(a, rel_tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse, zeroing singular values <= rel_tol * s_max.

    The default cutoff is ``max(m, n) * eps``.
    """
    a = as_matrix(a)
    f = svd(a, rel_tol)
    r = f.rank
    if r == 0:
        return np.zeros(a.T.shape)
    return (f.vt[:r].T / f.singular_values[:r]) @ f.u[:, :r].T


def row_space_basis(x, rel_tol: float | None = None) -> np.ndarray:
    """Orthonormal basis (as rows) of the numerical row space of ``x``."""
    x = as_matrix(x, "x")
    if x.shape[0] == 0:
        return np.zeros((0, x.shape[1]))
    f = svd(x, rel_tol)
    return f.vt[: f.rank]


def residual_projection(x, rel_tol: float | None = None) -> np.ndarray:
    """``I - x^+ x``: orthogonal projection onto the complement of the row space of x."""
    x = as_matrix(x, "x")
    n = x.shape[1]
    v = row_space_basis(x, rel_tol)
    r = np.eye(n) - v.T @ v
    return 0.5 * (r + r.T)


def pinv_rank_one_update(x_minus, p_minus, new_row):
    """Rank-one update of the row-space projection when a row is appended.

    Given ``P_- = X_-^+ X_-`` and a new row ``x``, returns

    * ``proj_update = (I - P_-) x x^T (I - P_-) / (x^T (I - P_-) x)``, so that
      ``P_- + proj_update`` is the projection for the stacked matrix;
    * ``pinv_row = (I - P_-) x / (x^T (I - P_-) x)``, which equals
      ``(X^T X)^+ x`` for the stacked ``X``.

    ``p_minus`` may be ``None``, in which case it is computed from ``x_minus``.
    Raises DegenerateUpdate when the quadratic form falls below
    ``UPDATE_FLOOR * ||x||^2``.
    """
    x = np.asarray(new_row, dtype=float).ravel()
    n = x.size
    if p_minus is None:
        x_minus = np.asarray(x_minus, dtype=float).reshape(-1, n)
        p_minus = np.eye(n) - residual_projection(x_minus) if x_minus.shape[0] else np.zeros((n, n))
    p_minus = np.asarray(p_minus, dtype=float)
    if p_minus.shape != (n, n):
        raise ValueError(f"projection must be {n}x{n}, got {p_minus.shape}")
    w = x - p_minus @ x
    denom = float(x @ w)
    floor = UPDATE_FLOOR * float(x @ x)
    if not denom > floor:
        raise DegenerateUpdate(
            f"x'(I-P)x = {denom:.3e} is below the floor {floor:.3e}; row is in the existing span"
        )
    return np.outer(w, w) / denom, w / denom


def incremental_projection(x):
    """Build ``x^+ x`` one row at a time via rank-one updates.

    Rows that fail the update floor are skipped.  Returns the projection and
    the indices of the skipped rows.
    """
    x = as_matrix(x, "x")
    n = x.shape[1]
    p = np.zeros((n, n))
    skipped = []
    for i, row in enumerate(x):
        try:
            update, _ = pinv_rank_one_update(None, p, row)
        except DegenerateUpdate:
            skipped.append(i)
            continue
        p = p + update
    return p, skipped


def stable_rank(a) -> float:
    """``||a||_F^2 / ||a||_2^2``."""
    a = as_matrix(a)
    s = np.linalg.svd(a, compute_uv=False) if a.size else np.zeros(0)
    if s.size == 0 or s[0] == 0.0:
        raise ZeroMatrix("stable rank of a zero matrix is undefined")
    return float(np.sum((s / s[0]) ** 2))


def trace_norm(a) -> float:
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def psd_sqrt(k) -> np.ndarray:
    """Symmetric square root of a PSD matrix; negative round-off eigenvalues are clamped."""
    k = as_matrix(k, "k")
    w, q = np.linalg.eigh(0.5 * (k + k.T))
    root = (q * np.sqrt(np.clip(w, 0.0, None))) @ q.T
    return 0.5 * (root + root.T)


@dataclass(frozen=True)
class PsdInterval:
    lo: float
    hi: float
    eigenvalues: np.ndarray

    @property
    def epsilon(self) -> float:
        """Empirical discrepancy ``max(1 - lo, hi - 1)``."""
        return max(1.0 - self.lo, self.hi - 1.0)


def psd_interval(mean_proj, surrogate) -> PsdInterval:
    """Spectrum of ``S^{-1/2} M S^{-1/2}`` for surrogate S and measured M.

    ``[lo, hi]`` is the tightest interval with ``lo*S <= M <= hi*S`` in the
    Loewner order.
    """
    m = as_matrix(mean_proj, "mean_proj")
    s = as_matrix(surrogate, "surrogate")
    if m.shape != s.shape or s.shape[0] != s.shape[1]:
        raise ValueError(f"shape mismatch: {m.shape} vs {s.shape}")
    w, q = np.linalg.eigh(0.5 * (s + s.T))
    if w.size == 0 or w[0] <= max(abs(w[-1]), 1.0) * 1e3 * EPS * w.size:
        raise SingularSurrogate("surrogate is not positive definite")
    inv_sqrt = (q / np.sqrt(w)) @ q.T
    t = inv_sqrt @ m @ inv_sqrt
    eig = np.linalg.eigvalsh(0.5 * (t + t.T))
    return PsdInterval(float(eig[0]), float(eig[-1]), eig)
