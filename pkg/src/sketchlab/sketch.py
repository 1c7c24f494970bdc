"""Data-oblivious sketches and Monte Carlo estimation of the residual projection."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import rng as _rng
from .linalg import as_matrix, psd_interval, row_space_basis
from .surrogate import SurrogateProjection


class SketchFamily(str, Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"


@dataclass(frozen=True)
class SketchSpec:
    family: SketchFamily
    k: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "family", SketchFamily(self.family))
        if self.k < 1:
            raise ValueError("sketch size k must be >= 1")


def draw_sketch(spec: SketchSpec, m: int, trial: int, step: int = 0) -> np.ndarray:
    """k x m sketch with i.i.d. mean-zero unit-variance entries.

    A pure function of ``(spec.seed, trial, step)``.  No 1/sqrt(k) scaling is
    applied; the residual projection does not depend on it.
    """
    gen = _rng.stream(spec.seed, trial, step)
    if spec.family is SketchFamily.GAUSSIAN:
        return gen.standard_normal((spec.k, m))
    bits = gen.integers(0, 2, size=(spec.k, m), dtype=np.int8)
    return 2.0 * bits - 1.0


def _basis(a, s):
    a = as_matrix(a)
    s = np.asarray(s, dtype=float).reshape(-1, a.shape[0])
    return row_space_basis(s @ a)


def sketched_residual(a, s) -> np.ndarray:
    """``I - (SA)^+ SA``."""
    v = _basis(a, s)
    n = v.shape[1]
    r = np.eye(n) - v.T @ v
    return 0.5 * (r + r.T)


def _error_from_basis(a, v) -> float:
    if v.shape[0] == 0:
        return float(np.sum(a * a))
    resid = a - (a @ v.T) @ v
    return float(np.sum(resid * resid))


def low_rank_error(a, s) -> float:
    """``||A - A (SA)^+ SA||_F^2``, i.e. ``tr(A^T A P_perp)``."""
    a = as_matrix(a)
    return _error_from_basis(a, _basis(a, s))


@dataclass
class MonteCarloReport:
    trials: int
    mean_residual: np.ndarray
    per_trial_error: np.ndarray
    mean_error: float
    std_error: float
    epsilon_hat: float | None = None

    @property
    def standard_error(self) -> float:
        """Monte Carlo standard error of ``mean_error``."""
        return self.std_error / math.sqrt(self.trials)


def mean_and_std(values) -> tuple[float, float]:
    """Order-independent mean and sample standard deviation (fsum based)."""
    values = [float(v) for v in values]
    n = len(values)
    mean = math.fsum(values) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def monte_carlo(
    a,
    spec: SketchSpec,
    trials: int,
    surrogate: SurrogateProjection | None = None,
    threads: int | None = None,
) -> MonteCarloReport:
    """Estimate ``E[P_perp]`` and the low-rank error over independent sketches.

    Trial t uses ``draw_sketch(spec, m, t)``.  Residual projections are
    combined by fixed-order pairwise summation, so the report does not depend
    on the number of threads.  If a surrogate is given, ``epsilon_hat`` is
    the discrepancy of the mean against it.
    """
    a = as_matrix(a)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    m, n = a.shape
    errors = np.empty(trials)

    def one(t):
        v = _basis(a, draw_sketch(spec, m, t))
        return t, _error_from_basis(a, v), v

    def projections():
        for t, err, v in _rng.map_trials(one, trials, threads):
            errors[t] = err
            yield v.T @ v

    mean_proj = _rng.pairwise_sum(projections()) / trials
    mean_residual = np.eye(n) - 0.5 * (mean_proj + mean_proj.T)
    mean, std = mean_and_std(errors)
    eps = None
    if surrogate is not None:
        eps = psd_interval(mean_residual, surrogate.matrix()).epsilon
    return MonteCarloReport(trials, mean_residual, errors, mean, std, eps)
