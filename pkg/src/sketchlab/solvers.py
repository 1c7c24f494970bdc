"""Sketch-and-project solvers whose expected behaviour the surrogate predicts."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as _rng
from .errors import KExceedsRank, SingularSystem
from .linalg import as_matrix, pseudoinverse
from .sketch import SketchSpec, draw_sketch
from .spectrum import Spectrum, spectrum_of
from .surrogate import KappaMethod, kappa_surrogate, solve_gamma


@dataclass(frozen=True)
class LinearSystem:
    a: np.ndarray
    b: np.ndarray
    x_star: np.ndarray | None = None

    def __post_init__(self):
        a = as_matrix(self.a)
        b = np.asarray(self.b, dtype=float).ravel()
        if b.size != a.shape[0]:
            raise ValueError(f"b has {b.size} entries, A has {a.shape[0]} rows")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.x_star is not None:
            x = np.asarray(self.x_star, dtype=float).ravel()
            if np.linalg.norm(a @ x - b) > 1e-8 * max(np.linalg.norm(b), 1e-300):
                raise ValueError("x_star does not solve A x = b")
            object.__setattr__(self, "x_star", x)

    @classmethod
    def synthetic(cls, a, seed: int) -> "LinearSystem":
        """Consistent system: draw x* ~ N(0, I) from the seed, then set b = A x*."""
        a = as_matrix(a)
        x = _rng.stream(seed, 2**32 - 1).standard_normal(a.shape[1])
        return cls(a, a @ x, x)

    def solution(self) -> np.ndarray:
        if self.x_star is not None:
            return self.x_star
        return pseudoinverse(self.a) @ self.b


@dataclass(frozen=True)
class KaczmarzState:
    iterate: np.ndarray
    step: int = 0
    history: list | None = field(default=None, repr=False)

    @classmethod
    def start(cls, x0, keep_history=False):
        x0 = np.asarray(x0, dtype=float).ravel().copy()
        return cls(x0, 0, [x0] if keep_history else None)


def kaczmarz_step(sys: LinearSystem, state: KaczmarzState, s) -> KaczmarzState:
    """Project the iterate onto ``{x : S A x = S b}``.

    ``x+ = x + (SA)^+ S (b - A x)``, the minimum-norm correction.
    """
    s = np.asarray(s, dtype=float).reshape(-1, sys.a.shape[0])
    x = state.iterate
    x_new = x + pseudoinverse(s @ sys.a) @ (s @ (sys.b - sys.a @ x))
    history = None
    if state.history is not None:
        history = state.history + [x_new]
    return replace(state, iterate=x_new, step=state.step + 1, history=history)


@dataclass
class KaczmarzRun:
    """Per-step Monte Carlo summary; index t holds statistics of x_t (t = 0..steps)."""

    mean_iterates: np.ndarray
    mean_sq_error: np.ndarray
    std_sq_error: np.ndarray
    mean_error_se: np.ndarray
    trials: int

    def mean_delta(self, x_star) -> np.ndarray:
        return self.mean_iterates - np.asarray(x_star)[None, :]


def kaczmarz_run(
    sys: LinearSystem,
    spec: SketchSpec,
    x0,
    steps: int,
    trials: int,
    threads: int | None = None,
) -> KaczmarzRun:
    """Run independent generalized-Kaczmarz chains with a fresh sketch per step.

    Step t of trial i uses ``draw_sketch(spec, m, i, t)``.  ``mean_error_se``
    is the Monte Carlo standard error of the mean iterate (norm of the
    per-coordinate standard errors).
    """
    if trials < 1 or steps < 0:
        raise ValueError("need trials >= 1 and steps >= 0")
    m, n = sys.a.shape
    x_star = sys.solution()
    x0 = np.asarray(x0, dtype=float).ravel()

    def chain(i):
        path = np.empty((steps + 1, n))
        state = KaczmarzState.start(x0)
        path[0] = state.iterate
        for t in range(1, steps + 1):
            state = kaczmarz_step(sys, state, draw_sketch(spec, m, i, t))
            path[t] = state.iterate
        return path

    paths = np.stack(list(_rng.map_trials(chain, trials, threads)))
    deltas = paths - x_star
    sq = np.einsum("itj,itj->it", deltas, deltas)
    mean_it = _rng.pairwise_sum(list(paths)) / trials
    mean_sq = _rng.pairwise_sum(list(sq)) / trials
    if trials > 1:
        std_sq = np.sqrt(_rng.pairwise_sum([(r - mean_sq) ** 2 for r in sq]) / (trials - 1))
        var_it = _rng.pairwise_sum([(p - mean_it) ** 2 for p in paths]) / (trials - 1)
        se = np.sqrt(np.sum(var_it, axis=1) / trials)
    else:
        std_sq = np.zeros(steps + 1)
        se = np.zeros(steps + 1)
    return KaczmarzRun(mean_it, mean_sq, std_sq, se, trials)


def worst_case_rate(s, k: int) -> float:
    """Per-step contraction ``1 - kappa_bar`` of E||x_t - x*||^2 for generalized Kaczmarz."""
    values = s.values if isinstance(s, Spectrum) else np.asarray(s, dtype=float)
    if values[-1] == 0.0:
        raise SingularSystem("smallest singular value is zero")
    return 1.0 - kappa_surrogate(values, k, KappaMethod.KACZMARZ).kappa_bar


def rsn_quadratic_step(h, g, x, s, smoothness_l: float = 1.0) -> np.ndarray:
    """Randomized Subspace Newton step ``x - (1/L) S^T (S H S^T)^+ S g``.

    For a quadratic ``0.5 x'Hx - b'x`` the relative smoothness constant is 1.
    """
    if not smoothness_l > 0:
        raise ValueError("smoothness constant must be positive")
    h = as_matrix(h, "h")
    g = np.asarray(g, dtype=float).ravel()
    x = np.asarray(x, dtype=float).ravel()
    s = np.asarray(s, dtype=float).reshape(-1, h.shape[0])
    shs = s @ h @ s.T
    shs = 0.5 * (shs + shs.T)
    return x - s.T @ (pseudoinverse(shs) @ (s @ g)) / smoothness_l


@dataclass
class ImplicitRegularization:
    mean_min_norm_bias: np.ndarray
    ridge_bias: np.ndarray
    std_of_mean: float
    gamma: float


def min_norm_vs_ridge(sys: LinearSystem, spec: SketchSpec, trials: int, threads=None) -> ImplicitRegularization:
    """Compare the bias of the sketched min-norm solution with ridge at penalty 1/gamma.

    Trial i solves ``min ||x|| s.t. S A x = S b`` with ``draw_sketch(spec, m, i)``.
    When k reaches rank(A) the ridge bias is its gamma -> infinity limit,
    ``-(I - A^+ A) x*``, and ``gamma`` is reported as ``inf``.
    """
    a = sys.a
    m, n = a.shape
    x_star = sys.solution()

    def one(i):
        s = draw_sketch(spec, m, i)
        return pseudoinverse(s @ a) @ (s @ sys.b)

    sols = list(_rng.map_trials(one, trials, threads))
    mean = _rng.pairwise_sum(sols) / trials
    if trials > 1:
        var = _rng.pairwise_sum([(x - mean) ** 2 for x in sols]) / (trials - 1)
        std_of_mean = math.sqrt(float(np.sum(var)) / trials)
    else:
        std_of_mean = 0.0

    try:
        gamma = solve_gamma(spectrum_of(a), spec.k).gamma
        lhs = a.T @ a + np.eye(n) / gamma
        ridge = np.linalg.solve(lhs, a.T @ sys.b) - x_star
    except KExceedsRank:
        gamma = math.inf
        ridge = -(x_star - pseudoinverse(a) @ (a @ x_star))
    return ImplicitRegularization(mean - x_star, ridge, std_of_mean, gamma)
