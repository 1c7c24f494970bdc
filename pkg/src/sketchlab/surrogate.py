"""Surrogate for the expected residual projection of a sub-gaussian sketch.

For a sketch of size k the expected residual projection is approximated by
``(gamma A^T A + I)^{-1}``, where ``gamma > 0`` solves

    sum_i gamma s_i / (gamma s_i + 1) = k,     s_i = sigma_i^2.

Everything here works on the spectrum alone (plus the right singular vectors
when a full matrix is needed).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidProfile, KExceedsRank, NumericalFailure
from .spectrum import Spectrum, check_alpha, check_beta

GAMMA_TOL = 1e-10
MAX_ITER = 200


@dataclass(frozen=True)
class GammaSolution:
    gamma: float
    k: int
    residual: float
    iterations: int


def _values(s) -> np.ndarray:
    if isinstance(s, Spectrum):
        return s.values
    return Spectrum(np.asarray(s, dtype=float)).values


def effective_dimension(values: np.ndarray, gamma: float) -> float:
    """``sum gamma s / (gamma s + 1)``; strictly increasing in gamma."""
    gs = gamma * values
    return float(np.sum(gs / (gs + 1.0)))


def solve_gamma(s, k: int) -> GammaSolution:
    """Solve the implicit gamma equation by bracketed bisection.

    The upper bracket doubles from 1 until the map exceeds k (the lower one
    halves until it falls below).  Bisection then runs until the bracket
    collapses to adjacent floats, at most ``MAX_ITER`` steps.  A bracket of
    width 2x needs about 53 steps, so the residual lands far below
    ``GAMMA_TOL`` and gamma is accurate to a few ulps, which keeps scale
    covariance exact even where the map is flat.
    """
    values = _values(s)
    k = int(k)
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return GammaSolution(0.0, 0, 0.0, 0)
    rank = int(np.count_nonzero(values > 0))
    if k >= rank:
        raise KExceedsRank(k, rank)

    f = lambda g: effective_dimension(values, g) - k  # noqa: E731
    iterations = 0
    hi = 1.0
    while f(hi) < 0:
        hi *= 2.0
        iterations += 1
    lo = hi / 2.0
    while f(lo) > 0:
        hi, lo = lo, lo / 2.0
        iterations += 1

    best, best_res = hi, abs(f(hi))
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or best_res == 0.0:
            break
        iterations += 1
        fm = f(mid)
        if abs(fm) < best_res:
            best, best_res = mid, abs(fm)
        if fm < 0:
            lo = mid
        else:
            hi = mid
    if best_res > GAMMA_TOL:
        raise NumericalFailure(f"gamma residual {best_res:.3e} exceeds {GAMMA_TOL:g}")
    return GammaSolution(best, k, best_res, iterations)


@dataclass(frozen=True)
class SurrogateProjection:
    """``V diag(d) V^T`` with ``d_i = 1/(gamma s_i + 1)``, identity off span(V)."""

    gamma: GammaSolution
    basis_vt: np.ndarray
    diag: np.ndarray

    @property
    def n(self) -> int:
        return self.basis_vt.shape[1]

    @property
    def trace(self) -> float:
        return self.n - float(np.sum(1.0 - self.diag))

    def _apply_power(self, p) -> np.ndarray:
        v = self.basis_vt.T
        m = np.eye(self.n) - (v * (1.0 - self.diag**p)) @ v.T
        return 0.5 * (m + m.T)

    def matrix(self) -> np.ndarray:
        return self._apply_power(1.0)

    def inverse_sqrt(self) -> np.ndarray:
        return self._apply_power(-0.5)

    def power_apply(self, x, t) -> np.ndarray:
        """``P^t x`` computed in the singular basis."""
        x = np.asarray(x, dtype=float)
        coeff = self.basis_vt @ x
        return x + self.basis_vt.T @ ((self.diag**t - 1.0) * coeff)


def surrogate_projection(s, vt, k: int) -> SurrogateProjection:
    """Surrogate residual projection for the spectrum ``s`` with right singular vectors ``vt``.

    ``vt`` holds one row per spectrum value; directions outside its span get
    eigenvalue 1, which is also what zero singular values get.
    """
    values = _values(s)
    vt = np.asarray(vt, dtype=float)
    if vt.ndim != 2 or vt.shape[0] != values.size:
        raise ValueError(f"vt must have {values.size} rows, got shape {vt.shape}")
    sol = solve_gamma(values, k)
    diag = 1.0 / (sol.gamma * values + 1.0)
    return SurrogateProjection(sol, vt, diag)


def predict_frobenius_error(s, k: int) -> float:
    """Predicted ``E ||A - A P||_F^2 = k / gamma``; ``||A||_F^2`` when k = 0."""
    values = _values(s)
    if int(k) == 0:
        return float(np.sum(values))
    sol = solve_gamma(values, k)
    return k / sol.gamma


def predict_nystrom_error(kernel_eigs, k: int) -> float:
    """Predicted expected trace-norm error of a sketched Nystrom approximation."""
    return predict_frobenius_error(kernel_eigs, k)


def outside_proven_regime(s, k: int) -> bool:
    """True when k reaches the stable rank, where accuracy is only conjectured."""
    values = _values(s)
    return k >= float(np.sum(values) / values[0])


def _check_closed_form(c, k):
    if not c > 0:
        raise InvalidProfile("scale constant C must be positive")
    if k < 1:
        raise InvalidProfile("closed forms need k >= 1")


def explicit_gamma_exponential(alpha: float, c: float, k: int) -> float:
    """Closed-form gamma for ``s_i = C alpha^(i-1)``: ``(alpha^-k - 1) sqrt(alpha) / C``."""
    check_alpha(alpha)
    _check_closed_form(c, k)
    return math.expm1(-k * math.log(alpha)) * math.sqrt(alpha) / c


def explicit_error_exponential(alpha: float, c: float, k: int) -> float:
    return k / explicit_gamma_exponential(alpha, c, k)


def explicit_gamma_polynomial(beta: float, c: float, k: int) -> float:
    """Closed-form gamma for ``s_i = C i^-beta``: ``((k + 1/2) beta/pi sin(pi/beta))^beta / C``."""
    check_beta(beta)
    _check_closed_form(c, k)
    return ((k + 0.5) * beta / math.pi * math.sin(math.pi / beta)) ** beta / c


def explicit_error_polynomial(beta: float, c: float, k: int) -> float:
    return k / explicit_gamma_polynomial(beta, c, k)


class KappaMethod(str, Enum):
    KACZMARZ = "kaczmarz"
    RSN = "rsn"
    JACSKETCH = "jacsketch"


@dataclass(frozen=True)
class ConditionNumberSurrogate:
    kappa_bar: float
    method: KappaMethod
    gamma: float


def kappa_surrogate(s, k: int, method="kaczmarz") -> ConditionNumberSurrogate:
    """Surrogate stochastic condition number ``lam / (lam + 1/gamma)``.

    ``s`` is the relevant spectrum: sigma_i^2 of A (Kaczmarz), eigenvalues of
    the Hessian (RSN) or of the weight matrix W (JacSketch).  ``lam`` is the
    smallest value, except for RSN where it is the smallest positive one.
    A zero ``lam`` gives ``kappa_bar = 0``.
    """
    method = KappaMethod(method)
    values = _values(s)
    sol = solve_gamma(values, k)
    if method is KappaMethod.RSN:
        lam = float(values[values > 0][-1])
    else:
        lam = float(values[-1])
    if sol.gamma == 0.0 or lam == 0.0:
        return ConditionNumberSurrogate(0.0, method, sol.gamma)
    gl = sol.gamma * lam
    return ConditionNumberSurrogate(gl / (gl + 1.0), method, sol.gamma)


def predicted_trajectory(s, vt, k: int, delta0, t: int) -> np.ndarray:
    """Predicted expected error ``E[x_t - x*]`` after t Kaczmarz steps: ``P^t delta0``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    delta0 = np.asarray(delta0, dtype=float)
    if t == 0:
        return delta0.copy()
    return surrogate_projection(s, vt, k).power_apply(delta0, t)
