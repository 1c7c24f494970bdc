"""Experiment orchestration: one ResultRow per sketch size in the k grid."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import rng as _rng
from .errors import InvalidProfile, KExceedsRank
from .io import ResultRow, load_matrix
from .kernel import KernelConfig, nystrom_trace_error, rbf_kernel
from .linalg import svd
from .sketch import SketchFamily, SketchSpec, draw_sketch, mean_and_std, monte_carlo
from .solvers import LinearSystem, kaczmarz_run
from .spectrum import (
    DecayKind,
    DecayProfile,
    Spectrum,
    haar_orthonormal,
    profile_spectrum,
    spectrum_from_svd,
    spectrum_of,
    synthesize_matrix,
)
from .surrogate import (
    explicit_error_exponential,
    explicit_error_polynomial,
    explicit_gamma_exponential,
    explicit_gamma_polynomial,
    outside_proven_regime,
    solve_gamma,
    surrogate_projection,
)

log = logging.getLogger(__name__)


class Mode(str, Enum):
    LOWRANK = "lowrank"
    PREDICT = "predict"
    NYSTROM = "nystrom"
    KACZMARZ = "kaczmarz"
    GAMMA = "gamma-table"


@dataclass
class ExperimentConfig:
    mode: Mode
    k_grid: tuple[int, ...]
    input_path: str | None = None
    input_format: str | None = None
    profile: DecayProfile | None = None
    rows: int | None = None
    family: SketchFamily = SketchFamily.GAUSSIAN
    seed: int = 0
    trials: int = 10
    sigma: float | None = None
    steps: int = 10
    normalize: bool = False
    output_path: str | None = None
    threads: int | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.mode = Mode(self.mode)
        self.family = SketchFamily(self.family)
        self.k_grid = tuple(int(k) for k in self.k_grid)
        if not self.k_grid:
            raise ValueError("k grid is empty")
        if any(b <= a for a, b in zip(self.k_grid, self.k_grid[1:])):
            raise ValueError("k grid must be strictly increasing")
        if self.k_grid[0] < 1:
            raise ValueError("sketch sizes must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        sources = sum(x is not None for x in (self.input_path, self.profile, self.matrix))
        if sources != 1:
            raise ValueError("exactly one of input path, profile or matrix is required")
        if self.mode is Mode.NYSTROM and self.input_path is not None and self.sigma is None:
            raise ValueError("nystrom mode on point data needs sigma")


def parse_profile(text: str, normalize: bool = False) -> DecayProfile:
    """``exponential:ALPHA:N``, ``polynomial:BETA:N`` or ``flat:N``."""
    parts = text.split(":")
    try:
        if parts[0] in ("exponential", "exp") and len(parts) == 3:
            return DecayProfile.exponential(float(parts[1]), int(parts[2]), normalize_frobenius=normalize)
        if parts[0] in ("polynomial", "poly") and len(parts) == 3:
            return DecayProfile.polynomial(float(parts[1]), int(parts[2]), normalize_frobenius=normalize)
        if parts[0] == "flat" and len(parts) == 2:
            return DecayProfile.explicit([1.0] * int(parts[1]), normalize_frobenius=normalize)
    except ValueError:
        pass
    raise InvalidProfile(f"cannot parse profile {text!r}")


def parse_k_grid(text: str) -> tuple[int, ...]:
    """``a:b:step`` (inclusive of b) or a comma-separated list."""
    if ":" in text:
        a, b, step = (int(x) for x in text.split(":"))
        if step < 1:
            raise ValueError("k grid step must be positive")
        return tuple(range(a, b + 1, step))
    return tuple(int(x) for x in text.split(","))


def _closed_form(profile, spectrum: Spectrum, k: int, gamma: bool):
    if profile is None:
        return None
    kind = DecayKind(profile.kind)
    c = spectrum.scale_c
    if kind is DecayKind.EXPONENTIAL:
        f = explicit_gamma_exponential if gamma else explicit_error_exponential
    elif kind is DecayKind.POLYNOMIAL:
        f = explicit_gamma_polynomial if gamma else explicit_error_polynomial
    else:
        return None
    return f(profile.param, c, k)


def _data_matrix(cfg: ExperimentConfig):
    if cfg.matrix is not None:
        a = np.asarray(cfg.matrix, dtype=float)
    elif cfg.input_path is not None:
        a = load_matrix(cfg.input_path, cfg.input_format)
    else:
        s = profile_spectrum(cfg.profile)
        n = len(s)
        return synthesize_matrix(s, cfg.rows or n, n, cfg.seed), s
    if cfg.normalize:
        a = a / np.linalg.norm(a)
    return a, None


def _kernel_matrix(cfg: ExperimentConfig):
    if cfg.profile is not None:
        s = profile_spectrum(cfg.profile)
        q = haar_orthonormal(len(s), len(s), _rng.stream(cfg.seed, 0))
        k_mat = (q * s.values) @ q.T
        return 0.5 * (k_mat + k_mat.T), s
    if cfg.matrix is not None:
        k_mat = np.asarray(cfg.matrix, dtype=float)
    else:
        k_mat = rbf_kernel(load_matrix(cfg.input_path, cfg.input_format), KernelConfig(cfg.sigma))
    if cfg.normalize:
        k_mat = k_mat / np.trace(k_mat)
    return k_mat, None


def _spec(cfg, k):
    return SketchSpec(cfg.family, k, cfg.seed)


def _exceeds(k, exc):
    log.warning("k=%d: %s; prediction omitted", k, exc)
    return ResultRow(k, k_exceeds_rank=True)


def _warn_regime(spectrum, k):
    if outside_proven_regime(spectrum, k):
        log.info("k=%d is at or above the stable rank %.3g; accuracy there is conjectural", k, spectrum.stable_rank)


def _run_table(cfg: ExperimentConfig, gamma_mode: bool) -> list[ResultRow]:
    if cfg.profile is not None:
        spectrum = profile_spectrum(cfg.profile)
    else:
        a, _ = _data_matrix(cfg)
        spectrum = spectrum_of(a)
    rows = []
    for k in cfg.k_grid:
        try:
            g = solve_gamma(spectrum, k).gamma
        except KExceedsRank as exc:
            rows.append(_exceeds(k, exc))
            continue
        _warn_regime(spectrum, k)
        predicted = g if gamma_mode else k / g
        rows.append(ResultRow(k, predicted=predicted, closed_form=_closed_form(cfg.profile, spectrum, k, gamma_mode)))
    return rows


def _run_lowrank(cfg: ExperimentConfig) -> list[ResultRow]:
    a, prof_spec = _data_matrix(cfg)
    f = svd(a)
    spectrum = spectrum_from_svd(f, prof_spec.scale_c if prof_spec else 1.0)
    rows = []
    for k in cfg.k_grid:
        try:
            sur = surrogate_projection(spectrum, f.vt, k)
        except KExceedsRank as exc:
            sur = None
            log.warning("k=%d: %s; prediction omitted", k, exc)
        rep = monte_carlo(a, _spec(cfg, k), cfg.trials, sur, cfg.threads)
        if sur is None:
            rows.append(ResultRow(k, None, rep.mean_error, rep.std_error, None, None, True))
            continue
        _warn_regime(spectrum, k)
        rows.append(
            ResultRow(
                k,
                predicted=k / sur.gamma.gamma,
                empirical_mean=rep.mean_error,
                empirical_std=rep.std_error,
                epsilon_hat=rep.epsilon_hat,
                closed_form=_closed_form(cfg.profile, spectrum, k, False),
            )
        )
    return rows


def _run_nystrom(cfg: ExperimentConfig) -> list[ResultRow]:
    k_mat, prof_spec = _kernel_matrix(cfg)
    m = k_mat.shape[0]
    eigs = spectrum_of(k_mat, psd=True)
    if prof_spec is not None:
        eigs = prof_spec
    rows = []
    for k in cfg.k_grid:
        spec = _spec(cfg, k)
        errs = list(_rng.map_trials(lambda t: nystrom_trace_error(k_mat, draw_sketch(spec, m, t)), cfg.trials, cfg.threads))
        mean, std = mean_and_std(errs)
        try:
            g = solve_gamma(eigs, k).gamma
        except KExceedsRank as exc:
            log.warning("k=%d: %s; prediction omitted", k, exc)
            rows.append(ResultRow(k, None, mean, std, None, None, True))
            continue
        _warn_regime(eigs, k)
        rows.append(ResultRow(k, k / g, mean, std, None, _closed_form(cfg.profile, eigs, k, False)))
    return rows


def _run_kaczmarz(cfg: ExperimentConfig) -> list[ResultRow]:
    """Rows compare the predicted and measured mean error after ``steps`` steps.

    predicted = ||P^T d0|| / ||d0||, empirical_mean = ||mean(x_T) - x*|| / ||d0||,
    empirical_std = Monte Carlo standard error of that mean (same units),
    epsilon_hat = ||mean(x_T - x*) - P^T d0|| / ||d0||.
    """
    a, _ = _data_matrix(cfg)
    system = LinearSystem.synthetic(a, cfg.seed)
    x_star = system.x_star
    f = svd(a)
    spectrum = spectrum_from_svd(f)
    x0 = np.zeros(a.shape[1])
    d0 = x0 - x_star
    norm0 = float(np.linalg.norm(d0))
    rows = []
    for k in cfg.k_grid:
        run = kaczmarz_run(system, _spec(cfg, k), x0, cfg.steps, cfg.trials, cfg.threads)
        measured = run.mean_iterates[-1] - x_star
        emp = float(np.linalg.norm(measured)) / norm0
        se = float(run.mean_error_se[-1]) / norm0
        try:
            sur = surrogate_projection(spectrum, f.vt, k)
        except KExceedsRank as exc:
            log.warning("k=%d: %s; prediction omitted", k, exc)
            rows.append(ResultRow(k, None, emp, se, None, None, True))
            continue
        _warn_regime(spectrum, k)
        pred_vec = sur.power_apply(d0, cfg.steps)
        rows.append(
            ResultRow(
                k,
                predicted=float(np.linalg.norm(pred_vec)) / norm0,
                empirical_mean=emp,
                empirical_std=se,
                epsilon_hat=float(np.linalg.norm(measured - pred_vec)) / norm0,
            )
        )
    return rows


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run the configured experiment; deterministic given ``cfg.seed``."""
    if cfg.mode is Mode.LOWRANK:
        return _run_lowrank(cfg)
    if cfg.mode is Mode.NYSTROM:
        return _run_nystrom(cfg)
    if cfg.mode is Mode.KACZMARZ:
        return _run_kaczmarz(cfg)
    return _run_table(cfg, gamma_mode=cfg.mode is Mode.GAMMA)


def all_exceed_rank(rows) -> bool:
    return bool(rows) and all(r.k_exceeds_rank for r in rows)

