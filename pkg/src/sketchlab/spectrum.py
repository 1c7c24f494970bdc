"""Spectra of squared singular values, decay profiles and synthetic matrices."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from . import rng as _rng
from .errors import DimensionMismatch, InvalidProfile, ZeroMatrix
from .linalg import SvdFactorization, as_matrix, default_rel_tol


@dataclass(frozen=True)
class Spectrum:
    """Non-increasing squared singular values ``sigma_i^2`` plus the scale constant C."""

    values: np.ndarray
    scale_c: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size == 0:
            raise InvalidProfile("spectrum must have at least one value")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise InvalidProfile("spectrum values must be finite and non-negative")
        if np.any(np.diff(v) > 0):
            raise InvalidProfile("spectrum must be sorted non-increasing")
        if v[0] == 0.0:
            raise ZeroMatrix("spectrum has no positive value")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.values > 0))

    @property
    def total(self) -> float:
        """Sum of the values, i.e. ``||A||_F^2``."""
        return float(np.sum(self.values))

    @property
    def stable_rank(self) -> float:
        return self.total / float(self.values[0])

    def scaled(self, c: float) -> "Spectrum":
        return Spectrum(self.values * c, self.scale_c * c)

    def padded(self, n: int) -> np.ndarray:
        if n < len(self):
            raise DimensionMismatch(f"cannot pad a length-{len(self)} spectrum to {n}")
        out = np.zeros(n)
        out[: len(self)] = self.values
        return out


class DecayKind(str, Enum):
    EXPONENTIAL = "exponential"
    POLYNOMIAL = "polynomial"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class DecayProfile:
    kind: DecayKind
    length: int
    param: float | None = None
    scale_c: float = 1.0
    normalize_frobenius: bool = False
    values: tuple = field(default=(), repr=False)

    @classmethod
    def exponential(cls, alpha, length, scale_c=1.0, normalize_frobenius=False):
        return cls(DecayKind.EXPONENTIAL, length, alpha, scale_c, normalize_frobenius)

    @classmethod
    def polynomial(cls, beta, length, scale_c=1.0, normalize_frobenius=False):
        return cls(DecayKind.POLYNOMIAL, length, beta, scale_c, normalize_frobenius)

    @classmethod
    def explicit(cls, values, normalize_frobenius=False):
        values = tuple(float(v) for v in values)
        return cls(DecayKind.EXPLICIT, len(values), None, 1.0, normalize_frobenius, values)


def check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise InvalidProfile(f"exponential decay needs alpha in (0, 1), got {alpha}")


def check_beta(beta):
    if not beta >= 2.0:
        raise InvalidProfile(f"polynomial decay needs beta >= 2, got {beta}")


def profile_spectrum(p: DecayProfile) -> Spectrum:
    """Materialize a decay profile.

    With ``normalize_frobenius`` the constant C is chosen so the values sum to 1.
    """
    if p.length < 1:
        raise InvalidProfile("profile length must be >= 1")
    kind = DecayKind(p.kind)
    i = np.arange(p.length, dtype=float)
    if kind is DecayKind.EXPONENTIAL:
        check_alpha(p.param)
        base = p.param ** i
    elif kind is DecayKind.POLYNOMIAL:
        check_beta(p.param)
        base = (i + 1.0) ** (-float(p.param))
    else:
        if len(p.values) != p.length:
            raise InvalidProfile("explicit profile length does not match its values")
        base = np.asarray(p.values, dtype=float)
    if kind is not DecayKind.EXPLICIT and not p.scale_c > 0:
        raise InvalidProfile("scale constant C must be positive")
    c = 1.0 / float(np.sum(base)) if p.normalize_frobenius else float(p.scale_c)
    if kind is DecayKind.EXPLICIT and not p.normalize_frobenius:
        return Spectrum(base, 1.0)
    return Spectrum(c * base, c)


def exponential_alpha_for_stable_rank(r: float, n: int) -> float:
    """Decay rate whose length-n exponential spectrum has stable rank exactly r."""
    if not 1.0 < r < n:
        raise InvalidProfile(f"need 1 < r < n, got r={r}, n={n}")
    return brentq(lambda a: np.sum(a ** np.arange(n)) - r, 1e-12, 1.0 - 1e-15, xtol=1e-15)


def haar_orthonormal(rows: int, cols: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-distributed matrix with orthonormal columns (QR with sign-fixed R)."""
    g = gen.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def synthesize_matrix(s: Spectrum, m: int, n: int, seed: int) -> np.ndarray:
    """m x n matrix whose squared singular values are ``s`` (zero-padded to n)."""
    if n < len(s) or m < n:
        raise DimensionMismatch(f"need m >= n >= len(spectrum); got m={m}, n={n}, len={len(s)}")
    d = np.sqrt(s.padded(n))
    u = haar_orthonormal(m, n, _rng.stream(seed, 0))
    v = haar_orthonormal(n, n, _rng.stream(seed, 1))
    return (u * d) @ v.T


def spectrum_of(a, psd: bool = False) -> Spectrum:
    """Squared singular values of ``a``.

    With ``psd=True``, ``a`` is treated as a PSD kernel matrix K and its
    eigenvalues are returned (the squared singular values of ``K^{1/2}``);
    round-off negatives are clamped to zero.
    """
    a = as_matrix(a)
    if psd:
        vals = np.clip(np.linalg.eigvalsh(0.5 * (a + a.T))[::-1], 0.0, None)
        cutoff = default_rel_tol(a.shape) * (vals[0] if vals.size else 0.0)
    else:
        sv = np.linalg.svd(a, compute_uv=False) if a.size else np.zeros(0)
        vals = sv**2
        cutoff = (default_rel_tol(a.shape) * sv[0]) ** 2 if sv.size else 0.0
    if vals.size == 0 or vals[0] == 0.0:
        raise ZeroMatrix("matrix has no positive singular value")
    return spectrum_from_values(vals, cutoff)


def spectrum_from_values(vals, cutoff: float = 0.0, scale_c: float = 1.0) -> Spectrum:
    """Spectrum from computed values: values <= cutoff become exact zeros."""
    vals = np.array(vals, dtype=float)
    vals[vals <= cutoff] = 0.0
    # eigvalsh/svd ordering can wobble by an ulp
    return Spectrum(np.minimum.accumulate(vals), scale_c)


def spectrum_from_svd(f: SvdFactorization, scale_c: float = 1.0) -> Spectrum:
    """Squared singular values of a factorization, zeroed beyond its numerical rank."""
    vals = f.singular_values**2
    vals[f.rank :] = 0.0
    return spectrum_from_values(vals, 0.0, scale_c)
