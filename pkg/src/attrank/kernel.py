"""Chi-square kernel and its finite-dimensional approximate feature map.

The exact kernel K(x, y) = sum_i 2 x_i y_i / (x_i + y_i) is additive and
homogeneous; its spectral signature is kappa(lambda) = sech(pi lambda).
Sampling the spectrum at frequencies j*L for j = -n..n yields a
(2n+1)-dimensional block per input dimension whose dot products approximate
K, turning kernel classifiers into linear ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InsufficientDataError, ShapeError
from .features import BowHistogram


@dataclass(frozen=True)
class KernelMapConfig:
    """Approximate-map operating point.

    ``order`` spectral samples per side (output is 2*order+1 per input dim),
    ``period`` is the spectral sampling step, ``gamma`` the homogeneity
    degree of the kernel being approximated.
    """

    order: int = 3
    period: float = 0.65
    gamma: float = 1.0

    def __post_init__(self) -> None:
        if self.order < 0:
            raise DomainError("order must be nonnegative")
        if self.period <= 0:
            raise DomainError("period must be positive")
        if self.gamma <= 0:
            raise DomainError("gamma must be positive")

    @property
    def block_dim(self) -> int:
        return 2 * self.order + 1


def _as_bins(x: BowHistogram | np.ndarray | Sequence[float]) -> np.ndarray:
    if isinstance(x, BowHistogram):
        return x.bins
    return np.asarray(x, dtype=np.float64)


def chi2_kernel(x: BowHistogram | np.ndarray, y: BowHistogram | np.ndarray) -> float:
    """Exact additive chi-square kernel, with 0/0 terms defined as 0.

    For L1-normalized inputs K(x, x) = 1 exactly.
    """
    xv, yv = _as_bins(x), _as_bins(y)
    if xv.shape != yv.shape:
        raise ShapeError(f"histogram dimensions differ: {xv.shape} vs {yv.shape}")
    den = xv + yv
    num = 2.0 * xv * yv
    return float(np.sum(np.divide(num, den, out=np.zeros_like(num), where=den > 0)))


def _spectrum(lam: np.ndarray) -> np.ndarray:
    """Chi-square kernel spectral signature kappa(lambda) = sech(pi lambda)."""
    return 1.0 / np.cosh(np.pi * lam)


def approx_map(x: BowHistogram | np.ndarray, cfg: KernelMapConfig = KernelMapConfig()) -> np.ndarray:
    """Finite feature map whose dot product approximates :func:`chi2_kernel`.

    Each input dimension with value v > 0 expands to the block

        [sqrt(v^g * L * kappa(0)),
         sqrt(2 v^g L kappa(jL)) * cos(jL log v),
         sqrt(2 v^g L kappa(jL)) * sin(jL log v)]   for j = 1..order,

    laid out contiguously; v = 0 expands to the zero block.
    """
    v = _as_bins(x)
    if v.ndim != 1:
        raise ShapeError("input must be a vector")
    if np.any(v < 0):
        raise DomainError("histogram bins must be nonnegative")

    n, L, g = cfg.order, cfg.period, cfg.gamma
    out = np.zeros((v.size, cfg.block_dim))
    pos = v > 0
    if np.any(pos):
        vp = v[pos]
        logv = np.log(vp)
        amp = vp**g * L
        out[pos, 0] = np.sqrt(amp * _spectrum(np.array(0.0)))
        for j in range(1, n + 1):
            a = np.sqrt(2.0 * amp * _spectrum(np.array(j * L)))
            phase = j * L * logv
            out[pos, 2 * j - 1] = a * np.cos(phase)
            out[pos, 2 * j] = a * np.sin(phase)
    return out.ravel()


@dataclass(frozen=True)
class MapErrorReport:
    """Exact-kernel vs mapped-dot-product error statistics.

    Pairs whose exact kernel is zero contribute their absolute error in
    place of a relative one.
    """

    mean_rel_error: float
    max_rel_error: float
    pair_count: int


def map_error_report(
    samples: Sequence[tuple[BowHistogram | np.ndarray, BowHistogram | np.ndarray]],
    cfg: KernelMapConfig = KernelMapConfig(),
) -> MapErrorReport:
    """Measure the map's approximation error over histogram pairs."""
    if len(samples) == 0:
        raise InsufficientDataError("need at least one histogram pair")
    errs = []
    for x, y in samples:
        exact = chi2_kernel(x, y)
        approx = float(approx_map(x, cfg) @ approx_map(y, cfg))
        diff = abs(approx - exact)
        errs.append(diff / exact if exact > 0 else diff)
    arr = np.asarray(errs)
    return MapErrorReport(float(arr.mean()), float(arr.max()), len(errs))
