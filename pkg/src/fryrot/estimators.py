"""Translation-corrected second-order estimators on Fry points."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Window, angular_distance, polar_angle, translation_overlap

log = logging.getLogger(__name__)

DEFAULT_K = 200
WONG_CHIU_ALPHAS = np.arange(36) * np.pi / 36
WONG_CHIU_EPS = np.arange(1, 37) * np.pi / 72


@dataclass(frozen=True)
class EstimatorContext:
    window: Window
    source_n: int

    @classmethod
    def of(cls, fry) -> "EstimatorContext":
        return cls(fry.window, fry.source_n)

    @property
    def squared_intensity(self) -> float:
        """Unbiased (Poisson) estimate ``n (n - 1) / |W|^2``."""
        return self.source_n * (self.source_n - 1) / self.window.area**2


@dataclass
class CurveStatistic:
    r_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.r_grid = np.asarray(self.r_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.r_grid.shape != self.values.shape:
            raise ValueError("grid and values differ in shape")
        if np.any(np.diff(self.r_grid) <= 0):
            raise ValueError("radius grid must be strictly ascending")

    def __mul__(self, c: float) -> "CurveStatistic":
        return CurveStatistic(self.r_grid, self.values * c)

    __rmul__ = __mul__

    def to_csv(self, path) -> None:
        np.savetxt(path, np.column_stack([self.r_grid, self.values]), delimiter=",",
                   header="r,value", comments="", fmt="%.17g")


def radius_grid(r_max: float, k: int = DEFAULT_K) -> np.ndarray:
    """``k`` equispaced radii ``r_max * j / k``, ``j = 1..k``."""
    if r_max <= 0 or k < 1:
        raise ValueError(f"need r_max > 0 and k >= 1, got {r_max}, {k}")
    return r_max * np.arange(1, k + 1) / k


def edge_weights(vectors, window: Window) -> tuple[np.ndarray, int]:
    """Reciprocal translation overlaps; zero-overlap vectors get weight 0.

    Returns the weights and the number of vectors so excluded.
    """
    area = translation_overlap(window, vectors)
    bad = area <= 0
    with np.errstate(divide="ignore"):
        w = np.where(bad, 0.0, 1.0 / np.where(bad, 1.0, area))
    return w, int(bad.sum())


def estimate_K(fry, ctx: EstimatorContext, dset) -> float:
    """Translation-corrected estimate of the reduced second moment measure
    of a directed set."""
    w, dropped = edge_weights(fry.vectors, ctx.window)
    if dropped:
        log.warning("%d Fry vectors with zero overlap weight skipped", dropped)
    inside = dset.contains(fry.vectors)
    return math.fsum(w[inside]) / ctx.squared_intensity


def _cumulative(norms, w, grid) -> np.ndarray:
    """``sum(w[norms <= r])`` for each r of the grid, accumulated in norm order."""
    # (norm, weight) order: equal multisets accumulate identically
    order = np.lexsort((w, norms))
    cs = np.concatenate([[0.0], np.cumsum(w[order])])
    return cs[np.searchsorted(norms[order], grid, side="right")]


def _sector_cumulative(norms, theta, w, alpha, eps, grid):
    sel = angular_distance(theta, alpha) <= eps
    return _cumulative(norms[sel], w[sel], grid)


def _polar(fry, ctx):
    v = fry.vectors
    w, _ = edge_weights(v, ctx.window)
    return np.hypot(v[:, 0], v[:, 1]), polar_angle(v), w


def sector_K_curve(fry, ctx: EstimatorContext, alpha: float, eps: float, grid) -> CurveStatistic:
    """Sector K-function ``K(S(alpha, eps, r))`` on a radius grid."""
    if not (0.0 <= 2 * eps <= np.pi):
        raise ValueError(f"half-opening angle must lie in [0, pi/2], got {eps}")
    grid = np.asarray(grid, dtype=float)
    norms, theta, w = _polar(fry, ctx)
    pos = norms > 0
    vals = _sector_cumulative(norms[pos], theta[pos], w[pos], alpha, eps, grid)
    vals = vals / ctx.squared_intensity
    return CurveStatistic(grid, vals)


def sector_contrast_curve(fry, ctx: EstimatorContext, alpha1: float, alpha2: float,
                          eps: float, grid) -> CurveStatistic:
    """``K_sect(alpha1) - K_sect(alpha2)`` pointwise in r."""
    grid = np.asarray(grid, dtype=float)
    if not (0.0 <= 2 * eps <= np.pi):
        raise ValueError(f"half-opening angle must lie in [0, pi/2], got {eps}")
    norms, theta, w = _polar(fry, ctx)
    pos = norms > 0
    k1 = _sector_cumulative(norms[pos], theta[pos], w[pos], alpha1, eps, grid)
    k2 = _sector_cumulative(norms[pos], theta[pos], w[pos], alpha2, eps, grid)
    vals = (k1 - k2) / ctx.squared_intensity
    return CurveStatistic(grid, vals)


def ratio_table(fry, ctx: EstimatorContext, grid, alpha: float, eps_grid) -> np.ndarray:
    """``F(r, alpha, eps) = K(S(alpha, eps, r)) / K(S(pi/2, pi/2, r))``.

    Returns an array of shape ``(len(grid), len(eps_grid))``; rows whose
    half-disk denominator vanishes are NaN.
    """
    grid = np.asarray(grid, dtype=float)
    norms, theta, w = _polar(fry, ctx)
    return _ratio_tables(norms, theta, w, grid, np.atleast_1d(alpha), np.asarray(eps_grid))[0]


def _ratio_tables(norms, theta, w, grid, alphas, eps_grid):
    k, m = len(grid), len(eps_grid)
    pos = norms > 0
    norms, theta, w = norms[pos], theta[pos], w[pos]
    ri = np.searchsorted(grid, norms, side="left")
    denom = _sector_cumulative(norms, theta, w, np.pi / 2, np.pi / 2, grid)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(denom > 0, 1.0 / denom, np.nan)
    out = np.empty((len(alphas), k, m))
    for a, alpha in enumerate(alphas):
        ei = np.searchsorted(eps_grid, angular_distance(theta, alpha), side="left")
        keep = (ri < k) & (ei < m)
        flat = np.bincount(ri[keep] * m + ei[keep], weights=w[keep], minlength=k * m)
        table = flat.reshape(k, m).cumsum(axis=0).cumsum(axis=1)
        out[a] = table * inv[:, None]
    return out


def wong_chiu_curve(fry, ctx: EstimatorContext, grid, alpha_grid=WONG_CHIU_ALPHAS,
                    eps_grid=WONG_CHIU_EPS) -> CurveStatistic:
    """``T(r) = max_alpha max_eps |F(r, alpha, eps) - eps / (pi/2)|``.

    The suprema are taken over the finite direction and half-angle grids.
    Grid points with a vanishing denominator are NaN.
    """
    grid = np.asarray(grid, dtype=float)
    eps_grid = np.asarray(eps_grid, dtype=float)
    if np.any(np.diff(eps_grid) <= 0):
        raise ValueError("eps grid must be strictly ascending")
    norms, theta, w = _polar(fry, ctx)
    tables = _ratio_tables(norms, theta, w, grid, np.asarray(alpha_grid, dtype=float), eps_grid)
    dev = np.abs(tables - eps_grid / (np.pi / 2))
    vals = np.full(len(grid), np.nan)
    ok = ~np.isnan(dev[0, :, 0])
    vals[ok] = dev[:, ok, :].max(axis=(0, 2))
    return CurveStatistic(grid, vals)
