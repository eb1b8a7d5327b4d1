"""Monte Carlo isotropy test by random rotation of Fry points.

The observed functional statistic ``T_0`` is compared against ``M``
statistics computed from randomly rotated copies of the observed Fry
points. Curves are ranked either by their trapezoidal L1 norm (``integral``)
or by the extreme rank length measure (``erl``), and the p-value is
``(1 + #{b : T_b at least as extreme as T_0}) / (M + 1)``.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import ConfigError
from .estimators import (WONG_CHIU_ALPHAS, WONG_CHIU_EPS, CurveStatistic, EstimatorContext,
                         edge_weights, radius_grid, sector_contrast_curve, wong_chiu_curve)
from .fry import FryPattern, RotationScheme, fry_points, resample
from .sampling import RngStream

ORDERINGS = ("integral", "erl")


@dataclass(frozen=True)
class SectorContrast:
    alpha1: float = 0.0
    alpha2: float = np.pi / 2
    eps: float = np.pi / 4
    name = "sector_contrast"
    sidedness = "two"

    def curve(self, fry, ctx, grid) -> CurveStatistic:
        return sector_contrast_curve(fry, ctx, self.alpha1, self.alpha2, self.eps, grid)


@dataclass(frozen=True)
class WongChiu:
    alpha_grid: tuple = tuple(WONG_CHIU_ALPHAS)
    eps_grid: tuple = tuple(WONG_CHIU_EPS)
    name = "wong_chiu"
    sidedness = "one"

    def curve(self, fry, ctx, grid) -> CurveStatistic:
        return wong_chiu_curve(fry, ctx, grid, np.asarray(self.alpha_grid),
                               np.asarray(self.eps_grid))


@dataclass(frozen=True)
class TestConfig:
    statistic: SectorContrast | WongChiu = field(default_factory=SectorContrast)
    ordering: str = "integral"
    scheme: RotationScheme = RotationScheme.GROUPWISE
    M: int = 99
    r_max: float = 1.0
    k: int = 200
    seed: int = 0
    alpha: float = 0.05

    __test__ = False  # not a pytest class

    def __post_init__(self):
        object.__setattr__(self, "scheme", RotationScheme.parse(self.scheme))
        if self.ordering not in ORDERINGS:
            raise ConfigError(f"unknown ordering {self.ordering!r}; expected one of {ORDERINGS}")
        if self.M < 1:
            raise ConfigError(f"M must be at least 1, got {self.M}")
        if 1.0 / (self.M + 1) > self.alpha:
            raise ConfigError(f"M={self.M} cannot reach significance level {self.alpha}")
        if not (self.r_max > 0):
            raise ConfigError(f"r_max must be positive, got {self.r_max}")
        if self.k < 2:
            raise ConfigError(f"need at least 2 grid points, got k={self.k}")


@dataclass
class TestResult:
    p_value: float
    observed_score: float
    bootstrap_scores: np.ndarray
    config: TestConfig
    warnings: list[str] = field(default_factory=list)

    __test__ = False

    @property
    def ordering(self) -> str:
        return self.config.ordering

    CSV_FIELDS = ("p_value", "ordering", "scheme", "statistic", "r_max", "M", "seed", "warnings")

    def row(self) -> dict:
        c = self.config
        return {"p_value": repr(float(self.p_value)), "ordering": c.ordering,
                "scheme": c.scheme.value, "statistic": c.statistic.name,
                "r_max": repr(float(c.r_max)), "M": c.M, "seed": c.seed,
                "warnings": "; ".join(self.warnings)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.CSV_FIELDS, lineterminator="\n")
        w.writeheader()
        w.writerow(self.row())
        return buf.getvalue()


def integral_extremeness(values, r_grid=None) -> float:
    """Trapezoidal approximation of the integral of ``|T(r)|`` over the grid.

    Accepts a :class:`CurveStatistic` or a values array plus grid. NaN
    entries are skipped.
    """
    if isinstance(values, CurveStatistic):
        values, r_grid = values.values, values.r_grid
    values = np.asarray(values, dtype=float)
    r_grid = np.asarray(r_grid, dtype=float)
    ok = ~np.isnan(values)
    if ok.sum() < 2:
        raise ValueError("need at least 2 valid grid points for the trapezoid rule")
    return float(np.trapezoid(np.abs(values[ok]), r_grid[ok]))


def pointwise_ranks(values, sidedness: str = "two") -> np.ndarray:
    """Rank of each curve at each grid point, 1 = most extreme.

    ``values`` has shape ``(curves, k)``. One-sided: large values are
    extreme. Two-sided: both tails are extreme. Ties share the minimal rank.
    """
    values = np.asarray(values, dtype=float)
    desc = rankdata(-values, method="min", axis=0)
    if sidedness == "one":
        return desc.astype(np.int64)
    if sidedness != "two":
        raise ValueError(f"sidedness must be 'one' or 'two', got {sidedness!r}")
    asc = rankdata(values, method="min", axis=0)
    return np.minimum(asc, desc).astype(np.int64)


def erl_order(curves, sidedness: str = "two") -> np.ndarray:
    """Extreme rank length position of each curve; 1 = most extreme.

    Each curve's pointwise ranks are sorted ascending and the curves are
    ordered lexicographically on these vectors. Curves with equal vectors
    share the more extreme position.
    """
    if isinstance(curves, (list, tuple)) and curves and isinstance(curves[0], CurveStatistic):
        grid = curves[0].r_grid
        if any(not np.array_equal(c.r_grid, grid) for c in curves):
            raise ValueError("all curves must share one radius grid")
        curves = np.stack([c.values for c in curves])
    ranks = np.sort(pointwise_ranks(curves, sidedness), axis=1)
    order = np.lexsort(ranks.T[::-1])
    pos = np.empty(len(ranks), dtype=np.int64)
    for k, idx in enumerate(order):
        if k > 0 and np.array_equal(ranks[idx], ranks[order[k - 1]]):
            pos[idx] = pos[order[k - 1]]
        else:
            pos[idx] = k + 1
    return pos


def mc_p_value(observed_score, bootstrap_scores, ordering: str) -> float:
    """Monte Carlo p-value; integral scores are extreme when large, ERL
    positions when small."""
    b = np.asarray(bootstrap_scores)
    if len(b) < 1:
        raise ValueError("need at least one bootstrap score")
    if ordering == "integral":
        hits = np.count_nonzero(b >= observed_score)
    elif ordering == "erl":
        hits = np.count_nonzero(b <= observed_score)
    else:
        raise ValueError(f"unknown ordering {ordering!r}")
    return (1 + hits) / (len(b) + 1)


def score_curves(matrix, grid, ordering: str, sidedness: str) -> tuple[np.ndarray, list[str]]:
    """Extremeness scores for a ``(M + 1, k)`` matrix of curves.

    Grid points missing (NaN) in any curve are dropped from all curves.
    """
    matrix = np.asarray(matrix, dtype=float)
    warnings = []
    missing = np.isnan(matrix).any(axis=0)
    if missing.any():
        warnings.append(f"{int(missing.sum())} grid points with undefined statistic skipped")
        matrix, grid = matrix[:, ~missing], np.asarray(grid)[~missing]
    if matrix.shape[1] < (2 if ordering == "integral" else 1):
        raise ValueError("too few valid grid points to order the curves")
    if ordering == "integral":
        scores = np.trapezoid(np.abs(matrix), np.asarray(grid, dtype=float), axis=1)
    else:
        scores = erl_order(matrix, sidedness).astype(float)
    return scores, warnings


def isotropy_test(pattern, cfg: TestConfig, stream: RngStream | None = None,
                  workers: int = 1) -> TestResult:
    """Test a point pattern for isotropy.

    Fry points longer than ``cfg.r_max`` never enter the statistic and
    rotations preserve norms, so they are dropped before resampling.
    """
    if pattern.n < 2:
        raise ValueError(f"need at least 2 points, got {pattern.n}")
    return isotropy_test_fry(fry_points(pattern, r_max=cfg.r_max), cfg, stream, workers)


def curve_matrix(fry: FryPattern, cfg: TestConfig, stream: RngStream | None = None,
                 workers: int = 1) -> tuple[np.ndarray, np.ndarray, int]:
    """Observed curve (row 0) and ``M`` bootstrap curves as a matrix.

    Bootstrap ``b`` draws its rotations from ``stream.child(b)``, so the
    result does not depend on ``workers``. Also returns the radius grid and
    the number of zero-weight vectors met along the way.
    """
    stream = RngStream(cfg.seed) if stream is None else stream
    ctx = EstimatorContext.of(fry)
    grid = radius_grid(cfg.r_max, cfg.k)
    stat = cfg.statistic

    def bootstrap(b: int):
        rotated = resample(fry, cfg.scheme, stream.child(b))
        return stat.curve(rotated, ctx, grid).values, edge_weights(rotated.vectors, fry.window)[1]

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            boots = list(pool.map(bootstrap, range(1, cfg.M + 1)))
    else:
        boots = [bootstrap(b) for b in range(1, cfg.M + 1)]
    observed = stat.curve(fry, ctx, grid).values
    matrix = np.vstack([observed] + [v for v, _ in boots])
    dropped = edge_weights(fry.vectors, fry.window)[1] + sum(d for _, d in boots)
    return matrix, grid, dropped


def result_from_matrix(matrix, grid, cfg: TestConfig, dropped: int = 0) -> TestResult:
    scores, warnings = score_curves(matrix, grid, cfg.ordering, cfg.statistic.sidedness)
    if dropped:
        warnings.append(f"{dropped} Fry vectors with zero overlap weight skipped")
    p = mc_p_value(scores[0], scores[1:], cfg.ordering)
    return TestResult(p, float(scores[0]), scores[1:], cfg, warnings)


def isotropy_test_fry(fry: FryPattern, cfg: TestConfig, stream: RngStream | None = None,
                      workers: int = 1) -> TestResult:
    """Monte Carlo test on given (possibly pre-clipped) Fry points."""
    matrix, grid, dropped = curve_matrix(fry, cfg, stream, workers)
    return result_from_matrix(matrix, grid, cfg, dropped)
