"""Point patterns and simulators for the four model families.

All families share the ``(R, gamma, a)`` parametrization: ``R`` is the
spatial scale, ``gamma`` in [0, 1] controls how pronounced the structure is
(0 = strongest) and ``a`` in (0, 1] the degree of anisotropy (1 = isotropic).
Strauss and Thomas-like patterns are made anisotropic by the area-preserving
compression ``diag(1/a, a)``; the line-cluster and Matérn-like families by a
von Mises distribution of line / ellipse directions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import ConfigError, SimulationError
from .geometry import Window
from .sampling import as_generator, kappa_from_a, sample_von_mises, sigma_from_R

FAMILIES = ("strauss", "thomas", "linecluster", "matern")
STUDY_INTENSITY = 0.005


@dataclass
class PointPattern:
    points: np.ndarray
    window: Window
    marks: np.ndarray | None = None

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float).reshape(-1, 2)
        if self.marks is not None:
            self.marks = np.asarray(self.marks)
            if len(self.marks) != len(self.points):
                raise ValueError("marks and points differ in length")

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def intensity(self) -> float:
        return self.n / self.window.area

    def subset(self, mask) -> "PointPattern":
        marks = None if self.marks is None else self.marks[mask]
        return PointPattern(self.points[mask], self.window, marks)


@dataclass(frozen=True)
class ModelConfig:
    family: str
    R: float
    gamma: float
    a: float
    n: int
    p: float = 0.94
    mu: float = np.pi / 3
    kappa_max: float = 10.0
    tau: float = 0.4

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown model family {self.family!r}; expected one of {FAMILIES}")
        if not (0.0 <= self.gamma <= 1.0):
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not (0.0 < self.a <= 1.0):
            raise ConfigError(f"a must lie in (0, 1], got {self.a}")
        if self.family == "linecluster":
            if self.R < 0:
                raise ConfigError(f"R must be non-negative, got {self.R}")
        elif self.R <= 0:
            raise ConfigError(f"R must be positive, got {self.R}")
        if self.n < 2:
            raise ConfigError(f"n must be at least 2, got {self.n}")
        if self.family in ("thomas", "matern") and self.n_clusters < 5:
            raise ConfigError(
                f"{self.family}: gamma*n = {self.gamma * self.n:g} gives fewer than 5 clusters")
        if self.family == "matern" and not (0.0 < self.tau <= 1.0):
            raise ConfigError(f"tau must lie in (0, 1], got {self.tau}")

    @property
    def n_clusters(self) -> int:
        return int(round(self.gamma * self.n))

    @property
    def cluster_size(self) -> int:
        return cluster_size(self.n_clusters, self.n)


def study_window(n: int, intensity: float = STUDY_INTENSITY) -> Window:
    """Centered square window holding ``n`` points on average."""
    return Window.square(np.sqrt(n / intensity))


def cluster_size(n_clusters: int, n: int) -> int:
    """Offspring per cluster so that ``n_clusters * n1`` is closest to ``n``
    (ties go to the smaller size)."""
    lo = max(1, n // n_clusters)
    hi = lo + 1
    return lo if abs(n_clusters * lo - n) <= abs(n_clusters * hi - n) else hi


def apply_compression(pts, a: float) -> np.ndarray:
    """Map ``(x, y) -> (x / a, a * y)``."""
    if not (0.0 < a <= 1.0):
        raise ValueError(f"a must lie in (0, 1], got {a}")
    pts = np.asarray(pts, dtype=float)
    return np.stack([pts[..., 0] / a, pts[..., 1] * a], axis=-1)


def inverse_compression(pts, a: float) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    return np.stack([pts[..., 0] * a, pts[..., 1] / a], axis=-1)


def preimage_window(window: Window, a: float) -> Window:
    return Window(window.x_min * a, window.x_max * a, window.y_min / a, window.y_max / a)


def _uniform_in(window: Window, size: int, gen: np.random.Generator) -> np.ndarray:
    x = gen.uniform(window.x_min, window.x_max, size)
    y = gen.uniform(window.y_min, window.y_max, size)
    return np.column_stack([x, y])


def _uniform_in_dilation(window: Window, radius: float, size: int,
                         gen: np.random.Generator) -> np.ndarray:
    """Uniform points in the window dilated by a disk (rounded rectangle)."""
    box = window.expand(radius)
    out = np.empty((0, 2))
    while len(out) < size:
        cand = _uniform_in(box, 2 * (size - len(out)) + 16, gen)
        dx = np.maximum(0.0, np.maximum(window.x_min - cand[:, 0], cand[:, 0] - window.x_max))
        dy = np.maximum(0.0, np.maximum(window.y_min - cand[:, 1], cand[:, 1] - window.y_max))
        out = np.vstack([out, cand[dx * dx + dy * dy <= radius * radius]])
    return out[:size]


# --------------------------------------------------------------------------
# Strauss

STRAUSS_SWEEPS = 1000  # moves per point for burn-in and again for sampling
_CHUNK = 200_000


@numba.njit(cache=True)
def _strauss_moves(pts, r2, gamma, idx, newx, newy, u):
    n = pts.shape[0]
    for t in range(idx.shape[0]):
        i = idx[t]
        xi, yi = pts[i, 0], pts[i, 1]
        nx, ny = newx[t], newy[t]
        ds = 0
        for j in range(n):
            if j == i:
                continue
            dx = pts[j, 0] - xi
            dy = pts[j, 1] - yi
            if dx * dx + dy * dy < r2:
                ds -= 1
            dx = pts[j, 0] - nx
            dy = pts[j, 1] - ny
            if dx * dx + dy * dy < r2:
                ds += 1
        if ds <= 0 or (gamma > 0.0 and u[t] < gamma ** ds):
            pts[i, 0] = nx
            pts[i, 1] = ny


def _random_sequential_adsorption(window: Window, n: int, R: float,
                                  gen: np.random.Generator, max_attempts: int) -> np.ndarray:
    pts = np.empty((n, 2))
    k = attempts = 0
    r2 = R * R
    while k < n:
        batch = _uniform_in(window, 256, gen)
        for c in batch:
            attempts += 1
            if k == 0 or np.min(np.sum((pts[:k] - c) ** 2, axis=1)) >= r2:
                pts[k] = c
                k += 1
                if k == n:
                    break
            if attempts >= max_attempts:
                raise SimulationError(
                    f"hard-core packing infeasible: placed {k} of {n} points with R={R}")
    return pts


def simulate_strauss(cfg: ModelConfig, window: Window, rng,
                     sweeps: int = STRAUSS_SWEEPS) -> PointPattern:
    """Fixed-n Strauss process by Metropolis relocation moves.

    The chain runs in the preimage window ``C^{-1} W`` (``sweeps * n`` moves
    burn-in, then as many again) and the final state is mapped through ``C``.
    """
    if cfg.family != "strauss":
        raise ConfigError(f"expected a strauss config, got {cfg.family}")
    gen = as_generator(rng)
    pre = preimage_window(window, cfg.a)
    n = cfg.n
    if cfg.gamma == 0.0:
        pts = _random_sequential_adsorption(pre, n, cfg.R, gen, max_attempts=1000 * n)
    else:
        pts = _uniform_in(pre, n, gen)
    total = 2 * sweeps * n
    done = 0
    while done < total:
        m = min(_CHUNK, total - done)
        idx = gen.integers(0, n, m)
        newx = gen.uniform(pre.x_min, pre.x_max, m)
        newy = gen.uniform(pre.y_min, pre.y_max, m)
        u = gen.random(m)
        _strauss_moves(pts, cfg.R * cfg.R, float(cfg.gamma), idx, newx, newy, u)
        done += m
    if cfg.a != 1.0:
        pts = apply_compression(pts, cfg.a)
    return PointPattern(_clamp(pts, window), window)


def _clamp(pts: np.ndarray, window: Window) -> np.ndarray:
    # compression of boundary points can leave them one ulp outside
    pts = pts.copy()
    np.clip(pts[:, 0], window.x_min, window.x_max, out=pts[:, 0])
    np.clip(pts[:, 1], window.y_min, window.y_max, out=pts[:, 1])
    return pts


# --------------------------------------------------------------------------
# Cluster processes

@dataclass
class ClusterRealization:
    """Full cluster draw before discarding points outside the window."""

    centers: np.ndarray
    offspring: np.ndarray
    parent: np.ndarray
    orientation: np.ndarray | None = None
    window: Window | None = None

    def pattern(self) -> PointPattern:
        keep = self.window.contains(self.offspring)
        return PointPattern(self.offspring[keep], self.window)


def thomas_clusters(cfg: ModelConfig, window: Window, rng) -> ClusterRealization:
    """Thomas-like draw: fixed numbers of parents and offspring.

    Parents are uniform on ``C^{-1} W`` dilated by ``sigma`` with count
    ``floor(n0 * |dilated| / |W|)``; offspring carry isotropic Gaussian
    displacements and are mapped through ``C`` together with their parents.
    """
    if cfg.family != "thomas":
        raise ConfigError(f"expected a thomas config, got {cfg.family}")
    gen = as_generator(rng)
    sigma = sigma_from_R(cfg.R, cfg.p)
    pre = preimage_window(window, cfg.a)
    n_parents = int(np.floor(cfg.n_clusters * pre.dilated_area(sigma) / pre.area))
    n1 = cfg.cluster_size
    centers = _uniform_in_dilation(pre, sigma, n_parents, gen)
    parent = np.repeat(np.arange(n_parents), n1)
    offspring = centers[parent] + sigma * gen.standard_normal((n_parents * n1, 2))
    if cfg.a != 1.0:
        centers = apply_compression(centers, cfg.a)
        offspring = apply_compression(offspring, cfg.a)
    return ClusterRealization(centers, offspring, parent, window=window)


def simulate_thomas_like(cfg: ModelConfig, window: Window, rng) -> PointPattern:
    return thomas_clusters(cfg, window, rng).pattern()


def matern_clusters(cfg: ModelConfig, window: Window, rng) -> ClusterRealization:
    """Matérn-like draw with elliptical clusters.

    Centers are uniform on ``W`` dilated by ``R`` (count scaled by the area
    ratio as for the Thomas-like model). Each ellipse has half-axes ``R`` and
    ``tau * R``, its long axis oriented by a von Mises draw, and holds ``n1``
    uniformly placed offspring.
    """
    if cfg.family != "matern":
        raise ConfigError(f"expected a matern config, got {cfg.family}")
    gen = as_generator(rng)
    n_centers = int(np.floor(cfg.n_clusters * window.dilated_area(cfg.R) / window.area))
    n1 = cfg.cluster_size
    centers = _uniform_in_dilation(window, cfg.R, n_centers, gen)
    kappa = kappa_from_a(cfg.a, cfg.kappa_max)
    orientation = sample_von_mises(cfg.mu, kappa, gen, n_centers)
    parent = np.repeat(np.arange(n_centers), n1)
    m = n_centers * n1
    rad = np.sqrt(gen.random(m))
    phi = gen.uniform(0.0, 2.0 * np.pi, m)
    u = cfg.R * rad * np.cos(phi)
    v = cfg.tau * cfg.R * rad * np.sin(phi)
    c, s = np.cos(orientation[parent]), np.sin(orientation[parent])
    offspring = centers[parent] + np.column_stack([u * c - v * s, u * s + v * c])
    return ClusterRealization(centers, offspring, parent, orientation, window)


def simulate_matern_elliptical(cfg: ModelConfig, window: Window, rng) -> PointPattern:
    return matern_clusters(cfg, window, rng).pattern()


# --------------------------------------------------------------------------
# Poisson line cluster

@dataclass
class LineSystem:
    """Lines ``{c + p * normal(theta) + t * dir(theta)}`` around center ``c``."""

    p: np.ndarray
    theta: np.ndarray
    center: np.ndarray
    threshold: float = 0.0
    window_length: float = 0.0

    def segments(self, region: Window) -> tuple[np.ndarray, np.ndarray]:
        """Clip every line to ``region``; returns start points and end points
        (lines missing the region give zero-length segments)."""
        return clip_lines(self.p, self.theta, self.center, region)


def clip_lines(p, theta, center, region: Window):
    p = np.asarray(p, dtype=float)
    theta = np.asarray(theta, dtype=float)
    d = np.column_stack([np.cos(theta), np.sin(theta)])
    base = center + p[:, None] * np.column_stack([-np.sin(theta), np.cos(theta)])
    t0 = np.full(len(p), -np.inf)
    t1 = np.full(len(p), np.inf)
    for k, (lo, hi) in enumerate(((region.x_min, region.x_max), (region.y_min, region.y_max))):
        dk, bk = d[:, k], base[:, k]
        par = np.abs(dk) < 1e-15
        with np.errstate(divide="ignore", invalid="ignore"):
            a = (lo - bk) / dk
            b = (hi - bk) / dk
        enter = np.where(par, np.where((bk >= lo) & (bk <= hi), -np.inf, np.inf), np.minimum(a, b))
        leave = np.where(par, np.where((bk >= lo) & (bk <= hi), np.inf, -np.inf), np.maximum(a, b))
        t0 = np.maximum(t0, enter)
        t1 = np.minimum(t1, leave)
    t1 = np.maximum(t1, t0)
    t0 = np.where(np.isfinite(t0), t0, 0.0)
    t1 = np.where(np.isfinite(t1), t1, 0.0)
    return base + t0[:, None] * d, base + t1[:, None] * d


def line_system(cfg: ModelConfig, window: Window, rng, batch: int = 16) -> LineSystem:
    """Accumulate random lines until their length inside the window reaches
    ``L * 5**(1 + gamma)``."""
    if abs(window.width - window.height) > 1e-9 * window.width:
        raise ConfigError("line cluster simulation needs a square window")
    gen = as_generator(rng)
    L = window.width
    center = np.array([(window.x_min + window.x_max) / 2, (window.y_min + window.y_max) / 2])
    r_d = L / np.sqrt(2.0)
    kappa = kappa_from_a(cfg.a, cfg.kappa_max)
    threshold = L * 5.0 ** (1.0 + cfg.gamma)
    ps, thetas = [], []
    total = 0.0
    while total < threshold:
        p = gen.uniform(-r_d, r_d, batch)
        th = sample_von_mises(cfg.mu, kappa, gen, batch)
        a, b = clip_lines(p, th, center, window)
        lengths = np.hypot(*(b - a).T)
        for k in range(batch):
            ps.append(p[k])
            thetas.append(th[k])
            total += lengths[k]
            if total >= threshold:
                break
    return LineSystem(np.array(ps), np.array(thetas), center, threshold, total)


def simulate_line_cluster(cfg: ModelConfig, window: Window, rng,
                          lines: LineSystem | None = None) -> PointPattern:
    """Exactly ``n`` points scattered around a random line system.

    Points are placed uniformly on the lines clipped to ``W`` expanded by
    ``3R`` and displaced orthogonally by ``N(0, R^2)``; only those landing in
    ``W`` are kept, until ``n`` have been collected.
    """
    if cfg.family != "linecluster":
        raise ConfigError(f"expected a linecluster config, got {cfg.family}")
    gen = as_generator(rng)
    if lines is None:
        lines = line_system(cfg, window, gen)
    start, end = lines.segments(window.expand(3.0 * cfg.R))
    seg = end - start
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    usable = lengths > 0
    start, seg, lengths = start[usable], seg[usable], lengths[usable]
    normals = np.column_stack([-seg[:, 1], seg[:, 0]]) / lengths[:, None]
    probs = lengths / lengths.sum()
    out = np.empty((0, 2))
    while len(out) < cfg.n:
        m = 2 * (cfg.n - len(out)) + 16
        k = gen.choice(len(lengths), size=m, p=probs)
        t = gen.random(m)
        pts = start[k] + t[:, None] * seg[k]
        if cfg.R > 0:
            pts = pts + (cfg.R * gen.standard_normal(m))[:, None] * normals[k]
        out = np.vstack([out, pts[window.contains(pts)]])
    return PointPattern(out[: cfg.n], window)


SIMULATORS = {
    "strauss": simulate_strauss,
    "thomas": simulate_thomas_like,
    "linecluster": simulate_line_cluster,
    "matern": simulate_matern_elliptical,
}


def simulate(cfg: ModelConfig, window: Window | None = None, rng=0) -> PointPattern:
    """Simulate one pattern; defaults to the square window for ``cfg.n``."""
    if window is None:
        window = study_window(cfg.n)
    return SIMULATORS[cfg.family](cfg, window, rng)
