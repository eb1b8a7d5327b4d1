"""Power studies over model grids and repeated tests on real data."""
from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DataError, SimulationError
from .fry import RotationScheme, fry_points
from .mctest import SectorContrast, TestConfig, curve_matrix, result_from_matrix
from .models import ModelConfig, PointPattern, simulate, study_window
from .sampling import RngStream

MODEL_GRID = {
    "strauss": dict(R=(5.0, 10.0), gamma=(0.0, 0.4, 0.8)),
    "thomas": dict(R=(10.0, 20.0), gamma=(0.05, 0.15, 0.25)),
    "linecluster": dict(R=(0.0, 1.0), gamma=(0.0, 0.4, 0.8)),
    "matern": dict(R=(10.0, 20.0), gamma=(0.05, 0.15, 0.25)),
}
GRID_A = (1.0, 0.7)
GRID_N = (100, 300, 500)

# direction pairs (degrees) used for the amacrine battery
AMACRINE_DIRECTIONS = {"all": (-45.0, 45.0), "on": (-10.0, 80.0), "off": (60.0, 150.0)}
AMACRINE_R_MAX = (0.08, 0.09, 0.10, 0.11, 0.12)


def grid_cells(families=tuple(MODEL_GRID), a_values=GRID_A, n_values=GRID_N) -> list[ModelConfig]:
    cells = []
    for fam in families:
        grid = MODEL_GRID[fam]
        for R, gamma, a, n in itertools.product(grid["R"], grid["gamma"], a_values, n_values):
            cells.append(ModelConfig(fam, R, gamma, a, n))
    return cells


def default_r_max(model: ModelConfig) -> float:
    """``1.3 R`` for point-interaction and cluster models, ``R + 25`` for lines."""
    return model.R + 25.0 if model.family == "linecluster" else 1.3 * model.R


def default_directions(model: ModelConfig) -> tuple[float, float]:
    if model.family in ("strauss", "thomas"):
        return 0.0, np.pi / 2
    return model.mu, model.mu + np.pi / 2


@dataclass
class StudyConfig:
    cells: list[ModelConfig]
    replicates: int = 100
    schemes: tuple = (RotationScheme.GROUPWISE,)
    orderings: tuple = ("integral",)
    M: int = 99
    k: int = 200
    eps: float = np.pi / 4
    alpha: float = 0.05
    r_max: float | None = None
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ConfigError(f"replicates must be at least 1, got {self.replicates}")
        if not self.cells:
            raise ConfigError("empty model grid")
        self.schemes = tuple(RotationScheme.parse(s) for s in self.schemes)
        for o in self.orderings:
            self.test_config(self.cells[0], RotationScheme.GROUPWISE, o)

    def test_config(self, model: ModelConfig, scheme, ordering: str) -> TestConfig:
        a1, a2 = default_directions(model)
        return TestConfig(SectorContrast(a1, a2, self.eps), ordering, scheme, self.M,
                          self.r_max or default_r_max(model), self.k, self.seed, self.alpha)


@dataclass
class PowerRow:
    model: ModelConfig
    scheme: str
    ordering: str
    replicates: int
    failures: int
    p_values: np.ndarray = field(repr=False)
    alpha: float = 0.05

    @property
    def skipped(self) -> bool:
        return self.failures > 0.01 * self.replicates

    @property
    def rejection_rate(self) -> float:
        return float(np.mean(self.p_values <= self.alpha + 1e-12))

    @property
    def standard_error(self) -> float:
        p = self.rejection_rate
        return float(np.sqrt(p * (1 - p) / len(self.p_values)))


POWER_FIELDS = ("family", "R", "gamma", "a", "n", "scheme", "ordering", "replicates",
                "failures", "rejection_rate", "se", "mean_p", "sd_p")


def power_table_csv(rows: list[PowerRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(POWER_FIELDS)
    for r in rows:
        m = r.model
        head = [m.family, f"{m.R:g}", f"{m.gamma:g}", f"{m.a:g}", m.n, r.scheme, r.ordering,
                r.replicates, r.failures]
        if r.skipped or len(r.p_values) == 0:
            w.writerow(head + ["", "", "", ""])
            continue
        sd = float(np.std(r.p_values, ddof=1)) if len(r.p_values) > 1 else 0.0
        w.writerow(head + [f"{r.rejection_rate:.6f}", f"{r.standard_error:.6f}",
                           f"{float(np.mean(r.p_values)):.6f}", f"{sd:.6f}"])
    return buf.getvalue()


def _replicate(job):
    """Simulate one pattern and test it under every scheme and ordering."""
    cell_idx, rep, model, study = job
    stream = RngStream(study.seed).child(cell_idx, rep)
    try:
        pattern = simulate(model, study_window(model.n), stream.child(0))
    except SimulationError as exc:
        return None, str(exc)
    if pattern.n < 2:
        return None, f"only {pattern.n} points simulated"
    out = {}
    for s_idx, scheme in enumerate(study.schemes):
        cfg = study.test_config(model, scheme, study.orderings[0])
        fry = fry_points(pattern, r_max=cfg.r_max)
        matrix, grid, dropped = curve_matrix(fry, cfg, stream.child(1 + s_idx))
        for ordering in study.orderings:
            res = result_from_matrix(matrix, grid, replace(cfg, ordering=ordering), dropped)
            out[scheme.value, ordering] = res.p_value
    return out, None


def _map(fn, jobs, threads: int):
    if threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    return [fn(j) for j in jobs]


def run_power_study(study: StudyConfig) -> list[PowerRow]:
    """Rejection rates per model cell, rotation scheme and ordering.

    Replicate ``r`` of cell ``c`` uses the stream ``(seed, c, r)`` whatever
    the number of workers, so the table is reproducible.
    """
    jobs = [(c, r, model, study) for c, model in enumerate(study.cells)
            for r in range(study.replicates)]
    results = _map(_replicate, jobs, study.threads)
    rows = []
    for c, model in enumerate(study.cells):
        chunk = results[c * study.replicates:(c + 1) * study.replicates]
        ok = [res for res, err in chunk if res is not None]
        failures = len(chunk) - len(ok)
        for scheme in study.schemes:
            for ordering in study.orderings:
                ps = np.array([res[scheme.value, ordering] for res in ok])
                rows.append(PowerRow(model, scheme.value, ordering, study.replicates,
                                     failures, ps, study.alpha))
    return rows


# --------------------------------------------------------------------------
# Real data

@dataclass
class BatteryRow:
    subset: str
    ordering: str
    M: int
    r_max: float
    p_values: np.ndarray = field(repr=False)

    @property
    def mean_p(self) -> float:
        return float(np.mean(self.p_values))

    @property
    def sd_p(self) -> float:
        return float(np.std(self.p_values, ddof=1)) if len(self.p_values) > 1 else 0.0


def select_subset(pattern: PointPattern, subset: str) -> PointPattern:
    """``all`` is the unmarked pattern; other names select marks (case-insensitive)."""
    if subset == "all":
        sub = PointPattern(pattern.points, pattern.window)
    else:
        if pattern.marks is None:
            raise DataError(f"subset {subset!r} needs a marked pattern")
        labels = np.array([str(m).strip().lower() for m in pattern.marks])
        sub = PointPattern(pattern.points[labels == subset.lower()], pattern.window)
    if sub.n < 2:
        raise DataError(f"subset {subset!r} has {sub.n} points; need at least 2")
    return sub


def _battery_cell(job):
    pattern, cfg, orderings, repeats, key = job
    fry = fry_points(pattern, r_max=cfg.r_max)
    base = RngStream(cfg.seed).child(*key)
    ps = {o: [] for o in orderings}
    for rep in range(repeats):
        matrix, grid, dropped = curve_matrix(fry, cfg, base.child(rep))
        for o in orderings:
            ps[o].append(result_from_matrix(matrix, grid, replace(cfg, ordering=o), dropped).p_value)
    return {o: np.array(v) for o, v in ps.items()}


def run_real_data_battery(pattern: PointPattern, subsets=("all", "on", "off"),
                          directions: dict | None = None, r_max_values=AMACRINE_R_MAX,
                          M_values=(99, 499), orderings=("integral", "erl"), repeats: int = 1000,
                          eps: float = np.pi / 4, seed: int = 0, threads: int = 1,
                          scheme=RotationScheme.GROUPWISE) -> list[BatteryRow]:
    """Repeat the group-wise test on each subset to get mean and sd of p.

    ``directions`` maps a subset name to a pair of angles in degrees.
    """
    directions = {**AMACRINE_DIRECTIONS, **(directions or {})}
    jobs = []
    for s_idx, subset in enumerate(subsets):
        if subset not in directions:
            raise ConfigError(f"no direction pair for subset {subset!r}")
        sub = select_subset(pattern, subset)
        a1, a2 = np.deg2rad(directions[subset])
        for m_idx, M in enumerate(M_values):
            for r_idx, r_max in enumerate(r_max_values):
                cfg = TestConfig(SectorContrast(a1, a2, eps), orderings[0], scheme, M, r_max,
                                 seed=seed)
                jobs.append((sub, cfg, tuple(orderings), repeats, (s_idx, m_idx, r_idx)))
    results = _map(_battery_cell, jobs, threads)
    rows = []
    for (sub, cfg, _, _, (s_idx, _, _)), res in zip(jobs, results):
        for o in orderings:
            rows.append(BatteryRow(subsets[s_idx], o, cfg.M, cfg.r_max, res[o]))
    return rows


BATTERY_FIELDS = ("subset", "ordering", "M", "r_max", "repeats", "mean_p", "sd_p")


def battery_csv(rows: list[BatteryRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BATTERY_FIELDS)
    for r in rows:
        w.writerow([r.subset, r.ordering, r.M, f"{r.r_max:g}", len(r.p_values),
                    f"{r.mean_p:.6f}", f"{r.sd_p:.6f}"])
    return buf.getvalue()
