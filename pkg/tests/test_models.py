import numpy as np
import pytest
from scipy.spatial.distance import pdist

from fryrot.errors import ConfigError, SimulationError
from fryrot.geometry import Window
from fryrot.models import (ModelConfig, PointPattern, apply_compression, cluster_size, clip_lines,
                           inverse_compression, line_system, matern_clusters, simulate,
                           simulate_line_cluster, simulate_strauss, study_window,
                           thomas_clusters)
from fryrot.sampling import RngStream


def close_pairs(pts, R):
    return int(np.sum(pdist(pts) < R))


def shoelace(poly):
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def test_compression():
    pts = np.array([[1.0, 1.0], [-2.0, 3.0]])
    np.testing.assert_array_equal(apply_compression(pts, 1.0), pts)
    np.testing.assert_allclose(apply_compression(np.array([1.0, 1.0]), 0.5), [2.0, 0.5])
    poly = np.array([[0, 0], [3, 0], [4, 2], [1, 5], [-1, 2]], float)
    assert shoelace(apply_compression(poly, 0.3)) == pytest.approx(shoelace(poly), rel=1e-12)
    np.testing.assert_allclose(inverse_compression(apply_compression(pts, 0.7), 0.7), pts)
    for bad in (0.0, 1.5):
        with pytest.raises(ValueError):
            apply_compression(pts, bad)


def test_study_windows():
    for n, side in ((100, np.sqrt(2) * 100), (300, np.sqrt(6) * 100), (500, np.sqrt(10) * 100)):
        w = study_window(n)
        assert w.width == pytest.approx(side) and w.x_min == pytest.approx(-side / 2)


def test_cluster_size_matches_brute_force():
    for n0 in range(5, 60):
        for n in (100, 300, 500, 317):
            best = min(range(1, n + 1), key=lambda n1: (abs(n0 * n1 - n), n1))
            assert cluster_size(n0, n) == best
    cfg = ModelConfig("thomas", 10, 0.15, 1.0, 300)
    assert (cfg.n_clusters, cfg.cluster_size) == (45, 7)


def test_config_validation():
    with pytest.raises(ConfigError):
        ModelConfig("thomas", 10, 0.04, 1.0, 100)  # 4 clusters
    with pytest.raises(ConfigError):
        ModelConfig("matern", 10, 0.02, 1.0, 200)
    with pytest.raises(ConfigError):
        ModelConfig("strauss", 10, 1.2, 1.0, 100)
    with pytest.raises(ConfigError):
        ModelConfig("strauss", 10, 0.5, 0.0, 100)
    with pytest.raises(ConfigError):
        ModelConfig("poisson", 10, 0.5, 1.0, 100)
    ModelConfig("linecluster", 0, 0.0, 1.0, 100)


@pytest.mark.parametrize("cfg", [
    ModelConfig("strauss", 5, 0.4, 0.7, 100),
    ModelConfig("thomas", 10, 0.15, 0.7, 100),
    ModelConfig("linecluster", 1, 0.4, 0.7, 100),
    ModelConfig("matern", 10, 0.15, 0.7, 100),
])
def test_reproducible_and_inside_window(cfg):
    w = study_window(cfg.n)
    a = simulate(cfg, w, RngStream(3))
    b = simulate(cfg, w, RngStream(3))
    c = simulate(cfg, w, RngStream(4))
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points) or a.n != c.n
    assert w.contains(a.points).all()


@pytest.mark.parametrize("family, R, gamma", [("strauss", 5, 0.4), ("thomas", 10, 0.15)])
def test_unit_compression_matches_isotropic_path(family, R, gamma):
    cfg = ModelConfig(family, R, gamma, 1.0, 100)
    p = simulate(cfg, rng=RngStream(8))
    q = simulate(cfg, rng=RngStream(8))
    np.testing.assert_array_equal(apply_compression(p.points, 1.0), q.points)


def test_strauss_exact_count_and_hard_core():
    cfg = ModelConfig("strauss", 10, 0.0, 0.7, 300)
    pat = simulate_strauss(cfg, study_window(300), RngStream(1))
    assert pat.n == 300
    pre = inverse_compression(pat.points, 0.7)
    assert pdist(pre).min() >= 10


def test_strauss_infeasible_hard_core():
    cfg = ModelConfig("strauss", 30, 0.0, 1.0, 100)
    with pytest.raises(SimulationError):
        simulate_strauss(cfg, Window(0, 100, 0, 100), RngStream(0))


def test_strauss_gamma_one_is_binomial():
    w = Window(0, 100, 0, 100)
    cfg = ModelConfig("strauss", 10, 1.0, 1.0, 30)
    s = [close_pairs(simulate_strauss(cfg, w, RngStream(2, (r,))).points, 10) for r in range(500)]
    gen = RngStream(3).generator()
    b = [close_pairs(gen.uniform(0, 100, (30, 2)), 10) for _ in range(5000)]
    se = np.sqrt(np.var(s) / len(s) + np.var(b) / len(b))
    assert abs(np.mean(s) - np.mean(b)) <= 3 * se


def test_strauss_inhibition_reduces_close_pairs():
    w = Window(0, 100, 0, 100)
    cfg = ModelConfig("strauss", 10, 0.2, 1.0, 30)
    s = np.mean([close_pairs(simulate_strauss(cfg, w, RngStream(2, (r,))).points, 10)
                 for r in range(50)])
    gen = RngStream(3).generator()
    b = np.mean([close_pairs(gen.uniform(0, 100, (30, 2)), 10) for _ in range(500)])
    assert s < 0.6 * b


def test_thomas_single_point_clusters():
    cfg = ModelConfig("thomas", 10, 1.0, 1.0, 100)
    assert cfg.cluster_size == 1
    real = thomas_clusters(cfg, study_window(100), RngStream(0))
    assert len(real.offspring) == len(real.centers)


def test_thomas_containment():
    cfg = ModelConfig("thomas", 10, 0.15, 1.0, 1000)
    d = []
    r = 0
    while sum(map(len, d)) < 100_000:
        real = thomas_clusters(cfg, study_window(1000), RngStream(5, (r,)))
        d.append(np.hypot(*(real.offspring - real.centers[real.parent]).T))
        r += 1
    assert np.mean(np.concatenate(d) <= 10) == pytest.approx(0.94, abs=0.01)


def test_thomas_parent_count_uses_dilated_window():
    cfg = ModelConfig("thomas", 10, 0.15, 0.7, 300)
    w = study_window(300)
    real = thomas_clusters(cfg, w, RngStream(0))
    sigma = 10 / np.sqrt(-2 * np.log(0.06))
    assert len(real.centers) > 45
    pre = Window(w.x_min * 0.7, w.x_max * 0.7, w.y_min / 0.7, w.y_max / 0.7)
    assert len(real.centers) == int(np.floor(45 * pre.dilated_area(sigma) / pre.area))


@pytest.mark.parametrize("cfg", [ModelConfig("thomas", 10, 0.15, 1.0, 300),
                                 ModelConfig("matern", 10, 0.15, 1.0, 300),
                                 ModelConfig("matern", 20, 0.05, 0.7, 300)])
def test_cluster_counts_near_target(cfg):
    w = study_window(cfg.n)
    counts = [simulate(cfg, w, RngStream(9, (r,))).n for r in range(200)]
    assert np.mean(counts) == pytest.approx(cfg.n, rel=0.05)
    assert np.mean(counts) / w.area == pytest.approx(0.005, rel=0.05)


def test_matern_disk_clusters():
    cfg = ModelConfig("matern", 10, 0.15, 1.0, 300, tau=1.0)
    real = matern_clusters(cfg, study_window(300), RngStream(1))
    assert np.hypot(*(real.offspring - real.centers[real.parent]).T).max() <= 10


def test_matern_offspring_inside_ellipse():
    cfg = ModelConfig("matern", 10, 0.15, 0.7, 300)
    real = matern_clusters(cfg, study_window(300), RngStream(1))
    d = real.offspring - real.centers[real.parent]
    o = real.orientation[real.parent]
    u = d[:, 0] * np.cos(o) + d[:, 1] * np.sin(o)
    v = -d[:, 0] * np.sin(o) + d[:, 1] * np.cos(o)
    assert np.max((u / 10) ** 2 + (v / 4) ** 2) <= 1 + 1e-12


def test_matern_orientations():
    iso = ModelConfig("matern", 10, 0.15, 1.0, 300)
    o = np.concatenate([matern_clusters(iso, study_window(300), RngStream(2, (r,))).orientation
                        for r in range(500)])
    assert abs(np.mean(np.exp(2j * o))) < 0.1
    aniso = ModelConfig("matern", 10, 0.15, 0.7, 300)
    o = np.concatenate([matern_clusters(aniso, study_window(300), RngStream(3, (r,))).orientation
                        for r in range(12)])
    assert len(o) >= 500
    assert abs(np.angle(np.mean(np.exp(1j * (o - np.pi / 3))))) < 0.1


def distance_to_lines(pts, lines):
    n = np.column_stack([-np.sin(lines.theta), np.cos(lines.theta)])
    return np.min(np.abs((pts - lines.center) @ n.T - lines.p), axis=1)


def test_line_cluster_threshold_and_exact_count():
    w = study_window(300)
    L = w.width
    cfg = ModelConfig("linecluster", 0.0, 0.0, 1.0, 300)
    lines = line_system(cfg, w, RngStream(4))
    assert lines.threshold == pytest.approx(1224.74487, abs=1e-4)
    assert lines.threshold <= lines.window_length < lines.threshold + 2 * L / np.sqrt(2)
    start, end = clip_lines(lines.p, lines.theta, lines.center, w)
    assert np.hypot(*(end - start).T).sum() == pytest.approx(lines.window_length)
    pat = simulate_line_cluster(cfg, w, RngStream(5), lines=lines)
    assert pat.n == 300
    assert distance_to_lines(pat.points, lines).max() < 1e-9 * L


def test_line_cluster_displacement_is_orthogonal_gaussian():
    w = study_window(300)
    cfg = ModelConfig("linecluster", 1.0, 0.4, 1.0, 3000)
    lines = line_system(cfg, w, RngStream(6))
    pat = simulate_line_cluster(cfg, w, RngStream(7), lines=lines)
    d = distance_to_lines(pat.points, lines)
    # distance to the nearest line is at most the orthogonal displacement
    assert np.quantile(d, 0.5) <= 0.6745 * 1.0 * 1.05
    assert d.max() < 6.0


def test_clip_lines_against_known_chords():
    w = Window(-1, 1, -1, 1)
    a, b = clip_lines(np.array([0.0, 0.5, 2.0]), np.array([0.0, np.pi / 2, 0.3]), np.zeros(2), w)
    lengths = np.hypot(*(b - a).T)
    np.testing.assert_allclose(lengths, [2.0, 2.0, 0.0], atol=1e-12)


def test_point_pattern_marks_length():
    with pytest.raises(ValueError):
        PointPattern(np.zeros((3, 2)), Window(0, 1, 0, 1), marks=["a"])
