import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from fryrot.errors import ConfigError
from fryrot.estimators import CurveStatistic
from fryrot.fry import fry_points, resample
from fryrot.geometry import Window
from fryrot.mctest import (SectorContrast, TestConfig, WongChiu, erl_order,
                           integral_extremeness, isotropy_test, isotropy_test_fry, mc_p_value,
                           score_curves)
from fryrot.models import ModelConfig, PointPattern, apply_compression, simulate, study_window
from fryrot.sampling import RngStream


def brute_erl(curves, sidedness):
    """Extreme rank length positions by direct counting on tuples."""
    m = len(curves)
    k = len(curves[0])
    rank_vectors = []
    for i in range(m):
        ranks = []
        for j in range(k):
            above = sum(curves[o][j] > curves[i][j] for o in range(m))
            below = sum(curves[o][j] < curves[i][j] for o in range(m))
            ranks.append(1 + above if sidedness == "one" else 1 + min(above, below))
        rank_vectors.append(tuple(sorted(ranks)))
    return [1 + sum(other < mine for other in rank_vectors) for mine in rank_vectors]


def test_erl_hand_example():
    curves = np.array([[5, 0], [1, 1], [0, 5]], float)
    assert list(erl_order(curves, "two")) == [1, 3, 1]
    assert brute_erl(curves.tolist(), "two") == [1, 3, 1]


def test_erl_identical_and_dominating():
    assert set(erl_order(np.ones((5, 4)), "two")) == {1}
    rng = np.random.default_rng(0)
    curves = rng.uniform(-1, 1, (6, 10))
    curves[3] = 5 * np.sign(rng.uniform(-1, 1, 10))
    pos = erl_order(curves, "two")
    assert pos[3] == 1 and np.sum(pos == 1) == 1


def small_instances(limit=6561):
    """Every instance with at most 6 curves, 4 grid points and alphabet of at
    most 3 symbols whose enumeration has at most ``limit`` members."""
    for m in range(1, 7):
        for k in range(1, 5):
            for a in (1, 2, 3):
                if a ** (m * k) > limit:
                    continue
                for flat in itertools.product(range(a), repeat=m * k):
                    yield np.array(flat, float).reshape(m, k)


@pytest.mark.parametrize("sidedness", ["one", "two"])
def test_erl_exhaustive_small(sidedness):
    count = 0
    for curves in small_instances():
        assert list(erl_order(curves, sidedness)) == brute_erl(curves.tolist(), sidedness)
        count += 1
    assert count > 30_000


@settings(max_examples=1500, deadline=None)
@given(m=st.integers(1, 6), k=st.integers(1, 4), a=st.integers(1, 3), data=st.data(),
       sidedness=st.sampled_from(["one", "two"]))
def test_erl_matches_brute_force(m, k, a, data, sidedness):
    flat = data.draw(st.lists(st.integers(0, a - 1), min_size=m * k, max_size=m * k))
    curves = np.array(flat, float).reshape(m, k)
    assert list(erl_order(curves, sidedness)) == brute_erl(curves.tolist(), sidedness)


def test_erl_grid_mismatch():
    a = CurveStatistic([1.0, 2.0], [0.0, 1.0])
    b = CurveStatistic([1.0, 3.0], [0.0, 1.0])
    with pytest.raises(ValueError):
        erl_order([a, b])


def test_integral_examples():
    grid = np.linspace(0.005, 1, 200)
    assert integral_extremeness(np.full(200, -2.0), grid) == pytest.approx(2 * 0.995, rel=1e-14)
    assert integral_extremeness(grid, grid) == pytest.approx((1 - 0.005**2) / 2, rel=1e-14)
    with pytest.raises(ValueError):
        integral_extremeness([1.0], [1.0])


def test_integral_refinement_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        grid = np.sort(rng.uniform(0, 5, 30))
        vals = rng.normal(size=30)
        fine = np.interp(np.linspace(grid[0], grid[-1], 10 * 29 + 1), grid, grid)
        fine = np.union1d(fine, grid)
        absinterp = np.interp(fine, grid, np.abs(vals))
        ref = np.sum((absinterp[1:] + absinterp[:-1]) / 2 * np.diff(fine))
        assert integral_extremeness(vals, grid) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_integral_skips_missing():
    grid = np.array([1.0, 2.0, 3.0])
    assert integral_extremeness([1.0, np.nan, 1.0], grid) == pytest.approx(2.0)


@pytest.mark.parametrize("hits, ordering, expected", [
    (0, "integral", 0.01), (4, "integral", 0.05), (99, "integral", 1.0),
    (0, "erl", 0.01), (4, "erl", 0.05), (99, "erl", 1.0),
])
def test_p_value_examples(hits, ordering, expected):
    if ordering == "integral":
        boot = np.r_[np.full(hits, 2.0), np.full(99 - hits, 0.5)]
    else:
        boot = np.r_[np.full(hits, 1), np.full(99 - hits, 50)]
    obs = 1.0 if ordering == "integral" else 3
    assert mc_p_value(obs, boot, ordering) == pytest.approx(expected)


@settings(max_examples=100)
@given(seed=st.integers(0, 10_000), c=st.sampled_from([2.0**-3, 2.0, 1024.0]),
       ordering=st.sampled_from(["integral", "erl"]))
def test_p_value_scale_invariant(seed, c, ordering):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(20, 15))
    grid = np.linspace(0.1, 1.5, 15)
    s1, _ = score_curves(matrix, grid, ordering, "two")
    s2, _ = score_curves(c * matrix, grid, ordering, "two")
    assert mc_p_value(s1[0], s1[1:], ordering) == mc_p_value(s2[0], s2[1:], ordering)


@settings(max_examples=100)
@given(seed=st.integers(0, 10_000))
def test_integral_permutation_equivariant(seed):
    rng = np.random.default_rng(seed)
    matrix = rng.normal(size=(30, 12))
    grid = np.linspace(0.1, 1.2, 12)
    perm = np.r_[0, 1 + rng.permutation(29)]
    s, _ = score_curves(matrix, grid, "integral", "two")
    sp, _ = score_curves(matrix[perm], grid, "integral", "two")
    np.testing.assert_array_equal(sp, s[perm])
    assert mc_p_value(s[0], s[1:], "integral") == mc_p_value(sp[0], sp[1:], "integral")


def test_config_validation():
    with pytest.raises(ConfigError):
        TestConfig(M=9)  # 1/(M+1) > 0.05
    with pytest.raises(ConfigError):
        TestConfig(ordering="median")
    with pytest.raises(ConfigError):
        TestConfig(r_max=0)
    with pytest.raises(ConfigError):
        TestConfig(k=1)
    assert TestConfig(M=19, alpha=0.05).M == 19


def poisson(n, seed, window):
    g = RngStream(seed).generator()
    return PointPattern(np.column_stack([g.uniform(window.x_min, window.x_max, n),
                                         g.uniform(window.y_min, window.y_max, n)]), window)


def test_determinism_and_worker_independence():
    w = study_window(100)
    pat = poisson(100, 1, w)
    cfg = TestConfig(SectorContrast(), "erl", "groupwise", 49, 13.0, 50, seed=7)
    a = isotropy_test(pat, cfg)
    b = isotropy_test(pat, cfg)
    c = isotropy_test(pat, cfg, workers=3)
    assert a.to_csv() == b.to_csv() == c.to_csv()
    np.testing.assert_array_equal(a.bootstrap_scores, c.bootstrap_scores)


def test_p_value_lattice_and_csv():
    w = study_window(100)
    res = isotropy_test(poisson(100, 2, w), TestConfig(r_max=13.0, M=99, k=40))
    assert res.p_value in {j / 100 for j in range(1, 101)}
    header, row = res.to_csv().splitlines()
    assert header == "p_value,ordering,scheme,statistic,r_max,M,seed,warnings"
    assert row.startswith(repr(res.p_value) + ",integral,groupwise,sector_contrast,13.0,99,0,")


def test_wong_chiu_test_runs_one_sided():
    w = study_window(100)
    cfg = TestConfig(WongChiu(), "erl", "individual", 19, 13.0, 20, alpha=0.05)
    res = isotropy_test(poisson(100, 3, w), cfg)
    assert 0 < res.p_value <= 1


def test_exchangeable_null_is_uniform():
    # observed = a group-wise rotation of a base Fry set, hence exchangeable
    # with its own group-wise rotations
    w = study_window(100)
    cfg = TestConfig(r_max=13.0, M=19, k=40)
    u = []
    for s in range(200):
        base = fry_points(poisson(100, 1000 + s, w), r_max=cfg.r_max)
        observed = resample(base, "groupwise", RngStream(s, (0,)))
        p = isotropy_test_fry(observed, cfg, RngStream(s, (1,))).p_value
        u.append(p - RngStream(s, (2,)).generator().random() / (cfg.M + 1))
    assert stats.kstest(u, "uniform").pvalue > 0.01


@pytest.mark.slow
def test_strong_anisotropy_is_detected():
    cfg = ModelConfig("strauss", 10, 0.0, 0.5, 300)
    tc = TestConfig(r_max=13.0)
    rejected = sum(isotropy_test(simulate(cfg, rng=RngStream(4, (r,))), tc,
                                 RngStream(5, (r,))).p_value <= 0.05 for r in range(100))
    assert rejected >= 90


@pytest.mark.slow
def test_compressed_poisson_stays_isotropic():
    # area-preserving compression maps a Poisson process onto a Poisson process
    w = study_window(300)
    pre = Window(w.x_min * 0.5, w.x_max * 0.5, w.y_min / 0.5, w.y_max / 0.5)
    tc = TestConfig(r_max=13.0)
    rejected = 0
    for r in range(100):
        pts = apply_compression(poisson(300, 2000 + r, pre).points, 0.5)
        pat = PointPattern(pts[w.contains(pts)], w)
        rejected += isotropy_test(pat, tc, RngStream(6, (r,))).p_value <= 0.05
    assert rejected <= 15
