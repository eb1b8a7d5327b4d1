"""Null calibration of the rotation test.

Draws Poisson patterns in the default study window, makes the observed Fry points a
random rotation of themselves (so observed and bootstrap statistics are
exchangeable) and reports the empirical distribution of the p-values.

    python3 scripts/null_calibration.py --runs 500 --ordering erl
"""
import argparse

import numpy as np
from scipy import stats

from fryrot.fry import fry_points, resample
from fryrot.mctest import SectorContrast, TestConfig, isotropy_test_fry
from fryrot.models import PointPattern, study_window
from fryrot.sampling import RngStream


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--runs", type=int, default=500)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--M", type=int, default=99)
    p.add_argument("--r-max", dest="r_max", type=float, default=13.0)
    p.add_argument("--scheme", default="groupwise")
    p.add_argument("--ordering", default="integral")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    w = study_window(args.n)
    cfg = TestConfig(SectorContrast(), args.ordering, args.scheme, args.M, args.r_max,
                     seed=args.seed)
    root = RngStream(args.seed)
    ps = []
    for run in range(args.runs):
        g = root.child(run, 0).generator()
        pts = np.column_stack([g.uniform(w.x_min, w.x_max, args.n),
                               g.uniform(w.y_min, w.y_max, args.n)])
        base = fry_points(PointPattern(pts, w), r_max=args.r_max)
        observed = resample(base, cfg.scheme, root.child(run, 1))
        ps.append(isotropy_test_fry(observed, cfg, root.child(run, 2)).p_value)
    ps = np.array(ps)
    u = ps - root.child(args.runs).generator().random(len(ps)) / (args.M + 1)
    print(f"runs={args.runs} KS p={stats.kstest(u, 'uniform').pvalue:.3f}")
    for a in (0.01, 0.05, 0.1):
        print(f"P(p <= {a}) = {np.mean(ps <= a + 1e-12):.3f}")


if __name__ == "__main__":
    main()
