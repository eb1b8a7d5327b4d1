"""Command line interface.

Subcommands: ``simulate``, ``fry``, ``test``, ``power`` and ``battery``.
Exit status is 0 on success, 2 for configuration errors and 3 for data
errors.
"""
from __future__ import annotations

import argparse
import itertools
import logging
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .errors import ConfigError, DataError, SimulationError
from .fry import fry_points
from .io import read_pattern, write_fry, write_pattern
from .mctest import SectorContrast, TestConfig, WongChiu, isotropy_test
from .models import ModelConfig, simulate, study_window
from .sampling import RngStream
from .study import (AMACRINE_R_MAX, StudyConfig, battery_csv, grid_cells, power_table_csv,
                    run_power_study, run_real_data_battery)

EXIT_CONFIG = 2
EXIT_DATA = 3


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _model_from(d: dict) -> dict:
    extras = {}
    for key, kind in (("p", float), ("mu", "angle"), ("kappa_max", float), ("tau", float)):
        v = cfgmod.get(d, f"model.{key}", kind)
        if v is not None:
            extras[key] = v
    return extras


def study_from_config(d: dict, seed: int | None, threads: int | None) -> StudyConfig:
    extras = _model_from(d)
    table = cfgmod.get_list(d, "study.families", str)
    if table:
        cells = grid_cells(families=table,
                             a_values=cfgmod.get_list(d, "model.a", float, [1.0, 0.7]),
                             n_values=cfgmod.get_list(d, "model.n", int, [100, 300, 500]))
        cells = [ModelConfig(c.family, c.R, c.gamma, c.a, c.n, **extras) for c in cells]
    else:
        need = ("model.family", "model.R", "model.gamma", "model.a", "model.n")
        missing = [k for k in need if k not in d]
        if missing:
            raise ConfigError(f"missing config keys: {', '.join(missing)}")
        cells = [ModelConfig(f, R, g, a, n, **extras) for f, R, g, a, n in itertools.product(
            cfgmod.get_list(d, "model.family"), cfgmod.get_list(d, "model.R", float),
            cfgmod.get_list(d, "model.gamma", float), cfgmod.get_list(d, "model.a", float),
            cfgmod.get_list(d, "model.n", int))]
    return StudyConfig(
        cells=cells,
        replicates=cfgmod.get(d, "study.replicates", int, 100),
        schemes=tuple(cfgmod.get_list(d, "test.scheme", str, ["groupwise"])),
        orderings=tuple(cfgmod.get_list(d, "test.ordering", str, ["integral"])),
        M=cfgmod.get(d, "test.M", int, 99),
        k=cfgmod.get(d, "test.k", int, 200),
        eps=cfgmod.get(d, "test.eps", "angle", np.pi / 4),
        alpha=cfgmod.get(d, "test.alpha", float, 0.05),
        r_max=cfgmod.get(d, "test.r_max", float),
        seed=seed if seed is not None else cfgmod.get(d, "seed", int, 0),
        threads=threads if threads is not None else cfgmod.get(d, "threads", int, 1),
    )


def test_config_from(d: dict, args) -> TestConfig:
    def pick(flag, key, kind, default):
        v = getattr(args, flag, None)
        return v if v is not None else cfgmod.get(d, key, kind, default)

    statistic = pick("statistic", "test.statistic", str, "sector_contrast")
    if statistic == "sector_contrast":
        stat = SectorContrast(pick("alpha1", "test.alpha1", "angle", 0.0),
                              pick("alpha2", "test.alpha2", "angle", np.pi / 2),
                              pick("eps", "test.eps", "angle", np.pi / 4))
    elif statistic == "wong_chiu":
        stat = WongChiu()
    else:
        raise ConfigError(f"unknown statistic {statistic!r}")
    r_max = pick("r_max", "test.r_max", float, None)
    if r_max is None:
        raise ConfigError("r_max is required (--r-max or test.r_max)")
    seed = args.seed if args.seed is not None else cfgmod.get(d, "seed", int, 0)
    return TestConfig(stat, pick("ordering", "test.ordering", str, "integral"),
                      pick("scheme", "test.scheme", str, "groupwise"),
                      pick("M", "test.M", int, 99), r_max, pick("k", "test.k", int, 200),
                      seed, pick("alpha", "test.alpha", float, 0.05))


def _angle_arg(text: str) -> float:
    try:
        return cfgmod._angle(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad angle {text!r}") from exc


def cmd_simulate(args) -> None:
    d = cfgmod.load_config(args.config) if args.config else {}
    fields = {}
    for key, kind in (("family", str), ("R", float), ("gamma", float), ("a", float), ("n", int)):
        v = getattr(args, key)
        fields[key] = v if v is not None else cfgmod.get(d, f"model.{key}", kind)
    missing = [k for k, v in fields.items() if v is None]
    if missing:
        raise ConfigError(f"missing model parameters: {', '.join(missing)}")
    model = ModelConfig(**fields, **_model_from(d))
    seed = args.seed if args.seed is not None else cfgmod.get(d, "seed", int, 0)
    pattern = simulate(model, study_window(model.n), RngStream(seed))
    write_pattern(pattern, args.out or "/dev/stdout")


def cmd_fry(args) -> None:
    pattern = read_pattern(args.pattern)
    write_fry(fry_points(pattern, r_max=args.r_max), args.out or "/dev/stdout")


def cmd_test(args) -> None:
    d = cfgmod.load_config(args.config) if args.config else {}
    cfg = test_config_from(d, args)
    pattern = read_pattern(args.pattern)
    res = isotropy_test(pattern, cfg, workers=args.threads or 1)
    _emit(res.to_csv(), args.out)


def cmd_power(args) -> None:
    d = cfgmod.load_config(args.config)
    study = study_from_config(d, args.seed, args.threads)
    _emit(power_table_csv(run_power_study(study)), args.out)


def cmd_battery(args) -> None:
    d = cfgmod.load_config(args.config) if args.config else {}
    pattern = read_pattern(args.pattern)
    rows = run_real_data_battery(
        pattern,
        subsets=tuple(args.subsets or cfgmod.get_list(d, "battery.subsets", str, ["all", "on", "off"])),
        r_max_values=tuple(args.r_max or cfgmod.get_list(d, "battery.r_max", float, list(AMACRINE_R_MAX))),
        M_values=tuple(args.M or cfgmod.get_list(d, "battery.M", int, [99, 499])),
        orderings=tuple(cfgmod.get_list(d, "test.ordering", str, ["integral", "erl"])),
        repeats=args.repeats or cfgmod.get(d, "battery.repeats", int, 1000),
        seed=args.seed if args.seed is not None else cfgmod.get(d, "seed", int, 0),
        threads=args.threads or cfgmod.get(d, "threads", int, 1),
    )
    _emit(battery_csv(rows), args.out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="master seed (default 0)")
    common.add_argument("--threads", type=int, help="number of workers")
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--out", help="output path (default stdout)")

    p = argparse.ArgumentParser(prog="fryrot", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", parents=[common], help="simulate a model pattern")
    s.add_argument("--family", choices=("strauss", "thomas", "linecluster", "matern"))
    s.add_argument("--R", type=float)
    s.add_argument("--gamma", type=float)
    s.add_argument("--a", type=float)
    s.add_argument("--n", type=int)
    s.set_defaults(func=cmd_simulate)

    f = sub.add_parser("fry", parents=[common], help="dump Fry points of a pattern")
    f.add_argument("pattern")
    f.add_argument("--r-max", dest="r_max", type=float)
    f.set_defaults(func=cmd_fry)

    t = sub.add_parser("test", parents=[common], help="run one isotropy test")
    t.add_argument("pattern")
    t.add_argument("--statistic", choices=("sector_contrast", "wong_chiu"))
    t.add_argument("--ordering", choices=("integral", "erl"))
    t.add_argument("--scheme", choices=("individual", "pairwise", "groupwise"))
    t.add_argument("--M", type=int)
    t.add_argument("--k", type=int)
    t.add_argument("--r-max", dest="r_max", type=float)
    t.add_argument("--alpha1", type=_angle_arg, help="radians, or e.g. 60deg, pi/3")
    t.add_argument("--alpha2", type=_angle_arg)
    t.add_argument("--eps", type=_angle_arg)
    t.add_argument("--alpha", type=float, help="significance level")
    t.set_defaults(func=cmd_test)

    w = sub.add_parser("power", parents=[common], help="power study from a config file")
    w.set_defaults(func=cmd_power)

    b = sub.add_parser("battery", parents=[common], help="repeated tests on a marked pattern")
    b.add_argument("pattern")
    b.add_argument("--subsets", type=lambda s: s.split(","))
    b.add_argument("--M", type=lambda s: [int(v) for v in s.split(",")])
    b.add_argument("--r-max", dest="r_max", type=lambda s: [float(v) for v in s.split(",")])
    b.add_argument("--repeats", type=int)
    b.set_defaults(func=cmd_battery)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "power" and not args.config:
        print("fryrot: error: power needs --config", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args.func(args)
    except ConfigError as exc:
        print(f"fryrot: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, SimulationError) as exc:
        print(f"fryrot: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
