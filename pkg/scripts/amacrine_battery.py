"""Repeated isotropy tests on the amacrine cells data.

The data are not shipped. Supply a CSV with header ``x,y,mark`` (marks
``on``/``off``) and a window comment, e.g.::

    # window 0 1.6012085 0 1
    x,y,mark
    0.0224,0.0243,on
    ...

then run::

    python3 scripts/amacrine_battery.py amacrine.csv --repeats 100 --threads 4

The output has one row per subset, ordering, M and r_max with the mean and
standard deviation of the p-values over the repeats.
"""
import argparse
import sys

from fryrot.config import get, get_list, load_config
from fryrot.io import read_pattern
from fryrot.study import AMACRINE_R_MAX, battery_csv, run_real_data_battery


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("pattern")
    p.add_argument("--config", default=None)
    p.add_argument("--repeats", type=int)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    args = p.parse_args(argv)

    d = load_config(args.config) if args.config else {}
    pattern = read_pattern(args.pattern)
    rows = run_real_data_battery(
        pattern,
        subsets=tuple(get_list(d, "battery.subsets", str, ["all", "on", "off"])),
        r_max_values=tuple(get_list(d, "battery.r_max", float, list(AMACRINE_R_MAX))),
        M_values=tuple(get_list(d, "battery.M", int, [99, 499])),
        orderings=tuple(get_list(d, "test.ordering", str, ["integral", "erl"])),
        repeats=args.repeats or get(d, "battery.repeats", int, 1000),
        seed=args.seed if args.seed is not None else get(d, "seed", int, 0),
        threads=args.threads,
    )
    text = battery_csv(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


if __name__ == "__main__":
    main()
